"""Fixed-effects OLS, 2SLS with pressure instruments, and generated-regressor
inference for the lifter-round panel.

Design matrices are built by explicit dummy encoding (one reference level
dropped per fixed-effect key) so fitted values remain intercept-complete for
the counterfactual module. Collinear columns are pruned deterministically by
QR pivot order and reported. Standard errors are cluster-robust (CR1) at the
federation level throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateReplicate,
    EmptyInput,
    FeatureLeakage,
    RankDeficient,
    SchemaMismatch,
    SingularNormalEquations,
    TooFewClusters,
    TooFewRows,
    UnderIdentified,
    WeakInstrumentWarning,
)


@dataclass(slots=True)
class ObservationRow:
    """One lifter-round observation.

    ``attempt_gap`` is the declared weight minus the resolved personal best;
    ``prev_best`` is the within-competition best through the previous round
    (the base of both pressure gaps). Pressure fields are None when the
    corresponding adjacent rival does not exist or their declaration was not
    observable at the lifter's own declaration.
    """

    meet_id: str
    federation: str
    equipment: str
    age_class: str
    division: str
    weight_class: str
    lifter_id: str
    round: int
    male: int
    bodyweight: float
    age: int
    num_experience: int
    first_participation: int
    current_best: float
    prev_best: float
    attempt_weight: float
    attempt_gap: float
    success: int
    pressure_lower: float | None
    pressure_higher: float | None
    turned_around: int
    turning_around: int
    tie_indicator: int
    order_mismatch: int
    prev_attempt_weight: float
    prev_success: int
    rivalry_lower: float = 0.0
    rivalry_higher: float = 0.0
    lower_rival_id: str | None = None
    higher_rival_id: str | None = None


FE_KEYS = ("equipment", "age_class", "division", "weight_class", "federation")
BASE_COVARIATES = (
    "male",
    "bodyweight",
    "num_experience",
    "first_participation",
    "tie_indicator",
    "order_mismatch",
)
PRESSURE_COLUMNS = ("pressure_lower", "pressure_higher")
LIFTING_COLUMNS = ("turned_around", "turning_around")

FORMULAS = ("attempt_eq1", "success_lpm", "first_stage")
MODERATORS = ("gender", "num_experience", "rivalry")

_RANK_TOL = 1e-9


def _moderator_values(rows, moderator, side):
    if moderator == "gender":
        male = np.array([r.male for r in rows], dtype=float)
        return {"female": 1.0 - male, "male": male}
    if moderator == "num_experience":
        return {"num_experience": np.array([r.num_experience for r in rows], dtype=float)}
    if moderator == "rivalry":
        attr = "rivalry_lower" if side == "lower" else "rivalry_higher"
        return {"rivalry": np.array([getattr(r, attr) for r in rows], dtype=float)}
    raise ValueError(f"moderator must be one of {MODERATORS}, got {moderator!r}")


def _raw_column(rows, name):
    if name == "intercept":
        return np.ones(len(rows))
    return np.array([getattr(r, name) for r in rows], dtype=float)


def _fe_columns(rows, fit_levels=None):
    """Dummy columns for each fixed-effect key, reference level dropped.

    ``fit_levels`` replays the level sets of a fitted design so that new rows
    are encoded into the same columns (unseen levels fall to the reference).
    """
    cols, names = [], []
    levels_out = {}
    for key in FE_KEYS:
        values = [getattr(r, key) for r in rows]
        if fit_levels is not None:
            keep = fit_levels[key]
        else:
            keep = sorted(set(values))[1:]
        levels_out[key] = keep
        for lvl in keep:
            names.append(f"{key}={lvl}")
            cols.append(np.array([1.0 if v == lvl else 0.0 for v in values]))
    return names, cols, levels_out


def _pressure_block(rows, base_names, moderator):
    names, cols = [], []
    for base in base_names:
        side = "lower" if base.endswith("lower") or base == "turned_around" else "higher"
        main = _raw_column(rows, base)
        if moderator is None:
            names.append(base)
            cols.append(main)
            continue
        mods = _moderator_values(rows, moderator, side)
        if moderator != "gender":
            # continuous moderator: keep the main effect alongside the interaction
            names.append(base)
            cols.append(main)
        for label, vals in mods.items():
            names.append(f"{base}:{label}")
            cols.append(main * vals)
    return names, cols


@dataclass
class Design:
    """Pruned full-rank design with aligned response, clusters and rows."""

    X: np.ndarray
    y: np.ndarray
    names: list
    clusters: np.ndarray
    rows: list
    dropped: list
    formula: str
    round: int
    moderator: str | None
    fe_levels: dict
    instruments: np.ndarray | None = None
    instrument_names: list = field(default_factory=list)
    endogenous: list = field(default_factory=list)


def _usable(row, formula, rnd):
    if row.round != rnd:
        return False
    if row.pressure_lower is None or row.pressure_higher is None:
        return False
    return True


def build_design(rows, formula, rnd, moderator=None, with_instruments=False):
    """Assemble the design matrix and response for one regression.

    ``attempt_eq1``/``first_stage`` regress the attempt gap on covariates and
    the attempt-stage pressures; ``success_lpm`` regresses the success
    indicator on covariates, the lifting-stage indicators, and the attempt
    gap (with the attempt pressures available as excluded instruments).
    ``moderator`` interacts the pressure block per the heterogeneity tables.
    Rows missing an adjacent rival are dropped; collinear columns are pruned
    by QR pivot order and reported in ``dropped``.
    """
    if formula not in FORMULAS:
        raise ValueError(f"formula must be one of {FORMULAS}, got {formula!r}")
    kept = [r for r in rows if _usable(r, formula, rnd)]
    if not kept:
        raise EmptyInput(f"no usable rows for {formula} at round {rnd}")
    names = ["intercept"]
    cols = [np.ones(len(kept))]
    for name in BASE_COVARIATES:
        names.append(name)
        cols.append(_raw_column(kept, name))
    endogenous = []
    if formula in ("attempt_eq1", "first_stage"):
        pnames, pcols = _pressure_block(kept, PRESSURE_COLUMNS, moderator)
        names += pnames
        cols += pcols
        y = _raw_column(kept, "attempt_gap")
    else:
        pnames, pcols = _pressure_block(kept, LIFTING_COLUMNS, moderator)
        names += pnames
        cols += pcols
        names.append("attempt_gap")
        cols.append(_raw_column(kept, "attempt_gap"))
        endogenous = ["attempt_gap"]
        y = _raw_column(kept, "success")
    fe_names, fe_cols, fe_levels = _fe_columns(kept)
    names += fe_names
    cols += fe_cols
    X = np.column_stack(cols)
    if float(np.ptp(y)) == 0.0:
        raise RankDeficient("response is constant")
    X, names, dropped = _prune_collinear(X, names)
    clusters = _cluster_codes(kept)
    design = Design(
        X=X,
        y=y,
        names=names,
        clusters=clusters,
        rows=kept,
        dropped=dropped,
        formula=formula,
        round=rnd,
        moderator=moderator,
        fe_levels=fe_levels,
    )
    if with_instruments:
        design.instruments = np.column_stack(
            [_raw_column(kept, c) for c in PRESSURE_COLUMNS]
        )
        design.instrument_names = list(PRESSURE_COLUMNS)
        design.endogenous = endogenous
    return design


def _prune_collinear(X, names):
    q, r, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag[0] * max(X.shape) * np.finfo(float).eps if diag.size else 0.0
    tol = max(tol, _RANK_TOL * (diag[0] if diag.size else 1.0))
    rank = int(np.sum(diag > tol))
    if rank == 0:
        raise RankDeficient("design has rank zero")
    keep = sorted(piv[:rank])
    dropped = [names[j] for j in sorted(piv[rank:])]
    return X[:, keep], [names[j] for j in keep], dropped


def _cluster_codes(rows):
    labels = [r.federation for r in rows]
    _, codes = np.unique(labels, return_inverse=True)
    return codes


@dataclass
class EstimateResult:
    """Coefficients with cluster-robust standard errors and fit statistics."""

    names: list
    coef: np.ndarray
    se: np.ndarray
    n_obs: int
    n_clusters: int
    r2: float
    r2_adj: float
    rmse: float
    dropped: list
    formula: str = ""
    round: int = 0
    moderator: str | None = None
    fe_levels: dict = field(default_factory=dict)
    first_stage: "EstimateResult | None" = None
    first_stage_f: float | None = None

    def coef_of(self, name):
        return float(self.coef[self.names.index(name)])

    def se_of(self, name):
        return float(self.se[self.names.index(name)])

    def conf_int(self, name, level=0.95):
        """t interval with G - 1 degrees of freedom."""
        from scipy.stats import t

        crit = t.ppf(0.5 + level / 2.0, df=max(self.n_clusters - 1, 1))
        j = self.names.index(name)
        return (self.coef[j] - crit * self.se[j], self.coef[j] + crit * self.se[j])

    def covers(self, name, truth, level=0.95):
        lo, hi = self.conf_int(name, level)
        return lo <= truth <= hi

    def to_records(self):
        from scipy.stats import t

        df = max(self.n_clusters - 1, 1)
        out = []
        for j, name in enumerate(self.names):
            se = self.se[j]
            tval = self.coef[j] / se if se > 0 else float("inf")
            p = 2.0 * t.sf(abs(tval), df=df)
            stars = "***" if p < 0.01 else "**" if p < 0.05 else "*" if p < 0.1 else ""
            out.append(
                {"name": name, "estimate": float(self.coef[j]), "se": float(se), "stars": stars}
            )
        return out


def _solve_qr(X, y):
    try:
        q, r = scipy.linalg.qr(X, mode="economic")
        beta = scipy.linalg.solve_triangular(r, q.T @ y)
        rinv = scipy.linalg.solve_triangular(r, np.eye(r.shape[0]))
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise SingularNormalEquations(str(exc)) from exc
    if not np.all(np.isfinite(beta)):
        raise SingularNormalEquations("non-finite solution")
    return beta, rinv @ rinv.T


def _cr1_cov(Xeff, u, clusters, k_params):
    n = Xeff.shape[0]
    groups = int(clusters.max()) + 1 if clusters.size else 0
    if groups < 2:
        raise TooFewClusters(f"{groups} cluster(s); need at least 2")
    scores = Xeff * u[:, None]
    sums = np.zeros((groups, Xeff.shape[1]))
    np.add.at(sums, clusters, scores)
    meat = sums.T @ sums
    scale = (groups / (groups - 1.0)) * ((n - 1.0) / max(n - k_params, 1.0))
    return meat, scale, groups


def _fit_stats(y, u, k_params):
    n = len(y)
    ssr = float(u @ u)
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ssr / sst if sst > 0 else 0.0
    r2_adj = 1.0 - (1.0 - r2) * (n - 1.0) / max(n - k_params, 1.0)
    return r2, r2_adj, float(np.sqrt(ssr / n))


def ols(design: Design, clusters=None) -> EstimateResult:
    """Least squares with CR1 federation-clustered standard errors."""
    X, y = design.X, design.y
    n, k = X.shape
    if n <= k:
        raise RankDeficient(f"{n} rows for {k} parameters")
    clusters = design.clusters if clusters is None else np.asarray(clusters)
    beta, xtx_inv = _solve_qr(X, y)
    u = y - X @ beta
    meat, scale, groups = _cr1_cov(X, u, clusters, k)
    cov = scale * (xtx_inv @ meat @ xtx_inv)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    r2, r2_adj, rmse = _fit_stats(y, u, k)
    return EstimateResult(
        names=list(design.names),
        coef=beta,
        se=se,
        n_obs=n,
        n_clusters=groups,
        r2=r2,
        r2_adj=r2_adj,
        rmse=rmse,
        dropped=list(design.dropped),
        formula=design.formula,
        round=design.round,
        moderator=design.moderator,
        fe_levels=design.fe_levels,
    )


def two_sls(design: Design, clusters=None) -> EstimateResult:
    """2SLS with the attempt-stage pressures instrumenting the attempt gap.

    The first stage regresses the endogenous column on the exogenous columns
    plus instruments; the structural covariance uses the projected-regressor
    bread with residuals from the actual (not fitted) endogenous values.
    """
    if design.instruments is None or not design.endogenous:
        raise UnderIdentified("design carries no instruments/endogenous columns")
    if design.instruments.shape[1] < len(design.endogenous):
        raise UnderIdentified(
            f"{design.instruments.shape[1]} instruments for {len(design.endogenous)} endogenous"
        )
    X, y = design.X, design.y
    clusters = design.clusters if clusters is None else np.asarray(clusters)
    endo_idx = [design.names.index(c) for c in design.endogenous]
    exog_idx = [j for j in range(X.shape[1]) if j not in endo_idx]
    Z = np.column_stack([X[:, exog_idx], design.instruments])
    z_names = [design.names[j] for j in exog_idx] + list(design.instrument_names)
    Z, z_names, _ = _prune_collinear(Z, z_names)
    inst_cols = [j for j, nm in enumerate(z_names) if nm in design.instrument_names]
    if len(inst_cols) < len(endo_idx):
        raise UnderIdentified("instruments collinear with exogenous block")

    X_hat = X.copy()
    first = None
    first_f = None
    for c in endo_idx:
        fs_beta, fs_xtx_inv = _solve_qr(Z, X[:, c])
        fitted = Z @ fs_beta
        u_fs = X[:, c] - fitted
        meat, scale, groups = _cr1_cov(Z, u_fs, clusters, Z.shape[1])
        fs_cov = scale * (fs_xtx_inv @ meat @ fs_xtx_inv)
        fs_se = np.sqrt(np.maximum(np.diag(fs_cov), 0.0))
        r2, r2_adj, rmse = _fit_stats(X[:, c], u_fs, Z.shape[1])
        first = EstimateResult(
            names=list(z_names),
            coef=fs_beta,
            se=fs_se,
            n_obs=len(y),
            n_clusters=groups,
            r2=r2,
            r2_adj=r2_adj,
            rmse=rmse,
            dropped=[],
            formula="first_stage",
            round=design.round,
        )
        gamma = fs_beta[inst_cols]
        v_zz = fs_cov[np.ix_(inst_cols, inst_cols)]
        try:
            first_f = float(gamma @ np.linalg.solve(v_zz, gamma)) / len(inst_cols)
        except np.linalg.LinAlgError:
            first_f = float("nan")
        if not first_f >= 10.0:
            warnings.warn(
                f"first-stage F = {first_f:.2f} below 10", WeakInstrumentWarning, stacklevel=2
            )
        X_hat[:, c] = fitted

    beta, xtx_inv = _solve_qr(X_hat, y)
    u = y - X @ beta  # structural residuals with the real endogenous column
    meat, scale, groups = _cr1_cov(X_hat, u, clusters, X.shape[1])
    cov = scale * (xtx_inv @ meat @ xtx_inv)
    se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    r2, r2_adj, rmse = _fit_stats(y, u, X.shape[1])
    return EstimateResult(
        names=list(design.names),
        coef=beta,
        se=se,
        n_obs=len(y),
        n_clusters=groups,
        r2=r2,
        r2_adj=r2_adj,
        rmse=rmse,
        dropped=list(design.dropped),
        formula=design.formula + "+iv",
        round=design.round,
        moderator=design.moderator,
        fe_levels=design.fe_levels,
        first_stage=first,
        first_stage_f=first_f,
    )


def predict_linear(result: EstimateResult, rows, zero_out=()) -> np.ndarray:
    """Fitted values of a stored regression on (possibly new) rows.

    ``zero_out`` names coefficients to hold at zero, the counterfactual
    device. Fixed-effect levels unseen at fit time fall to the reference.
    """
    zero = set(zero_out)
    unknown = zero - set(result.names)
    if unknown - set(PRESSURE_COLUMNS) - set(LIFTING_COLUMNS):
        raise SchemaMismatch(f"cannot zero unknown columns {sorted(unknown)}")
    fitted = np.zeros(len(rows))
    fe_cache = {}
    for j, name in enumerate(result.names):
        if name in zero or result.coef[j] == 0.0:
            continue
        fitted += result.coef[j] * _named_column(rows, name, result.fe_levels, fe_cache)
    return fitted


def _named_column(rows, name, fe_levels, cache):
    if name in cache:
        return cache[name]
    if "=" in name:
        key, lvl = name.split("=", 1)
        col = np.array([1.0 if getattr(r, key) == lvl else 0.0 for r in rows])
    elif ":" in name:
        base, mod = name.split(":", 1)
        side = "lower" if base.endswith("lower") or base == "turned_around" else "higher"
        main = _raw_column(rows, base)
        if mod in ("male", "female"):
            male = _raw_column(rows, "male")
            col = main * (male if mod == "male" else 1.0 - male)
        elif mod == "rivalry":
            col = main * _raw_column(rows, f"rivalry_{side}")
        else:
            col = main * _raw_column(rows, mod)
    else:
        col = _raw_column(rows, name)
    cache[name] = col
    return col


# --- rival attempt prediction ---------------------------------------------------


@dataclass(frozen=True)
class PredictionModelSpec:
    target_round: int
    feature_set: str = "full"  # "full" | "without_previous_success"
    folds: int = 5

    def __post_init__(self):
        if self.target_round not in (1, 2, 3):
            raise ValueError("target_round must be 1, 2 or 3")
        if self.feature_set not in ("full", "without_previous_success"):
            raise ValueError(f"unknown feature_set {self.feature_set!r}")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")


PREDICTION_FEATURES = (
    "male",
    "bodyweight",
    "num_experience",
    "first_participation",
    "current_best",
    "tie_indicator",
    "order_mismatch",
    "prev_attempt_weight",
)


@dataclass
class AttemptPredictor:
    """Linear predictor of a round's declared weight from observables."""

    spec: PredictionModelSpec
    names: list
    coef: np.ndarray
    fe_levels: dict

    def predict(self, rows) -> np.ndarray:
        cache = {}
        out = np.zeros(len(rows))
        for j, name in enumerate(self.names):
            out += self.coef[j] * _named_column(rows, name, self.fe_levels, cache)
        return out

    def audit_features(self):
        if self.spec.feature_set == "without_previous_success" and any(
            n == "prev_success" for n in self.names
        ):
            raise FeatureLeakage("prev_success present in a leakage-free feature set")


def _prediction_design(rows, spec, fit_levels=None):
    names = ["intercept", *PREDICTION_FEATURES]
    if spec.feature_set == "full":
        names.append("prev_success")
    cols = [_raw_column(rows, n) if n != "intercept" else np.ones(len(rows)) for n in names]
    fe_names, fe_cols, fe_levels = _fe_columns(rows, fit_levels)
    return names + fe_names, cols + fe_cols, fe_levels


def predict_rival_attempt(rows, spec: PredictionModelSpec):
    """Fit the declared-weight predictor and return it with per-row predictions.

    The ``without_previous_success`` feature set is the leakage-free variant
    used to build higher-rival pressures: the preceding round's outcome is not
    observable to the declaring rival.
    """
    target = [r for r in rows if r.round == spec.target_round]
    if not target:
        raise EmptyInput(f"no rows at round {spec.target_round}")
    names, cols, fe_levels = _prediction_design(target, spec)
    X = np.column_stack(cols)
    y = _raw_column(target, "attempt_weight")
    X, names, _dropped = _prune_collinear(X, names)
    beta, _ = _solve_qr(X, y)
    model = AttemptPredictor(spec=spec, names=names, coef=beta, fe_levels=fe_levels)
    model.audit_features()
    return model, model.predict(target)


def kfold_cv(rows, spec: PredictionModelSpec, seed: int = 0):
    """Out-of-fold RMSE and R^2 of the attempt predictor, seeded and pooled."""
    target = [r for r in rows if r.round == spec.target_round]
    n = len(target)
    if n < spec.folds:
        raise TooFewRows(f"{n} rows for {spec.folds} folds")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    folds = np.array_split(perm, spec.folds)
    y = _raw_column(target, "attempt_weight")
    pred = np.full(n, np.nan)
    for hold in folds:
        mask = np.ones(n, dtype=bool)
        mask[hold] = False
        train = [target[i] for i in np.flatnonzero(mask)]
        names, cols, fe_levels = _prediction_design(train, spec)
        X = np.column_stack(cols)
        X, names, _ = _prune_collinear(X, names)
        beta, _ = _solve_qr(X, y[mask])
        model = AttemptPredictor(spec=spec, names=names, coef=beta, fe_levels=fe_levels)
        pred[hold] = model.predict([target[i] for i in hold])
    resid = y - pred
    rmse = float(np.sqrt(np.mean(resid**2)))
    sst = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / sst if sst > 0 else 0.0
    return rmse, r2


# --- generated-regressor bootstrap ------------------------------------------------


def rebuild_higher_pressure(rows, predictions_by_row, row_of):
    """New rows with higher-rival pressure recomputed from model predictions.

    ``row_of`` maps (meet_id, lifter_id, round) to the row index whose
    prediction supplies the rival's expected declaration.
    """
    out = []
    for r in rows:
        if r.higher_rival_id is None:
            out.append(replace(r, pressure_higher=None))
            continue
        j = row_of.get((r.meet_id, r.higher_rival_id, r.round))
        if j is None:
            out.append(replace(r, pressure_higher=None))
        else:
            out.append(replace(r, pressure_higher=float(predictions_by_row[j]) - r.prev_best))
    return out


def _row_index(rows):
    return {(r.meet_id, r.lifter_id, r.round): i for i, r in enumerate(rows)}


def regression_with_generated_pressure(rows, rnd, pred_spec=None):
    """Attempt regression at round ``rnd`` with model-predicted higher-rival
    pressure (the plug-in estimate whose SEs the bootstrap corrects)."""
    if pred_spec is None:
        pred_spec = PredictionModelSpec(target_round=rnd, feature_set="without_previous_success")
    model, _ = predict_rival_attempt(rows, pred_spec)
    preds = model.predict(rows)
    rebuilt = rebuild_higher_pressure(rows, preds, _row_index(rows))
    design = build_design(rebuilt, "attempt_eq1", rnd)
    return ols(design)


@dataclass
class BootstrapResult:
    names: list
    mean_coef: np.ndarray
    sd_se: np.ndarray
    n_replicates: int
    n_redrawn: int

    def mean_of(self, name):
        return float(self.mean_coef[self.names.index(name)])

    def se_of(self, name):
        return float(self.sd_se[self.names.index(name)])


def bootstrap_generated_regressor(rows, B, seed, rnd=3, pred_spec=None) -> BootstrapResult:
    """Federation-level bootstrap for the generated higher-rival pressure.

    Each replicate resamples federations with replacement (each draw becomes
    a distinct cluster), refits the attempt predictor, rebuilds the
    higher-rival pressure, and re-runs the outcome regression. Replicates
    with fewer than two distinct federations or a degenerate design are
    redrawn, at most 10 * B times overall.
    """
    if B < 2:
        raise ValueError("B must be >= 2")
    if pred_spec is None:
        pred_spec = PredictionModelSpec(target_round=rnd, feature_set="without_previous_success")
    feds = sorted({r.federation for r in rows})
    if len(feds) < 2:
        raise TooFewClusters(f"{len(feds)} federation(s)")
    by_fed = {f: [r for r in rows if r.federation == f] for f in feds}
    rng = np.random.default_rng(seed)
    baseline = regression_with_generated_pressure(rows, rnd, pred_spec)
    draws = []
    redraws = 0
    attempts_left = 10 * B
    while len(draws) < B:
        if attempts_left <= 0:
            raise DegenerateReplicate(f"exceeded {10 * B} resampling attempts")
        attempts_left -= 1
        chosen = rng.choice(len(feds), size=len(feds), replace=True)
        if len(set(chosen.tolist())) < 2:
            redraws += 1
            continue
        sample = []
        for k, fi in enumerate(chosen):
            for r in by_fed[feds[fi]]:
                sample.append(
                    replace(r, federation=f"{feds[fi]}~{k}", meet_id=f"{r.meet_id}~{k}")
                )
        try:
            res = regression_with_generated_pressure(sample, rnd, pred_spec)
            coefs = np.array([res.coef_of(n) if n in res.names else np.nan for n in baseline.names])
        except (EmptyInput, RankDeficient, SingularNormalEquations, TooFewClusters):
            redraws += 1
            continue
        if np.any(np.isnan(coefs)):
            redraws += 1
            continue
        draws.append(coefs)
    stacked = np.vstack(draws)
    return BootstrapResult(
        names=list(baseline.names),
        mean_coef=stacked.mean(axis=0),
        sd_se=stacked.std(axis=0, ddof=1),
        n_replicates=B,
        n_redrawn=redraws,
    )
