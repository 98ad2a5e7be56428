"""Synthetic competition panels with planted effects.

Two generating modes share the competition machine and the pressure
pipeline's row construction, so simulated panels flow through the identical
code path as ingested data:

* ``reduced_form`` — declarations follow the attempt regression's own linear
  index (planted pressure coefficients plus noise) and successes follow the
  linear probability model's index; the Monte Carlo ground truth for
  estimator recovery.
* ``structural_agents`` — declarations maximize expected utility over the
  declaration lattice given each lifter's rival context and success curves.

Per-competition randomness derives from the master seed by seed-sequence
spawning, so a (seed, config) pair fully determines every emitted row.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .behavior import RivalContext, SuccessCurve, ValueParams
from .competition import CategoryKey, LifterProfile, init_competition
from .errors import BoundaryTie, ConfigInvalid, ContextViolation, EmptyGrid
from .pipeline import (
    MeetRecord,
    adjacent_rivals,
    lifting_pressure_flags,
    naive_rival_predictions,
    observation_rows,
)
from .policy import default_grid, optimal_weight

_EQUIPMENT_CYCLE = ("raw", "single_ply", "multi_ply")
_AGE_CLASSES = ("16-23", "24-39", "40-54", "55-69")
_DIVISIONS = ("Open", "Amateur")
_WEIGHT_CLASSES = ("66", "74", "83", "93", "105")


@dataclass(frozen=True)
class PlantedEffects:
    """Ground-truth coefficients of the reduced-form generator.

    Pressure and lifting-stage defaults are the headline magnitudes the
    recovery study targets; tuples are (round 2, round 3).
    """

    gamma_lower: tuple = (0.106, 0.057)
    gamma_higher: tuple = (0.449, 0.409)
    turned_around: tuple = (0.013, 0.032)
    turning_around: tuple = (-0.005, -0.034)
    beta_male: float = -1.3
    beta_bodyweight: float = 0.27
    beta_experience: float = 0.3
    beta_first: float = 3.0
    attempt_intercepts: tuple = (10.0, 30.0)
    attempt_noise_sd: float = 5.0
    delta_gap: float = -0.003
    success_round1: float = 0.88
    success_intercepts: tuple = (0.78, 0.55)
    prev_success_boost: float = 0.0
    shared_shock_corr: float = 0.0
    shared_shock_scale: float = 0.0

    def gamma(self, side: str, rnd: int) -> float:
        pair = self.gamma_lower if side == "lower" else self.gamma_higher
        return pair[rnd - 2]


@dataclass(frozen=True)
class PanelConfig:
    n_competitions: int
    lifters_per_competition: int = 5
    master_seed: int = 20240901
    mode: str = "reduced_form"  # "reduced_form" | "structural_agents"
    n_federations: int = 40
    male_share: float = 0.8
    kappa: float = 2.5
    prediction_drift: float = 7.5
    opener_ratio: float = 0.92
    curve_scale: float = 4.0
    curve_ceiling: float = 0.90
    curve_floor: float = 0.03
    lam: float = 2.25
    alpha: float = 1.0
    effects: PlantedEffects = field(default_factory=PlantedEffects)

    def __post_init__(self):
        if self.n_competitions <= 0 or self.lifters_per_competition < 2:
            raise ConfigInvalid("need positive competitions and >= 2 lifters each")
        if self.mode not in ("reduced_form", "structural_agents"):
            raise ConfigInvalid(f"unknown mode {self.mode!r}")
        if not 0 < self.opener_ratio <= 1:
            raise ConfigInvalid("opener_ratio must be in (0, 1]")
        if self.kappa <= 0 or self.n_federations < 2:
            raise ConfigInvalid("kappa must be positive and n_federations >= 2")


@dataclass
class SimulatedCompetition:
    state: object
    profiles: list
    current_best: dict
    curves: dict
    category: CategoryKey
    meet_id: str
    clamped: int
    clipped: int


def _lattice(x: float, kappa: float) -> float:
    return max(kappa, round(x / kappa) * kappa)


def _category(cfg: PanelConfig, idx: int, gender: str) -> CategoryKey:
    return CategoryKey(
        equipment=_EQUIPMENT_CYCLE[idx % 3],
        age_class=_AGE_CLASSES[idx % 4],
        weight_class=_WEIGHT_CLASSES[idx % 5],
        gender=gender,
        division=_DIVISIONS[idx % 2],
        federation=f"F{idx % cfg.n_federations:03d}",
    )


_FED_EFFECT_SD = 2.0
_FED_EFFECT_KEY = 0x8F3D


def federation_effects(cfg: PanelConfig) -> np.ndarray:
    """Fixed per-federation intercept shifts, independent of the competition
    stream so the same federation keeps its effect across panel sizes."""
    gen = np.random.default_rng(np.random.SeedSequence(cfg.master_seed, spawn_key=(_FED_EFFECT_KEY,)))
    return gen.normal(0.0, _FED_EFFECT_SD, cfg.n_federations)


def _draw_roster(cfg: PanelConfig, rng, idx: int):
    n = cfg.lifters_per_competition
    male = rng.random() < cfg.male_share
    gender = "male" if male else "female"
    bw_mean, bw_sd = (88.0, 14.0) if male else (66.0, 10.0)
    strength_ratio = 1.25 if male else 0.75
    bodyweight = np.clip(rng.normal(bw_mean, bw_sd, n), 45.0, 160.0)
    ability = bodyweight * strength_ratio + rng.normal(0.0, 9.0, n)
    ability = np.maximum(ability, 30.0)
    experience = rng.poisson(4.0, n)
    ages = rng.integers(18, 60, n)
    profiles, openers, curves = [], {}, {}
    for j in range(n):
        debut = experience[j] == 0
        pb = 0.0 if debut else _lattice(ability[j] + rng.normal(0.0, 4.0), cfg.kappa)
        lifter_id = f"L{idx:06d}x{j}"
        profiles.append(
            LifterProfile(
                lifter_id=lifter_id,
                gender=gender,
                bodyweight=round(float(bodyweight[j]), 2),
                age=int(ages[j]),
                num_experience=int(experience[j]),
                first_participation=bool(debut),
                personal_best=pb,
            )
        )
        openers[lifter_id] = _lattice(ability[j] * cfg.opener_ratio, cfg.kappa)
        curves[lifter_id] = SuccessCurve(
            anchor=float(ability[j]),
            scale=cfg.curve_scale,
            ceiling=cfg.curve_ceiling,
            floor=cfg.curve_floor,
        )
    return gender, profiles, openers, curves, ability


def simulate_competition(cfg: PanelConfig, seed, idx: int = 0, fed_effect: float | None = None) -> SimulatedCompetition:
    """One complete three-round competition under the configured mode."""
    rng = np.random.default_rng(seed)
    gender, profiles, openers, curves, ability = _draw_roster(cfg, rng, idx)
    category = _category(cfg, idx, gender)
    state = init_competition(category, profiles, openers, kappa=cfg.kappa)
    if fed_effect is None:
        fed_effect = float(federation_effects(cfg)[idx % cfg.n_federations])
    eff = cfg.effects

    # round 1: openers resolve; the realized outcome substitutes the personal
    # best for debutants before any round 2 quantities are formed
    if cfg.mode == "reduced_form":
        p1 = np.full(len(profiles), eff.success_round1)
    else:
        p1 = np.array([curves[p.lifter_id].prob(openers[p.lifter_id]) for p in profiles])
    for lifter_id in state.lifting_order(1):
        j = state._index[lifter_id]
        state.record_outcome(lifter_id, bool(rng.random() < p1[j]))
    current_best = {}
    for p in profiles:
        j = state._index[p.lifter_id]
        first_outcome = openers[p.lifter_id] if state.outcomes[j][0] else 0.0
        current_best[p.lifter_id] = p.personal_best if p.personal_best > 0 else first_outcome

    clamped = clipped = 0
    xb = {
        p.lifter_id: (
            eff.beta_male * (p.gender == "male")
            + eff.beta_bodyweight * p.bodyweight
            + eff.beta_experience * p.num_experience
            + eff.beta_first * p.first_participation
            + fed_effect
        )
        for p in profiles
    }
    params = ValueParams(alpha=cfg.alpha, lam=cfg.lam)

    for rnd in (2, 3):
        ranks = state.interim_rank(rnd - 1)
        shock = np.zeros(len(profiles))
        if cfg.mode == "reduced_form":
            n_clamped, shock = _declare_reduced(cfg, state, rng, rnd, ranks, current_best, xb)
            clamped += n_clamped
        else:
            _declare_structural(cfg, state, rnd, ranks, curves, params)
        state.start_round(rnd)
        order = list(state.lifting_order(rnd))
        draws = rng.random(len(order))
        for pos, lifter_id in enumerate(order):
            j = state._index[lifter_id]
            lower_id, higher_id = adjacent_rivals(ranks, lifter_id)
            if cfg.mode == "reduced_form":
                ta, tn = lifting_pressure_flags(state, lifter_id, rnd, ranks, lower_id, higher_id)
                gap = state.declarations[j][rnd - 1] - current_best[lifter_id]
                p = (
                    eff.success_intercepts[rnd - 2]
                    + eff.delta_gap * gap
                    + eff.turned_around[rnd - 2] * ta
                    + eff.turning_around[rnd - 2] * tn
                    + eff.shared_shock_scale * shock[j]
                )
                lo, hi = 0.02, 0.98
                if p < lo or p > hi:
                    clipped += 1
                    p = min(max(p, lo), hi)
            else:
                p = curves[lifter_id].prob(state.declarations[j][rnd - 1])
            state.record_outcome(lifter_id, bool(draws[pos] < p))
    return SimulatedCompetition(
        state=state,
        profiles=profiles,
        current_best=current_best,
        curves=curves,
        category=category,
        meet_id=f"sim{idx:06d}",
        clamped=clamped,
        clipped=clipped,
    )


def _declare_reduced(cfg, state, rng, rnd, ranks, current_best, xb) -> int:
    """Round-``rnd`` declarations from the planted linear rule.

    Lifters declare in the previous round's lifting order; the lower-rival
    pressure term enters only when that rival's fresh declaration is already
    observable (the same positional rule the pipeline applies), and the
    higher-rival term uses the leakage-free prior-declaration expectation.
    """
    eff = cfg.effects
    order = state.orders[rnd - 1]
    pos = {state.roster[i].lifter_id: p for p, i in enumerate(order)}
    noise = rng.normal(0.0, eff.attempt_noise_sd, len(order))
    shock = rng.normal(0.0, 1.0, len(state.roster))
    rho = eff.shared_shock_corr
    clamped = 0
    for p_idx, i in enumerate(order):
        lifter_id = state.roster[i].lifter_id
        lower_id, higher_id = adjacent_rivals(ranks, lifter_id)
        prev_best = state.best_outcome(lifter_id, rnd - 1)
        z_l = 0.0
        if lower_id is not None and pos.get(lower_id, 99) < pos[lifter_id]:
            w_l = state.declarations[state._index[lower_id]][rnd - 1]
            if w_l is not None:
                z_l = w_l - prev_best
        z_h = 0.0
        if higher_id is not None:
            w_h_prev = state.declarations[state._index[higher_id]][rnd - 2]
            z_h = (w_h_prev + cfg.prediction_drift) - prev_best
        eps = eff.attempt_noise_sd * rho * shock[i] + np.sqrt(1.0 - rho * rho) * noise[p_idx]
        succ_prev = bool(state.outcomes[i][rnd - 2])
        index = (
            eff.attempt_intercepts[rnd - 2]
            + xb[lifter_id]
            + eff.gamma("lower", rnd) * z_l
            + eff.gamma("higher", rnd) * z_h
            + eff.prev_success_boost * succ_prev
            + eps
        )
        proposal = _lattice(current_best[lifter_id] + index, cfg.kappa)
        floor = state.declarations[i][rnd - 2] + (cfg.kappa if succ_prev else 0.0)
        if proposal < floor:
            clamped += 1
            proposal = floor
        state.declare_next(lifter_id, proposal)
    return clamped, shock


def _declare_structural(cfg, state, rng, rnd, ranks, curves, params):
    """Round-``rnd`` declarations by expected-utility maximizing agents.

    Agents declare from the bottom rank upward, so the lower rival's actual
    declaration is on the table while the higher rival's is replaced by the
    prior-declaration expectation. Degenerate contexts (tied bests) fall back
    to the minimal legal declaration.
    """
    by_rank = sorted(ranks, key=lambda lid: -ranks[lid])
    for lifter_id in by_rank:
        i = state._index[lifter_id]
        lower_id, higher_id = adjacent_rivals(ranks, lifter_id)
        succ_prev = bool(state.outcomes[i][rnd - 2])
        floor = state.declarations[i][rnd - 2] + (cfg.kappa if succ_prev else 0.0)
        y_self = state.best_outcome(lifter_id, rnd - 1)
        chosen = None
        if lower_id is not None and higher_id is not None:
            y_l = state.best_outcome(lower_id, rnd - 1)
            y_h = state.best_outcome(higher_id, rnd - 1)
            w_l = state.declarations[state._index[lower_id]][rnd - 1]
            w_h_prev = state.declarations[state._index[higher_id]][rnd - 2]
            try:
                ctx = RivalContext(
                    w_lower=w_l,
                    w_higher=max(w_h_prev + cfg.prediction_drift, y_h + cfg.kappa),
                    y_lower=y_l,
                    y_self=y_self,
                    y_higher=y_h,
                    kappa=cfg.kappa,
                    q_self=curves[lifter_id],
                    q_lower=curves[lower_id],
                    q_higher=curves[higher_id],
                )
                grid = default_grid(ctx, floor=max(floor, y_self + cfg.kappa))
                chosen = optimal_weight(ctx, params, grid, "comprehensive").chosen_weight
            except (ContextViolation, BoundaryTie, EmptyGrid):
                chosen = None
        if chosen is None:
            # rank edges and tied-best contexts: retry after failure, else one notch up
            chosen = floor if not succ_prev else max(floor, y_self + cfg.kappa)
        state.declare_next(lifter_id, chosen)


def simulate_panel(cfg: PanelConfig, keep_states: bool = False):
    """Full panel: competitions, observation rows, and generator counters.

    Rows are produced by the pressure pipeline from each competition's state
    with the same leakage-free prior-declaration predictions the generator
    used, so planted pressure coefficients correspond exactly to the emitted
    regressors.
    """
    children = np.random.SeedSequence(cfg.master_seed).spawn(cfg.n_competitions)
    rows, sims = [], []
    clamped = clipped = 0
    for idx in range(cfg.n_competitions):
        sim = simulate_competition(cfg, children[idx], idx)
        preds = naive_rival_predictions(sim.state, cfg.prediction_drift)
        meet = MeetRecord(
            meet_id=sim.meet_id,
            date=None,
            category=sim.category,
            state=sim.state,
            current_best=sim.current_best,
        )
        rows.extend(observation_rows(meet, predictions=preds))
        clamped += sim.clamped
        clipped += sim.clipped
        if keep_states:
            sims.append(sim)
    truth = _truth_map(cfg.effects)
    return PanelResult(rows=rows, sims=sims, clamped=clamped, clipped=clipped, truth=truth, config=cfg)


def _truth_map(eff: PlantedEffects) -> dict:
    return {
        "attempt": {
            2: {"pressure_lower": eff.gamma_lower[0], "pressure_higher": eff.gamma_higher[0]},
            3: {"pressure_lower": eff.gamma_lower[1], "pressure_higher": eff.gamma_higher[1]},
        },
        "success": {
            2: {
                "turned_around": eff.turned_around[0],
                "turning_around": eff.turning_around[0],
                "attempt_gap": eff.delta_gap,
            },
            3: {
                "turned_around": eff.turned_around[1],
                "turning_around": eff.turning_around[1],
                "attempt_gap": eff.delta_gap,
            },
        },
    }


@dataclass
class PanelResult:
    rows: list
    sims: list
    clamped: int
    clipped: int
    truth: dict
    config: PanelConfig
