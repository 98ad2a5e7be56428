"""Ingest meet results, reconstruct competitions, and emit observation rows.

The input format follows the public powerlifting-archive conventions: bench
attempts are signed kilograms (negative magnitude = failed attempt at that
weight), one row per lifter per meet. Attempt-stage pressures are built only
from quantities observable at the lifter's own declaration; a rival whose
declaration was not observable yields a null pressure on that side rather
than a fabricated value.
"""

from __future__ import annotations

import calendar
import csv
import datetime as dt
import io
from dataclasses import dataclass, field

import numpy as np

from .competition import CategoryKey, CompetitionState, LifterProfile, init_competition
from .econometrics import ObservationRow
from .errors import (
    CompetitionError,
    InformationLeakage,
    MissingHeader,
    UnsortedHistory,
)

REQUIRED_COLUMNS = (
    "Name",
    "Sex",
    "Event",
    "Equipment",
    "Age",
    "BodyweightKg",
    "WeightClassKg",
    "AgeClass",
    "Division",
    "Federation",
    "Date",
    "MeetName",
    "Bench1Kg",
    "Bench2Kg",
    "Bench3Kg",
)

_EQUIPMENT = {"raw": "raw", "single-ply": "single_ply", "multi-ply": "multi_ply"}


@dataclass(frozen=True)
class RawMeetRow:
    name: str
    sex: str  # "M" | "F"
    event: str  # "B" for bench-only; composite events carry other codes
    equipment: str
    age: float
    bodyweight: float
    weight_class: str
    age_class: str
    division: str
    federation: str
    date: dt.date
    meet_name: str
    attempts: tuple  # per round: (declared_kg, success) or None
    place: str = ""

    @property
    def meet_id(self) -> str:
        return f"{self.federation}|{self.date.isoformat()}|{self.meet_name}"


@dataclass
class ParseIssue:
    line: int
    reason: str


@dataclass(frozen=True)
class BestPolicy:
    """How the personal best entering a meet is resolved."""

    mode: str = "all_time"  # "all_time" | "within_months"
    months: int = 12

    def __post_init__(self):
        if self.mode not in ("all_time", "within_months"):
            raise ValueError(f"unknown best policy {self.mode!r}")
        if self.months <= 0:
            raise ValueError("months window must be positive")


@dataclass(frozen=True)
class PressureVariables:
    round: int
    lower_attempt_pressure: float | None
    higher_attempt_pressure: float | None
    turned_around: int
    turning_around: int
    tie_indicator: int
    order_mismatch_indicator: int


def _decode_attempt(cell: str):
    if cell is None or cell.strip() == "":
        return None
    kg = float(cell)
    if kg == 0:
        return None
    return (abs(kg), kg > 0)


def parse_meet_csv(stream) -> tuple:
    """Decode meet rows; malformed rows land in the issue report, not errors."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise MissingHeader("empty input")
    missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise MissingHeader(f"missing columns: {missing}")
    rows, issues = [], []
    for lineno, rec in enumerate(reader, start=2):
        try:
            equipment = _EQUIPMENT.get(rec["Equipment"].strip().lower())
            if equipment is None:
                raise ValueError(f"equipment {rec['Equipment']!r}")
            attempts = tuple(_decode_attempt(rec[f"Bench{k}Kg"]) for k in (1, 2, 3))
            rows.append(
                RawMeetRow(
                    name=rec["Name"].strip(),
                    sex=rec["Sex"].strip().upper(),
                    event=rec["Event"].strip().upper(),
                    equipment=equipment,
                    age=float(rec["Age"]) if rec["Age"].strip() else float("nan"),
                    bodyweight=float(rec["BodyweightKg"]) if rec["BodyweightKg"].strip() else float("nan"),
                    weight_class=rec["WeightClassKg"].strip(),
                    age_class=rec["AgeClass"].strip(),
                    division=rec["Division"].strip(),
                    federation=rec["Federation"].strip(),
                    date=dt.date.fromisoformat(rec["Date"].strip()),
                    meet_name=rec["MeetName"].strip(),
                    attempts=attempts,
                    place=(rec.get("Place") or "").strip(),
                )
            )
        except (ValueError, KeyError) as exc:
            issues.append(ParseIssue(lineno, str(exc)))
    return rows, issues


def filter_sample(rows) -> tuple:
    """Apply the analysis-sample rules; returns (kept, exclusion counts).

    Bench-event rows only, ages 15-69, usable bodyweight, an opener present,
    and a category-meet with at least two such lifters.
    """
    exclusions = {
        "not_bench_event": 0,
        "unknown_sex": 0,
        "age_out_of_range": 0,
        "missing_bodyweight_or_age": 0,
        "missing_opener": 0,
        "category_below_two": 0,
    }
    stage = []
    for r in rows:
        if r.event != "B":
            exclusions["not_bench_event"] += 1
            continue
        if r.sex not in ("M", "F"):
            exclusions["unknown_sex"] += 1
            continue
        if r.age != r.age or r.bodyweight != r.bodyweight or r.bodyweight <= 0:
            exclusions["missing_bodyweight_or_age"] += 1
            continue
        if not 15 <= r.age <= 69:
            exclusions["age_out_of_range"] += 1
            continue
        if r.attempts[0] is None:
            exclusions["missing_opener"] += 1
            continue
        stage.append(r)
    groups = {}
    for r in stage:
        groups.setdefault(_group_key(r), []).append(r)
    kept = []
    for key in sorted(groups):
        members = groups[key]
        if len(members) < 2:
            exclusions["category_below_two"] += len(members)
            continue
        kept.extend(members)
    return kept, exclusions


def _group_key(r: RawMeetRow):
    return (
        r.federation,
        r.date.isoformat(),
        r.meet_name,
        r.equipment,
        r.age_class,
        r.weight_class,
        r.sex,
        r.division,
    )


def _months_back(day: dt.date, months: int) -> dt.date:
    month_index = day.year * 12 + (day.month - 1) - months
    year, month = divmod(month_index, 12)
    last = calendar.monthrange(year, month + 1)[1]
    return dt.date(year, month + 1, min(day.day, last))


def resolve_personal_best(history, policy: BestPolicy, first_attempt_outcome: float,
                          as_of: dt.date | None = None) -> float:
    """Personal best entering a meet under the given recall policy.

    ``history`` is the lifter's prior (date, best_kg) pairs in date order. A
    resolved best of zero (a debutant) is replaced by the realized outcome of
    the first attempt, which is 0 again if that lift failed.
    """
    dates = [d for d, _ in history]
    if dates != sorted(dates):
        raise UnsortedHistory("history must be sorted by date")
    if policy.mode == "within_months":
        if as_of is None:
            raise ValueError("within_months policy needs the meet date")
        cutoff = _months_back(as_of, policy.months)
        candidates = [b for d, b in history if d >= cutoff]
    else:
        candidates = [b for _, b in history]
    best = max(candidates, default=0.0)
    return best if best > 0 else first_attempt_outcome


# --- pressure construction --------------------------------------------------------


def adjacent_rivals(ranks: dict, lifter_id: str) -> tuple:
    """(lower_rival_id, higher_rival_id) under the interim ranking; rank 1 has
    no higher rival and the last rank no lower rival."""
    by_rank = {rank: lid for lid, rank in ranks.items()}
    r = ranks[lifter_id]
    return by_rank.get(r + 1), by_rank.get(r - 1)


def lifting_pressure_flags(state: CompetitionState, lifter_id: str, rnd: int,
                           ranks: dict, lower_id, higher_id) -> tuple:
    """Binary lifting-stage exposures at the moment of the round-``rnd`` lift.

    Turned-around uses the lower rival's best as observable then: through
    round ``rnd`` when the rival lifted earlier in the round, else through the
    previous round. Turning-around compares the lifter's own declaration to
    the higher rival's standing best.
    """
    prev_best = state.best_outcome(lifter_id, rnd - 1)
    order = state.orders.get(rnd, [])
    pos = {state.roster[i].lifter_id: p for p, i in enumerate(order)}
    turned = 0
    if lower_id is not None:
        through = rnd if lower_id in pos and pos[lower_id] < pos[lifter_id] else rnd - 1
        turned = int(state.best_outcome(lower_id, through) > prev_best)
    turning = 0
    if higher_id is not None:
        own_w = state.declarations[state._index[lifter_id]][rnd - 1]
        turning = int(own_w > state.best_outcome(higher_id, rnd - 1))
    return turned, turning


def _order_mismatch(state, rnd, lifter_id, lower_id, higher_id) -> int:
    # 1 when the round's declared-weight order disagrees with the interim-rank
    # order across the adjacent triple (worst rank is expected to lift first)
    order = state.orders.get(rnd, [])
    pos = {state.roster[i].lifter_id: p for p, i in enumerate(order)}
    expected = [lid for lid in (lower_id, lifter_id, higher_id) if lid is not None and lid in pos]
    actual = sorted(expected, key=lambda lid: pos[lid])
    return int(actual != expected)


def compute_pressures(state: CompetitionState, predictions=None, audit: bool = False,
                      prediction_basis: str | None = None) -> list:
    """Attempt-stage and lifting-stage pressure variables for every lifter-round.

    ``predictions`` maps (lifter_id, round) to the expected declaration of
    that lifter, supplying the higher-rival side; without an entry the side is
    null. The lower side is null unless the rival's declaration was observable
    when the lifter declared (the rival lifted earlier in the previous round).
    With ``audit=True`` every emitted component is checked for membership in
    the declaring lifter's information set; a violation is a hard failure.
    """
    predictions = predictions or {}
    out = []
    for rnd in (2, 3):
        if rnd not in state.orders:
            continue
        ranks = state.interim_rank(rnd - 1)
        ties = state.declaration_ties(rnd)
        prev_order = state.orders[rnd - 1]
        prev_pos = {state.roster[i].lifter_id: p for p, i in enumerate(prev_order)}
        for i in state.orders[rnd]:
            lifter_id = state.roster[i].lifter_id
            lower_id, higher_id = adjacent_rivals(ranks, lifter_id)
            prev_best = state.best_outcome(lifter_id, rnd - 1)
            lower_p = None
            if lower_id is not None:
                w_l = state.declarations[state._index[lower_id]][rnd - 1]
                observable = (
                    w_l is not None
                    and lower_id in prev_pos
                    and lifter_id in prev_pos
                    and prev_pos[lower_id] < prev_pos[lifter_id]
                )
                if observable:
                    lower_p = w_l - prev_best
            higher_p = None
            if higher_id is not None and (higher_id, rnd) in predictions:
                higher_p = predictions[(higher_id, rnd)] - prev_best
            turned, turning = lifting_pressure_flags(state, lifter_id, rnd, ranks, lower_id, higher_id)
            if audit:
                _audit_components(
                    state, lifter_id, rnd, lower_id, lower_p, higher_id, higher_p, prediction_basis
                )
            out.append(
                (
                    lifter_id,
                    rnd,
                    PressureVariables(
                        round=rnd,
                        lower_attempt_pressure=lower_p,
                        higher_attempt_pressure=higher_p,
                        turned_around=turned,
                        turning_around=turning,
                        tie_indicator=int(lifter_id in ties),
                        order_mismatch_indicator=_order_mismatch(
                            state, rnd, lifter_id, lower_id, higher_id
                        ),
                    ),
                )
            )
    return out


def _audit_components(state, lifter_id, rnd, lower_id, lower_p, higher_id, higher_p, basis):
    info = state.information_set(lifter_id, "declare", rnd)
    if lower_p is not None:
        w_l = state.declarations[state._index[lower_id]][rnd - 1]
        if not info.knows_attempt(lower_id, rnd, w_l):
            raise InformationLeakage(
                f"{lifter_id} round {rnd}: lower rival declaration ({lower_id}, {w_l}) unobservable"
            )
    for r in range(1, rnd):
        if state.outcomes[state._index[lifter_id]][r - 1] is not None and not info.knows_outcome(
            lifter_id, r
        ):
            raise InformationLeakage(f"{lifter_id} round {rnd}: own round-{r} outcome missing")
    if higher_p is not None and basis == "prior_declaration":
        w_prev = state.declarations[state._index[higher_id]][rnd - 2]
        if w_prev is not None and not info.knows_attempt(higher_id, rnd - 1, w_prev):
            raise InformationLeakage(
                f"{lifter_id} round {rnd}: higher rival prior declaration unobservable"
            )


def naive_rival_predictions(state: CompetitionState, drift: float = 7.5) -> dict:
    """Leakage-free expectation of every lifter's declaration: the prior
    round's declared weight plus a fixed drift. Components are observable to
    all rivals at their own declaration moments."""
    preds = {}
    for rnd in (2, 3):
        for i in range(len(state.roster)):
            w_prev = state.declarations[i][rnd - 2]
            if w_prev is not None:
                preds[(state.roster[i].lifter_id, rnd)] = w_prev + drift
    return preds


# --- meet replay and row assembly --------------------------------------------------


@dataclass
class MeetRecord:
    """One replayed category-meet with everything needed to emit rows."""

    meet_id: str
    date: dt.date | None
    category: CategoryKey
    state: CompetitionState
    current_best: dict  # lifter_id -> resolved personal best
    num_experience: dict = field(default_factory=dict)
    rivalry: dict = field(default_factory=dict)  # (lifter_id, rival_id) -> count


def replay_meet(members, category, current_best, meet_id, date=None,
                num_experience=None, rivalry=None, career_best=None) -> MeetRecord:
    """Drive one category-meet's raw rows through the competition machine."""
    profiles = []
    openers = {}
    career_best = career_best or {}
    for m in members:
        pb = career_best.get(m.name, 0.0)
        profiles.append(
            LifterProfile(
                lifter_id=m.name,
                gender="male" if m.sex == "M" else "female",
                bodyweight=m.bodyweight,
                age=int(m.age),
                num_experience=(num_experience or {}).get(m.name, 0),
                first_participation=pb == 0,
                personal_best=pb,
            )
        )
        openers[m.name] = m.attempts[0][0]
    state = init_competition(category, profiles, openers)
    by_name = {m.name: m for m in members}
    for rnd in (1, 2, 3):
        order = state.lifting_order(rnd)
        for lifter_id in order:
            att = by_name[lifter_id].attempts[rnd - 1]
            state.record_outcome(lifter_id, att[1])
            if rnd < 3:
                nxt = by_name[lifter_id].attempts[rnd]
                if nxt is None:
                    state.declare_pass(lifter_id)
                else:
                    state.declare_next(lifter_id, nxt[0])
        if rnd < 3:
            if not any(
                state.declarations[i][rnd] is not None for i in range(len(profiles))
            ):
                break
            state.start_round(rnd + 1)
    return MeetRecord(
        meet_id=meet_id,
        date=date,
        category=category,
        state=state,
        current_best=current_best,
        num_experience=num_experience or {},
        rivalry=rivalry or {},
    )


def observation_rows(meet: MeetRecord, predictions=None, audit=False,
                     prediction_basis=None) -> list:
    """Emit one ObservationRow per declared lifter-round of a replayed meet."""
    state = meet.state
    pressures = {
        (lid, rnd): pv for lid, rnd, pv in compute_pressures(
            state, predictions, audit=audit, prediction_basis=prediction_basis
        )
    }
    rank_cache = {r: state.interim_rank(r - 1) for r in (2, 3) if r in state.orders}
    rows = []
    for i, prof in enumerate(state.roster):
        lid = prof.lifter_id
        cb = meet.current_best[lid]
        for rnd in (1, 2, 3):
            w = state.declarations[i][rnd - 1]
            out = state.outcomes[i][rnd - 1]
            if w is None or out is None:
                continue
            pv = pressures.get((lid, rnd))
            lower_id = higher_id = None
            if pv is not None:
                lower_id, higher_id = adjacent_rivals(rank_cache[rnd], lid)
            rows.append(
                ObservationRow(
                    meet_id=meet.meet_id,
                    federation=meet.category.federation,
                    equipment=meet.category.equipment,
                    age_class=meet.category.age_class,
                    division=meet.category.division,
                    weight_class=meet.category.weight_class,
                    lifter_id=lid,
                    round=rnd,
                    male=int(prof.gender == "male"),
                    bodyweight=prof.bodyweight,
                    age=prof.age,
                    num_experience=prof.num_experience,
                    first_participation=int(prof.first_participation),
                    current_best=cb,
                    prev_best=state.best_outcome(lid, rnd - 1) if rnd > 1 else 0.0,
                    attempt_weight=w,
                    attempt_gap=w - cb,
                    success=int(out),
                    pressure_lower=None if pv is None else pv.lower_attempt_pressure,
                    pressure_higher=None if pv is None else pv.higher_attempt_pressure,
                    turned_around=0 if pv is None else pv.turned_around,
                    turning_around=0 if pv is None else pv.turning_around,
                    tie_indicator=0 if pv is None else pv.tie_indicator,
                    order_mismatch=0 if pv is None else pv.order_mismatch_indicator,
                    prev_attempt_weight=state.declarations[i][rnd - 2] or 0.0 if rnd > 1 else 0.0,
                    prev_success=int(state.outcomes[i][rnd - 2] or 0) if rnd > 1 else 0,
                    rivalry_lower=meet.rivalry.get((lid, lower_id), 0.0) if lower_id else 0.0,
                    rivalry_higher=meet.rivalry.get((lid, higher_id), 0.0) if higher_id else 0.0,
                    lower_rival_id=lower_id,
                    higher_rival_id=higher_id,
                )
            )
    return rows


# --- full ingest orchestration -------------------------------------------------------


@dataclass
class IngestResult:
    rows: list
    meets: list
    report: dict


def ingest(stream, policy: BestPolicy | None = None, fit_predictions: bool = True,
           audit: bool = False) -> IngestResult:
    """Parse, filter, replay, and emit observation rows for a whole file.

    Meets are processed in date order with lifter careers accumulated along
    the way; higher-rival pressures are rebuilt from a leakage-free attempt
    predictor fitted on the emitted rows unless ``fit_predictions`` is False.
    """
    policy = policy or BestPolicy()
    raw, issues = parse_meet_csv(stream)
    kept, exclusions = filter_sample(raw)
    groups = {}
    for r in kept:
        groups.setdefault(_group_key(r), []).append(r)
    ordered = sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0]))
    careers = {}
    pair_history = {}
    meets = []
    replay_failures = 0
    for key, members in ordered:
        date = dt.date.fromisoformat(key[1])
        category = CategoryKey(
            equipment=key[3],
            age_class=key[4],
            weight_class=key[5],
            gender="male" if key[6] == "M" else "female",
            division=key[7],
            federation=key[0],
        )
        current_best, experience, career = {}, {}, {}
        for m in members:
            history = careers.get(m.name, [])
            first_outcome = m.attempts[0][0] if m.attempts[0][1] else 0.0
            current_best[m.name] = resolve_personal_best(history, policy, first_outcome, date)
            experience[m.name] = len(history)
            career[m.name] = max((b for _, b in history), default=0.0)
        rivalry = {
            (a.name, b.name): pair_history.get(_pair_key(key, a.name, b.name), 0)
            for a in members
            for b in members
            if a.name != b.name
        }
        try:
            meet = replay_meet(
                members,
                category,
                current_best,
                meet_id=key[0] + "|" + key[1] + "|" + key[2],
                date=date,
                num_experience=experience,
                rivalry=rivalry,
                career_best=career,
            )
        except CompetitionError:
            replay_failures += len(members)
            continue
        meets.append(meet)
        for m in members:
            best_here = max(
                (att[0] for att in m.attempts if att is not None and att[1]), default=0.0
            )
            careers.setdefault(m.name, []).append((date, best_here))
        for a in members:
            for b in members:
                if a.name < b.name:
                    k2 = _pair_key(key, a.name, b.name)
                    pair_history[k2] = pair_history.get(k2, 0) + 1
    rows = []
    for meet in meets:
        rows.extend(observation_rows(meet, predictions=None, audit=audit))
    if fit_predictions and rows:
        rows = _attach_model_predictions(rows, meets, audit=audit)
    report = {
        "n_raw_rows": len(raw),
        "n_parse_issues": len(issues),
        "parse_issues": [{"line": p.line, "reason": p.reason} for p in issues],
        "exclusions": exclusions,
        "replay_failures": replay_failures,
        "n_meets": len(meets),
        "n_observation_rows": len(rows),
    }
    return IngestResult(rows=rows, meets=meets, report=report)


def _pair_key(group_key, a, b):
    # category identity without the meet date/name: same federation/equipment/
    # age/weight/sex/division define a recurring rivalry arena
    lo, hi = sorted((a, b))
    return (group_key[0], group_key[3], group_key[4], group_key[5], group_key[6], group_key[7], lo, hi)


def _attach_model_predictions(rows, meets, audit=False):
    from .econometrics import PredictionModelSpec, predict_rival_attempt

    preds = {}
    for rnd in (2, 3):
        spec = PredictionModelSpec(target_round=rnd, feature_set="without_previous_success")
        try:
            model, _ = predict_rival_attempt(rows, spec)
        except Exception:
            continue
        sub = [r for r in rows if r.round == rnd]
        values = model.predict(sub)
        for r, v in zip(sub, values):
            preds[(r.meet_id, r.lifter_id, rnd)] = float(v)
    out = []
    for meet in meets:
        local = {
            (lid, rnd): preds[(meet.meet_id, lid, rnd)]
            for lid in (p.lifter_id for p in meet.state.roster)
            for rnd in (2, 3)
            if (meet.meet_id, lid, rnd) in preds
        }
        out.extend(observation_rows(meet, predictions=local, audit=audit))
    return out


# --- summaries and serialization ------------------------------------------------------


SUMMARY_VARIABLES = (
    "male",
    "personal_best",
    "first_attempt",
    "second_attempt",
    "third_attempt",
    "success_1",
    "success_2",
    "success_3",
    "best_attempt",
    "age",
    "bodyweight",
)


def summarize_sample(rows) -> dict:
    """Per-equipment N/mean/sd/min/max over the meet-level variable list."""
    lifters = {}
    for r in rows:
        lifters.setdefault((r.meet_id, r.lifter_id), {}).update(
            {
                "equipment": r.equipment,
                "male": r.male,
                "personal_best": 0.0 if r.first_participation else r.current_best,
                "age": float(r.age),
                "bodyweight": r.bodyweight,
            }
        )
        entry = lifters[(r.meet_id, r.lifter_id)]
        label = {1: "first_attempt", 2: "second_attempt", 3: "third_attempt"}[r.round]
        entry[label] = r.attempt_weight
        entry[f"success_{r.round}"] = float(r.success)
        if r.success:
            entry["best_attempt"] = max(entry.get("best_attempt", 0.0), r.attempt_weight)
    table = {}
    for equip in sorted({e["equipment"] for e in lifters.values()}):
        stats = {}
        for var in SUMMARY_VARIABLES:
            vals = np.array(
                [e[var] for e in lifters.values() if e["equipment"] == equip and var in e]
            )
            if vals.size == 0:
                continue
            stats[var] = {
                "n": int(vals.size),
                "mean": float(vals.mean()),
                "sd": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
                "min": float(vals.min()),
                "max": float(vals.max()),
            }
        table[equip] = stats
    return table


OBSERVATION_COLUMNS = (
    "meet_id",
    "federation",
    "equipment",
    "age_class",
    "division",
    "weight_class",
    "lifter_id",
    "round",
    "male",
    "bodyweight",
    "age",
    "num_experience",
    "first_participation",
    "current_best",
    "prev_best",
    "attempt_weight",
    "attempt_gap",
    "success",
    "pressure_lower",
    "pressure_higher",
    "turned_around",
    "turning_around",
    "tie_indicator",
    "order_mismatch",
    "prev_attempt_weight",
    "prev_success",
    "rivalry_lower",
    "rivalry_higher",
    "lower_rival_id",
    "higher_rival_id",
)

_INT_COLUMNS = {
    "round",
    "male",
    "age",
    "num_experience",
    "first_participation",
    "success",
    "turned_around",
    "turning_around",
    "tie_indicator",
    "order_mismatch",
    "prev_success",
}
_FLOAT_COLUMNS = {
    "bodyweight",
    "current_best",
    "prev_best",
    "attempt_weight",
    "attempt_gap",
    "prev_attempt_weight",
    "rivalry_lower",
    "rivalry_higher",
}
_OPTIONAL_FLOAT = {"pressure_lower", "pressure_higher"}
_OPTIONAL_STR = {"lower_rival_id", "higher_rival_id"}

FILE_VERSION = "rivalpress-observations v1"


def write_observation_file(rows, path, header_meta=None):
    """Versioned tab-separated observation stream; floats use repr for a
    lossless, byte-stable round trip."""
    meta = dict(header_meta or {})
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("#" + FILE_VERSION)
        for k in sorted(meta):
            fh.write(f" {k}={meta[k]}")
        fh.write("\n")
        fh.write("\t".join(OBSERVATION_COLUMNS) + "\n")
        for r in rows:
            cells = []
            for col in OBSERVATION_COLUMNS:
                v = getattr(r, col)
                if v is None:
                    cells.append("")
                elif col in _INT_COLUMNS:
                    cells.append(str(int(v)))
                elif isinstance(v, float):
                    cells.append(repr(v))
                else:
                    cells.append(str(v))
            fh.write("\t".join(cells) + "\n")


def read_observation_file(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("#" + FILE_VERSION):
            raise MissingHeader(f"expected '{FILE_VERSION}' header")
        columns = fh.readline().rstrip("\n").split("\t")
        if list(columns) != list(OBSERVATION_COLUMNS):
            raise MissingHeader("column list does not match the file version")
        for line in fh:
            cells = line.rstrip("\n").split("\t")
            kw = {}
            for col, cell in zip(columns, cells):
                if col in _INT_COLUMNS:
                    kw[col] = int(cell)
                elif col in _FLOAT_COLUMNS:
                    kw[col] = float(cell)
                elif col in _OPTIONAL_FLOAT:
                    kw[col] = float(cell) if cell else None
                elif col in _OPTIONAL_STR:
                    kw[col] = cell or None
                else:
                    kw[col] = cell
            rows.append(ObservationRow(**kw))
    return rows
