"""Deterministic state machine for a single bench-press competition.

Implements declaration, lifting-order, tie-breaking, outcome recording,
interim ranking, and the per-lifter observability rules of the sequential
timeline: a lifter declares the next round's weight immediately after their
own lift, so they see earlier-positioned lifters' outcomes and next-round
declarations but nothing from lifters positioned after them.

Every mutation appends to an ordered event log so that the no-lookahead
property can be checked mechanically by replaying the log.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    AlreadyRecorded,
    DecreaseNotAllowed,
    DuplicateLifter,
    EmptyInput,
    IncompleteRound,
    InvalidDecisionPoint,
    MissingDeclaration,
    MissingOpener,
    OutOfTurn,
    RepeatAfterSuccessNotAllowed,
    RosterTooSmall,
)

ROUNDS = (1, 2, 3)

#: interim-rank tie resolution: lighter lifter wins, or first to achieve the weight
TIE_BY_BODYWEIGHT = "bodyweight"
TIE_BY_FIRST_ACHIEVED = "first_achieved"

#: rank-change buckets used by the rank-change distribution table
RANK_BUCKETS = ("<=-2", "-1", "0", "+1", ">=+2")


@dataclass(frozen=True)
class LifterProfile:
    """Static covariates of one lifter.

    ``personal_best`` of 0 encodes "never competed"; in that case
    ``first_participation`` must be True and vice versa.
    """

    lifter_id: str
    gender: str  # "male" | "female"
    bodyweight: float
    age: int
    num_experience: int = 0
    first_participation: bool = False
    personal_best: float = 0.0

    def __post_init__(self):
        if self.gender not in ("male", "female"):
            raise ValueError(f"gender must be male/female, got {self.gender!r}")
        if self.bodyweight <= 0:
            raise ValueError("bodyweight must be positive")
        if not 15 <= self.age <= 69:
            raise ValueError(f"age {self.age} outside [15, 69]")
        if self.num_experience < 0:
            raise ValueError("num_experience must be nonnegative")
        if self.personal_best < 0:
            raise ValueError("personal_best must be nonnegative")
        if self.first_participation != (self.personal_best == 0):
            raise ValueError("first_participation must match personal_best == 0")


@dataclass(frozen=True)
class CategoryKey:
    """Competition category; ``federation`` doubles as the cluster variable."""

    equipment: str  # "raw" | "single_ply" | "multi_ply"
    age_class: str
    weight_class: str
    gender: str
    division: str
    federation: str

    def __post_init__(self):
        if self.equipment not in ("raw", "single_ply", "multi_ply"):
            raise ValueError(f"unknown equipment {self.equipment!r}")
        for name in ("age_class", "weight_class", "gender", "division", "federation"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")


@dataclass(frozen=True)
class AttemptRecord:
    round: int
    declared_weight: float
    outcome: str  # "pending" | "success" | "failure"


@dataclass(frozen=True)
class InformationSet:
    """What one lifter has observed at a given decision point."""

    observer: str
    round: int
    stage: str  # "declare" | "lift"
    observed_attempts: frozenset  # (lifter_id, round, declared_weight)
    observed_outcomes: frozenset  # (lifter_id, round, "success"/"failure")

    def knows_attempt(self, lifter_id: str, rnd: int, weight: float) -> bool:
        return (lifter_id, rnd, weight) in self.observed_attempts

    def knows_outcome(self, lifter_id: str, rnd: int) -> bool:
        return any(o[0] == lifter_id and o[1] == rnd for o in self.observed_outcomes)


class CompetitionState:
    """Full tournament state for one category.

    Construct via :func:`init_competition`. All mutators validate protocol
    rules and append to the event log; lists are indexed by roster position.
    """

    def __init__(self, category, roster, openers, kappa, tie_break):
        if len(roster) < 2:
            raise RosterTooSmall(f"need >= 2 lifters, got {len(roster)}")
        self.category = category
        self.roster = list(roster)
        self.kappa = kappa
        self.tie_break = tie_break
        self._index = {}
        for i, prof in enumerate(self.roster):
            if prof.lifter_id in self._index:
                raise DuplicateLifter(prof.lifter_id)
            self._index[prof.lifter_id] = i
        n = len(self.roster)
        for prof in self.roster:
            w = openers.get(prof.lifter_id)
            if w is None or w <= 0:
                raise MissingOpener(prof.lifter_id)
        # declarations[i][r-1]: declared weight or None; passes mark withdrawal
        self.declarations = [[openers[p.lifter_id], None, None] for p in self.roster]
        self.passes = [[False, False, False] for _ in range(n)]
        self.outcomes = [[None, None, None] for _ in range(n)]
        self.current_round = 1
        self.cursor = 0
        self.orders = {1: self._sorted_order(1)}
        self.events = []
        for i in self.orders[1]:
            self._log("open", self.roster[i].lifter_id, 1, self.declarations[i][0], "-")

    # --- bookkeeping -----------------------------------------------------

    def _log(self, kind, lifter_id, rnd, weight, outcome):
        self.events.append((kind, lifter_id, rnd, weight, outcome))

    def _idx(self, lifter_id):
        try:
            return self._index[lifter_id]
        except KeyError:
            raise OutOfTurn(f"unknown lifter {lifter_id!r}") from None

    def _sorted_order(self, rnd):
        entered = [i for i in range(len(self.roster)) if self.declarations[i][rnd - 1] is not None]
        entered.sort(key=lambda i: (self.declarations[i][rnd - 1], self.roster[i].bodyweight, i))
        return entered

    def position(self, lifter_id: str, rnd: int) -> int:
        """0-based slot of the lifter in the round's lifting order."""
        i = self._idx(lifter_id)
        order = self.orders.get(rnd)
        if order is None or i not in order:
            raise InvalidDecisionPoint(f"{lifter_id} not in round {rnd} order")
        return order.index(i)

    # --- protocol operations ----------------------------------------------

    def lifting_order(self, rnd: int) -> list:
        """Lifter ids in lifting order: ascending declared weight, ties to the
        lighter lifter, then stable by roster index."""
        if rnd not in ROUNDS:
            raise InvalidDecisionPoint(f"round {rnd}")
        if rnd in self.orders:
            return [self.roster[i].lifter_id for i in self.orders[rnd]]
        missing = [
            p.lifter_id
            for i, p in enumerate(self.roster)
            if self.declarations[i][rnd - 1] is None and not self.passes[i][rnd - 1]
        ]
        if missing:
            raise MissingDeclaration(f"round {rnd}: {missing}")
        return [self.roster[i].lifter_id for i in self._sorted_order(rnd)]

    def declaration_ties(self, rnd: int) -> set:
        """Lifters sharing a declared weight with someone else in the round."""
        seen = {}
        for i in range(len(self.roster)):
            w = self.declarations[i][rnd - 1]
            if w is not None:
                seen.setdefault(w, []).append(self.roster[i].lifter_id)
        return {lid for group in seen.values() if len(group) > 1 for lid in group}

    def declare_next(self, lifter_id: str, weight: float) -> "CompetitionState":
        """Declare the weight for the lifter's next attempt.

        Allowed only after the lifter's current-round outcome is realized;
        the weight may never decrease and may repeat only after a failure.
        """
        i = self._idx(lifter_id)
        rnd = self.current_round
        if rnd >= 3:
            raise OutOfTurn(f"{lifter_id}: no round after 3")
        if self.outcomes[i][rnd - 1] is None:
            if self.passes[i][rnd - 1]:
                raise OutOfTurn(f"{lifter_id} passed round {rnd}")
            raise OutOfTurn(f"{lifter_id}: round {rnd} outcome not realized")
        if self.declarations[i][rnd] is not None or self.passes[i][rnd]:
            raise AlreadyRecorded(f"{lifter_id} already declared round {rnd + 1}")
        prev = self.declarations[i][rnd - 1]
        if weight < prev:
            raise DecreaseNotAllowed(f"{weight} < {prev}")
        if weight == prev and self.outcomes[i][rnd - 1] is True:
            raise RepeatAfterSuccessNotAllowed(f"{lifter_id} at {weight}")
        self.declarations[i][rnd] = weight
        self._log("declare", lifter_id, rnd + 1, weight, "-")
        return self

    def declare_pass(self, lifter_id: str) -> "CompetitionState":
        """Withdraw from the next round (no further attempts)."""
        i = self._idx(lifter_id)
        rnd = self.current_round
        if rnd >= 3:
            raise OutOfTurn(f"{lifter_id}: no round after 3")
        if self.declarations[i][rnd] is not None or self.passes[i][rnd]:
            raise AlreadyRecorded(f"{lifter_id} already declared round {rnd + 1}")
        self.passes[i][rnd] = True
        self._log("pass", lifter_id, rnd + 1, 0.0, "-")
        return self

    def record_outcome(self, lifter_id: str, success: bool) -> "CompetitionState":
        """Record the outcome of the lift at the current cursor position."""
        i = self._idx(lifter_id)
        order = self.orders[self.current_round]
        if self.cursor >= len(order):
            raise OutOfTurn(f"round {self.current_round} complete")
        if self.outcomes[i][self.current_round - 1] is not None:
            raise AlreadyRecorded(f"{lifter_id} round {self.current_round}")
        if order[self.cursor] != i:
            raise OutOfTurn(
                f"{lifter_id} is not at position {self.cursor} of round {self.current_round}"
            )
        self.outcomes[i][self.current_round - 1] = bool(success)
        self._log(
            "lift",
            lifter_id,
            self.current_round,
            self.declarations[i][self.current_round - 1],
            "success" if success else "failure",
        )
        self.cursor += 1
        return self

    def round_complete(self, rnd: int) -> bool:
        order = self.orders.get(rnd)
        if order is None:
            return False
        return all(self.outcomes[i][rnd - 1] is not None for i in order)

    def start_round(self, rnd: int) -> "CompetitionState":
        """Advance to round ``rnd`` once the previous round's outcomes and the
        new round's declarations are complete."""
        if rnd != self.current_round + 1 or rnd not in ROUNDS:
            raise OutOfTurn(f"cannot start round {rnd} from {self.current_round}")
        if not self.round_complete(self.current_round):
            raise IncompleteRound(f"round {self.current_round} not finished")
        missing = [
            self.roster[i].lifter_id
            for i in self.orders[self.current_round]
            if self.declarations[i][rnd - 1] is None and not self.passes[i][rnd - 1]
        ]
        if missing:
            raise MissingDeclaration(f"round {rnd}: {missing}")
        self.orders[rnd] = self._sorted_order(rnd)
        self.current_round = rnd
        self.cursor = 0
        return self

    @property
    def complete(self) -> bool:
        if self.current_round < 3:
            # competition can end early if everyone withdraws
            return self.round_complete(self.current_round) and all(
                self.passes[i][self.current_round] for i in self.orders[self.current_round]
            )
        return self.round_complete(3)

    # --- derived views ------------------------------------------------------

    def attempt_record(self, lifter_id: str, rnd: int) -> AttemptRecord:
        i = self._idx(lifter_id)
        w = self.declarations[i][rnd - 1]
        if w is None:
            raise MissingDeclaration(f"{lifter_id} round {rnd}")
        out = self.outcomes[i][rnd - 1]
        status = "pending" if out is None else ("success" if out else "failure")
        return AttemptRecord(rnd, w, status)

    def best_outcome(self, lifter_id: str, through_round: int = 3) -> float:
        """Heaviest successful weight through the given round, 0 if none."""
        i = self._idx(lifter_id)
        return self._best(i, through_round)

    def _best(self, i, through_round):
        best = 0.0
        for r in range(through_round):
            if self.outcomes[i][r] is True and self.declarations[i][r] > best:
                best = self.declarations[i][r]
        return best

    def _achieved_at(self, i, through_round):
        # (round, position) at which the lifter's best was achieved
        best, at = 0.0, (99, 99)
        for r in range(1, through_round + 1):
            if self.outcomes[i][r - 1] is True and self.declarations[i][r - 1] > best:
                best = self.declarations[i][r - 1]
                order = self.orders.get(r)
                at = (r, order.index(i) if order and i in order else 99)
        return at

    def interim_rank(self, after_round: int) -> dict:
        """Rank 1 = heaviest best outcome; ties to the lighter lifter (or first
        achiever under that federation rule); no-success lifters rank below all
        others in ascending bodyweight order.

        ``after_round`` 0 ranks by opener (heaviest first), the pre-competition
        provisional order.
        """
        if after_round not in (0, 1, 2, 3):
            raise InvalidDecisionPoint(f"after_round {after_round}")
        n = len(self.roster)
        if after_round == 0:
            keyed = sorted(
                range(n),
                key=lambda i: (-self.declarations[i][0], self.roster[i].bodyweight, i),
            )
            return {self.roster[i].lifter_id: r + 1 for r, i in enumerate(keyed)}
        for r in range(1, after_round + 1):
            order = self.orders.get(r)
            if order is None or not all(self.outcomes[i][r - 1] is not None for i in order):
                raise IncompleteRound(f"round {r} outcomes not all realized")

        def key(i):
            best = self._best(i, after_round)
            if best == 0.0:
                return (1, 0.0, 0, 0, self.roster[i].bodyweight, i)
            if self.tie_break == TIE_BY_FIRST_ACHIEVED:
                ach = self._achieved_at(i, after_round)
                return (0, -best, ach[0], ach[1], 0.0, i)
            return (0, -best, 0, 0, self.roster[i].bodyweight, i)

        keyed = sorted(range(n), key=key)
        return {self.roster[i].lifter_id: r + 1 for r, i in enumerate(keyed)}

    def information_set(self, lifter_id: str, stage: str, rnd: int) -> InformationSet:
        """Observables at a decision point of the sequential timeline.

        ``("declare", k)`` is the moment the lifter declares their round-k
        weight (during round k-1, right after their own lift); ``("lift", k)``
        is the moment they execute the round-k attempt. Openers are submitted
        simultaneously before the competition, so ``("declare", 1)`` sees
        nothing.
        """
        i = self._idx(lifter_id)
        if stage not in ("declare", "lift") or rnd not in ROUNDS:
            raise InvalidDecisionPoint(f"{stage} round {rnd}")
        attempts, outcomes = set(), set()

        def add_declarations(through_round, restrict=None):
            for r in range(1, through_round + 1):
                members = self.orders.get(r)
                if members is None:
                    members = [
                        j for j in range(len(self.roster)) if self.declarations[j][r - 1] is not None
                    ]
                for j in members:
                    if restrict is not None and r == through_round and j not in restrict:
                        continue
                    attempts.add((self.roster[j].lifter_id, r, self.declarations[j][r - 1]))

        def add_outcomes(through_round, last_round_upto=None):
            for r in range(1, through_round + 1):
                order = self.orders.get(r, [])
                for pos, j in enumerate(order):
                    if r == through_round and last_round_upto is not None and pos >= last_round_upto:
                        break
                    if self.outcomes[j][r - 1] is not None:
                        outcomes.add(
                            (
                                self.roster[j].lifter_id,
                                r,
                                "success" if self.outcomes[j][r - 1] else "failure",
                            )
                        )

        if stage == "declare":
            if rnd > 1:
                prev_order = self.orders.get(rnd - 1)
                if prev_order is None or i not in prev_order:
                    raise InvalidDecisionPoint(f"{lifter_id} did not lift round {rnd - 1}")
                p = prev_order.index(i)
                earlier = set(prev_order[:p])
                add_declarations(rnd - 1)
                add_declarations(rnd, restrict=earlier)
                add_outcomes(rnd - 1, last_round_upto=p + 1)
        else:  # lift
            order = self.orders.get(rnd)
            if order is None or i not in order:
                raise InvalidDecisionPoint(f"{lifter_id} not in round {rnd}")
            p = order.index(i)
            add_declarations(rnd)
            add_outcomes(rnd, last_round_upto=p)
        return InformationSet(lifter_id, rnd, stage, frozenset(attempts), frozenset(outcomes))

    # --- event log -----------------------------------------------------------

    def event_lines(self) -> list:
        """Serialize the event log, one tab-separated event per line."""
        return [
            f"{kind}\t{lifter}\t{rnd}\t{weight:g}\t{outcome}"
            for kind, lifter, rnd, weight, outcome in self.events
        ]


def init_competition(category, roster, openers, *, kappa=2.5, tie_break=TIE_BY_BODYWEIGHT):
    """Set up a competition: round 1, order ascending in opener, all pending."""
    return CompetitionState(category, roster, openers, kappa, tie_break)


def verify_no_lookahead(state: CompetitionState) -> list:
    """Replay the event log and return all (event_index, description) pairs
    where a decision point's information set contains an outcome that was
    recorded later in the log. Empty list = the timeline is consistent."""
    lift_at = {}
    for pos, (kind, lifter, rnd, _w, _o) in enumerate(state.events):
        if kind == "lift":
            lift_at[(lifter, rnd)] = pos
    violations = []
    for pos, (kind, lifter, rnd, _w, _o) in enumerate(state.events):
        if kind != "declare":
            continue
        info = state.information_set(lifter, "declare", rnd)
        for (who, r, _out) in info.observed_outcomes:
            seen_at = lift_at.get((who, r))
            if seen_at is None or seen_at > pos:
                violations.append((pos, f"{lifter} declaring round {rnd} saw ({who}, {r})"))
    return violations


def rank_change_distribution(histories) -> dict:
    """Frequency table of interim-rank changes at rounds 2 and 3.

    Change is previous rank minus new rank (positive = moved up), bucketed
    into ``RANK_BUCKETS``; frequencies sum to 1 per round.
    """
    if not histories:
        raise EmptyInput("no competition histories")
    counts = {2: dict.fromkeys(RANK_BUCKETS, 0), 3: dict.fromkeys(RANK_BUCKETS, 0)}
    totals = {2: 0, 3: 0}
    for state in histories:
        ranks = {r: state.interim_rank(r) for r in (1, 2, 3)}
        for rnd in (2, 3):
            for lifter_id in ranks[rnd]:
                change = ranks[rnd - 1][lifter_id] - ranks[rnd][lifter_id]
                if change <= -2:
                    bucket = "<=-2"
                elif change >= 2:
                    bucket = ">=+2"
                else:
                    bucket = {-1: "-1", 0: "0", 1: "+1"}[change]
                counts[rnd][bucket] += 1
                totals[rnd] += 1
    return {
        rnd: {b: counts[rnd][b] / totals[rnd] for b in RANK_BUCKETS} for rnd in (2, 3)
    }
