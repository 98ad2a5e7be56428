"""Optimal attempt-weight selection over the declaration lattice.

The decision space is genuinely discrete (multiples of the minimum increment
kappa) and small, so the optimizer is an exhaustive argmax; the closed-form
boundary-plus-kappa predictions exist as independent cross-checks, never as
the implementation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .behavior import (
    RivalContext,
    ValueParams,
    brute_force_eu,
    eu_comprehensive,
    eu_higher_rival,
    eu_lower_rival,
)
from .errors import BoundaryTie, ContextViolation, EmptyGrid

BELOW_BOTH = "below_both"
BETWEEN = "between"
ABOVE_BOTH = "above_both"

MODELS = ("lower_only", "higher_only", "comprehensive")


@dataclass(frozen=True)
class WeightGrid:
    """Candidate weights ``lower, lower+step, ..., upper`` on the kappa lattice."""

    lower: float
    upper: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise EmptyGrid("step must be positive")
        if self.upper < self.lower:
            raise EmptyGrid(f"empty grid [{self.lower}, {self.upper}]")

    def points(self) -> list:
        n = int(round((self.upper - self.lower) / self.step))
        return [self.lower + k * self.step for k in range(n + 1)]

    def __contains__(self, w: float) -> bool:
        if w < self.lower - 1e-9 or w > self.upper + 1e-9:
            return False
        k = (w - self.lower) / self.step
        return abs(k - round(k)) < 1e-9


@dataclass(frozen=True)
class PolicyResult:
    chosen_weight: float
    achieved_eu: float
    regime: str
    runner_up_gap: float


def default_grid(ctx: RivalContext, floor: float | None = None, spread: float = 12.0) -> WeightGrid:
    """Grid from just above the lifter's best to anchor + spread * scale,
    where the success curve has flattened onto its floor."""
    lo = ctx.y_self + ctx.kappa
    if floor is not None:
        lo = max(lo, floor)
    lo = round(lo / ctx.kappa) * ctx.kappa
    if lo <= ctx.y_self:
        lo += ctx.kappa
    hi = ctx.q_self.anchor + spread * ctx.q_self.scale
    hi = max(hi, ctx.w_higher + 2 * ctx.kappa, ctx.w_lower + 2 * ctx.kappa)
    n = max(0, int((hi - lo) / ctx.kappa))
    return WeightGrid(lo, lo + n * ctx.kappa, ctx.kappa)


def regime_of(w_i: float, ctx: RivalContext) -> str:
    """Position of the candidate weight relative to both rivals' declarations."""
    if w_i == ctx.w_lower or w_i == ctx.w_higher:
        raise BoundaryTie(f"w_i = {w_i} sits on a rival boundary")
    if w_i < ctx.w_lower and w_i < ctx.w_higher:
        return BELOW_BOTH
    if w_i > ctx.w_lower and w_i > ctx.w_higher:
        return ABOVE_BOTH
    return BETWEEN


def _evaluator(model: str):
    if model == "lower_only":
        return eu_lower_rival
    if model == "higher_only":
        return eu_higher_rival
    if model == "comprehensive":
        return eu_comprehensive
    raise ValueError(f"model must be one of {MODELS}, got {model!r}")


def optimal_weight(
    ctx: RivalContext,
    params: ValueParams,
    grid: WeightGrid,
    model: str = "comprehensive",
    use_oracle: bool = False,
) -> PolicyResult:
    """Exhaustive argmax of expected utility over the grid.

    Lattice points that tie a rival boundary (or the higher rival's best) are
    skipped: the evaluators reject them and no tie point can strictly dominate
    its kappa-neighbors under a decreasing success curve. EU ties break toward
    the lightest weight, the risk-minimal optimum.
    """
    evaluate = brute_force_eu if use_oracle and model == "comprehensive" else _evaluator(model)
    best_w, best_eu, second_eu = None, None, None
    for w in grid.points():
        try:
            eu = evaluate(w, ctx, params)
        except BoundaryTie:
            continue
        if best_eu is None or eu > best_eu:
            best_w, second_eu, best_eu = w, best_eu, eu
        elif second_eu is None or eu > second_eu:
            second_eu = eu
    if best_w is None:
        raise EmptyGrid(f"no evaluable points in [{grid.lower}, {grid.upper}]")
    gap = 0.0 if second_eu is None else max(0.0, best_eu - second_eu)
    return PolicyResult(best_w, best_eu, regime_of(best_w, ctx), gap)


def theoretical_prediction(ctx: RivalContext, params: ValueParams, model: str) -> float:
    """Closed-form boundary-plus-kappa declaration implied by the case analysis.

    Lower rival: just above the rival's bar when it threatens the lifter's
    best, otherwise the minimal legal weight. Higher rival: just above his
    standing best, or just above his declaration when the success curve is
    flat enough there, the dominance condition q(w+)/q(w-) > 1 - q(w_H).
    The comprehensive model compares its per-regime champions directly.
    """
    k = ctx.kappa
    floor_w = ctx.y_self + k
    if model == "lower_only":
        return ctx.w_lower + k if ctx.w_lower > ctx.y_self else floor_w
    if model == "higher_only":
        reach = max(ctx.y_higher + k, floor_w)
        top = max(ctx.w_higher + k, floor_w)
        if reach >= top:
            return top
        ratio = ctx.q_self.prob(top) / ctx.q_self.prob(reach)
        if ratio > 1.0 - ctx.q_higher.prob(ctx.w_higher):
            return top
        return reach
    if model == "comprehensive":
        candidates = []
        for w in {max(ctx.y_higher + k, floor_w), max(ctx.w_higher + k, floor_w),
                  max(ctx.w_lower + k, floor_w), floor_w}:
            try:
                candidates.append((eu_comprehensive(w, ctx, params), -w))
            except (BoundaryTie, ContextViolation):
                continue
        if not candidates:
            raise ContextViolation("no admissible candidate weights")
        eu, neg_w = max(candidates)
        return -neg_w
    raise ValueError(f"model must be one of {MODELS}, got {model!r}")
