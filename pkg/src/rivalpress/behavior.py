"""Rank-based value function, success curves, and expected-utility evaluators.

The attempt-stage evaluators price a declared weight ``w_i`` as a lottery
against the adjacent rivals' positions. Three implementations coexist:

* per-rival closed forms (lower rival only / higher rival only),
* the comprehensive three-regime closed form over both rivals, and
* a brute-force oracle that enumerates all eight success/failure outcomes
  of (self, lower, higher) and prices each realized rank change.

The closed forms must agree with the oracle to 1e-12; the oracle is the
ground truth wherever the regime algebra is in doubt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BoundaryTie, ContextViolation, NonpositiveWeight


@dataclass(frozen=True)
class ValueParams:
    """Loss-averse value of a rank change relative to the current rank.

    v(x) = (x - r)^alpha for x >= r, and -lam * (r - x)^alpha below it.
    Unit rank steps make alpha inert at the lifting stage; it matters only
    for multi-step sensitivity runs.
    """

    alpha: float = 1.0
    lam: float = 2.25
    reference_rank: int = 1

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.reference_rank < 1:
            raise ValueError("reference_rank must be >= 1")


def value(x: float, params: ValueParams) -> float:
    """Value of ending at rank position ``x`` against the reference rank."""
    r = params.reference_rank
    if x >= r:
        return (x - r) ** params.alpha
    return -params.lam * (r - x) ** params.alpha


def _value_of_change(change: int, params: ValueParams) -> float:
    # change is the rank improvement in {-1, 0, +1}
    if change == 0:
        return 0.0
    if change > 0:
        return float(change) ** params.alpha
    return -params.lam * float(-change) ** params.alpha


@dataclass(frozen=True)
class SuccessCurve:
    """Probability of completing a lift as a function of the weight.

    Logistic in (w - anchor) / scale, mapped into [floor, ceiling]: strictly
    decreasing, saturating at the ceiling for light weights and the floor for
    heavy ones, with the midpoint at the anchor (the lifter's best).
    """

    anchor: float
    scale: float
    ceiling: float = 0.95
    floor: float = 0.02

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if not 0 < self.ceiling <= 1:
            raise ValueError("ceiling must be in (0, 1]")
        if not 0 <= self.floor < self.ceiling:
            raise ValueError("floor must be in [0, ceiling)")

    def prob(self, w: float) -> float:
        if w <= 0:
            raise NonpositiveWeight(f"weight {w}")
        z = (w - self.anchor) / self.scale
        if z >= 0:
            e = math.exp(-z)
            logistic = e / (1.0 + e)
        else:
            logistic = 1.0 / (1.0 + math.exp(z))
        return self.floor + (self.ceiling - self.floor) * logistic


def success_prob(curve: SuccessCurve, w: float) -> float:
    """Success probability of attempting ``w`` under the given curve."""
    return curve.prob(w)


@dataclass(frozen=True)
class RivalContext:
    """Everything the attempt-stage evaluation conditions on.

    ``w_lower`` is the lower rival's observed declaration, ``w_higher`` the
    higher rival's declaration (a prediction in estimation, the true value in
    simulation). ``y_*`` are best outcomes so far; strict rank order
    y_lower < y_self < y_higher must hold. The optional ``p_*`` entries
    replace the 0/1 indicators P(w_i > y_higher) and P(w_lower > y_self)
    with plug-in probabilities for sensitivity runs.
    """

    w_lower: float
    w_higher: float
    y_lower: float
    y_self: float
    y_higher: float
    kappa: float
    q_self: SuccessCurve
    q_lower: SuccessCurve
    q_higher: SuccessCurve
    p_self_beats_higher_best: float | None = None
    p_lower_beats_self_best: float | None = None

    def __post_init__(self):
        if self.kappa <= 0:
            raise ContextViolation("kappa must be positive")
        if not self.y_lower < self.y_self < self.y_higher:
            raise ContextViolation(
                f"best outcomes must satisfy y_lower < y_self < y_higher, "
                f"got ({self.y_lower}, {self.y_self}, {self.y_higher})"
            )
        if self.w_lower < self.y_lower:
            raise ContextViolation("lower rival's attempt below his own best")
        if self.w_higher < self.y_higher:
            raise ContextViolation("higher rival's attempt below his own best")
        if self.w_lower == self.y_self:
            raise ContextViolation("w_lower ties y_self; tie cases are excluded")
        for name in ("p_self_beats_higher_best", "p_lower_beats_self_best"):
            p = getattr(self, name)
            if p is not None and not 0 <= p <= 1:
                raise ContextViolation(f"{name} must be a probability")

    def prob_gain_if_higher_fails(self, w_i: float) -> float:
        """P(w_i > y_higher): the chance the lifter's successful attempt tops the
        higher rival's standing best. Indicator unless a plug-in is set."""
        if self.p_self_beats_higher_best is not None:
            return self.p_self_beats_higher_best
        return 1.0 if w_i > self.y_higher else 0.0

    def prob_loss_if_self_fails(self) -> float:
        """P(w_lower > y_self): the chance the lower rival's successful attempt
        overtakes the lifter's standing best."""
        if self.p_lower_beats_self_best is not None:
            return self.p_lower_beats_self_best
        return 1.0 if self.w_lower > self.y_self else 0.0


def _check_weight(w_i: float, ctx: RivalContext) -> None:
    if w_i < ctx.y_self:
        raise ContextViolation(f"attempt {w_i} below own best {ctx.y_self}")
    if w_i == ctx.w_lower or w_i == ctx.w_higher:
        raise BoundaryTie(f"w_i = {w_i} ties a rival declaration")
    if w_i == ctx.y_higher:
        raise BoundaryTie(f"w_i = {w_i} ties the higher rival's best")


def lifting_stage_utility(
    turned_around_possible: bool,
    turning_around_possible: bool,
    own_success: bool,
    higher_success: bool,
    lower_success: bool,
    params: ValueParams,
) -> float:
    """Realized utility of one lift under the two binary pressure exposures.

    With no exposure the rank cannot move and every cell is 0. Exposure from
    below costs -lambda when the lift fails and the lower rival lands his;
    exposure from above pays +1 when the lift succeeds and the higher rival
    misses. The channels are mutually exclusive within one realization.
    """
    u = 0.0
    if turned_around_possible and not own_success and lower_success:
        u -= params.lam
    if turning_around_possible and own_success and not higher_success:
        u += 1.0
    return u


def eu_lower_rival(w_i: float, ctx: RivalContext, params: ValueParams) -> float:
    """Expected utility against the lower rival alone.

    Case w_lower > w_i: rank rests on the rival, EU = -lambda q(w_L).
    Case w_i > w_lower > y_self: loss only if own fail meets rival success.
    Case y_self > w_lower: the rival cannot reach, EU = 0.
    """
    _check_weight(w_i, ctx)
    if ctx.w_lower < ctx.y_self:
        return 0.0
    q_l = ctx.q_lower.prob(ctx.w_lower)
    if ctx.w_lower > w_i:
        return -params.lam * q_l
    return -params.lam * (1.0 - ctx.q_self.prob(w_i)) * q_l


def eu_higher_rival(w_i: float, ctx: RivalContext, params: ValueParams) -> float:
    """Expected utility against the higher rival alone.

    Case w_i < y_higher: out of reach, EU = 0.
    Case y_higher < w_i < w_higher: gain needs own success and rival failure.
    Case w_i > w_higher: success alone secures the overtake, EU = q(w_i).
    """
    _check_weight(w_i, ctx)
    if w_i < ctx.y_higher:
        return 0.0
    q_i = ctx.q_self.prob(w_i)
    if w_i > ctx.w_higher:
        return q_i
    return q_i * (1.0 - ctx.q_higher.prob(ctx.w_higher))


def eu_comprehensive(w_i: float, ctx: RivalContext, params: ValueParams) -> float:
    """Expected utility of ``w_i`` with both rivals priced jointly.

    Implements the regime-wise closed form of the joint outcome table; the
    plug-in probabilities G = P(w_i > y_higher) and B = P(w_lower > y_self)
    enter exactly where the corresponding comparison decides the rank row,
    so the expression matches :func:`brute_force_eu` identically.
    """
    _check_weight(w_i, ctx)
    q = ctx.q_self.prob(w_i)
    q_l = ctx.q_lower.prob(ctx.w_lower)
    q_h = ctx.q_higher.prob(ctx.w_higher)
    g = ctx.prob_gain_if_higher_fails(w_i)
    b = ctx.prob_loss_if_self_fails()
    lam = params.lam
    if w_i < ctx.w_lower and w_i < ctx.w_higher:
        loss = q * q_l * q_h + q * q_l * (1.0 - q_h) * (1.0 - g) + (1.0 - q) * q_l * b
        gain = q * (1.0 - q_l) * (1.0 - q_h) * g
        return gain - lam * loss
    if w_i > ctx.w_lower and w_i > ctx.w_higher:
        loss = (1.0 - q) * q_l * b
        gain = q * (q_h + (1.0 - q_h) * g)
        return gain - lam * loss
    if ctx.w_lower < w_i < ctx.w_higher:
        loss = (1.0 - q) * q_l * b
        gain = q * (1.0 - q_h) * g
        return gain - lam * loss
    # w_higher < w_i < w_lower: succeeding tops the higher rival but the lower
    # rival's heavier bar cancels the step whenever that lift lands too
    loss = (1.0 - q) * q_l * b + q * q_l * (1.0 - q_h) * (1.0 - g)
    gain = q * (1.0 - q_l) * (q_h + (1.0 - q_h) * g)
    return gain - lam * loss


def brute_force_eu(w_i: float, ctx: RivalContext, params: ValueParams) -> float:
    """Oracle for the attempt-stage evaluators.

    Enumerates the eight success/failure combinations of (self, lower,
    higher), resolves each realized rank change from the post-lift bests,
    and sums probability-weighted value. Plug-in probabilities split the
    rows whose rank resolution depends on the corresponding comparison.
    """
    _check_weight(w_i, ctx)
    q = ctx.q_self.prob(w_i)
    q_l = ctx.q_lower.prob(ctx.w_lower)
    q_h = ctx.q_higher.prob(ctx.w_higher)
    g = ctx.prob_gain_if_higher_fails(w_i)
    b = ctx.prob_loss_if_self_fails()
    total = 0.0
    for own in (True, False):
        p_own = q if own else 1.0 - q
        for low in (True, False):
            p_low = q_l if low else 1.0 - q_l
            for high in (True, False):
                p = p_own * p_low * (q_h if high else 1.0 - q_h)
                if p == 0.0:
                    continue
                if own:
                    # loss requires the lower rival's bar above the realized own best
                    p_loss = (1.0 if ctx.w_lower > w_i else 0.0) if low else 0.0
                    if high:
                        p_gain = 1.0 if w_i > ctx.w_higher else 0.0
                    else:
                        p_gain = g
                else:
                    p_loss = b if low else 0.0
                    p_gain = 0.0  # a failed lift never overtakes: y_self < y_higher
                ev = (
                    p_gain * p_loss * _value_of_change(0, params)
                    + p_gain * (1.0 - p_loss) * _value_of_change(1, params)
                    + (1.0 - p_gain) * p_loss * _value_of_change(-1, params)
                )
                total += p * ev
    return total


def mute_rival(ctx: RivalContext, side: str, w_max: float) -> RivalContext:
    """Context with one rival moved out of reach for any attempt up to ``w_max``.

    Muting the higher rival lifts his standing best and declaration above
    every evaluated weight, so neither the gain indicator nor an overtake can
    fire; muting the lower rival parks his declaration below the lifter's own
    best, killing both loss channels. The surviving channel then reproduces
    the corresponding per-rival closed form under the full oracle.
    """
    if side == "higher":
        y_h = max(ctx.y_higher, w_max + 2 * ctx.kappa)
        return RivalContext(
            w_lower=ctx.w_lower,
            w_higher=max(ctx.w_higher, y_h + ctx.kappa),
            y_lower=ctx.y_lower,
            y_self=ctx.y_self,
            y_higher=y_h,
            kappa=ctx.kappa,
            q_self=ctx.q_self,
            q_lower=ctx.q_lower,
            q_higher=ctx.q_higher,
            p_lower_beats_self_best=ctx.p_lower_beats_self_best,
        )
    if side == "lower":
        return RivalContext(
            w_lower=0.5 * (ctx.y_lower + ctx.y_self),
            w_higher=ctx.w_higher,
            y_lower=ctx.y_lower,
            y_self=ctx.y_self,
            y_higher=ctx.y_higher,
            kappa=ctx.kappa,
            q_self=ctx.q_self,
            q_lower=ctx.q_lower,
            q_higher=ctx.q_higher,
            p_self_beats_higher_best=ctx.p_self_beats_higher_best,
        )
    raise ValueError(f"side must be lower/higher, got {side!r}")
