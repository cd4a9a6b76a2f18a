"""Closed-form exponential upper bounds on tail probabilities of sums.

Every evaluator returns a :class:`TailBoundResult` that carries the bound in
log space together with the additive pieces of its exponent, so bounds can be
compared across many orders of magnitude without overflow.  Raw bound values
may exceed 1; clamping to a probability is the caller's choice (see
``TailBoundResult.probability``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

__all__ = [
    "BoundInputs",
    "FukNagaevInputs",
    "TailBoundResult",
    "bennett_bound",
    "bernstein_bound",
    "comparison_gap",
    "fuk_nagaev_bound",
    "fuk_nagaev_general",
]

_LOG_MAX = 709.0  # exp overflows just above this


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def _log1p_ratio(eps: float, a: float, s: float) -> float:
    """log(1 + eps*a/s), guarded against intermediate overflow."""
    r = eps * (a / s)
    if math.isfinite(r):
        return math.log1p(r)
    r = (eps / s) * a
    if math.isfinite(r):
        return math.log1p(r)
    # ratio exceeds the float range; log(1+r) == log(r) to double precision
    return math.log(eps) + math.log(a) - math.log(s)


def _logaddexp(x: float, y: float) -> float:
    if x == -math.inf:
        return y
    if y == -math.inf:
        return x
    hi, lo = (x, y) if x >= y else (y, x)
    return hi + math.log1p(math.exp(lo - hi))


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the one-shot exponential bounds.

    ``epsilon`` is the deviation threshold, ``a`` the almost-sure bound on the
    summands, ``s`` the budget for the summed second moments and ``m`` the
    multiplicative dependence constant.  ``n_terms`` is carried for bounds
    whose tail-sum piece needs the row length.
    """

    epsilon: float
    a: float
    s: float
    m: float = 1.0
    n_terms: int = 1

    def __post_init__(self):
        _require(self.epsilon >= 0.0, f"epsilon must be >= 0, got {self.epsilon}")
        _require(self.a > 0.0, f"a must be > 0, got {self.a}")
        _require(self.s > 0.0, f"s must be > 0, got {self.s}")
        _require(self.m >= 1.0, f"m must be >= 1, got {self.m}")
        _require(self.n_terms >= 1, f"n_terms must be >= 1, got {self.n_terms}")


@dataclass(frozen=True)
class FukNagaevInputs:
    """Inputs for the truncation-based two-sided bound.

    ``abs_moment_sum`` is the summed p-th absolute moment of the row and
    ``marginal_tails`` holds one callable per summand mapping a threshold t
    to P{|X_k| > t}.
    """

    epsilon: float
    lam: float
    p: float
    abs_moment_sum: float
    marginal_tails: Sequence[Callable[[float], float]]
    m: float = 1.0

    def __post_init__(self):
        _require(self.epsilon > 0.0, f"epsilon must be > 0, got {self.epsilon}")
        _require(self.lam > 0.0, f"lam must be > 0, got {self.lam}")
        _require(0.0 < self.p <= 1.0, f"p must lie in (0, 1], got {self.p}")
        _require(self.abs_moment_sum > 0.0,
                 f"abs_moment_sum must be > 0, got {self.abs_moment_sum}")
        _require(self.m >= 1.0, f"m must be >= 1, got {self.m}")


@dataclass(frozen=True)
class TailBoundResult:
    """A probability bound carried in log space.

    ``bound`` is exp(log_bound) and may exceed 1 (the formulas are not
    restricted to probabilities); ``probability`` clamps at 1.
    ``exponent_terms`` are the labelled additive pieces behind the result.
    """

    log_bound: float
    exponent_terms: dict = field(default_factory=dict)

    @property
    def bound(self) -> float:
        if self.log_bound > _LOG_MAX:
            return math.inf
        return math.exp(self.log_bound)

    @property
    def probability(self) -> float:
        return min(1.0, self.bound)


def bennett_bound(inputs: BoundInputs) -> TailBoundResult:
    """One-sided bound on P{sum > eps} for zero-mean upper-extended negatively
    dependent summands bounded above by ``a`` with summed second moments at
    most ``s``, scaled by the dependence constant ``m``.

    The exponent is eps/a - (eps/a + s/a^2) * log(1 + eps*a/s); it is <= 0 for
    every eps >= 0, so the bound never exceeds ``m``.  Double the result for
    the two-sided version (the hypotheses are symmetric under negation).
    """
    eps, a, s, m = inputs.epsilon, inputs.a, inputs.s, inputs.m
    if eps == 0.0:
        return TailBoundResult(math.log(m), {"linear": 0.0, "log_penalty": 0.0})
    lr = _log1p_ratio(eps, a, s)
    linear = eps / a
    weight = eps / a + s / (a * a)
    penalty = -weight * lr
    # exact arithmetic gives a nonpositive exponent; guard rounding
    exponent = min(linear + penalty, 0.0)
    return TailBoundResult(math.log(m) + exponent,
                           {"linear": linear, "log_penalty": penalty})


def bernstein_bound(inputs: BoundInputs) -> TailBoundResult:
    """Quadratic-over-linear bound m * exp(-eps^2 / (2*(eps*a + s)))."""
    eps, a, s, m = inputs.epsilon, inputs.a, inputs.s, inputs.m
    if eps == 0.0:
        exponent = 0.0
    else:
        # eps^2/(2(eps a + s)) written as eps/(2(a + s/eps)) to avoid overflow
        exponent = -eps / (2.0 * (a + s / eps))
    return TailBoundResult(math.log(m) + exponent, {"quadratic": exponent})


def comparison_gap(x: float) -> float:
    """Exponent gap 2 + x/(1+x) - 2*(1 - 1/x)*log(1+x) between the quadratic
    and the entropy-type bound at deviation x (in units of s/a).

    Negative values mean the entropy-type exponent is strictly smaller; the
    gap is negative and nonincreasing for all x >= 5 and behaves like
    -2*log(x) as x grows.
    """
    _require(x > 0.0, f"x must be > 0, got {x}")
    return 2.0 + x / (1.0 + x) - 2.0 * (1.0 - 1.0 / x) * math.log1p(x)


def fuk_nagaev_general(inputs: FukNagaevInputs, delta: float) -> TailBoundResult:
    """Two-sided bound on P{|sum| > eps} with free truncation level ``delta``:

        sum_k P{|X_k| > delta}
          + 2*m*exp[eps/delta - (eps/delta)*log(1 + eps*delta^(p-1)/S)]

    where S is ``abs_moment_sum``.  ``fuk_nagaev_bound`` is the
    delta = eps/lam specialisation.
    """
    _require(delta > 0.0, f"delta must be > 0, got {delta}")
    eps, p, s_p, m = inputs.epsilon, inputs.p, inputs.abs_moment_sum, inputs.m
    tail_sum = 0.0
    for tail in inputs.marginal_tails:
        value = float(tail(delta))
        _require(0.0 <= value <= 1.0 + 1e-12,
                 f"marginal tail must be a probability, got {value}")
        tail_sum += min(value, 1.0)
    lr = _log1p_ratio(eps, delta ** (p - 1.0), s_p)
    ratio = eps / delta
    exponent = ratio * (1.0 - lr)
    log_term2 = math.log(2.0) + math.log(m) + exponent
    log_tail = math.log(tail_sum) if tail_sum > 0.0 else -math.inf
    return TailBoundResult(
        _logaddexp(log_tail, log_term2),
        {"tail_sum": tail_sum, "log_exponential_term": log_term2,
         "exponent": exponent},
    )


def fuk_nagaev_bound(inputs: FukNagaevInputs) -> TailBoundResult:
    """Two-sided bound on P{|sum| > eps} at the canonical truncation
    delta = eps/lam:

        sum_k P{|X_k| > eps/lam}
          + 2*m*e^lam * (1 + eps^p / (lam^(p-1) * S))^(-lam)
    """
    return fuk_nagaev_general(inputs, inputs.epsilon / inputs.lam)
