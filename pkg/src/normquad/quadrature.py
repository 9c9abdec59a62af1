"""Equal-step integration rules and the infinite-range trapezoid sampler.

Basic Newton-Cotes rules, the extended (composite) trapezoid/Simpson
rules, Euler-Maclaurin endpoint corrections with finite-difference
endpoint derivatives, and a deterministic, parallelizable trapezoid
sampler for (effectively) infinite integration ranges.

All summation is ascending-index sequential at the ambient mpmath
precision; sample evaluation may be dispatched to a thread pool, but the
reduction order is fixed so results are bit-identical for any worker
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import mpmath
from mpmath import mpf

from .bigreal import bernoulli_ratio

__all__ = [
    "Integrand",
    "RuleKind",
    "QuadResult",
    "QuadPlan",
    "apply_basic_rule",
    "extended_trapezoid",
    "extended_simpson",
    "endpoint_derivative",
    "em_corrected_trapezoid",
    "infinite_trapezoid",
]


@dataclass(frozen=True)
class Integrand:
    """A pure, deterministic map x -> f(x) at the ambient precision."""

    eval: Callable
    parity: str = "none"  # "even" | "odd" | "none"
    smooth_endpoints: bool = False


class RuleKind(Enum):
    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"
    SIMPSON38 = "simpson38"
    BOOLE = "boole"
    EXTENDED_TRAPEZOID = "extended_trapezoid"
    EXTENDED_SIMPSON = "extended_simpson"
    EM_CORRECTED_TRAPEZOID = "em_corrected_trapezoid"


@dataclass(frozen=True)
class QuadResult:
    value: mpf
    M: int
    h: mpf
    est_error_log10: float = math.nan


@dataclass(frozen=True)
class QuadPlan:
    """Step size and summation window picked a priori for a target precision.

    The window is [x_min, x_max] on the half line; for even integrands with
    x_min = 0 the sampler uses the half-weight-at-zero pattern.
    """

    h: mpf
    x_min: mpf
    x_max: mpf
    M: int
    target_P: int
    guard: int
    est_error_log10: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("plan step h must be positive")
        if not (self.x_max > self.x_min >= 0):
            raise ValueError("plan window must satisfy x_max > x_min >= 0")


# weights (as exact integer/denominator pairs) for the basic rules
_BASIC_RULES = {
    RuleKind.TRAPEZOID: ([1, 1], 2),
    RuleKind.SIMPSON: ([1, 4, 1], 3),
    RuleKind.SIMPSON38: ([3, 9, 9, 3], 8),
    RuleKind.BOOLE: ([14, 64, 24, 64, 14], 45),
}


def apply_basic_rule(rule: RuleKind, f: Integrand, a, b) -> mpf:
    """One application of the trapezoid, Simpson, Simpson-3/8 or Boole rule."""
    if rule not in _BASIC_RULES:
        raise ValueError(f"{rule} is not a basic rule")
    weights, den = _BASIC_RULES[rule]
    a, b = mpf(a), mpf(b)
    if not a < b:
        raise ValueError("need a < b")
    M = len(weights) - 1
    h = (b - a) / M
    total = mpf(0)
    for m, w in enumerate(weights):
        total += w * f.eval(a + m * h)
    return total * h / den


def _sample(f: Integrand, points: Sequence[mpf], threads: int) -> list:
    """Evaluate f at points; concurrent dispatch, order-preserving result."""
    if threads <= 1 or len(points) < 2:
        return [f.eval(x) for x in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(f.eval, points))


def extended_trapezoid(f: Integrand, a, b, M: int, threads: int = 1) -> QuadResult:
    """Composite trapezoid sum [f0/2 + f1 + ... + f_{M-1} + fM/2] h."""
    if M < 1:
        raise ValueError("extended_trapezoid needs M >= 1")
    a, b = mpf(a), mpf(b)
    h = (b - a) / M
    points = [a + m * h for m in range(M + 1)]
    vals = _sample(f, points, threads)
    total = vals[0] / 2
    for m in range(1, M):
        total += vals[m]
    total += vals[M] / 2
    return QuadResult(value=total * h, M=M, h=h)


def extended_simpson(f: Integrand, a, b, M: int, threads: int = 1) -> QuadResult:
    """Composite Simpson value via S(h) = 4/3 T(h) - 1/3 T(2h).

    The Richardson combination is the rule's definition here, so the
    identity with the trapezoid sums holds bit-for-bit.
    """
    if M < 2 or M % 2:
        raise ValueError("extended_simpson needs even M >= 2")
    t_h = extended_trapezoid(f, a, b, M, threads)
    t_2h = extended_trapezoid(f, a, b, M // 2, threads)
    value = (4 * t_h.value - t_2h.value) / 3
    return QuadResult(value=value, M=M, h=t_h.h)


def endpoint_derivative(f: Integrand, x, h, scheme: str, delta) -> mpf:
    """Three-point estimate of f'(x); error O(delta^2) f'''.

    scheme "central" needs delta < h/2 so no significant new error enters;
    the one-sided schemes stay inside the integration interval.
    """
    x, delta = mpf(x), mpf(delta)
    if not delta > 0:
        raise ValueError("delta must be positive")
    if scheme == "central":
        if not delta < mpf(h) / 2:
            raise ValueError("central scheme requires delta < h/2")
        return (f.eval(x + delta) - f.eval(x - delta)) / (2 * delta)
    if scheme == "forward":
        return -(3 * f.eval(x) - 4 * f.eval(x + delta) + f.eval(x + 2 * delta)) / (2 * delta)
    if scheme == "backward":
        return (3 * f.eval(x) - 4 * f.eval(x - delta) + f.eval(x - 2 * delta)) / (2 * delta)
    raise ValueError(f"unknown scheme {scheme!r}")


def em_corrected_trapezoid(
    f: Integrand,
    a,
    b,
    M: int,
    k_max: int = 1,
    stencil: str = "one_sided",
    delta=None,
    threads: int = 1,
) -> QuadResult:
    """Trapezoid sum minus the estimated leading Euler-Maclaurin terms.

    k_max=1 removes the B_2/2! term (order-4 result).  k_max=2 uses the
    one-sided stencils with delta = h/sqrt(20), whose O(delta^2) f''' bias
    then cancels the B_4/4! term as well (order >= 5 observed).
    """
    if M < 4:
        raise ValueError("em_corrected_trapezoid needs M >= 4")
    if k_max not in (1, 2):
        raise ValueError("k_max must be 1 or 2")
    a, b = mpf(a), mpf(b)
    base = extended_trapezoid(f, a, b, M, threads)
    h = base.h
    if k_max == 2:
        if stencil == "central":
            raise ValueError("k_max=2 requires the one-sided stencils")
        delta = h / mpmath.sqrt(20)
    elif delta is None:
        delta = h / 4
    if stencil == "central":
        d_a = endpoint_derivative(f, a, h, "central", delta)
        d_b = endpoint_derivative(f, b, h, "central", delta)
    elif stencil == "one_sided":
        d_a = endpoint_derivative(f, a, h, "forward", delta)
        d_b = endpoint_derivative(f, b, h, "backward", delta)
    else:
        raise ValueError(f"unknown stencil {stencil!r}")
    c1 = bernoulli_ratio(1)  # 1/12
    corr = (mpf(c1.numerator) / c1.denominator) * (d_b - d_a) * h * h
    return QuadResult(value=base.value - corr, M=M, h=h)


def infinite_trapezoid(f: Integrand, plan: QuadPlan, threads: int = 1) -> QuadResult:
    """Trapezoid sum over the plan's window for an even integrand on the real line.

    With x_min = 0 the value is h f(0) + 2h sum_{m=1..M} f(mh), M taken
    from the plan, for M+1 evaluations total.  A shifted window (x_min > 0,
    double-hump case) sums M+1 full-weight samples starting at
    ceil(x_min/h) h, doubled for the two symmetric humps.  Samples may be
    evaluated concurrently; the reduction is sequential in ascending
    index order.
    """
    h = plan.h
    if not h > 0 or plan.x_max < plan.x_min or plan.x_min < 0:
        raise ValueError("malformed plan")
    if plan.x_min == 0:
        M = plan.M
        points = [m * h for m in range(1, M + 1)]
        vals = _sample(f, points, threads)
        total = mpf(0)
        for v in vals:
            total += v
        value = h * f.eval(mpf(0)) + 2 * h * total
    else:
        m_min = int(mpmath.ceil(plan.x_min / h))
        M = plan.M
        points = [m * h for m in range(m_min, m_min + M + 1)]
        vals = _sample(f, points, threads)
        total = mpf(0)
        for v in vals:
            total += v
        value = 2 * h * total
    return QuadResult(value=value, M=M, h=h, est_error_log10=plan.est_error_log10)
