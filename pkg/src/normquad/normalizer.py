"""End-to-end normalization-integral pipeline.

plan -> eigenvalue refinement -> parallel sampling of psi^2 -> ordered
trapezoid summation, plus the obtained-precision measurement (doubled-M
reference run with 50 extra working digits) behind the reported
P_obt - P_est numbers.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Optional

import mpmath
from mpmath import mpf, workdps

from . import wkb
from .bigreal import guard_digits
from .quadrature import Integrand, QuadPlan, infinite_trapezoid
from .schrodinger import (
    DoubleWell,
    Monomial,
    PotentialSpec,
    parity_of,
    refine_double_well_ground,
    refine_eigenvalue,
    shoot,
)

__all__ = ["NormalizationResult", "BudgetExceeded", "normalize", "obtained_precision"]

#: refuse plans beyond this many evaluations (desk-scale protection)
DEFAULT_MAX_EVALUATIONS = 10**6

LN10 = math.log(10)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class NormalizationResult:
    integral: mpf
    norm_const: mpf
    plan: QuadPlan
    P_est: float
    P_obt: float
    evaluations: int
    wall_time_ms: int
    refine_ms: int
    eigenvalue: mpf


def obtained_precision(result, reference, cap: float) -> float:
    """P_obt = -log10 |result - reference| / |reference|, capped at `cap`."""
    if reference == 0:
        raise ZeroDivisionError("reference value is zero")
    diff = abs(result - reference)
    if diff == 0:
        return cap
    return min(float(-mpmath.log10(diff / abs(reference))), cap)


def _growth_digits(spec: PotentialSpec, E, plan: QuadPlan) -> int:
    """log10 of the growing-mode amplification across the forbidden part
    of the sampling window, exp(int_{x_t}^{x_max} sqrt(V - E)).

    Shooting roundoff seeded at working precision rides the growing
    solution through the classically forbidden region, so the sampling
    precision must cover these digits on top of the target budget.
    """
    from .bigreal import PLANNER_DPS

    with workdps(PLANNER_DPS):
        E = mpf(E)
        if isinstance(spec, Monomial):
            n = spec.n
            x_t = E ** (mpf(1) / (2 * n)) if E > 0 else mpf(0)
            momentum = lambda x: mpmath.sqrt(abs(x ** (2 * n) - E))
        else:
            s = mpf(spec.s.numerator) / spec.s.denominator
            x_t = mpmath.sqrt(1 + mpmath.sqrt(E)) if E > 0 else mpf(1)
            momentum = lambda x: mpmath.sqrt(abs((x * x - 1) ** 2 - E)) / s
        x_hi = mpf(plan.x_max)
        if x_hi <= x_t:
            return 0
        nats = mpmath.quad(momentum, [x_t, x_hi])
        return int(mpmath.ceil(nats / mpmath.ln(10)))


def _amplitude_digits(spec: PotentialSpec, N: int) -> int:
    """Decimal digits of tail-amplitude headroom (2 log10 C)."""
    if isinstance(spec, Monomial):
        if spec.n == 1:
            # harmonic family: amplitude factors are O(1); E/2 digits is ample
            return int(math.ceil(float(wkb.wkb_energy(1, N)) / (2 * LN10))) + 1
        return int(math.ceil(2 * float(wkb.wkb_prefactor(spec.n, N)) / LN10))
    s = spec.s
    return int(math.ceil((4 / (3 * float(s))) / LN10))


def normalize(
    spec: PotentialSpec,
    N: int,
    P: int,
    threads: int = 1,
    cache_path: Optional[str] = None,
    amplitude_scale=None,
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS,
) -> NormalizationResult:
    """Compute int psi_N^2 dx over the real line to P decimal digits.

    The plan is picked a priori from the WKB tail analysis; the eigenvalue
    is refined (cache-aware) to P plus the tail-amplitude headroom; samples
    are independent shots from x = 0 and may be evaluated concurrently, so
    the digit string is identical for any worker count.
    """
    if P < 10:
        raise ValueError("P must be >= 10")
    t0 = time.perf_counter()
    if isinstance(spec, Monomial):
        plan = wkb.plan_monomial_state(spec.n, N, P)
    elif isinstance(spec, DoubleWell):
        if N != 0:
            raise ValueError("DoubleWell supports N=0 only")
        plan = wkb.plan_double_well(mpf(spec.s.numerator) / spec.s.denominator, P)
    else:
        raise TypeError(f"unsupported potential {spec!r}")
    if plan.M + 1 > max_evaluations:
        raise BudgetExceeded(f"plan wants {plan.M + 1} evaluations (max {max_evaluations})")

    amp = _amplitude_digits(spec, N)
    g = guard_digits(2 * plan.M + 2)
    P_E = P + amp + g
    t_ref = time.perf_counter()
    if isinstance(spec, Monomial):
        state = refine_eigenvalue(spec, N, P_E, cache_path)
    else:
        state = refine_double_well_ground(spec.s, P_E, cache_path)
    refine_ms = int((time.perf_counter() - t_ref) * 1000)

    parity = parity_of(N)
    E = state.E
    scale = amplitude_scale

    def make_integrand():
        def eval_psi2(x):
            if x == 0:
                psi = mpf(1) if parity == "even" else mpf(0)
            else:
                psi = shoot(spec, E, parity, x).psi
            if scale is not None:
                psi = psi * scale
            return psi * psi

        return Integrand(eval=eval_psi2, parity="even", smooth_endpoints=True)

    # Sampling precision: roundoff of size 10^-dps seeded in the allowed
    # region grows like exp(+int sqrt(V - E)) through the forbidden tail
    # of the window.  The squared contamination at x_max must stay below
    # the 10^-P budget, so dps must exceed P/2 plus the growth digits.
    growth = _growth_digits(spec, E, plan)
    work_dps = max(P + g + 5, (P + 3) // 2 + growth + g)
    with workdps(work_dps):
        result = infinite_trapezoid(make_integrand(), plan, threads=threads)
        integral = result.value

    ref_plan = replace(plan, h=plan.h / 2, M=2 * plan.M)
    with workdps(work_dps + 50):
        ref = infinite_trapezoid(make_integrand(), ref_plan, threads=threads).value

    P_obt = obtained_precision(integral, ref, cap=float(P + 45))
    with workdps(work_dps):
        norm_const = 1 / mpmath.sqrt(integral)
    return NormalizationResult(
        integral=integral,
        norm_const=norm_const,
        plan=plan,
        P_est=-plan.est_error_log10,
        P_obt=P_obt,
        evaluations=plan.M + 1,
        wall_time_ms=int((time.perf_counter() - t0) * 1000),
        refine_ms=refine_ms,
        eigenvalue=E,
    )
