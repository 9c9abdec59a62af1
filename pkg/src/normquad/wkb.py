"""Semiclassical tail estimates and normalization-integral planners.

For the x^{2n} potentials: WKB eigenvalue estimates, the log of the tail
amplitude factor C, decay bounds for the Fourier transform of psi^2 (sets
the step size) and for psi(x)^2 itself (sets the summation range).  For
the double well (x^2-1)^2 with the hbar-like parameter s: the analogous
exact-exponent solves.  Planners bisect these bounds at the fixed planner
precision; percent-level error in a plan is harmless by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
from mpmath import mp, mpf, workdps

from .bigreal import PLANNER_DPS, guard_digits
from .quadrature import QuadPlan

__all__ = [
    "WkbModel",
    "PrefactorSingular",
    "StepTooCoarse",
    "BelowTurningPoint",
    "wkb_energy",
    "wkb_prefactor",
    "prefactor_from_energy",
    "fourier_tail",
    "spatial_tail",
    "plan_monomial_state",
    "plan_double_well",
]

#: plans add this many digits of slack for the dropped algebraic prefactors
PLAN_SLACK = 2

_REL_TOL = mpf("1e-6")


class PrefactorSingular(ValueError):
    """The closed-form prefactor is singular (n = 1): use the energy form."""


class StepTooCoarse(ValueError):
    """2 pi / h does not clear the classical momentum: h too coarse for this E."""


class BelowTurningPoint(ValueError):
    """x_max lies inside the classical region: no spatial decay there."""


@dataclass(frozen=True)
class WkbModel:
    n: int
    N: int
    E_est: mpf
    C_log: mpf


def _u_integral(n: int) -> mpf:
    # int_{-1}^{1} sqrt(1 - u^{2n}) du = (1/n) B(1/(2n), 3/2)
    return mpmath.beta(mpf(1) / (2 * n), mpf(3) / 2) / n


def wkb_energy(n: int, N: int) -> mpf:
    """Semiclassical estimate of eigenvalue N of -psi'' + x^{2n} psi = E psi."""
    if n < 1 or N < 0:
        raise ValueError("need n >= 1 and N >= 0")
    with workdps(PLANNER_DPS):
        return (mp.pi * (N + mpf(1) / 2) / _u_integral(n)) ** (mpf(2 * n) / (n + 1))


def wkb_prefactor(n: int, N: int) -> mpf:
    """log C = (pi/2) tan(pi/2n) (N + 1/2), the tail amplitude of eigenstate N."""
    if n < 1 or N < 0:
        raise ValueError("need n >= 1 and N >= 0")
    if n == 1:
        raise PrefactorSingular(
            "tan(pi/2) is singular at n=1; use prefactor_from_energy with the actual E"
        )
    with workdps(PLANNER_DPS):
        return (mp.pi / 2) * mpmath.tan(mp.pi / (2 * n)) * (N + mpf(1) / 2)


def prefactor_from_energy(n: int, E) -> mpf:
    """log C via the Beta-function form B(1/2,(n-1)/2n) E^{(n+1)/2n} / 2(n+1).

    Also singular at n = 1, where the planners fall back on exact
    harmonic-tail integrals instead of a constant C.
    """
    if n < 2:
        raise PrefactorSingular("Beta form diverges at n=1")
    with workdps(PLANNER_DPS):
        E = mpf(E)
        return mpmath.beta(mpf(1) / 2, mpf(n - 1) / (2 * n)) * E ** (mpf(n + 1) / (2 * n)) / (2 * (n + 1))


def fourier_tail(n: int, E, C_log, p) -> mpf:
    """log10 bound on |FT of psi^2| at momentum p for the x^{2n} potential.

    Requires (p/2)^2 > E.  For n >= 2 the bound is
    2 log C - (n/(n+1)) sin(pi/2n) p ((p/2)^2 - E)^{1/2n} (in nats);
    for n = 1 the saddle exponent is evaluated exactly (the closed-form C
    being singular there), with C_log entering additively as given.
    """
    with workdps(PLANNER_DPS):
        E, C_log, p = mpf(E), mpf(C_log), mpf(p)
        gap = (p / 2) ** 2 - E
        if not gap > 0:
            raise StepTooCoarse(f"(p/2)^2 = {(p/2)**2} <= E = {E}: h too coarse for this E")
        if n == 1:
            y = mpmath.sqrt(gap)
            nats = -y * p / 2
            if E > 0:
                nats += E * mpmath.ln((p / 2 + y) / mpmath.sqrt(E))
        else:
            nats = -(mpf(n) / (n + 1)) * mpmath.sin(mp.pi / (2 * n)) * p * gap ** (mpf(1) / (2 * n))
        return (2 * C_log + nats) / mpmath.ln(10)


def spatial_tail(n: int, E, C_log, x) -> mpf:
    """log10 bound on psi(x)^2 beyond the turning point of the x^{2n} potential.

    Requires x^{2n} > E.  For n >= 2 the bound is
    2 log C - (2/(n+1)) x sqrt(x^{2n} - E) (in nats); for n = 1 the WKB
    action integral is evaluated in closed form.
    """
    with workdps(PLANNER_DPS):
        E, C_log, x = mpf(E), mpf(C_log), mpf(x)
        gap = x ** (2 * n) - E
        if not gap > 0:
            raise BelowTurningPoint(f"x = {x} is below the turning point E^(1/2n)")
        if n == 1:
            r = mpmath.sqrt(gap)
            nats = -x * r
            if E > 0:
                nats += E * mpmath.ln((x + r) / mpmath.sqrt(E))
        else:
            nats = -(mpf(2) / (n + 1)) * x * mpmath.sqrt(gap)
        return (2 * C_log + nats) / mpmath.ln(10)


def _bisect_decreasing(fn: Callable, lo: mpf, hi: mpf, target: mpf) -> mpf:
    """Root of fn(x) = target for fn decreasing on [lo, hi]; relative tol 1e-6."""
    flo, fhi = fn(lo), fn(hi)
    if not (flo >= target >= fhi):
        raise ValueError("bisection bracket does not straddle the target")
    while hi - lo > _REL_TOL * hi:
        mid = (lo + hi) / 2
        if fn(mid) >= target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def plan_monomial_state(n: int, N: int, P: int) -> QuadPlan:
    """Quadrature plan for the normalization integral of state N of V = x^{2n}.

    Solves fourier_tail(2 pi / h) = -(P + slack) for h and
    spatial_tail(x_max) = -(P + slack) for x_max, using the WKB eigenvalue
    estimate; then enforces the sample count to exceed the semiclassical
    oscillation count.
    """
    if n < 1 or N < 0:
        raise ValueError("need n >= 1 and N >= 0")
    if P < 10:
        raise ValueError("P must be >= 10")
    with workdps(PLANNER_DPS):
        E = wkb_energy(n, N)
        C_log = mpf(0) if n == 1 else wkb_prefactor(n, N)
        target = mpf(-(P + PLAN_SLACK))

        p_lo = 2 * mpmath.sqrt(E) * (1 + mpf("1e-9"))
        p_hi = max(2 * p_lo, mpf(4))
        while fourier_tail(n, E, C_log, p_hi) > target:
            p_hi *= 2
        p_star = _bisect_decreasing(lambda p: fourier_tail(n, E, C_log, p), p_lo, p_hi, target)
        h = 2 * mp.pi / p_star

        x_lo = E ** (mpf(1) / (2 * n)) * (1 + mpf("1e-9")) if E > 0 else mpf("1e-9")
        x_hi = max(2 * x_lo, mpf(2))
        while spatial_tail(n, E, C_log, x_hi) > target:
            x_hi *= 2
        x_star = _bisect_decreasing(lambda x: spatial_tail(n, E, C_log, x), x_lo, x_hi, target)

        M = int(mpmath.ceil(x_star / h))
        # sample count must exceed the number of oscillations of the state
        osc_floor = E ** (mpf(n + 1) / (2 * n)) / mp.pi
        if M + 1 <= osc_floor:
            M = int(mpmath.floor(osc_floor)) + 1
        x_max = M * h
        est = float(max(fourier_tail(n, E, C_log, 2 * mp.pi / h),
                        spatial_tail(n, E, C_log, x_max)))
    return QuadPlan(h=h, x_min=mpf(0), x_max=x_max, M=M, target_P=P,
                    guard=guard_digits(M + 1), est_error_log10=est)


def double_well_exponent(s, p) -> mpf:
    """Re phi(x_s, p) = (4/3s) [Re (1 + i p s / 2)^{3/2} - 1] for the double well."""
    with workdps(PLANNER_DPS):
        s, p = mpf(s), mpf(p)
        z = (1 + 1j * p * s / 2) ** mpf(1.5)
        return (4 / (3 * s)) * (z.real - 1)


def plan_double_well(s, P: int) -> QuadPlan:
    """Quadrature plan for the double-well ground-state normalization integral.

    The step solves Re phi(x_s, 2 pi / h) = -(P + slack) ln10 with the exact
    saddle exponent; the window comes from the largest root of
    (x-1)^2 (x+2) = (3/2) ln10 s (P + slack), with x_min clamped to 0 when
    the budget exceeds the barrier value at x = 0.
    """
    if not 0 < mpf(s) <= 1:
        raise ValueError("need 0 < s <= 1")
    if P < 10:
        raise ValueError("P must be >= 10")
    with workdps(PLANNER_DPS):
        s = mpf(s)
        Pp = mpf(P + PLAN_SLACK)
        target = -Pp * mpmath.ln(10)

        p_lo = mpf("1e-6")
        p_hi = mpf(4) / s
        while double_well_exponent(s, p_hi) > target:
            p_hi *= 2
        p_star = _bisect_decreasing(lambda p: double_well_exponent(s, p), p_lo, p_hi, target)
        h = 2 * mp.pi / p_star

        thr = mpf(3) / 2 * mpmath.ln(10) * s * Pp
        cubic = lambda x: (x - 1) ** 2 * (x + 2)
        hi = mpf(2)
        while cubic(hi) < thr:
            hi *= 2
        lo = mpf(1)
        while hi - lo > _REL_TOL * hi:
            mid = (lo + hi) / 2
            if cubic(mid) < thr:
                lo = mid
            else:
                hi = mid
        x_max = (lo + hi) / 2

        if thr >= 2:  # cubic(0) = 2: whole inner region contributes
            x_min = mpf(0)
        else:
            lo, hi = mpf(0), mpf(1)
            while hi - lo > _REL_TOL:
                mid = (lo + hi) / 2
                if cubic(mid) > thr:
                    lo = mid
                else:
                    hi = mid
            x_min = (lo + hi) / 2
        M = int(mpmath.ceil((x_max - x_min) / h))
    return QuadPlan(h=h, x_min=x_min, x_max=x_max, M=M, target_P=P,
                    guard=guard_digits(M + 1), est_error_log10=float(-Pp))
