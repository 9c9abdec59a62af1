"""Model integrands with known behaviour, and their a-priori step planners.

Three even integrand families on the real line: the Gaussian e^{-x^2},
the flat-bottomed e^{-x^{2n}}, and the double-hump e^{-(x^2-a^2)^2}.
For each, the saddle-point analysis of the Fourier tail gives a step
size h and window [x_min, x_max] that deliver a requested number of
decimal digits with M+1 ~ O(P) samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import mpmath
from mpmath import mp, mpf, workdps

from .bigreal import PLANNER_DPS, gamma_quarter, guard_digits
from .quadrature import Integrand, QuadPlan

__all__ = [
    "Gaussian",
    "Power",
    "DoubleHump",
    "ModelKind",
    "model_integrand",
    "closed_form",
    "oracle_value",
    "plan_gaussian",
    "plan_power",
    "plan_double_hump",
]

LN10 = math.log(10)


@dataclass(frozen=True)
class Gaussian:
    pass


@dataclass(frozen=True)
class Power:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Power exponent n must be >= 1")


@dataclass(frozen=True)
class DoubleHump:
    a: float  # anything mpf() accepts: int, float, or decimal string

    def __post_init__(self):
        if not mpf(self.a) > 0:
            raise ValueError("DoubleHump parameter a must be > 0")


ModelKind = Union[Gaussian, Power, DoubleHump]


def model_integrand(kind: ModelKind) -> Integrand:
    """Even-parity integrand for the given model, evaluated at ambient precision."""
    if isinstance(kind, Gaussian):
        fn = lambda x: mpmath.exp(-x * x)
    elif isinstance(kind, Power):
        n2 = 2 * kind.n
        fn = lambda x: mpmath.exp(-(x ** n2))
    elif isinstance(kind, DoubleHump):
        a2 = mpf(kind.a) ** 2
        fn = lambda x: mpmath.exp(-((x * x - a2) ** 2))
    else:
        raise TypeError(f"unknown model kind {kind!r}")
    return Integrand(eval=fn, parity="even", smooth_endpoints=True)


def closed_form(kind: ModelKind, P: int) -> Optional[mpf]:
    """Full-precision closed-form value of the model integral, if one is in reach.

    Gaussian and Power{1} give sqrt(pi); Power{2} gives Gamma(1/4)/2 via
    the AGM.  Power{n>=3} and DoubleHump return None (use oracle_value for
    a 13-digit reference, or a doubled-M run for self-consistency).
    """
    if isinstance(kind, (Gaussian,)) or (isinstance(kind, Power) and kind.n == 1):
        with workdps(P):
            return mpmath.sqrt(mp.pi)
    if isinstance(kind, Power) and kind.n == 2:
        with workdps(P):
            return gamma_quarter(P) / 2
    return None


def oracle_value(kind: ModelKind) -> float:
    """Standard-precision (~13 digit) reference value of the model integral."""
    if isinstance(kind, Gaussian):
        return math.sqrt(math.pi)
    if isinstance(kind, Power):
        n = kind.n
        return math.gamma(1 / (2 * n)) / n
    if isinstance(kind, DoubleHump):
        # a e^{-a^4/2} [K_{1/4}(a^4/2)/sqrt(2) + pi I_{1/4}(a^4/2)]
        with workdps(25):
            a = mpf(kind.a)
            z = a ** 4 / 2
            val = a * mpmath.exp(-z) * (
                mpmath.besselk(mpf(1) / 4, z) / mpmath.sqrt(2)
                + mp.pi * mpmath.besseli(mpf(1) / 4, z)
            )
            return float(val)
    raise TypeError(f"unknown model kind {kind!r}")


def plan_gaussian(P: int) -> QuadPlan:
    """Step plan for e^{-x^2}: h = sqrt(pi/(M+1)), M+1 = ceil(P ln10 / pi)."""
    if P < 5:
        raise ValueError("P must be >= 5")
    with workdps(PLANNER_DPS):
        m1 = int(mpmath.ceil(mpf(P) * mpmath.ln(10) / mp.pi))
        h = mpmath.sqrt(mp.pi / m1)
        x_max = (m1 - 1) * h
        est = float(-mp.pi * m1 / mpmath.ln(10))
    return QuadPlan(h=h, x_min=mpf(0), x_max=x_max, M=m1 - 1, target_P=P,
                    guard=guard_digits(m1), est_error_log10=est)


def plan_power(n: int, P: int) -> QuadPlan:
    """Step plan for e^{-x^{2n}} balancing step-size and truncation errors.

    c_n = (pi/n) [(2n-1) sin(pi/(4n-2))]^{1-1/2n} sets M+1 = ceil(P ln10 / c_n);
    h = b_n (M+1)^{-(1-1/2n)} with the matching b_n; the window is recomputed
    from the rounded-up M+1 so it is exactly covered.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if P < 5:
        raise ValueError("P must be >= 5")
    with workdps(PLANNER_DPS):
        n = int(n)
        base = (2 * n - 1) * mpmath.sin(mp.pi / (4 * n - 2))
        c_n = (mp.pi / n) * base ** (1 - mpf(1) / (2 * n))
        b_n = (mp.pi / n) ** (mpf(1) / (2 * n)) * base ** (mpf(2 * n - 1) / (4 * n * n))
        m1 = int(mpmath.ceil(mpf(P) * mpmath.ln(10) / c_n))
        h = b_n * mpf(m1) ** (-(1 - mpf(1) / (2 * n)))
        x_max = (m1 - 1) * h
        est = float(-c_n * m1 / mpmath.ln(10))
    return QuadPlan(h=h, x_min=mpf(0), x_max=x_max, M=m1 - 1, target_P=P,
                    guard=guard_digits(m1), est_error_log10=est)


def plan_double_hump(a, P: int) -> QuadPlan:
    """Step plan for e^{-(x^2-a^2)^2} via the eta-parametrized saddle estimate.

    Solves (4/3) a^4 sinh^2(eta) cosh(2 eta) = P ln10 in closed form (it is
    a quadratic in sinh^2 eta), then h = sqrt(27) pi / (4 a^3 sinh 3eta).
    The window comes from the dimensionless budget u = P ln10 / a^4: the
    density drops below 10^-P outside |x^2 - a^2| > a^2 sqrt(u), and the
    inner cutoff collapses to 0 once u >= 1.
    """
    if P < 5:
        raise ValueError("P must be >= 5")
    with workdps(PLANNER_DPS):
        a = mpf(a)
        if not a > 0:
            raise ValueError("a must be > 0")
        u = mpf(P) * mpmath.ln(10) / a ** 4
        # (4/3) a^4 (2 t^2 + t) = a^4 u  with t = sinh^2 eta
        t = (-1 + mpmath.sqrt(1 + 6 * u)) / 4
        eta = mpmath.asinh(mpmath.sqrt(t))
        h = mpmath.sqrt(27) * mp.pi / (4 * a ** 3 * mpmath.sinh(3 * eta))
        x_max = a * mpmath.sqrt(1 + mpmath.sqrt(u))
        if u >= 1:
            x_min = mpf(0)
        else:
            x_min = a * mpmath.sqrt(1 - mpmath.sqrt(u))
        M = int(mpmath.ceil((x_max - x_min) / h))
    return QuadPlan(h=h, x_min=x_min, x_max=x_max, M=M, target_P=P,
                    guard=guard_digits(M + 1), est_error_log10=float(-P))
