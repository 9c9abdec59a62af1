"""Arbitrary-precision scalars and the constants everything else needs.

Raw digit arithmetic is delegated to mpmath (gmpy2-backed when available),
which meets the 1-ulp contract for +, -, *, /, sqrt, exp, ln and the
hyperbolics.  This module pins down working-precision policy, decimal
serialization, and the few constants (pi, Gamma(1/4), Bernoulli ratios)
the planners and quadrature engine rely on.

Precision convention: a "Real at P digits" is an mpf produced under
``mpmath.workdps(P)``.  Values are immutable and safe to share between
threads; the constant helpers below are pure functions of P.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpf, workdps

__all__ = [
    "guard_digits",
    "pi",
    "agm",
    "gamma_quarter",
    "bernoulli_ratio",
    "to_decimal",
    "from_decimal",
]

#: planning math (root solves, saddle-point formulas) runs at this fixed
#: precision; a percent-level error in a plan is harmless.
PLANNER_DPS = 40


def guard_digits(n_terms: int) -> int:
    """Extra working digits absorbing rounding over ~n_terms additions."""
    if n_terms < 0:
        raise ValueError("n_terms must be non-negative")
    return 20 + math.ceil(math.log10(n_terms + 1))


def pi(digits: int) -> mpf:
    """pi to `digits` decimals via the Gauss-Legendre AGM iteration.

    Quadratically convergent: the digit count doubles each pass.  mpmath's
    own pi is used elsewhere as an independent cross-check.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    with workdps(digits + 15):
        a = mpf(1)
        b = 1 / mpmath.sqrt(2)
        t = mpf(1) / 4
        p = mpf(1)
        for _ in range(int(math.log2(digits + 15)) + 3):
            an = (a + b) / 2
            b = mpmath.sqrt(a * b)
            t -= p * (a - an) ** 2
            a = an
            p *= 2
        val = (a + b) ** 2 / (4 * t)
    with workdps(digits):
        return +val


def agm(a, b, digits: int) -> mpf:
    """Arithmetic-geometric mean of a, b > 0 to `digits` decimals.

    Iterates until |a - b| < 10^-digits * a.
    """
    with workdps(digits + 10):
        a = mpf(a)
        b = mpf(b)
        if a <= 0 or b <= 0:
            raise ValueError("agm requires positive arguments")
        eps = mpf(10) ** (-digits)
        while abs(a - b) >= eps * a:
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
        val = (a + b) / 2
    with workdps(digits):
        return +val


def gamma_quarter(digits: int) -> mpf:
    """Gamma(1/4) to `digits` decimals via Gamma(1/4)^2 = 2 sqrt(2 pi) pi / agm(1, sqrt 2)."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    with workdps(digits + 10):
        two_pi = 2 * mp.pi
        val = mpmath.sqrt(mpmath.sqrt(two_pi) * two_pi / agm(1, mpmath.sqrt(2), digits + 10))
    with workdps(digits):
        return +val


@lru_cache(maxsize=None)
def bernoulli_ratio(k: int) -> Fraction:
    """Exact B_{2k}/(2k)!, the Euler-Maclaurin endpoint-correction coefficient."""
    if not 1 <= k <= 32:
        raise ValueError("k must be in 1..32")
    p, q = mpmath.bernfrac(2 * k)
    return Fraction(int(p), int(q)) / math.factorial(2 * k)


def to_decimal(x, digits: int) -> str:
    """Serialize x as a decimal string with `digits` significant digits."""
    # conversion must happen above the target precision or mpf() would
    # round x through the (possibly much lower) ambient precision first
    with workdps(digits + 5):
        return mpmath.nstr(mpf(x), digits, strip_zeros=False)


def from_decimal(s: str, digits: int) -> mpf:
    """Parse a decimal string at a working precision of `digits` decimals."""
    with workdps(digits):
        return mpf(s)
