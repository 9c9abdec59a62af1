import math

import mpmath
import pytest
from mpmath import workdps


@pytest.fixture(scope="session")
def cache_path(tmp_path_factory):
    return str(tmp_path_factory.mktemp("eig") / "eigen.cache")


def agree_digits(a, b, dps=None):
    """Number of decimal digits to which a and b agree (relative)."""
    ctx = workdps(dps) if dps else workdps(mpmath.mp.dps)
    with ctx:
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        if a == b:
            return float("inf")
        return float(-mpmath.log10(abs(a - b) / max(abs(a), abs(b))))


def fit_slope(xs, ys):
    """Least-squares slope of ys against xs."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den
