"""Full-precision eigenfunction evaluation and eigenvalue refinement.

The ODEs -psi'' + (x^{2n} - E) psi = 0 and -s^2 psi'' + ((x^2-1)^2 - e) psi = 0
are integrated from x = 0 by repeated Taylor steps: about each expansion
point the polynomial potential is binomially shifted, the series
coefficients follow from a two-term recurrence, and order and step size
are chosen so the last retained term is below the working epsilon.
Eigenvalues are refined by bisection on the node count of the shot
solution at a matching point beyond the turning point; off-eigenvalue
solutions blow up violently, which is exactly what makes the sign/count
criterion robust.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf, workdps

from . import wkb
from .bigreal import PLANNER_DPS, from_decimal, to_decimal

__all__ = [
    "Monomial",
    "DoubleWell",
    "PotentialSpec",
    "EigenState",
    "ShootResult",
    "EigenvalueDiverged",
    "BracketError",
    "evaluate_wavefunction",
    "shoot",
    "refine_eigenvalue",
    "refine_double_well_ground",
]

#: step length ~ STEP_FACTOR / local wavenumber; keeps Taylor orders modest
#: and places node-count checkpoints denser than the oscillation half-period
STEP_FACTOR = 4.0
STEP_MAX = 0.5
_ORDER_CAP = 20000


@dataclass(frozen=True)
class Monomial:
    """Potential V(x) = x^{2n} in -psi'' + (V - E) psi = 0."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Monomial exponent n must be >= 1")

    def problem_id(self) -> str:
        return f"x2n:{self.n}"


@dataclass(frozen=True)
class DoubleWell:
    """Potential (x^2 - 1)^2 in -s^2 psi'' + (V - e) psi = 0."""

    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        if not 0 < self.s:
            raise ValueError("DoubleWell parameter s must be > 0")

    def problem_id(self) -> str:
        return f"doublewell:{self.s.numerator}/{self.s.denominator}"


PotentialSpec = Union[Monomial, DoubleWell]


@dataclass(frozen=True)
class EigenState:
    potential: PotentialSpec
    N: int
    parity: str
    E: mpf
    digits: int


@dataclass
class ShootResult:
    psi: mpf
    dpsi: mpf
    nodes: int
    samples: Optional[list] = None


class EigenvalueDiverged(RuntimeError):
    """|psi| exceeded the overflow bound: eigenvalue too far off."""


class BracketError(RuntimeError):
    """Node counts at the bracket ends are inconsistent with the requested state."""


def parity_of(N: int) -> str:
    return "even" if N % 2 == 0 else "odd"


def _local_coeffs(spec: PotentialSpec, x0: mpf, E: mpf) -> list:
    """Taylor coefficients of V(x0 + t) - E, scaled so psi'' = (sum w_j t^j) psi."""
    if isinstance(spec, Monomial):
        d = 2 * spec.n
        w = [math.comb(d, j) * x0 ** (d - j) for j in range(d + 1)]
        w[0] = w[0] - E
        return w
    u = x0 * x0 - 1
    inv_s2 = mpf(spec.s.denominator) ** 2 / mpf(spec.s.numerator) ** 2
    w = [u * u - E, 4 * x0 * u, 2 * u + 4 * x0 * x0, 4 * x0, mpf(1)]
    return [wj * inv_s2 for wj in w]


def _horner(a: Sequence[mpf], t: mpf):
    """Evaluate the series and its derivative at offset t."""
    v = mpf(0)
    dv = mpf(0)
    for k in range(len(a) - 1, -1, -1):
        dv = dv * t + k * a[k]
        v = v * t + a[k]
    # dv above is sum k a_k t^{k-1} * t; divide once
    return v, dv / t if t != 0 else a[1]


def _series(w: Sequence[mpf], psi: mpf, dpsi: mpf, absdx: mpf, eps: mpf) -> list:
    """Series coefficients for the local solution, extended until the tail
    is below eps relative to the largest term at radius absdx."""
    a = [psi, dpsi]
    d = len(w) - 1
    pw = absdx
    scale = max(abs(psi), abs(dpsi) * absdx)
    if scale == 0:
        scale = mpf(1)
    small = 0
    k = 0
    while True:
        s = mpf(0)
        for j in range(min(k, d) + 1):
            if w[j]:
                s += w[j] * a[k - j]
        a.append(s / ((k + 1) * (k + 2)))
        k += 1
        pw *= absdx
        t = abs(a[-1]) * pw
        if t > scale:
            scale = t
        if t < eps * scale:
            small += 1
            if small >= 3 and k >= 6:
                return a
        else:
            small = 0
        if k > _ORDER_CAP:
            raise RuntimeError("Taylor series failed to converge within order cap")


def _sign(x) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def shoot(
    spec: PotentialSpec,
    E: mpf,
    parity: str,
    x_end,
    sample_xs: Optional[Sequence[mpf]] = None,
    count_nodes: bool = False,
    overflow_log10: float = 1e6,
    step_max: float = STEP_MAX,
) -> ShootResult:
    """Integrate the shooting ODE from 0 to x_end at the ambient precision.

    Initial data is (psi, psi') = (1, 0) for even parity, (0, 1) for odd.
    `sample_xs` (ascending, within (0, x_end]) are evaluated from the local
    series of the step containing each point.  Node counting checks signs
    at every step midpoint and endpoint.
    """
    x_end = mpf(x_end)
    E = mpf(E)
    if parity == "even":
        psi, dpsi = mpf(1), mpf(0)
    elif parity == "odd":
        psi, dpsi = mpf(0), mpf(1)
    else:
        raise ValueError("parity must be 'even' or 'odd'")
    eps = mpf(10) ** (-(mp.dps + 5))
    overflow_mag = overflow_log10 * math.log2(10)

    samples = None
    si = 0
    if sample_xs is not None:
        samples = []
    x = mpf(0)
    nodes = 0
    last = _sign(psi) or 1
    want_mid = count_nodes
    while x < x_end:
        w = _local_coeffs(spec, x, E)
        w0 = abs(w[0])
        dx_f = min(step_max, STEP_FACTOR / (1 + math.sqrt(float(w0))))
        dx = mpf(dx_f)
        if x + dx > x_end:
            dx = x_end - x
        a = _series(w, psi, dpsi, abs(dx), eps)
        if sample_xs is not None:
            hi = x + dx
            while si < len(sample_xs) and sample_xs[si] <= hi:
                sx = sample_xs[si]
                if sx > x:
                    samples.append(_horner(a, sx - x)[0])
                    si += 1
                elif sx == x == 0:
                    samples.append(psi)
                    si += 1
                else:  # pragma: no cover - malformed sample list
                    raise ValueError("sample_xs must be ascending and > 0")
        if count_nodes:
            v_mid, _ = _horner(a, dx / 2)
            s_mid = _sign(v_mid)
            if s_mid and last and s_mid != last:
                nodes += 1
            if s_mid:
                last = s_mid
        psi, dpsi = _horner(a, dx)
        x = x + dx
        s_end = _sign(psi)
        if count_nodes and s_end and last and s_end != last:
            nodes += 1
        if s_end:
            last = s_end
        if psi and mpmath.mag(psi) > overflow_mag:
            raise EigenvalueDiverged(
                f"log10|psi| exceeded {overflow_log10:g} at x={float(x):.3f}: eigenvalue too far off"
            )
    return ShootResult(psi=psi, dpsi=dpsi, nodes=nodes, samples=samples)


def evaluate_wavefunction(spec: PotentialSpec, E, parity: str, x_target, P: int):
    """(psi, psi') at x_target, correct to P digits for the given E."""
    if x_target < 0:
        raise ValueError("x_target must be >= 0")
    with workdps(P + 10):
        res = shoot(spec, mpf(E), parity, mpf(x_target))
        psi, dpsi = res.psi, res.dpsi
    with workdps(P):
        return +psi, +dpsi


def _matching_point(spec: PotentialSpec, E_hi, budget_digits: int) -> mpf:
    """A point beyond the turning point where the true eigenfunction has
    decayed by `budget_digits` decades."""
    with workdps(PLANNER_DPS):
        if isinstance(spec, Monomial):
            n = spec.n
            C_log = mpf(0) if n == 1 else wkb.prefactor_from_energy(n, E_hi)
            x = (mpf(E_hi) ** (mpf(1) / (2 * n)) + 1) * mpf("1.05")
            while wkb.spatial_tail(n, E_hi, C_log, x) > -budget_digits:
                x *= mpf("1.1")
            return x
        # double well: psi ~ exp(-(x-1)^2 (x+2) / 3s)
        s = mpf(spec.s.numerator) / spec.s.denominator
        thr = 3 * s * budget_digits * mpmath.ln(10)
        x = mpf(2)
        while (x - 1) ** 2 * (x + 2) < thr:
            x *= mpf("1.1")
        return x


_CACHE_SEP = " "


def _cache_load(path: str) -> dict:
    table = {}
    if path and os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if len(parts) != 4:
                    continue
                pid, N, pe, dec = parts
                key = (pid, int(N))
                pe = int(pe)
                if key not in table or table[key][0] < pe:
                    table[key] = (pe, dec)
    return table


def _cache_append(path: str, pid: str, N: int, P_E: int, dec: str) -> None:
    with open(path, "a") as fh:
        fh.write(f"{pid}{_CACHE_SEP}{N}{_CACHE_SEP}{P_E}{_CACHE_SEP}{dec}\n")


def _bisect_nodes(
    spec: PotentialSpec,
    N: int,
    parity: str,
    lo: mpf,
    hi: mpf,
    x_f: mpf,
    P_E: int,
) -> mpf:
    """Bisection on the node count of psi(.; E) over (0, x_f].

    The count is non-decreasing in E and jumps by one at each eigenvalue of
    the parity family; the bracket converges to the E where the (N//2+1)-th
    half-line node sits exactly at x_f, i.e. the eigenvalue up to the
    matching-point tail.
    """
    m = N // 2

    def above(E) -> bool:
        return shoot(spec, E, parity, x_f, count_nodes=True).nodes > m

    with workdps(PLANNER_DPS):
        for _ in range(8):
            if not above(lo):
                break
            lo = lo / 2
        else:
            raise BracketError(f"node count at E={float(lo)} still exceeds {m}")
        for _ in range(12):
            if above(hi):
                break
            hi = hi * 2
        else:
            raise BracketError(f"node count at E={float(hi)} still <= {m}")

    final_dps = P_E + 20
    dps = min(40, final_dps)
    while True:
        with workdps(dps):
            lo, hi = +lo, +hi
            if dps >= final_dps:
                width = mpf(10) ** (-P_E) * hi
            else:
                width = mpf(10) ** (-(dps - 15)) * hi
            while hi - lo > width:
                mid = (lo + hi) / 2
                if above(mid):
                    hi = mid
                else:
                    lo = mid
        if dps >= final_dps:
            break
        dps = min(2 * dps, final_dps)
    with workdps(P_E):
        return (lo + hi) / 2


def refine_eigenvalue(
    spec: Monomial, N: int, P_E: int, cache_path: Optional[str] = None
) -> EigenState:
    """Eigenvalue N of -psi'' + (x^{2n} - E) psi = 0 to P_E digits.

    Brackets around the WKB estimate, bisects on node count at a matching
    point beyond the turning point, and caches the refined decimal string.
    """
    if not isinstance(spec, Monomial):
        raise TypeError("refine_eigenvalue handles Monomial potentials")
    if N < 0 or P_E < 10:
        raise ValueError("need N >= 0 and P_E >= 10")
    parity = parity_of(N)
    pid = spec.problem_id()
    if cache_path:
        hit = _cache_load(cache_path).get((pid, N))
        if hit and hit[0] >= P_E:
            return EigenState(spec, N, parity, from_decimal(hit[1], P_E), P_E)
    with workdps(PLANNER_DPS):
        E_wkb = wkb.wkb_energy(spec.n, N)
        lo, hi = E_wkb / 2, 2 * E_wkb
    x_f = _matching_point(spec, hi, P_E + 10)
    E = _bisect_nodes(spec, N, parity, lo, hi, x_f, P_E)
    if cache_path:
        _cache_append(cache_path, pid, N, P_E, to_decimal(E, P_E))
    return EigenState(spec, N, parity, E, P_E)


def refine_double_well_ground(s, P_E: int, cache_path: Optional[str] = None) -> EigenState:
    """Lowest even-parity eigenvalue of -s^2 psi'' + ((x^2-1)^2 - e) psi = 0.

    The harmonic approximation about the well minima (e ~ 2s) seeds the
    bracket; the same node-count bisection then refines it.
    """
    spec = DoubleWell(Fraction(s))
    if not 0 < spec.s <= 1:
        raise ValueError("need 0 < s <= 1")
    if P_E < 10:
        raise ValueError("P_E must be >= 10")
    pid = spec.problem_id()
    if cache_path:
        hit = _cache_load(cache_path).get((pid, 0))
        if hit and hit[0] >= P_E:
            return EigenState(spec, 0, "even", from_decimal(hit[1], P_E), P_E)
    with workdps(PLANNER_DPS):
        seed = 2 * mpf(spec.s.numerator) / spec.s.denominator
        lo, hi = mpf("0.1") * seed, 4 * seed
    x_f = _matching_point(spec, hi, P_E + 10)
    E = _bisect_nodes(spec, 0, "even", lo, hi, x_f, P_E)
    if cache_path:
        _cache_append(cache_path, pid, 0, P_E, to_decimal(E, P_E))
    return EigenState(spec, 0, "even", E, P_E)
