"""Taylor-series shooting and node-count eigenvalue refinement.

Reference eigenvalues used below come from two independent standard
methods, both implemented in this file: diagonalization of the quartic
Hamiltonian in a harmonic-oscillator basis, and a second-order finite
difference grid for the double well.  The long frozen constants were
produced by those oracles (and by the refiner itself at higher precision,
cross-checked against them).
"""

import math
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf, workdps

from normquad.schrodinger import (
    BracketError,
    DoubleWell,
    EigenvalueDiverged,
    Monomial,
    evaluate_wavefunction,
    parity_of,
    refine_double_well_ground,
    refine_eigenvalue,
    shoot,
)
from conftest import agree_digits

# Frozen references (see module docstring for how they were produced).
QUARTIC_E0 = "1.06036209048418289964704601669"
QUARTIC_E1 = "3.79967302980139416879"
DW_GROUND_S100 = "0.019949715210861054"      # s = 1/100, lowest even state
DW_GROUND_S1 = "1.1377858481882"             # s = 1 (basis oracle, 60 states)


def basis_oracle(nbasis, dps, potential):
    """Lowest eigenvalue of p^2 + V(x) by harmonic-basis diagonalization."""
    with workdps(dps):
        X = mpmath.zeros(nbasis)
        for k in range(nbasis - 1):
            X[k, k + 1] = X[k + 1, k] = mpmath.sqrt(mpf(k + 1) / 2)
        H = mpmath.zeros(nbasis)
        for k in range(nbasis):
            H[k, k] = 2 * k + 1  # p^2 + x^2
        X2 = X * X
        if potential == "x4":
            H = H - X2 + X2 * X2
        elif potential == "doublewell1":  # (x^2 - 1)^2, s = 1
            H = H - 3 * X2 + X2 * X2 + mpmath.eye(nbasis)
        else:
            raise ValueError(potential)
        ev = mpmath.mp.eigsy(H, eigvals_only=True)
        return min(ev)


def double_well_fd_oracle(s, npts=40001, span=2.5):
    """Lowest even eigenvalue of -s^2 psi'' + (x^2-1)^2 psi on [0, span].

    Second-order finite differences with a Neumann condition at 0 (even
    parity) and Dirichlet at span.  The parity fold at x=0 is only
    first-order, so this is trustworthy only when psi(0) is negligible
    (small s); good to ~1e-7 for s = 1/100.
    """
    numpy = pytest.importorskip("numpy")
    scipy_linalg = pytest.importorskip("scipy.linalg")
    h = span / npts
    x = numpy.arange(1, npts + 1) * h
    diag = (s / h) ** 2 * 2 + (x * x - 1) ** 2
    off = numpy.full(npts - 1, -((s / h) ** 2))
    off[0] *= math.sqrt(2)  # folds the ghost point of the Neumann end
    w = scipy_linalg.eigh_tridiagonal(diag, off, select="i",
                                      select_range=(0, 0))[0]
    return float(w[0])


# --- shooting against exact harmonic solutions ----------------------------

def test_shoot_harmonic_ground_is_exact_gaussian():
    with workdps(50):
        r = shoot(Monomial(1), mpf(1), "even", mpf(1))
        assert abs(r.psi - mpmath.exp(mpf("-0.5"))) < mpf(10) ** -48
        assert abs(r.dpsi + mpmath.exp(mpf("-0.5"))) < mpf(10) ** -48


def test_shoot_harmonic_first_excited():
    # E=3, odd: psi = x exp(-x^2/2) with psi'(0)=1.
    with workdps(40):
        x = mpf("1.3")
        r = shoot(Monomial(1), mpf(3), "odd", x)
        want = x * mpmath.exp(-x * x / 2)
        assert abs(r.psi - want) < mpf(10) ** -38


def test_shoot_samples_match_endpoint_values():
    with workdps(40):
        xs = [mpf("0.3"), mpf("1.1"), mpf("2.7")]
        r = shoot(Monomial(1), mpf(1), "even", mpf(3), sample_xs=xs)
        for x, v in zip(xs, r.samples):
            assert abs(v - mpmath.exp(-x * x / 2)) < mpf(10) ** -37


def test_shoot_node_count_fourth_state():
    # N=4 harmonic state has two nodes on x > 0 (Hermite H4 roots).
    with workdps(30):
        r = shoot(Monomial(1), mpf(9), "even", mpf(4), count_nodes=True)
        assert r.nodes == 2
        lo = shoot(Monomial(1), mpf("8.5"), "even", mpf(6), count_nodes=True)
        hi = shoot(Monomial(1), mpf("9.5"), "even", mpf(6), count_nodes=True)
        assert lo.nodes == 2
        assert hi.nodes == 3


def test_shoot_overflow_guard():
    with workdps(30):
        with pytest.raises(EigenvalueDiverged):
            shoot(Monomial(1), mpf("2.5"), "even", mpf(30), overflow_log10=50)


def test_shoot_rejects_bad_parity():
    with pytest.raises(ValueError):
        shoot(Monomial(1), mpf(1), "both", mpf(1))


def test_evaluate_wavefunction_precision():
    psi, _ = evaluate_wavefunction(Monomial(1), 1, "even", 2, 50)
    with workdps(60):
        assert abs(psi - mpmath.exp(-2)) < mpf(10) ** -48


def test_parity_of():
    assert parity_of(0) == "even"
    assert parity_of(7) == "odd"


# --- eigenvalue refinement -------------------------------------------------

def test_refine_harmonic_spectrum():
    for N in (0, 1, 2):
        st = refine_eigenvalue(Monomial(1), N, 30)
        with workdps(40):
            assert abs(st.E - (2 * N + 1)) < mpf(10) ** -28
        assert st.parity == parity_of(N)


def test_refine_quartic_ground_vs_frozen():
    st = refine_eigenvalue(Monomial(2), 0, 28)
    assert agree_digits(st.E, QUARTIC_E0, dps=35) >= 26


def test_refine_quartic_ground_vs_basis_oracle():
    got = basis_oracle(60, 30, "x4")
    assert agree_digits(got, QUARTIC_E0, dps=30) >= 12


def test_refine_quartic_first_excited_vs_frozen():
    st = refine_eigenvalue(Monomial(2), 1, 18)
    assert agree_digits(st.E, QUARTIC_E1, dps=25) >= 16


def test_refine_quartic_highly_excited_near_wkb():
    from normquad.wkb import wkb_energy
    st = refine_eigenvalue(Monomial(2), 100, 12)
    assert abs(float(st.E) / float(wkb_energy(2, 100)) - 1) < 1e-3


def test_refine_double_well_ground_vs_frozen_and_fd():
    st = refine_double_well_ground(Fraction(1, 100), 18)
    assert agree_digits(st.E, DW_GROUND_S100, dps=25) >= 16
    fd = double_well_fd_oracle(0.01)
    assert abs(float(st.E) / fd - 1) < 1e-6
    # the harmonic-well estimate 2s is good to a quarter percent here
    assert abs(float(st.E) / 0.02 - 1) < 3e-3


def test_refine_double_well_stiff_limit_exceeds_barrier():
    # At s=1 the ground state sits *above* the barrier top (x=0 barrier
    # value is 1); the harmonic 2s estimate is far off in this regime.
    st = refine_double_well_ground(Fraction(1), 14)
    oracle = basis_oracle(60, 30, "doublewell1")
    assert agree_digits(st.E, oracle, dps=25) >= 11
    assert agree_digits(st.E, DW_GROUND_S1, dps=25) >= 12
    assert float(st.E) > 1


def test_refine_cache_roundtrip(tmp_path):
    path = str(tmp_path / "eigen.cache")
    a = refine_eigenvalue(Monomial(2), 0, 20, cache_path=path)
    with open(path) as fh:
        line = fh.read().split()
    assert line[0] == Monomial(2).problem_id()
    assert int(line[1]) == 0 and int(line[2]) == 20
    # second call is a pure cache read, also for lower requested precision
    b = refine_eigenvalue(Monomial(2), 0, 15, cache_path=path)
    assert agree_digits(a.E, b.E, dps=20) >= 14


def test_refine_validation():
    with pytest.raises(TypeError):
        refine_eigenvalue(DoubleWell(Fraction(1, 100)), 0, 20)
    with pytest.raises(ValueError):
        refine_eigenvalue(Monomial(2), 0, 5)
    with pytest.raises(ValueError):
        refine_double_well_ground(Fraction(3, 2), 20)
