"""Equal-step rules: exactness degrees, Euler-Maclaurin structure, sampler."""

import math

import mpmath
import pytest
from mpmath import mpf, workdps

from normquad.quadrature import (
    Integrand,
    QuadPlan,
    QuadResult,
    RuleKind,
    apply_basic_rule,
    em_corrected_trapezoid,
    endpoint_derivative,
    extended_simpson,
    extended_trapezoid,
    infinite_trapezoid,
)
from conftest import fit_slope


def poly(c):
    """Integrand for sum_k c[k] x^k."""
    def f(x):
        acc = mpf(0)
        for ck in reversed(c):
            acc = acc * x + ck
        return acc
    return Integrand(eval=f)


def exact_poly_integral(c, a, b):
    a, b = mpf(a), mpf(b)
    return sum(mpf(ck) * (b ** (k + 1) - a ** (k + 1)) / (k + 1)
               for k, ck in enumerate(c))


EXP = Integrand(eval=mpmath.exp, smooth_endpoints=True)


# --- basic rules -----------------------------------------------------------

@pytest.mark.parametrize("rule,degree", [
    (RuleKind.TRAPEZOID, 1),
    (RuleKind.SIMPSON, 3),
    (RuleKind.SIMPSON38, 3),
    (RuleKind.BOOLE, 5),
])
def test_basic_rule_degree_of_exactness(rule, degree):
    with workdps(30):
        for k in range(degree + 1):
            c = [0] * k + [1]
            got = apply_basic_rule(rule, poly(c), 0, 1)
            assert abs(got - exact_poly_integral(c, 0, 1)) < mpf(10) ** -27
        # one degree higher must not be exact
        c = [0] * (degree + 1) + [1]
        got = apply_basic_rule(rule, poly(c), 0, 1)
        assert abs(got - exact_poly_integral(c, 0, 1)) > mpf(10) ** -6


def test_basic_rule_rejects_bad_interval():
    with pytest.raises(ValueError):
        apply_basic_rule(RuleKind.TRAPEZOID, EXP, 1, 1)
    with pytest.raises(ValueError):
        apply_basic_rule(RuleKind.EXTENDED_TRAPEZOID, EXP, 0, 1)


# --- composite rules -------------------------------------------------------

def test_extended_trapezoid_half_dome_m2():
    # f = 1 - x^2 on [0,1], M=2: h(1/2 + 3/4 + 0) = 0.625 by hand.
    with workdps(30):
        r = extended_trapezoid(poly([1, 0, -1]), 0, 1, 2)
        assert r.value == mpf("0.625")
        assert r.M == 2 and r.h == mpf("0.5")


def test_extended_simpson_is_richardson_combination():
    # Bit-for-bit identity with the two trapezoid sums, by construction.
    with workdps(40):
        t_h = extended_trapezoid(EXP, 0, 2, 16)
        t_2h = extended_trapezoid(EXP, 0, 2, 8)
        s = extended_simpson(EXP, 0, 2, 16)
        assert s.value == (4 * t_h.value - t_2h.value) / 3


def test_extended_simpson_rejects_odd_m():
    with pytest.raises(ValueError):
        extended_simpson(EXP, 0, 1, 5)


def test_thread_count_does_not_change_bits():
    with workdps(50):
        f = Integrand(eval=lambda x: mpmath.exp(-x * x) * mpmath.cos(x))
        r1 = extended_trapezoid(f, 0, 3, 64, threads=1)
        r4 = extended_trapezoid(f, 0, 3, 64, threads=4)
        assert r1.value == r4.value
        s1 = extended_simpson(f, 0, 3, 64, threads=1)
        s4 = extended_simpson(f, 0, 3, 64, threads=4)
        assert s1.value == s4.value


# --- endpoint derivatives --------------------------------------------------

def test_endpoint_derivative_exact_for_quadratics():
    with workdps(30):
        f = poly([2, -3, 5])  # f' = -3 + 10x
        for scheme, x in [("forward", mpf(0)), ("backward", mpf(1)),
                          ("central", mpf("0.5"))]:
            got = endpoint_derivative(f, x, mpf("0.5"), scheme, mpf("0.1"))
            assert abs(got - (-3 + 10 * x)) < mpf(10) ** -26


def test_endpoint_derivative_cubic_bias():
    # forward stencil on x^3 at 0 with delta=0.1:
    # -(0 - 4(0.001) + 0.008)/0.2 = -0.02, i.e. -(delta^2/3) f''' = -2 delta^2.
    with workdps(30):
        got = endpoint_derivative(poly([0, 0, 0, 1]), 0, 1, "forward", mpf("0.1"))
        assert abs(got - mpf("-0.02")) < mpf(10) ** -26


def test_central_scheme_requires_small_delta():
    with pytest.raises(ValueError):
        endpoint_derivative(EXP, 0, mpf("0.1"), "central", mpf("0.06"))


# --- Euler-Maclaurin corrections ------------------------------------------

def em_error(k_max, M, stencil="one_sided"):
    # exp on [0,1]; exact integral e - 1
    with workdps(40):
        r = em_corrected_trapezoid(EXP, 0, 1, M, k_max=k_max, stencil=stencil)
        return float(abs(r.value - (mpmath.e - 1)))


@pytest.mark.parametrize("k_max,stencil,min_order", [
    (1, "central", 3.8),
    (1, "one_sided", 2.8),
    (2, "one_sided", 4.8),
])
def test_em_corrected_convergence_order(k_max, stencil, min_order):
    ms = [8, 16, 32, 64, 128]
    errs = [em_error(k_max, m, stencil) for m in ms]
    slope = fit_slope([math.log(m) for m in ms],
                      [math.log(e) for e in errs])
    assert -slope >= min_order


def test_em_corrected_validations():
    with pytest.raises(ValueError):
        em_corrected_trapezoid(EXP, 0, 1, 3)
    with pytest.raises(ValueError):
        em_corrected_trapezoid(EXP, 0, 1, 8, k_max=2, stencil="central")
    with pytest.raises(ValueError):
        em_corrected_trapezoid(EXP, 0, 1, 8, k_max=3)


def test_extended_simpson_em_coefficient_is_one_180th():
    # f = (1-x^2)^2 on [0,1]: f''' = 24x, so the h^4 defect term is
    # 24 h^4 / 180 and every higher term vanishes (f^(5) = 0).  The
    # Richardson form makes this exact up to roundoff.
    with workdps(40):
        f = poly([1, 0, -2, 0, 1])
        exact = mpf(8) / 15
        for M in (4, 8, 16):
            h = mpf(1) / M
            s = extended_simpson(f, 0, 1, M)
            assert abs((s.value - exact) - 24 * h ** 4 / 180) < mpf(10) ** -35


# --- infinite-range sampler ------------------------------------------------

def make_plan(h, x_min, x_max, P=30):
    return QuadPlan(h=mpf(h), x_min=mpf(x_min), x_max=mpf(x_max),
                    M=int(mpf(x_max) / mpf(h)), target_P=P, guard=10,
                    est_error_log10=-float(P))


def test_infinite_trapezoid_gaussian_defect():
    # Error of the h-grid over a wide window is the Poisson image term
    # sqrt(4 pi) exp(-pi^2/h^2), positive, to ~1e-3 relative.
    with workdps(40):
        f = Integrand(eval=lambda x: mpmath.exp(-x * x), parity="even")
        for h in ("0.8", "1.0"):
            r = infinite_trapezoid(f, make_plan(h, 0, 14))
            defect = r.value - mpmath.sqrt(mpmath.pi)
            pred = mpmath.sqrt(4 * mpmath.pi) * mpmath.exp(
                -mpmath.pi ** 2 / mpf(h) ** 2)
            assert defect > 0
            assert abs(defect / pred - 1) < 0.01


def test_infinite_trapezoid_half_weight_at_zero():
    with workdps(30):
        calls = []
        def f(x):
            calls.append(x)
            return mpmath.exp(-x * x)
        r = infinite_trapezoid(Integrand(eval=f, parity="even"),
                               make_plan("0.5", 0, "1.2"))
        # M = floor(1.2/0.5) = 2; value = h f(0) + 2h (f(h) + f(2h))
        h = mpf("0.5")
        expect = h * mpmath.exp(mpf(0)) + 2 * h * (
            mpmath.exp(-h * h) + mpmath.exp(-4 * h * h))
        assert r.value == expect
        assert r.M == 2


def test_infinite_trapezoid_shifted_window():
    # Right hump of an even two-hump density: full-weight samples, doubled.
    with workdps(30):
        f = Integrand(eval=lambda x: mpmath.exp(-20 * (x - 2) ** 2),
                      parity="even")
        r = infinite_trapezoid(f, make_plan("0.1", "0.5", "3.5"))
        exact = 2 * mpmath.sqrt(mpmath.pi / 20)
        assert abs(r.value - exact) < mpf(10) ** -18


def test_infinite_trapezoid_thread_invariance():
    with workdps(60):
        f = Integrand(eval=lambda x: mpmath.exp(-x * x), parity="even")
        plan = make_plan("0.3", 0, 12, P=50)
        vals = {infinite_trapezoid(f, plan, threads=t).value for t in (1, 2, 8)}
        assert len(vals) == 1


def test_quad_plan_validation():
    with pytest.raises(ValueError):
        make_plan("-0.1", 0, 1)
    with pytest.raises(ValueError):
        make_plan("0.1", 2, 1)
