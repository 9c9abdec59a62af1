"""Command-line front end: single integrals, normalization runs, benchmark CSVs."""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, workdps

from . import analytic_models as am
from . import wkb
from .bigreal import guard_digits, to_decimal
from .normalizer import normalize
from .quadrature import (
    Integrand,
    QuadPlan,
    em_corrected_trapezoid,
    extended_simpson,
    extended_trapezoid,
    infinite_trapezoid,
)
from .schrodinger import DoubleWell, Monomial

LN10 = math.log(10)

CSV_HEADER = [
    "suite",
    "case",
    "param",
    "predicted_log10_err",
    "measured_log10_err",
    "evaluations",
    "wall_time_ms",
]


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


# ---------------------------------------------------------------- finite models

def _poly_integrand(n: int) -> Integrand:
    return Integrand(eval=lambda x: (1 - x * x) ** n, parity="none", smooth_endpoints=False)


def _poly_exact(n: int) -> Fraction:
    # int_0^1 (1-x^2)^n dx = 4^n (n!)^2 / (2n+1)!
    return Fraction(4**n * math.factorial(n) ** 2, math.factorial(2 * n + 1))


def _jinf_integrand() -> Integrand:
    def f(x):
        u = 2 * x - 1
        if abs(u) >= 1:
            return mpf(2) if u < 0 else mpf(0)
        return 1 - mpmath.tanh(u / (1 - u * u))

    return Integrand(eval=f, parity="none", smooth_endpoints=True)


def _parse_model(text: str):
    """gauss | power:<n> | doublehump:<a> -> ModelKind; In:<n> | Jinf -> finite."""
    if text == "gauss":
        return ("infinite", am.Gaussian())
    if text.startswith("power:"):
        return ("infinite", am.Power(int(text.split(":", 1)[1])))
    if text.startswith("doublehump:"):
        return ("infinite", am.DoubleHump(float(Fraction(text.split(":", 1)[1]))))
    if text.startswith("In:"):
        return ("finite", int(text.split(":", 1)[1]))
    if text == "Jinf":
        return ("finite", None)
    raise ValueError(f"unknown model {text!r}")


def _finite_rule(rule: str, f: Integrand, M: int):
    if rule == "trap":
        return extended_trapezoid(f, 0, 1, M)
    if rule == "simpson":
        return extended_simpson(f, 0, 1, M)
    if rule == "em1":
        return em_corrected_trapezoid(f, 0, 1, M, k_max=1)
    if rule == "em2":
        return em_corrected_trapezoid(f, 0, 1, M, k_max=2)
    raise ValueError(f"unknown rule {rule!r}")


def _append_csv(path: str, rows) -> None:
    new = not os.path.exists(path)
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(CSV_HEADER)
        w.writerows(rows)


# ------------------------------------------------------------------- integrate

def cmd_integrate(args) -> int:
    try:
        family, kind = _parse_model(args.model)
    except ValueError as exc:
        return _fail(str(exc))
    P = args.digits
    t0 = time.perf_counter()
    if family == "finite":
        M = args.M or 64
        f = _poly_integrand(kind) if kind is not None else _jinf_integrand()
        exact = _poly_exact(kind) if kind is not None else Fraction(1)
        with workdps(P + 20):
            res = _finite_rule(args.rule, f, M)
            exact_mp = mpf(exact.numerator) / exact.denominator
            err = abs(res.value - exact_mp)
            p_obt = float(P + 15) if err == 0 else float(-mpmath.log10(err / abs(exact_mp)))
            print(f"model       {args.model} on [0,1], rule {args.rule}, M={M}")
            print(f"value       {to_decimal(res.value, P)}")
            print(f"exact       {to_decimal(exact_mp, P)}")
        print(f"P_obt       {p_obt:.2f}")
        p_est = float("nan")
        evals = M + 1
        value_str = to_decimal(res.value, P)
        measured = -p_obt
    else:
        if isinstance(kind, am.Gaussian):
            plan = am.plan_gaussian(P)
        elif isinstance(kind, am.Power):
            plan = am.plan_power(kind.n, P)
        else:
            plan = am.plan_double_hump(kind.a, P)
        if args.M:
            return _fail("--M applies to finite-interval models only")
        f = am.model_integrand(kind)
        with workdps(P + plan.guard):
            res = infinite_trapezoid(f, plan, threads=1)
        ref = am.closed_form(kind, P + plan.guard)
        if ref is None:
            from dataclasses import replace

            with workdps(P + plan.guard + 20):
                ref = infinite_trapezoid(f, replace(plan, h=plan.h / 2, M=2 * plan.M)).value
        with workdps(P + plan.guard):
            err = abs(res.value - ref) / abs(ref)
            p_obt = float(P + plan.guard - 5) if err == 0 else float(-mpmath.log10(err))
        p_est = -plan.est_error_log10
        evals = plan.M + 1
        value_str = to_decimal(res.value, P)
        measured = -p_obt
        print(f"model       {args.model}, planned for P={P}")
        print(f"value       {value_str}")
        print(f"plan        h={mpmath.nstr(plan.h, 8)} x_max={mpmath.nstr(plan.x_max, 8)} "
              f"M+1={plan.M + 1} guard={plan.guard}")
        print(f"P_est       {p_est:.2f}")
        print(f"P_obt       {p_obt:.2f}")
    ms = int((time.perf_counter() - t0) * 1000)
    if args.csv:
        _append_csv(args.csv, [["integrate", args.model, P, -p_est if p_est == p_est else "",
                                measured, evals, ms]])
    if p_obt >= P - 2:
        return 0
    print(f"reason: requested {P} digits, obtained {p_obt:.2f}", file=sys.stderr)
    return 1


# ------------------------------------------------------------------- normalize

def _parse_potential(text: str):
    if text.startswith("x2n:"):
        return Monomial(int(text.split(":", 1)[1]))
    if text.startswith("doublewell:"):
        return DoubleWell(Fraction(text.split(":", 1)[1]))
    raise ValueError(f"unknown potential {text!r}")


def cmd_normalize(args) -> int:
    try:
        spec = _parse_potential(args.potential)
    except ValueError as exc:
        return _fail(str(exc))
    P = args.digits
    threads = args.threads or int(os.environ.get("NORMQUAD_THREADS", "1"))
    try:
        res = normalize(spec, args.state, P, threads=threads, cache_path=args.cache)
    except ValueError as exc:
        return _fail(str(exc))
    print(f"potential   {args.potential}, state N={args.state}")
    print(f"eigenvalue  {to_decimal(res.eigenvalue, min(P, 30))}...")
    print(f"integral    {to_decimal(res.integral, P)}")
    print(f"norm_const  {to_decimal(res.norm_const, P)}")
    print(f"plan        h={mpmath.nstr(res.plan.h, 8)} window=[{mpmath.nstr(res.plan.x_min, 8)}, "
          f"{mpmath.nstr(res.plan.x_max, 8)}] M+1={res.evaluations}")
    print(f"P_est       {res.P_est:.2f}")
    print(f"P_obt       {res.P_obt:.2f}")
    print(f"timing      total {res.wall_time_ms} ms (eigenvalue refinement {res.refine_ms} ms)")
    if args.csv:
        _append_csv(args.csv, [["normalize", args.potential, f"N={args.state};P={P}",
                                -res.P_est, -res.P_obt, res.evaluations, res.wall_time_ms]])
    if res.P_obt >= P - 2:
        return 0
    print(f"reason: requested {P} digits, obtained {res.P_obt:.2f}", file=sys.stderr)
    return 1


# ----------------------------------------------------------------------- bench

def _bench_fig1():
    rows = []
    cases = [("In:1", _poly_integrand(1), _poly_exact(1)),
             ("In:4", _poly_integrand(4), _poly_exact(4)),
             ("In:12", _poly_integrand(12), _poly_exact(12)),
             ("Jinf", _jinf_integrand(), Fraction(1))]
    with workdps(40):
        for name, f, exact in cases:
            exact_mp = mpf(exact.numerator) / exact.denominator
            for M in (8, 16, 32, 64, 128, 256, 512, 1024):
                for rule, run in (("trap", extended_trapezoid), ("simpson", extended_simpson)):
                    t0 = time.perf_counter()
                    val = run(f, 0, 1, M).value
                    ms = int((time.perf_counter() - t0) * 1000)
                    err = abs(val - exact_mp) / abs(exact_mp)
                    measured = float(mpmath.log10(err)) if err > 0 else float("-inf")
                    rows.append(["fig1", f"{name}:{rule}", f"M={M}", "", measured, M + 1, ms])
    return rows


def _bench_fig2():
    rows = []
    cases = [("gauss", am.Gaussian(), am.plan_gaussian),
             ("power:2", am.Power(2), lambda P: am.plan_power(2, P)),
             ("doublehump:1", am.DoubleHump(1.0), lambda P: am.plan_double_hump(1.0, P))]
    for name, kind, planner in cases:
        f = am.model_integrand(kind)
        for P in (10, 20, 30, 40, 60, 80):
            plan = planner(P)
            t0 = time.perf_counter()
            with workdps(P + plan.guard):
                val = infinite_trapezoid(f, plan).value
            ms = int((time.perf_counter() - t0) * 1000)
            ref = am.closed_form(kind, P + plan.guard + 10)
            if ref is None:
                from dataclasses import replace

                with workdps(P + plan.guard + 20):
                    ref = infinite_trapezoid(f, replace(plan, h=plan.h / 2, M=2 * plan.M)).value
            with workdps(P + plan.guard):
                err = abs(val - ref) / abs(ref)
            measured = float(mpmath.log10(err)) if err > 0 else float("-inf")
            rows.append(["fig2", name, f"M={plan.M}", plan.est_error_log10, measured,
                         plan.M + 1, ms])
    return rows


_FIG34_CASES = [("E0", Monomial(2), 0),
                ("E100", Monomial(2), 100),
                ("EWW", DoubleWell(Fraction(1, 100)), 0)]
_FIG34_P = (20, 30, 50)


def _bench_fig34(suite: str, cache: str):
    rows = []
    for name, spec, N in _FIG34_CASES:
        for P in _FIG34_P:
            res = normalize(spec, N, P, cache_path=cache)
            rows.append([suite, name, f"P={P}", -res.P_est, -res.P_obt,
                         res.evaluations, res.wall_time_ms])
    return rows


def cmd_bench(args) -> int:
    if args.suite == "fig1":
        rows = _bench_fig1()
    elif args.suite == "fig2":
        rows = _bench_fig2()
    elif args.suite in ("fig3", "fig4"):
        rows = _bench_fig34(args.suite, args.cache)
    else:
        return _fail(f"unknown suite {args.suite!r}")
    try:
        _append_csv(args.out, rows)
    except OSError as exc:
        return _fail(f"cannot write {args.out}: {exc}")
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


# ------------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normquad",
                                 description="A-priori-planned trapezoid quadrature and "
                                             "wavefunction normalization integrals")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="integrate a model function")
    p.add_argument("--model", required=True,
                   help="gauss | power:<n> | doublehump:<a> | In:<n> | Jinf")
    p.add_argument("--digits", type=int, default=30)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--rule", choices=["trap", "simpson", "em1", "em2"], default="trap")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("normalize", help="normalization integral of an eigenstate")
    p.add_argument("--potential", required=True, help="x2n:<n> | doublewell:<s-as-fraction>")
    p.add_argument("--state", type=int, default=0)
    p.add_argument("--digits", type=int, default=30)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--cache", default="./eigen.cache")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("bench", help="benchmark suites as CSV tables")
    p.add_argument("--suite", required=True, choices=["fig1", "fig2", "fig3", "fig4"])
    p.add_argument("--out", required=True)
    p.add_argument("--cache", default="./eigen.cache")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
