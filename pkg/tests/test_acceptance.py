"""Acceptance suite: one test per criterion, each reporting a pass/fail line.

Tolerances are pinned to the criteria; nothing here is loosened to make a
criterion pass.
"""

import math
import random
import sys

import numpy as np
import pytest

from gmgf import (Fixed, GmgfConfig, TargetEquation, catalog, coc_sequence, eval_count_gmgf,
                  gain_sequence, get_problem, predicted_error_constant, reference_root,
                  solve_gmgf, solve_newton)
from gmgf.bench import SweepSpec, run_sweep, time_solve
from gmgf.core import moment_hk2, sigma
from gmgf.problem import ProblemDefinition, eval_d2g, eval_dg, eval_g

from _support import EPS, TABLE_CASES, fd_first, fd_second, last_resolved_coc, fd_length


def _pairs(problem, n=20):
    """``n`` (y, x0) pairs: grid targets, alternating the default and a shifted x0."""
    y_min, y_max, _ = problem.default_sweep
    out = []
    for i, y in enumerate(np.linspace(y_min, y_max, n)):
        x0 = problem.default_x0
        if i % 2 and problem.contains(x0 + 0.1):
            x0 += 0.1
        out.append((float(y), x0))
    return out


def _all_runs():
    """Both methods on the reference table cases and on the equivalence pairs."""
    runs = []
    for pid, y, x0, *_ in TABLE_CASES:
        runs.append((pid, y, x0))
    for e in catalog():
        runs.extend((e.id, y, x0) for y, x0 in _pairs(e.problem, 6))
    return runs


def test_criterion_01_newton_equivalence(acceptance):
    fixed0 = GmgfConfig(degree_policy=Fixed(0))
    mismatches = []
    n = 0
    for e in catalog():
        for y, x0 in _pairs(e.problem):
            eq = TargetEquation(e.problem, y)
            on, tn = solve_newton(eq, x0)
            og, tg = solve_gmgf(eq, x0, fixed0)
            n += 1
            if tn.iterates != tg.iterates or on.status != og.status or on.root != og.root:
                mismatches.append((e.id, y, x0))
    ok = not mismatches and n == 200
    acceptance(1, ok, f"{n} (problem, y, x0) runs, bit-identical iterates in {n - len(mismatches)}")
    assert ok, mismatches[:5]


def test_criterion_02_table_iteration_counts(acceptance):
    lines, ok = [], True
    for pid, y, x0, i_newton, i_gmgf in TABLE_CASES:
        eq = TargetEquation(get_problem(pid), y)
        on, _ = solve_newton(eq, x0)
        og, _ = solve_gmgf(eq, x0)
        good_n = on.converged and abs(on.iterations - i_newton) <= 1
        good_g = og.converged and abs(og.iterations - i_gmgf) <= 1
        ok &= good_n and good_g
        lines.append(f"{pid} y={y}: Newton {on.status}/{on.iterations} (ref {i_newton}) "
                     f"{'ok' if good_n else 'MISS'}, gMGF {og.status}/{og.iterations} "
                     f"(ref {i_gmgf}) {'ok' if good_g else 'MISS'}")
    for line in lines:
        print("   ", line)
    acceptance(2, ok, "; ".join(l for l in lines if "MISS" in l) or "all 20 counts within +-1")
    assert ok


def test_criterion_03_first_step_magnitudes(acceptance):
    checks = [("ex1", 7.0, 0.0, "newton", 1.0), ("ex1", 7.0, 0.0, "gmgf", 0.30),
              ("lambertw", 5.0, 0.0, "gmgf", 1.03)]
    ok, parts = True, []
    for pid, y, x0, method, ref in checks:
        eq = TargetEquation(get_problem(pid), y)
        _, tr = (solve_newton if method == "newton" else solve_gmgf)(eq, x0)
        step = tr.records[0].step_abs
        good = abs(step - ref) <= 0.05 * ref
        ok &= good
        parts.append(f"{pid}/{method} |x1-x0|={step:.4f} (ref {ref})")
    acceptance(3, ok, ", ".join(parts))
    assert ok


@pytest.mark.slow
def test_criterion_04_failure_reproduction(acceptance):
    hx = run_sweep(SweepSpec.from_catalog("heatexchanger", timing=False))
    low = [r for r in hx if r.y <= 0.20 + 1e-9]
    high = [r for r in hx if r.y > 0.20 + 1e-9]
    hx_low_ok = all(r.newton.status == "Converged" and r.gmgf.status == "Converged" for r in low)
    hx_high_ok = all(r.newton.status != "Converged" for r in high)
    hx_gmgf_fail = [round(r.y, 2) for r in hx if r.gmgf.status != "Converged"]
    hx_newton_low_fail = [round(r.y, 2) for r in low if r.newton.status != "Converged"]

    ex4 = run_sweep(SweepSpec.from_catalog("ex4", timing=False))
    newton_fail = [r.y for r in ex4 if r.newton.status != "Converged"]
    first_fail = min(newton_fail) if newton_fail else math.inf
    after = all(r.newton.status != "Converged" for r in ex4 if r.y >= first_fail)
    ex4_ok = (after and 3.31 - 1e-9 <= first_fail <= 3.34 + 1e-9
              and all(r.gmgf.status == "Converged" for r in ex4))
    ok = hx_low_ok and hx_high_ok and ex4_ok
    acceptance(4, ok,
               f"heatexchanger: Newton fails at y<=0.20 for {hx_newton_low_fail}, "
               f"Newton non-converged above 0.20: {hx_high_ok}, gMGF fails at {len(hx_gmgf_fail)} rows "
               f"(from y={hx_gmgf_fail[0] if hx_gmgf_fail else '-'}); "
               f"ex4: Newton first failure y={first_fail:.2f}, stays failed: {after}, "
               f"gMGF converged on all {len(ex4)} rows: {all(r.gmgf.status == 'Converged' for r in ex4)}")
    assert ok


def test_criterion_05_sweep_envelope(acceptance):
    ex1 = run_sweep(SweepSpec.from_catalog("ex1", timing=False))
    max_i = max(r.gmgf.I for r in ex1)
    max_e = max(r.gmgf.E for r in ex1)
    e_at = [r.gmgf.E for r in ex1 if abs(r.y + 10.0) < 1e-9][0]
    ex2 = run_sweep(SweepSpec.from_catalog("ex2", timing=False))
    i2 = [r.gmgf.I for r in ex2 if r.gmgf.status == "Converged"]
    ok = (max_i <= 28 and abs(e_at - 89) <= 5 and max_e == e_at and len(i2) == len(ex2)
          and min(i2) >= 3 and max(i2) <= 6)
    acceptance(5, ok, f"ex1 max I={max_i}, E(y=-10)={e_at}, max E={max_e}; "
                      f"ex2 I in [{min(i2)}, {max(i2)}] over {len(i2)}/{len(ex2)} converged rows")
    assert ok


def test_criterion_06_coc(acceptance):
    bad, checked = [], 0
    for pid, y, x0, *_ in TABLE_CASES:
        eq = TargetEquation(get_problem(pid), y)
        for solve in (solve_newton, solve_gmgf):
            out, tr = solve(eq, x0)
            if not out.converged:
                continue
            zeta = reference_root(eq, out.root)
            errs = [x - zeta for x in tr.iterates]
            c = last_resolved_coc(errs, coc_sequence(tr, zeta))
            if c is None:
                continue
            checked += 1
            if not 1.8 <= c <= 2.2:
                bad.append((pid, tr.method, round(c, 3)))
    eq = TargetEquation(get_problem("ex1"), 7.0)
    z = reference_root(eq, solve_newton(eq, 0.0)[0].root)
    rho_g = coc_sequence(solve_gmgf(eq, 0.0)[1], z)[0]
    rho_n = coc_sequence(solve_newton(eq, 0.0)[1], z)[0]
    ok = not bad and abs(rho_g - 3.02) <= 0.1 and rho_n < 0
    acceptance(6, ok, f"{checked} converged runs checked, outside [1.8, 2.2]: {bad}; "
                      f"ex1 y=7 rho_2 gMGF={rho_g:.3f}, Newton={rho_n:.3f}")
    assert ok


def test_criterion_07_moment_identities(acceptance):
    rng = random.Random(20240607)
    worst1 = worst2 = 0.0
    n = 0
    for e in catalog():
        lo, hi = e.sample_interval
        for _ in range(20):
            x = rng.uniform(lo, hi)
            eq = TargetEquation(e.problem, e.problem.f(x) + rng.choice((-0.5, 0.5)))
            g = eval_g(eq, x)
            h01 = -sigma(g) * eval_dg(eq, x)
            h02 = -sigma(g) * eval_d2g(eq, x)
            for k in range(-3, 4):
                L = fd_length(h01, h02, k, x)
                d1 = fd_first(eq, k, x, 1e-3 * L)
                d2 = fd_second(eq, k, x, 1e-2 * L)
                expected2 = moment_hk2(h01, h02, k)
                worst1 = max(worst1, abs(d1 - h01) / abs(h01))
                worst2 = max(worst2, abs(d2 - expected2) / abs(expected2))
                n += 1
    ok = worst1 <= 1e-6 and worst2 <= 1e-4
    acceptance(7, ok, f"{n} (problem, x, k) samples; worst rel. error first {worst1:.2e}, "
                      f"second {worst2:.2e}")
    assert ok


def _square_minus_4():
    return ProblemDefinition("x2m4", lambda x: x * x - 4.0, lambda x: 2.0 * x, lambda x: 2.0,
                             default_x0=2.5)


def _error_ratio_check(eq, x0, kappa):
    """``(rel. error, detail)`` of e_(n+1)/e_n^2 against the predicted constant."""
    out, tr = solve_gmgf(eq, x0, GmgfConfig(degree_policy=Fixed(kappa)))
    if not out.converged:
        return None, f"kappa={kappa} from {x0:g}: {out.status.value} after {out.iterations} steps"
    zeta = reference_root(eq, out.root)
    e = [x - zeta for x in tr.iterates]
    n = max(i for i in range(len(e) - 1) if abs(e[i + 1]) >= 100 * EPS and e[i] != 0)
    ratio = e[n + 1] / e[n] ** 2
    side = sigma(eval_g(eq, tr.iterates[n]))
    c = predicted_error_constant(eq, zeta, kappa, side=side)
    rel = abs(ratio - c) / abs(c)
    return rel, (f"kappa={kappa} from {x0:g}: e_(n+1)/e_n^2={ratio:.4f} "
                 f"vs C={c:.4f} (rel {rel:.1e})")


def test_criterion_08_error_equation(acceptance):
    eq = TargetEquation(_square_minus_4(), 0.0)
    parts, ok = [], True
    for kappa in (-1, 0, 1):
        rel, detail = _error_ratio_check(eq, 2.5, kappa)
        ok &= rel is not None and rel <= 0.1
        parts.append(detail)
    # non-gating: the same ratio from a start inside the degree-1 basin
    rel, detail = _error_ratio_check(eq, 2.05, 1)
    parts.append(f"[info] {detail}")
    acceptance(8, ok, "; ".join(parts))
    assert ok


def test_criterion_09_accounting(acceptance):
    bad_n, bad_g, n_runs = [], [], 0
    for pid, y, x0 in _all_runs():
        eq = TargetEquation(get_problem(pid), y)
        on, tn = solve_newton(eq, x0)
        og, tg = solve_gmgf(eq, x0)
        n_runs += 1
        if on.converged and on.E != 2 * on.iterations:
            bad_n.append((pid, y))
        if eval_count_gmgf(tg) != og.evals.total or og.evals.total != tg.charged_evals.total:
            bad_g.append((pid, y))
    ok = not bad_n and not bad_g
    acceptance(9, ok, f"{n_runs} (problem, y, x0) runs; Newton E != 2I: {bad_n}; "
                      f"gMGF count mismatches: {bad_g}")
    assert ok


def test_criterion_10_gain(acceptance):
    # Each gain is a rounded difference of two errors, so the sum resolves
    # the identity to the ulp of the largest error entering it. Endpoint
    # ulps are also reported; they are finer than a single excursion gain.
    worst = worst_end = 0.0
    n_runs = 0
    bad = []
    for pid, y, x0 in _all_runs():
        eq = TargetEquation(get_problem(pid), y)
        for solve in (solve_newton, solve_gmgf):
            out, tr = solve(eq, x0)
            if not out.converged:
                continue
            zeta = reference_root(eq, out.root)
            gains = gain_sequence(tr, zeta)
            lhs = math.fsum(gains)
            ends = (abs(tr.x0 - zeta), abs(tr.iterates[-1] - zeta))
            rhs = ends[0] - ends[1]
            scale = math.ulp(max(ends + tuple(abs(x - zeta) for x in tr.iterates)))
            n_runs += 1
            worst = max(worst, abs(lhs - rhs) / scale)
            worst_end = max(worst_end, abs(lhs - rhs) / math.ulp(max(ends)))
            if abs(lhs - rhs) > 4 * scale:
                bad.append((pid, y, tr.method))
    eq = TargetEquation(get_problem("ex1"), 2.5)
    out, tr = solve_gmgf(eq, 0.0)
    gains = gain_sequence(tr, reference_root(eq, out.root))
    gmax = max(gains)
    at = gains.index(gmax) + 1
    ok = not bad and abs(gmax - 0.46415) <= 0.001
    acceptance(10, ok, f"{n_runs} traced runs, worst telescoping gap {worst:.1f} ulp of the largest "
                       f"error ({worst_end:.0f} ulp of the larger endpoint); "
                       f"ex1 y=2.5 gMGF max gain {gmax:.5f} at n={at}")
    assert ok


@pytest.mark.slow
def test_criterion_11_timing_trend_informational(acceptance):
    points = [("ex1", -10.0), ("ex2", 100.0), ("ex7", 70.0), ("bioreactor", 8.0)]
    parts, trend = [], True
    for pid, y in points:
        p = get_problem(pid)
        eq = TargetEquation(p, y)
        tn, _ = time_solve(eq, p.default_x0, "newton", repeats=100)
        tg, _ = time_solve(eq, p.default_x0, "gmgf", repeats=100)
        trend &= tg < tn
        parts.append(f"{pid} y={y}: t_gMGF={tg * 1e6:.0f}us t_Newton={tn * 1e6:.0f}us")
    # informational only: the line reports the observed trend, the test never fails on it
    acceptance(11, True, ("trend holds" if trend else "trend does NOT hold everywhere")
               + " (informational); " + "; ".join(parts))
