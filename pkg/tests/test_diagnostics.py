import io
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmgf.catalog import get_problem
from gmgf.core import solve_gmgf
from gmgf.diagnostics import (JSONL_FIELDS, IterationRecord, SolveTrace, Status, bisect_root,
                              coc_from_errors, coc_sequence, eval_count_gmgf, gain_sequence,
                              read_trace_jsonl, reference_root, trace_to_jsonl,
                              write_trace_jsonl)
from gmgf.newton import solve_newton
from gmgf.problem import EvalCounter, ProblemDefinition, TargetEquation


def _trace(method, xs, degrees=None):
    degrees = degrees or [0] * (len(xs) - 1)
    tr = SolveTrace(method, xs[0])
    for n, (x, d) in enumerate(zip(xs[1:], degrees), start=1):
        tr.records.append(IterationRecord(n, x, abs(x - xs[n - 1]), 0.0, d, EvalCounter(), 0))
    return tr


def test_gain_examples():
    line = ProblemDefinition("line", lambda x: x - 2.0, lambda x: 1.0)
    out, tr = solve_newton(TargetEquation(line), 5.0)
    assert gain_sequence(tr, 2.0)[0] == 3.0
    eq = TargetEquation(get_problem("ex1"), 2.5)
    zeta = reference_root(eq, -1.0559029007952405)
    g = gain_sequence(solve_gmgf(eq, 0.0)[1], zeta)
    assert max(g) == pytest.approx(0.46415, abs=1e-3) and g.index(max(g)) == 1
    assert gain_sequence(solve_newton(eq, 0.0)[1], zeta)[0] < 0


def test_coc_examples():
    # binary powers keep the constructed errors exact
    tr = _trace("newton", [2.0 ** -(2 ** n) for n in range(6)])
    assert coc_sequence(tr, 0.0) == [2.0, 2.0, 2.0, 2.0]
    tr = _trace("newton", [10.0 ** -(2 ** n) for n in range(5)])
    assert coc_sequence(tr, 0.0) == pytest.approx([2.0, 2.0, 2.0], rel=1e-15)
    eq = TargetEquation(get_problem("ex1"), 7.0)
    zeta = reference_root(eq, -0.43968957483623809)
    coc_n = [c for c in coc_sequence(solve_newton(eq, 0.0)[1], zeta) if not math.isnan(c)]
    assert coc_n[-2] == pytest.approx(2.0, abs=0.05)
    assert coc_sequence(solve_gmgf(eq, 0.0)[1], zeta)[0] == pytest.approx(3.02, abs=0.01)


def test_coc_marks_undefined_entries():
    assert all(math.isnan(c) for c in coc_from_errors([1.0, 0.1, 0.0, 0.0]))
    assert len(coc_from_errors([1.0, 0.5])) == 0


def test_eval_count_examples():
    assert eval_count_gmgf(_trace("gmgf", [0, 1, 2, 3], [0, 0, 0])) == 9
    assert eval_count_gmgf(_trace("gmgf", [0, 1, 2, 3], [-2, -1, 0])) == 12


def test_ex1_boundary_eval_count():
    out, tr = solve_gmgf(TargetEquation(get_problem("ex1"), -10.0), 0.0)
    assert out.E == eval_count_gmgf(tr) == 89


@settings(max_examples=200)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30), st.floats(-10, 10))
def test_gain_telescopes(xs, zeta):
    g = gain_sequence(_trace("newton", xs), zeta)
    e = [abs(x - zeta) for x in xs]
    assert abs(math.fsum(g) - (e[0] - e[-1])) <= len(g) * math.ulp(max(e))


def test_counter_totals_match_trace():
    for pid, y, x0 in (("ex6", 5.0, 0.2), ("bioreactor", 3.0, 2.0), ("ex3", -10.0, 0.5)):
        eq = TargetEquation(get_problem(pid), y)
        out, tr = solve_gmgf(eq, x0)
        assert out.evals == tr.charged_evals and out.raw_evals == tr.total_evals
        assert out.E == eval_count_gmgf(tr)


def test_jsonl_schema():
    _, tr = solve_gmgf(TargetEquation(get_problem("ex1"), 7.0), 0.0)
    text = trace_to_jsonl(tr)
    lines = text.splitlines()
    assert len(lines) == 5
    for i, line in enumerate(lines, start=1):
        d = json.loads(line)
        assert tuple(d) == JSONL_FIELDS and d["n"] == i
        assert d["step_abs"] >= 0 and d["residual"] >= 0
    buf = io.StringIO()
    write_trace_jsonl(tr, buf)
    assert buf.getvalue() == text
    assert len(read_trace_jsonl(text.splitlines() + ['{"summary": {}}', ""])) == 5


def test_outcome_json():
    out, _ = solve_newton(TargetEquation(get_problem("ex1"), 7.0), 0.0)
    d = out.as_json_dict()
    assert d["status"] == "Converged" and d["I"] == 7 and d["E"] == 14
    json.dumps(d)
    assert Status("NonFinite") is Status.NON_FINITE and str(Status.DIVERGED) == "Diverged"


def test_root_oracles():
    w = ProblemDefinition("xex", lambda x: x * math.exp(x), lambda x: math.exp(x) * (1 + x))
    eq = TargetEquation(w, 5.0)
    assert bisect_root(eq, 0.0, 3.0) == pytest.approx(1.3267246652422002, abs=2e-16)
    assert reference_root(eq, 1.3267) == pytest.approx(1.3267246652422002, abs=2e-16)
    with pytest.raises(ValueError):
        bisect_root(eq, 2.0, 3.0)
