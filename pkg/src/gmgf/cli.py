"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 solver failure (``solve`` and
``trace`` only), 3 I/O failure. Output is JSON unless ``--pretty`` is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

from .bench import HarnessIOError, SweepSpec, export_csv, export_json, policy_for, run_sweep
from .catalog import catalog, get_entry, problem_ids
from .core import GmgfConfig, solve_gmgf
from .diagnostics import coc_sequence, gain_sequence, reference_root, trace_to_jsonl
from .exceptions import SolverError, UnknownProblem
from .iteration import STOP_RULES
from .newton import NewtonConfig, solve_newton
from .problem import TargetEquation
from .schedule import DEFAULT_SAMPLES, build_schedule

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _count(minimum: int):
    def parse(text: str) -> int:
        v = int(text)
        if v < minimum:
            raise argparse.ArgumentTypeError(f"expected an integer >= {minimum}, got {text!r}")
        return v
    return parse


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, list):
        return [_json_safe(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    return v


def _emit(obj, out) -> None:
    out.write(json.dumps(_json_safe(obj)) + "\n")


# -- shared solve plumbing --------------------------------------------------

def _add_solve_flags(p: argparse.ArgumentParser, with_method: bool = True) -> None:
    p.add_argument("--problem", required=True, help="catalog id, see 'list'")
    p.add_argument("--y", type=float, required=True, help="target value f(x) = y")
    p.add_argument("--x0", type=float, help="initial value (default: catalog x0)")
    if with_method:
        p.add_argument("--method", choices=("newton", "gmgf"), default="gmgf")
    p.add_argument("--tol-x", type=_positive)
    p.add_argument("--tol-f", type=_positive)
    p.add_argument("--max-iter", type=_count(1))
    p.add_argument("--degree-policy", default="direct", help="direct | scheduled | fixed:K")
    p.add_argument("--stop-rule", choices=STOP_RULES, default="either")
    p.add_argument("--pretty", action="store_true")


def _configs(args):
    common = {k: v for k, v in (("tol_x", args.tol_x), ("tol_f", args.tol_f),
                                ("max_iter", args.max_iter)) if v is not None}
    common["stop_rule"] = args.stop_rule
    try:
        policy = policy_for(args.problem, args.degree_policy)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return GmgfConfig(degree_policy=policy, **common), NewtonConfig(**common)


def _setup(args):
    try:
        entry = get_entry(args.problem)
    except UnknownProblem:
        raise UsageError(f"unknown problem {args.problem!r}; choose from {', '.join(problem_ids())}")
    x0 = entry.problem.default_x0 if args.x0 is None else args.x0
    if not entry.problem.contains(x0):
        raise UsageError(f"x0={x0} is outside the domain of {args.problem}")
    return TargetEquation(entry.problem, args.y), x0


def _run(method, eq, x0, gcfg, ncfg, record=True):
    if method == "gmgf":
        return solve_gmgf(eq, x0, gcfg, record=record)
    return solve_newton(eq, x0, ncfg, record=record)


def _outcome_dict(args, method, x0, outcome) -> dict:
    d = {"problem": args.problem, "y": args.y, "x0": x0, "method": method}
    d.update(outcome.as_json_dict())
    return d


def _print_pretty(d: dict, out) -> None:
    width = max(len(k) for k in d)
    for k, v in d.items():
        out.write(f"{k:<{width}}  {v}\n")


# -- subcommands ------------------------------------------------------------

def cmd_list(args, out) -> int:
    items = []
    for e in catalog():
        p = e.problem
        items.append({"id": e.id, "label": e.label, "domain": list(p.domain),
                      "default_x0": p.default_x0, "default_sweep": list(p.default_sweep),
                      "sample_interval": list(e.sample_interval), "notes": e.notes})
    if args.pretty:
        for it in items:
            y0, y1, dy = it["default_sweep"]
            out.write(f"{it['id']:<14} x0={it['default_x0']:<5g} y in [{y0:g}, {y1:g}] step {dy:g}"
                      f"  {it['label']}\n")
    else:
        _emit(items, out)
    return EXIT_OK


def cmd_solve(args, out) -> int:
    eq, x0 = _setup(args)
    gcfg, ncfg = _configs(args)
    outcome, _ = _run(args.method, eq, x0, gcfg, ncfg, record=False)
    d = _outcome_dict(args, args.method, x0, outcome)
    if args.pretty:
        d.pop("evals")
        _print_pretty(d, out)
    else:
        _emit(d, out)
    return EXIT_OK if outcome.converged else EXIT_FAILURE


def cmd_trace(args, out) -> int:
    eq, x0 = _setup(args)
    gcfg, ncfg = _configs(args)
    outcome, trace = _run(args.method, eq, x0, gcfg, ncfg)
    summary = _outcome_dict(args, args.method, x0, outcome)
    if outcome.converged:
        zeta = reference_root(eq, outcome.root)
        summary.update(zeta=zeta, gain=gain_sequence(trace, zeta), coc=coc_sequence(trace, zeta))
    else:
        summary.update(zeta=None, gain=None, coc=None)
    if args.pretty:
        out.write(f"{'n':>4} {'x':>24} {'|step|':>10} {'|g|':>10} {'degree':>6}\n")
        for r in trace:
            out.write(f"{r.n:>4} {r.x:>24.17g} {r.step_abs:>10.2e} {r.residual:>10.2e} {r.degree:>6}\n")
        out.write(f"status {outcome.status}, I={outcome.iterations}, E={outcome.E}\n")
        if summary["coc"] is not None:
            out.write("coc " + " ".join(f"{c:.3f}" for c in summary["coc"]) + "\n")
    else:
        out.write(trace_to_jsonl(trace))
        _emit({"summary": summary}, out)
    return EXIT_OK if outcome.converged else EXIT_FAILURE


def cmd_compare(args, out) -> int:
    eq, x0 = _setup(args)
    gcfg, ncfg = _configs(args)
    result = {}
    for method in ("newton", "gmgf"):
        outcome, _ = _run(method, eq, x0, gcfg, ncfg, record=False)
        result[method] = _outcome_dict(args, method, x0, outcome)
    if args.pretty:
        keys = ("status", "root", "I", "E", "total_time_ns")
        out.write(f"{'':<14}{'newton':>24}{'gmgf':>24}\n")
        for k in keys:
            out.write(f"{k:<14}{str(result['newton'][k]):>24}{str(result['gmgf'][k]):>24}\n")
    else:
        _emit(result, out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    overrides = {}
    if args.config:
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except OSError as exc:
            raise HarnessIOError(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid config JSON: {exc}") from exc
    if args.problem is not None:
        overrides["problem_id"] = args.problem
    if "problem_id" not in overrides:
        raise UsageError("--problem (or problem_id in --config) is required")
    for key, val in (("y_min", args.ymin), ("y_max", args.ymax), ("dy", args.dy), ("x0", args.x0),
                     ("repeats", args.repeats), ("workers", args.workers)):
        if val is not None:
            overrides[key] = val
    if args.degree_policy is not None:
        overrides["degree_policy"] = args.degree_policy
    if args.no_timing:
        overrides["timing"] = False
    try:
        spec = SweepSpec.from_dict(overrides)
    except UnknownProblem:
        raise UsageError(f"unknown problem {overrides['problem_id']!r}")
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    rows = run_sweep(spec)
    export = export_csv if args.format == "csv" else export_json
    export(rows, args.out if args.out else out)
    return EXIT_OK


def cmd_schedule(args, out) -> int:
    try:
        entry = get_entry(args.problem)
    except UnknownProblem:
        raise UsageError(f"unknown problem {args.problem!r}")
    if not entry.problem.contains(args.xmin) or not entry.problem.contains(args.xmax):
        raise UsageError(f"[{args.xmin}, {args.xmax}] is not inside the domain {entry.problem.domain}")
    try:
        sched = build_schedule(entry.problem, args.xmin, args.xmax, args.samples)
    except (ValueError, SolverError) as exc:
        raise UsageError(str(exc)) from exc
    if args.pretty:
        edges = [-math.inf] + list(sched.breakpoints) + [math.inf]
        for lo, hi, m in zip(edges, edges[1:], sched.degrees):
            out.write(f"[{lo:>12.6g}, {hi:>12.6g})  {m:>4}\n")
    else:
        out.write(sched.to_json() + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmgf", description="gMGF and Newton root finding for f(x) = y.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("list", help="list catalog problems")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_list)

    for name, func, helptext in (("solve", cmd_solve, "solve one equation"),
                                 ("trace", cmd_trace, "per-iteration records as JSON lines")):
        p = sub.add_parser(name, help=helptext)
        _add_solve_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="solve with both methods")
    _add_solve_flags(p, with_method=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="sweep y over a grid with both methods")
    p.add_argument("--problem")
    p.add_argument("--config", help="JSON file with SweepSpec keys")
    p.add_argument("--ymin", type=float)
    p.add_argument("--ymax", type=float)
    p.add_argument("--dy", type=_positive)
    p.add_argument("--x0", type=float)
    p.add_argument("--repeats", type=_count(1))
    p.add_argument("--workers", type=_count(1))
    p.add_argument("--degree-policy")
    p.add_argument("--no-timing", action="store_true", help="skip the timing repetitions")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("schedule", help="precompute a degree schedule")
    p.add_argument("--problem", required=True)
    p.add_argument("--xmin", type=float, required=True)
    p.add_argument("--xmax", type=float, required=True)
    p.add_argument("--samples", type=_count(2), default=DEFAULT_SAMPLES)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_schedule)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"gmgf: error: {exc}\n")
        return EXIT_USAGE
    except HarnessIOError as exc:
        sys.stderr.write(f"gmgf: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        sys.stderr.write(f"gmgf: I/O error: {exc}\n")
        return EXIT_IO


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
