"""Sweep harness: solve ``f(x) = y`` over a grid of targets with both methods.

Result fields (status, root, I, E) are deterministic and may be computed in
worker processes; timings are always measured serially in the calling
process so that workers do not compete for the CPU while being timed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import IO, Iterable, List, Optional, Sequence, Tuple, Union

from .catalog import get_entry
from .core import GmgfConfig, Scheduled, parse_policy, solve_gmgf
from .newton import NewtonConfig, solve_newton
from .problem import TargetEquation
from .schedule import DEFAULT_SAMPLES, build_schedule

__all__ = [
    "CSV_HEADER",
    "HarnessIOError",
    "MethodResult",
    "SweepRow",
    "SweepSpec",
    "sweep_grid",
    "run_sweep",
    "time_solve",
    "export_csv",
    "export_json",
    "read_csv",
    "rows_to_csv",
    "rows_to_json",
    "policy_for",
]

CSV_HEADER = ("y,newton_status,newton_root,newton_I,newton_E,newton_t_us,newton_t_sd_us,"
              "gmgf_status,gmgf_root,gmgf_I,gmgf_E,gmgf_t_us,gmgf_t_sd_us")
WARMUP_RUNS = 3


class HarnessIOError(OSError):
    """Writing or reading an export failed."""


@dataclass
class MethodResult:
    status: str
    root: Optional[float]
    I: int
    E: int
    t_mean: Optional[float] = None  # seconds
    t_stddev: Optional[float] = None


@dataclass
class SweepRow:
    y: float
    newton: MethodResult
    gmgf: MethodResult


@dataclass
class SweepSpec:
    """One sweep.

    ``degree_policy`` is ``"direct"``, ``"scheduled"`` or ``"fixed:K"``; a
    schedule is built over the catalog entry's sample interval when needed.
    ``timing=False`` skips the timing repetitions (useful for sweeps with
    very many rows) and ``workers > 1`` computes result fields in that many
    processes.
    """

    problem_id: str
    y_min: float
    y_max: float
    dy: float
    x0: float
    repeats: int = 100
    gmgf_config: GmgfConfig = field(default_factory=GmgfConfig)
    newton_config: NewtonConfig = field(default_factory=NewtonConfig)
    degree_policy: str = "direct"
    timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if not self.dy > 0:
            raise ValueError("dy must be > 0")
        if self.y_min > self.y_max:
            raise ValueError("y_min must not exceed y_max")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        text = self.degree_policy.strip().lower()
        if text != "scheduled":
            parse_policy(text)

    @classmethod
    def from_catalog(cls, problem_id: str, **overrides) -> "SweepSpec":
        """Sweep with the catalog entry's default range and ``x0``."""
        p = get_entry(problem_id).problem
        y_min, y_max, dy = p.default_sweep
        kw = dict(problem_id=problem_id, y_min=y_min, y_max=y_max, dy=dy, x0=p.default_x0)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        """Build from a JSON-style mapping; missing range keys use catalog defaults."""
        d = dict(d)
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown sweep keys: {sorted(unknown)}")
        if "gmgf_config" in d and isinstance(d["gmgf_config"], dict):
            g = dict(d["gmgf_config"])
            if "degree_clamp" in g:
                g["degree_clamp"] = tuple(g["degree_clamp"])
            if "degree_policy" in g:
                raise ValueError("set degree_policy at the top level of the sweep config")
            d["gmgf_config"] = GmgfConfig(**g)
        if "newton_config" in d and isinstance(d["newton_config"], dict):
            d["newton_config"] = NewtonConfig(**d["newton_config"])
        return cls.from_catalog(d.pop("problem_id"), **d)

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        return cls.from_dict(json.loads(text))


def policy_for(problem_id: str, policy: str, n_samples: int = DEFAULT_SAMPLES,
               clamp: Tuple[int, int] = (-30, 30)):
    """Resolve a policy string, building the schedule for ``scheduled``."""
    if policy.strip().lower() == "scheduled":
        entry = get_entry(problem_id)
        lo, hi = entry.sample_interval
        return Scheduled(build_schedule(entry.problem, lo, hi, n_samples, clamp))
    return parse_policy(policy)


def sweep_grid(y_min: float, y_max: float, dy: float) -> List[float]:
    """``y_min + i * dy`` for ``i = 0 .. floor((y_max - y_min) / dy)``.

    A relative slack of ``1e-9`` keeps the end point when the quotient is
    an integer up to rounding.
    """
    n = int(math.floor((y_max - y_min) / dy + 1e-9)) + 1
    return [y_min + i * dy for i in range(n)]


def _result(outcome) -> MethodResult:
    return MethodResult(str(outcome.status), outcome.root, outcome.iterations, outcome.E)


def _solve_row(problem_id: str, y: float, x0: float, gcfg: GmgfConfig,
               ncfg: NewtonConfig) -> SweepRow:
    eq = TargetEquation(get_entry(problem_id).problem, y)
    return SweepRow(y, _result(solve_newton(eq, x0, ncfg, record=False)[0]),
                    _result(solve_gmgf(eq, x0, gcfg, record=False)[0]))


def _solve_chunk(args) -> List[SweepRow]:
    problem_id, ys, x0, gcfg, ncfg = args
    return [_solve_row(problem_id, y, x0, gcfg, ncfg) for y in ys]


def time_solve(eq: TargetEquation, x0: float, method: str,
               config: Union[GmgfConfig, NewtonConfig, None] = None,
               repeats: int = 100, warmup: int = WARMUP_RUNS) -> Tuple[float, float]:
    """Mean and sample standard deviation (seconds) of a full solve.

    ``warmup`` untimed runs precede ``repeats`` timed ones. The standard
    deviation of a single timed run is reported as 0.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if method == "gmgf":
        def run():
            solve_gmgf(eq, x0, config)
    elif method == "newton":
        def run():
            solve_newton(eq, x0, config)
    else:
        raise ValueError(f"unknown method {method!r}")
    for _ in range(warmup):
        run()
    samples = []
    clock = time.perf_counter_ns
    for _ in range(repeats):
        t0 = clock()
        run()
        samples.append((clock() - t0) * 1e-9)
    mean = statistics.fmean(samples)
    sd = statistics.stdev(samples) if repeats > 1 else 0.0
    return mean, sd


def run_sweep(spec: SweepSpec) -> List[SweepRow]:
    """One row per grid target, in ascending ``y``.

    Solver failures are recorded in the row's status; they never stop the
    sweep. Raises :class:`~gmgf.exceptions.UnknownProblem` for an unknown id.
    """
    entry = get_entry(spec.problem_id)
    gcfg = spec.gmgf_config
    if spec.degree_policy.strip().lower() != "direct":
        policy = policy_for(spec.problem_id, spec.degree_policy, clamp=gcfg.degree_clamp)
        gcfg = replace(gcfg, degree_policy=policy)
    ncfg = spec.newton_config
    ys = sweep_grid(spec.y_min, spec.y_max, spec.dy)

    if spec.workers > 1 and len(ys) > 1:
        n_chunks = spec.workers * 8
        size = max(1, math.ceil(len(ys) / n_chunks))
        chunks = [(spec.problem_id, ys[i:i + size], spec.x0, gcfg, ncfg)
                  for i in range(0, len(ys), size)]
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = [r for part in pool.map(_solve_chunk, chunks) for r in part]
    else:
        rows = _solve_chunk((spec.problem_id, ys, spec.x0, gcfg, ncfg))

    if spec.timing:
        for row in rows:
            eq = TargetEquation(entry.problem, row.y)
            row.newton.t_mean, row.newton.t_stddev = time_solve(eq, spec.x0, "newton", ncfg, spec.repeats)
            row.gmgf.t_mean, row.gmgf.t_stddev = time_solve(eq, spec.x0, "gmgf", gcfg, spec.repeats)
    return rows


# -- export -----------------------------------------------------------------

def _fmt_root(v: Optional[float]) -> str:
    return "" if v is None else format(v, ".17g")


def _fmt_us(v: Optional[float]) -> str:
    return "" if v is None else format(v * 1e6, ".6g")


def _method_cells(m: MethodResult) -> List[str]:
    return [m.status, _fmt_root(m.root), str(m.I), str(m.E), _fmt_us(m.t_mean), _fmt_us(m.t_stddev)]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in rows:
        w.writerow([repr(float(r.y))] + _method_cells(r.newton) + _method_cells(r.gmgf))
    return buf.getvalue()


def _row_dict(r: SweepRow) -> dict:
    return asdict(r)


def rows_to_json(rows: Sequence[SweepRow], **kwargs) -> str:
    return json.dumps([_row_dict(r) for r in rows], **kwargs)


def _write(text: str, path_or_fh: Union[str, IO[str]]) -> None:
    if hasattr(path_or_fh, "write"):
        path_or_fh.write(text)
        return
    try:
        with open(path_or_fh, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise HarnessIOError(f"cannot write {path_or_fh}: {exc}") from exc


def export_csv(rows: Sequence[SweepRow], path: Union[str, IO[str]]) -> None:
    """Write the CSV export; absent roots and timings are empty fields."""
    if not rows:
        raise ValueError("nothing to export")
    _write(rows_to_csv(rows), path)


def export_json(rows: Sequence[SweepRow], path: Union[str, IO[str]]) -> None:
    if not rows:
        raise ValueError("nothing to export")
    _write(rows_to_json(rows, indent=1) + "\n", path)


def _parse_opt(cell: str, scale: float = 1.0) -> Optional[float]:
    return None if cell == "" else float(cell) * scale


def _parse_method(cells: List[str]) -> MethodResult:
    status, root, I, E, t, sd = cells
    return MethodResult(status, _parse_opt(root), int(I), int(E), _parse_opt(t, 1e-6), _parse_opt(sd, 1e-6))


def read_csv(source: Union[str, IO[str], Iterable[str]]) -> List[SweepRow]:
    """Parse a CSV export back into rows (timings back in seconds)."""
    if isinstance(source, str):
        try:
            with open(source, newline="") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise HarnessIOError(f"cannot read {source}: {exc}") from exc
    else:
        lines = [line.rstrip("\n") for line in source]
    reader = csv.reader(lines)
    header = next(reader)
    if ",".join(header) != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    return [SweepRow(float(c[0]), _parse_method(c[1:7]), _parse_method(c[7:13])) for c in reader if c]
