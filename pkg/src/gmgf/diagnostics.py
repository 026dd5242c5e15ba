"""Per-iteration records, solve outcomes and convergence metrics.

The metrics follow the usual conventions for comparing iterative root
finders: the gain is the per-step reduction of the distance to the root,
the computational order of convergence (COC) estimates the local order from
three consecutive errors, and the evaluation count of the gMGF iteration
charges ``3 + |degree|`` evaluations to every step.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, List, Optional, Sequence, Tuple

from .problem import EvalCounter, TargetEquation, eval_g
from .exceptions import SolverError

__all__ = [
    "Status",
    "IterationRecord",
    "SolveTrace",
    "SolveOutcome",
    "gain_sequence",
    "coc_sequence",
    "eval_count_gmgf",
    "eval_count_newton",
    "errors",
    "reference_root",
    "bisect_root",
    "trace_to_jsonl",
    "write_trace_jsonl",
    "read_trace_jsonl",
    "JSONL_FIELDS",
]


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterationsExceeded"
    DIVERGED = "Diverged"
    DERIVATIVE_VANISHED = "DerivativeVanished"
    NON_FINITE = "NonFinite"
    DOMAIN_VIOLATION = "DomainViolation"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_error(cls, exc: SolverError) -> "Status":
        return cls(exc.status)


@dataclass(frozen=True)
class IterationRecord:
    """One executed iteration: the update from ``x_{n-1}`` to ``x_n``."""

    n: int
    x: float
    step_abs: float
    residual: float
    degree: int
    evals: EvalCounter
    elapsed_ns: int

    def as_json_dict(self) -> dict:
        return {
            "n": self.n,
            "x": self.x,
            "step_abs": self.step_abs,
            "residual": self.residual,
            "degree": self.degree,
            "n_f": self.evals.n_f,
            "n_df": self.evals.n_df,
            "n_d2f": self.evals.n_d2f,
            "n_explog": self.evals.n_explog,
            "elapsed_ns": self.elapsed_ns,
        }


JSONL_FIELDS = ("n", "x", "step_abs", "residual", "degree",
                "n_f", "n_df", "n_d2f", "n_explog", "elapsed_ns")


@dataclass
class SolveTrace:
    """Ordered iteration records of one solve.

    ``x0`` is iteration 0; ``setup`` holds the evaluations made before the
    first iteration (the initial residual), which are not charged to any
    iteration.
    """

    method: str
    x0: float
    residual0: float = math.nan
    setup: EvalCounter = field(default_factory=EvalCounter)
    records: List[IterationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def iterates(self) -> List[float]:
        """``[x_0, x_1, ..., x_I]``."""
        return [self.x0] + [r.x for r in self.records]

    @property
    def degrees(self) -> List[int]:
        return [r.degree for r in self.records]

    @property
    def charged_evals(self) -> EvalCounter:
        total = EvalCounter()
        for r in self.records:
            total = total + r.evals
        return total

    @property
    def total_evals(self) -> EvalCounter:
        return self.setup + self.charged_evals


@dataclass
class SolveOutcome:
    status: Status
    root: Optional[float]
    iterations: int
    evals: EvalCounter
    total_time_ns: int = 0
    message: str = ""
    raw_evals: Optional[EvalCounter] = None

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def E(self) -> int:
        """Evaluation count charged to the executed iterations.

        ``raw_evals`` additionally contains the initial residual evaluation.
        """
        return self.evals.total

    def as_json_dict(self) -> dict:
        return {
            "status": str(self.status),
            "root": self.root,
            "I": self.iterations,
            "E": self.E,
            "evals": self.evals.as_dict(),
            "total_time_ns": self.total_time_ns,
            "message": self.message,
        }


def errors(trace: SolveTrace, zeta: float) -> List[float]:
    return [x - zeta for x in trace.iterates]


def gain_sequence(trace: SolveTrace, zeta: float) -> List[float]:
    """Gains ``|x_{n-1} - zeta| - |x_n - zeta|`` for ``n = 1..I``.

    A negative entry is a loss: the iterate moved away from the root.
    """
    e = [abs(v) for v in errors(trace, zeta)]
    return [e[n - 1] - e[n] for n in range(1, len(e))]


def coc_sequence(trace: SolveTrace, zeta: float) -> List[float]:
    """Computational order of convergence for ``n = 2..I``.

    Entry ``i`` belongs to iteration ``n = i + 2``. Entries where an error
    vanishes or a logarithm argument equals one are ``nan``.
    """
    return coc_from_errors(errors(trace, zeta))


def coc_from_errors(e: Sequence[float]) -> List[float]:
    out = []
    for n in range(2, len(e)):
        a, b, c = e[n], e[n - 1], e[n - 2]
        if a == 0 or b == 0 or c == 0:
            out.append(math.nan)
            continue
        num = abs(a / b)
        den = abs(b / c)
        if num == 1.0 or den == 1.0 or not (math.isfinite(num) and math.isfinite(den)):
            out.append(math.nan)
            continue
        out.append(math.log(num) / math.log(den))
    return out


def eval_count_gmgf(trace: SolveTrace) -> int:
    return sum(3 + abs(d) for d in trace.degrees)


def eval_count_newton(trace: SolveTrace) -> int:
    return 2 * len(trace.records)


def bisect_root(eq: TargetEquation, lo: float, hi: float, max_iter: int = 256) -> float:
    """Bisection on a sign-changing bracket, down to adjacent floats."""
    glo = eval_g(eq, lo)
    ghi = eval_g(eq, hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = eval_g(eq, mid)
        if gm == 0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    return lo if abs(glo) <= abs(ghi) else hi


def reference_root(eq: TargetEquation, near: float, width: Optional[float] = None) -> float:
    """Tightest available root estimate close to ``near``.

    Looks for a sign change in a small bracket around ``near`` and bisects
    it; if none is found (the estimate already sits on the rounding floor of
    ``g``) ``near`` itself is returned.
    """
    if width is None:
        width = 1e-6 * max(1.0, abs(near))
    for w in (width, 10 * width, 100 * width):
        lo, hi = near - w, near + w
        if not (eq.base.contains(lo) and eq.base.contains(hi)):
            continue
        try:
            glo, ghi = eval_g(eq, lo), eval_g(eq, hi)
        except SolverError:
            continue
        if glo == 0 or ghi == 0 or (glo > 0) != (ghi > 0):
            return bisect_root(eq, lo, hi)
    return near


def _json_float(v: float):
    return v if math.isfinite(v) else None


def trace_to_jsonl(trace: SolveTrace) -> str:
    """One JSON object per iteration record, newline terminated."""
    lines = []
    for r in trace.records:
        d = r.as_json_dict()
        for key in ("x", "step_abs", "residual"):
            d[key] = _json_float(d[key])
        lines.append(json.dumps(d))
    return "".join(line + "\n" for line in lines)


def write_trace_jsonl(trace: SolveTrace, fh: IO[str]) -> None:
    fh.write(trace_to_jsonl(trace))


def read_trace_jsonl(lines: Iterable[str]) -> List[dict]:
    out = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        d = json.loads(line)
        if set(JSONL_FIELDS) <= set(d):
            out.append(d)
    return out
