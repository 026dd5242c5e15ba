"""Loop driver shared by the Newton and gMGF solvers.

Both solvers run through :func:`iterate` so that termination, tracing and
failure classification are identical; only the update rule differs.
"""

from __future__ import annotations

import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

from .diagnostics import IterationRecord, SolveOutcome, SolveTrace, Status
from .exceptions import NonFinite, SolverError
from .problem import EvalCounter, TargetEquation, eval_g

__all__ = ["StopRule", "default_tolerance", "iterate", "STOP_RULES"]

EPS = sys.float_info.epsilon

#: ``"either"`` stops once the step or the residual meets its tolerance,
#: ``"both"`` requires the step and the residual together.
STOP_RULES = ("either", "both")

DIVERGENCE_WINDOW = 10

# (x_n, g(x_n), degree used, g'(x_{n-1}))
StepFn = Callable[[TargetEquation, float, float, EvalCounter], Tuple[float, int, float]]


def default_tolerance() -> float:
    """``1e-15``, or the positive value of ``GMGF_DEFAULT_TOL`` when set."""
    raw = os.environ.get("GMGF_DEFAULT_TOL")
    if raw:
        try:
            value = float(raw)
        except ValueError:
            value = math.nan
        if value > 0 and math.isfinite(value):
            return value
    return 1e-15


@dataclass(frozen=True)
class StopRule:
    tol_x: float
    tol_f: float
    rule: str = "either"
    fp_floor: bool = True

    def __post_init__(self):
        if not (self.tol_x > 0 and self.tol_f > 0):
            raise ValueError("tolerances must be positive")
        if self.rule not in STOP_RULES:
            raise ValueError(f"unknown stop rule {self.rule!r}; expected one of {STOP_RULES}")

    def thresholds(self, x: float, g: float, y: float, dg: float,
                   x_prev: Optional[float] = None) -> Tuple[float, float]:
        """Effective step and residual thresholds at the new iterate.

        With ``fp_floor`` the thresholds never drop below what double
        precision can resolve at ``x``: two ulps of ``x`` for the step, and
        the change of ``g`` across one ulp plus two ulps of ``f`` for the
        residual. ``dg`` was measured at ``x_prev``, so the residual floor
        uses the finer ulp of the two points; after a wild step the slope
        says nothing about the new iterate.
        """
        if not self.fp_floor:
            return self.tol_x, self.tol_f
        ulp = math.ulp(x)
        floor_x = 2.0 * ulp
        ulp_f = ulp if x_prev is None else min(ulp, math.ulp(x_prev))
        floor_f = abs(dg) * ulp_f + 2.0 * EPS * max(abs(y), abs(g + y))
        return max(self.tol_x, floor_x), max(self.tol_f, floor_f)

    def satisfied(self, step: float, x: float, g: float, y: float, dg: float,
                  x_prev: Optional[float] = None) -> bool:
        tx, tf = self.thresholds(x, g, y, dg, x_prev)
        step_ok = step <= tx
        res_ok = abs(g) <= tf
        if self.rule == "both":
            return step_ok and res_ok
        return step_ok or res_ok


def _grew(history, window: int = DIVERGENCE_WINDOW) -> bool:
    if len(history) <= window:
        return False
    (x_old, g_old), (x_new, g_new) = history[-window - 1], history[-1]
    return x_new > x_old or g_new > g_old


def iterate(eq: TargetEquation, x0: float, step: StepFn, stop: StopRule,
            max_iter: int, method: str, record: bool = True) -> Tuple[SolveOutcome, SolveTrace]:
    """Run ``step`` from ``x0`` until ``stop`` is met or a failure occurs.

    Failures never propagate: they become the terminal status of the
    returned outcome. ``x_0`` is iteration 0, and a start with
    ``g(x_0) == 0`` converges without iterating. With ``record=False`` the
    trace stays empty, which makes large sweeps cheaper.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    counter = EvalCounter()
    trace = SolveTrace(method=method, x0=x0)
    t_start = time.perf_counter_ns()

    # evaluations of completed iterations; an aborted iteration is not charged
    charged = EvalCounter()

    def finish(status: Status, root, n: int, message: str = "") -> Tuple[SolveOutcome, SolveTrace]:
        out = SolveOutcome(
            status=status,
            root=root if status is Status.CONVERGED else None,
            iterations=n,
            evals=charged,
            total_time_ns=time.perf_counter_ns() - t_start,
            message=message,
            raw_evals=counter.copy(),
        )
        return out, trace

    try:
        gx = eval_g(eq, x0, counter)
    except SolverError as exc:
        return finish(Status.from_error(exc), None, 0, str(exc))
    trace.residual0 = abs(gx)
    trace.setup = counter.copy()
    if gx == 0.0:
        return finish(Status.CONVERGED, x0, 0)

    x = x0
    history = [(abs(x0), abs(gx))]
    clock = time.perf_counter_ns
    for n in range(1, max_iter + 1):
        if record:
            before = counter.copy()
            t0 = clock()
        try:
            x_new, degree, dgx = step(eq, x, gx, counter)
            if not math.isfinite(x_new):
                raise NonFinite(f"iterate x_{n} = {x_new!r}")
            g_new = eval_g(eq, x_new, counter)
        except SolverError as exc:
            return finish(Status.from_error(exc), None, n - 1, str(exc))
        step_abs = abs(x_new - x)
        if record:
            trace.records.append(IterationRecord(
                n=n, x=x_new, step_abs=step_abs, residual=abs(g_new), degree=degree,
                evals=counter - before, elapsed_ns=clock() - t0,
            ))
        charged = counter - trace.setup
        x_prev, x, gx = x, x_new, g_new
        history.append((abs(x), abs(gx)))
        if gx == 0.0 or stop.satisfied(step_abs, x, gx, eq.y, dgx, x_prev):
            return finish(Status.CONVERGED, x, n)

    if _grew(history):
        return finish(Status.DIVERGED, None, max_iter, "iterates grew over the last steps")
    return finish(Status.MAX_ITERATIONS, None, max_iter)
