"""Newton's method with the same loop, tracing and failure semantics as gMGF."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .diagnostics import SolveOutcome, SolveTrace
from .exceptions import DerivativeVanished, NonFinite
from .iteration import StopRule, default_tolerance, iterate
from .problem import EvalCounter, TargetEquation, eval_dg, eval_g

__all__ = ["NewtonConfig", "newton_step", "solve_newton"]


@dataclass(frozen=True)
class NewtonConfig:
    tol_x: float = field(default_factory=default_tolerance)
    tol_f: float = field(default_factory=default_tolerance)
    max_iter: int = 1000
    stop_rule: str = "either"
    fp_floor: bool = True

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        object.__setattr__(self, "_stop", StopRule(self.tol_x, self.tol_f, self.stop_rule, self.fp_floor))

    def stop(self) -> StopRule:
        return self._stop


def _newton_update(eq: TargetEquation, x: float, gx: float,
                   counter: Optional[EvalCounter]) -> Tuple[float, float]:
    dg = eval_dg(eq, x, counter)
    if dg == 0.0:
        raise DerivativeVanished(f"g'({x!r}) = 0")
    x_next = x - gx / dg
    if not math.isfinite(x_next):
        raise NonFinite(f"Newton step from {x!r} produced {x_next!r}")
    return x_next, dg


def newton_step(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None) -> float:
    """``x - g(x) / g'(x)``, counting one ``f`` and one ``df`` evaluation."""
    return _newton_update(eq, x, eval_g(eq, x, counter), counter)[0]


def solve_newton(eq: TargetEquation, x0: float,
                 config: Optional[NewtonConfig] = None,
                 record: bool = True) -> Tuple[SolveOutcome, SolveTrace]:
    """Newton iteration from ``x0``.

    Each iteration reuses the residual at the current point (computed at
    the end of the previous iteration), so it is charged one ``df`` and one
    ``f`` evaluation and ``E = 2 I``.
    """
    config = config or NewtonConfig()

    def step(eq, x, gx, counter):
        x_next, dg = _newton_update(eq, x, gx, counter)
        return x_next, 0, dg

    return iterate(eq, x0, step, config.stop(), config.max_iter, "newton", record)
