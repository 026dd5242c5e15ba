"""Precomputed piecewise-constant degree tables.

A :class:`DegreeSchedule` stores ``m(x) = round(f''(x) / f'(x)**2)`` of the
base problem on a set of cells. Because the target offset ``y`` only enters
the optimal degree through the sign of the residual, one schedule serves
every ``y``: at run time the degree is ``sign(g(x)) * m(x)``.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .exceptions import DerivativeVanished, SolverError
from .problem import ProblemDefinition, TargetEquation, check_domain, eval_d2g, eval_dg

__all__ = [
    "DEFAULT_CLAMP",
    "DEFAULT_SAMPLES",
    "DegreeSchedule",
    "build_schedule",
    "lookup_degree",
    "round_half_away",
    "clamp_degree",
    "validate_clamp",
]

DEFAULT_CLAMP: Tuple[int, int] = (-30, 30)
DEFAULT_SAMPLES = 2048


def validate_clamp(clamp: Tuple[int, int]) -> Tuple[int, int]:
    lo, hi = int(clamp[0]), int(clamp[1])
    if not lo <= 0 <= hi:
        raise ValueError(f"degree clamp {clamp} must satisfy lo <= 0 <= hi")
    return lo, hi


def round_half_away(r: float) -> int:
    """Round to the nearest integer, ties away from zero (sign symmetric)."""
    if not math.isfinite(r):
        raise ValueError(f"cannot round {r!r}")
    return int(math.copysign(math.floor(abs(r) + 0.5), r))


def clamp_degree(r: float, clamp: Tuple[int, int] = DEFAULT_CLAMP) -> int:
    """``round_half_away(r)`` limited to ``[clamp[0], clamp[1]]``.

    Infinite ``r`` maps to the respective bound.
    """
    lo, hi = clamp
    if math.isnan(r):
        raise ValueError("degree ratio is nan")
    if r >= hi:
        return hi
    if r <= lo:
        return lo
    return min(hi, max(lo, round_half_away(r)))


@dataclass(frozen=True)
class DegreeSchedule:
    """Cells separated by ascending ``breakpoints`` with one degree each.

    Cell ``i`` covers ``[breakpoints[i-1], breakpoints[i])``; the first and
    last cells extend to minus and plus infinity.
    """

    breakpoints: Tuple[float, ...]
    degrees: Tuple[int, ...]
    stationary: Tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(self.degrees) != len(self.breakpoints) + 1:
            raise ValueError("degrees must have exactly one more entry than breakpoints")
        if any(b >= a for a, b in zip(self.breakpoints[1:], self.breakpoints)):
            raise ValueError("breakpoints must be strictly ascending")

    def cell(self, x: float) -> int:
        return bisect.bisect_right(self.breakpoints, x)

    def magnitude(self, x: float) -> int:
        return self.degrees[self.cell(x)]

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "degrees": list(self.degrees)}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "DegreeSchedule":
        return cls(tuple(d["breakpoints"]), tuple(d["degrees"]))

    @classmethod
    def from_json(cls, text: str) -> "DegreeSchedule":
        return cls.from_dict(json.loads(text))


def lookup_degree(schedule: DegreeSchedule, x: float, sign_g: int) -> int:
    """Signed degree ``sign_g * m_i`` of the cell containing ``x``."""
    return (1 if sign_g >= 0 else -1) * schedule.magnitude(x)


def _sample_degree(eq: TargetEquation, x: float, clamp) -> int:
    dg = eval_dg(eq, x)
    if dg == 0.0:
        raise DerivativeVanished(f"f'({x!r}) = 0")
    d2g = eval_d2g(eq, x)
    with np.errstate(over="ignore"):
        ratio = float(np.float64(d2g) / (np.float64(dg) * np.float64(dg)))
    return clamp_degree(ratio, clamp)


def build_schedule(base: ProblemDefinition, x_lo: float, x_hi: float,
                   n_samples: int = DEFAULT_SAMPLES,
                   clamp: Tuple[int, int] = DEFAULT_CLAMP) -> DegreeSchedule:
    """Sample ``m(x)`` on a uniform grid over ``[x_lo, x_hi]`` and merge runs.

    Breakpoints sit halfway between neighbouring samples whose degrees
    differ. Samples where ``f'`` vanishes, or where the derivative
    evaluation refuses the point (a declared singular point on the grid),
    get degree 0 and are listed in ``schedule.stationary``.

    Raises
    ------
    ValueError
        For ``n_samples < 2`` or an empty interval.
    DomainViolation
        If the closed interval is not inside the problem's domain.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    if not x_lo < x_hi:
        raise ValueError(f"empty interval [{x_lo}, {x_hi}]")
    clamp = validate_clamp(clamp)
    check_domain(base, x_lo)
    check_domain(base, x_hi)
    eq = TargetEquation(base, 0.0)
    grid = x_lo + (x_hi - x_lo) * np.arange(n_samples) / (n_samples - 1)
    grid[-1] = x_hi

    values: List[int] = []
    stationary: List[float] = []
    for x in grid:
        x = float(x)
        try:
            values.append(_sample_degree(eq, x, clamp))
        except SolverError:
            values.append(0)
            stationary.append(x)

    breakpoints: List[float] = []
    degrees: List[int] = [values[0]]
    for i in range(1, n_samples):
        if values[i] != degrees[-1]:
            breakpoints.append(0.5 * (float(grid[i - 1]) + float(grid[i])))
            degrees.append(values[i])
    return DegreeSchedule(tuple(breakpoints), tuple(degrees), tuple(stationary))

