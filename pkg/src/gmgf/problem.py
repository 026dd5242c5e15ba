"""Scalar problem abstraction, the y-offset wrapper and evaluation counting."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable, Optional, Tuple

from .exceptions import DomainViolation, NonFinite

__all__ = [
    "ProblemDefinition",
    "TargetEquation",
    "EvalCounter",
    "eval_g",
    "eval_dg",
    "eval_d2g",
    "check_domain",
]

ScalarFn = Callable[[float], float]

_FD_REL = math.sqrt(math.sqrt(2.220446049250313e-16))  # eps ** (1/4)
_FD_ABS = 1e-6


@dataclass(frozen=True)
class ProblemDefinition:
    """A scalar function with analytic derivatives and sweep metadata.

    Parameters
    ----------
    name : str
        Stable identifier.
    f, df : callable
        The function and its analytic first derivative.
    d2f : callable, optional
        Analytic second derivative. When absent, a central finite
        difference of ``f`` is used wherever a second derivative is needed.
    domain : (float, float)
        Open interval ``(lo, hi)``; either end may be infinite.
    default_x0 : float
        Initial value used by the sweeps.
    default_sweep : (float, float, float)
        ``(y_min, y_max, dy)``.
    singular_points : tuple of float
        Points inside the domain where evaluation is refused.
    """

    name: str
    f: ScalarFn
    df: ScalarFn
    d2f: Optional[ScalarFn] = None
    domain: Tuple[float, float] = (-math.inf, math.inf)
    default_x0: float = 0.0
    default_sweep: Tuple[float, float, float] = (0.0, 1.0, 0.1)
    singular_points: Tuple[float, ...] = ()

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"{self.name}: empty domain {self.domain}")
        if not lo < self.default_x0 < hi:
            raise ValueError(f"{self.name}: default_x0={self.default_x0} outside domain")
        y_min, y_max, dy = self.default_sweep
        if not dy > 0 or y_min > y_max:
            raise ValueError(f"{self.name}: invalid sweep {self.default_sweep}")

    def contains(self, x: float) -> bool:
        lo, hi = self.domain
        return lo < x < hi and x not in self.singular_points


@dataclass(frozen=True)
class TargetEquation:
    """The root problem ``g(x) = base.f(x) - y = 0``."""

    base: ProblemDefinition
    y: float = 0.0


@dataclass
class EvalCounter:
    """Running tally of function evaluations during one solve.

    ``n_lookup`` counts degree determinations that do not call ``d2f``
    (schedule lookups and fixed degrees), so that every gMGF iteration
    contributes exactly one degree determination to the total.
    """

    n_f: int = 0
    n_df: int = 0
    n_d2f: int = 0
    n_explog: int = 0
    n_lookup: int = 0

    @property
    def total(self) -> int:
        return self.n_f + self.n_df + self.n_d2f + self.n_explog + self.n_lookup

    def copy(self) -> "EvalCounter":
        return EvalCounter(self.n_f, self.n_df, self.n_d2f, self.n_explog, self.n_lookup)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __add__(self, other: "EvalCounter") -> "EvalCounter":
        return EvalCounter(self.n_f + other.n_f, self.n_df + other.n_df, self.n_d2f + other.n_d2f,
                           self.n_explog + other.n_explog, self.n_lookup + other.n_lookup)

    def __sub__(self, other: "EvalCounter") -> "EvalCounter":
        return EvalCounter(self.n_f - other.n_f, self.n_df - other.n_df, self.n_d2f - other.n_d2f,
                           self.n_explog - other.n_explog, self.n_lookup - other.n_lookup)


def check_domain(problem: ProblemDefinition, x: float) -> None:
    if not math.isfinite(x):
        raise NonFinite(f"{problem.name}: non-finite argument x={x!r}")
    if not problem.contains(x):
        raise DomainViolation(f"{problem.name}: x={x!r} outside domain {problem.domain}")


def _finite(value: float, what: str, x: float) -> float:
    if not math.isfinite(value):
        raise NonFinite(f"{what}({x!r}) = {value!r}")
    return value


def _call(fn: ScalarFn, x: float, what: str) -> float:
    try:
        value = fn(x)
    except OverflowError as exc:
        raise NonFinite(f"{what}({x!r}) overflowed") from exc
    except ZeroDivisionError as exc:
        raise NonFinite(f"{what}({x!r}) divided by zero") from exc
    return _finite(float(value), what, x)


def eval_g(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None) -> float:
    """Return ``f(x) - y``, counting one function evaluation."""
    check_domain(eq.base, x)
    value = _call(eq.base.f, x, f"{eq.base.name}.f")
    if counter is not None:
        counter.n_f += 1
    return value - eq.y


def eval_dg(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None) -> float:
    check_domain(eq.base, x)
    value = _call(eq.base.df, x, f"{eq.base.name}.df")
    if counter is not None:
        counter.n_df += 1
    return value


def fd_second_derivative(problem: ProblemDefinition, x: float) -> Tuple[float, int]:
    """Central second difference of ``problem.f`` at ``x``.

    Returns the estimate and the number of ``f`` evaluations used. The step
    is shrunk tenfold once if the stencil leaves the domain.
    """
    check_domain(problem, x)
    h = max(_FD_ABS, _FD_REL * abs(x))
    for attempt in range(2):
        if problem.contains(x - h) and problem.contains(x + h):
            break
        if attempt == 0:
            h /= 10.0
    else:
        raise DomainViolation(f"{problem.name}: FD stencil around x={x!r} leaves the domain")
    fp = _call(problem.f, x + h, f"{problem.name}.f")
    f0 = _call(problem.f, x, f"{problem.name}.f")
    fm = _call(problem.f, x - h, f"{problem.name}.f")
    return _finite((fp - 2.0 * f0 + fm) / (h * h), "fd2", x), 3


def eval_d2g(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None) -> float:
    """Second derivative of ``g``; analytic when available, else FD on ``f``."""
    base = eq.base
    if base.d2f is not None:
        check_domain(base, x)
        value = _call(base.d2f, x, f"{base.name}.d2f")
        if counter is not None:
            counter.n_d2f += 1
        return value
    value, n = fd_second_derivative(base, x)
    if counter is not None:
        counter.n_f += n
    return value
