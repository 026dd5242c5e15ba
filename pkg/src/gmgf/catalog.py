"""Benchmark problems with analytic derivatives and default sweep settings.

Problems are addressed by stable ids: ``ex1`` .. ``ex7``, ``lambertw``,
``bioreactor`` and ``heatexchanger``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

from .exceptions import DomainViolation, UnknownProblem
from .problem import ProblemDefinition

__all__ = [
    "CatalogEntry",
    "HeatExchangerParams",
    "BioreactorParams",
    "catalog",
    "get_problem",
    "get_entry",
    "problem_ids",
    "heat_exchanger_P",
    "heat_exchanger_derivatives",
    "phi_derivatives",
]


@dataclass(frozen=True)
class CatalogEntry:
    """A catalog problem plus descriptive metadata.

    ``sample_interval`` is a closed sub-interval of the domain on which the
    functions are well scaled; it is used for degree schedules and for
    derivative consistency checks.
    """

    problem: ProblemDefinition
    label: str
    notes: str
    sample_interval: Tuple[float, float]

    @property
    def id(self) -> str:
        return self.problem.name


# -- shared helpers ---------------------------------------------------------

def _cbrt(x: float) -> float:
    """Real cube root, odd in ``x``."""
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


_PHI_SERIES_TERMS = 22
_PHI_SERIES_RADIUS = 0.1


def phi_derivatives(z: float) -> Tuple[float, float, float]:
    """``phi(z) = (exp(z) - 1) / z`` with ``phi(0) = 1`` and two derivatives.

    Near zero the Taylor series ``sum z**k / (k+1)!`` is used, which avoids
    the cancellation of the closed forms.
    """
    if abs(z) < _PHI_SERIES_RADIUS:
        p = p1 = p2 = 0.0
        fact = 1.0  # (k+1)!
        for k in range(_PHI_SERIES_TERMS):
            fact *= k + 1
            p += z ** k / fact
            if k >= 1:
                p1 += k * z ** (k - 1) / fact
            if k >= 2:
                p2 += k * (k - 1) * z ** (k - 2) / fact
        return p, p1, p2
    e = math.exp(z)
    p = math.expm1(z) / z
    p1 = (e - p) / z
    p2 = (e - 2.0 * p1) / z
    return p, p1, p2


# -- Examples 1-7 -----------------------------------------------------------

def _ex12_f(x):
    return x * math.exp(x * x) - math.sin(x) ** 2 + 3.0 * math.cos(x) + 5.0


def _ex12_df(x):
    return math.exp(x * x) * (1.0 + 2.0 * x * x) - 2.0 * math.sin(x) * math.cos(x) - 3.0 * math.sin(x)


def _ex12_d2f(x):
    return math.exp(x * x) * (6.0 * x + 4.0 * x ** 3) - 2.0 * math.cos(2.0 * x) - 3.0 * math.cos(x)


def _ex3_f(x):
    return _cbrt(x) * (x - math.exp(x))


def _ex3_df(x):
    c = _cbrt(x)
    return (x - math.exp(x)) / (3.0 * c * c) + c * (1.0 - math.exp(x))


def _ex3_d2f(x):
    c = _cbrt(x)
    e = math.exp(x)
    return -2.0 * (x - e) / (9.0 * c ** 5) + 2.0 * (1.0 - e) / (3.0 * c * c) - c * e


def _ex4_f(x):
    return x ** -2 + 10.0 * x ** -4 + 100.0 * x ** -10


def _ex4_df(x):
    return -2.0 * x ** -3 - 40.0 * x ** -5 - 1000.0 * x ** -11


def _ex4_d2f(x):
    return 6.0 * x ** -4 + 200.0 * x ** -6 + 11000.0 * x ** -12


def _ex5_f(x):
    return -1.0 / x + x ** -0.5 + 0.15 * x ** 10


def _ex5_df(x):
    return x ** -2 - 0.5 * x ** -1.5 + 1.5 * x ** 9


def _ex5_d2f(x):
    return -2.0 * x ** -3 + 0.75 * x ** -2.5 + 13.5 * x ** 8


def _ex6_f(x):
    return x ** 9 + x ** 7 + x ** 2


def _ex6_df(x):
    return 9.0 * x ** 8 + 7.0 * x ** 6 + 2.0 * x


def _ex6_d2f(x):
    return 72.0 * x ** 7 + 42.0 * x ** 5 + 2.0


def _ex7_f(x):
    return math.exp(-x) + x / 5.0


def _ex7_df(x):
    return -math.exp(-x) + 0.2


def _ex7_d2f(x):
    return math.exp(-x)


def _lw_f(x):
    return x * math.exp(x)


def _lw_df(x):
    return math.exp(x) * (1.0 + x)


def _lw_d2f(x):
    return math.exp(x) * (2.0 + x)


# -- chemostat --------------------------------------------------------------

@dataclass(frozen=True)
class BioreactorParams:
    """Growth rate ``lam``, yield exponent ``nu`` and time horizon ``t``."""

    lam: float = 0.8
    nu: float = 0.0
    t: float = 10.0

    @property
    def pole(self) -> float:
        return self.lam / (1.0 - self.nu)


def bioreactor_derivatives(x: float, p: BioreactorParams = BioreactorParams()) -> Tuple[float, float, float]:
    """Cell growth ``exp(a t) + x (exp(a t) - 1) / a`` with ``a = lam + (nu - 1) x``.

    The quotient is written as ``t * phi(a t)`` so that values and
    derivatives stay accurate as ``a`` approaches zero.
    """
    c = p.nu - 1.0
    a = p.lam + c * x
    t = p.t
    E = math.exp(a * t)
    ph, ph1, ph2 = phi_derivatives(a * t)
    q = t * ph
    q1 = c * t * t * ph1
    q2 = c * c * t ** 3 * ph2
    E1 = c * t * E
    E2 = c * c * t * t * E
    return E + x * q, E1 + q + x * q1, E2 + 2.0 * q1 + x * q2


_BIO = BioreactorParams()


# -- heat exchanger ---------------------------------------------------------

@dataclass(frozen=True)
class HeatExchangerParams:
    """Counter-current heat exchanger with ``gamma = a_p r**mu / (b_p x**mu + 1)``.

    ``r = gamma1 / gamma10`` is the ratio of the heat capacity flow rates
    and ``x`` the capacity ratio being solved for.
    """

    a_p: float = 10.0
    b_p: float = 12.0
    mu: float = 0.8
    gamma1: float = 250.0
    gamma10: float = 1.0

    @property
    def ratio(self) -> float:
        return self.gamma1 / self.gamma10

    def u(self, x: float) -> float:
        """Transfer units ``gamma / r`` at capacity ratio ``x``."""
        r = self.ratio
        return self.a_p * r ** self.mu / (self.b_p * x ** self.mu + 1.0) / r


def heat_exchanger_derivatives(x: float, p: HeatExchangerParams = HeatExchangerParams()
                               ) -> Tuple[float, float, float]:
    """``P`` and its first two derivatives in ``x``.

    With ``A = u (x - 1)`` the defining quotient simplifies to
    ``P = u phi(A) / (1 + x u phi(A))``, which has no singularity at
    ``x = 1`` (there ``P = u / (1 + u)``).
    """
    if not x > 0:
        raise DomainViolation(f"heat exchanger needs x > 0, got {x!r}")
    b, mu = p.b_p, p.mu
    k = p.a_p * p.ratio ** mu / p.ratio
    w = b * x ** mu + 1.0
    w1 = b * mu * x ** (mu - 1.0)
    w2 = b * mu * (mu - 1.0) * x ** (mu - 2.0)
    u = k / w
    u1 = -k * w1 / w ** 2
    u2 = -k * (w2 * w - 2.0 * w1 * w1) / w ** 3
    A = u * (x - 1.0)
    A1 = u1 * (x - 1.0) + u
    A2 = u2 * (x - 1.0) + 2.0 * u1
    ph, ph1, ph2 = phi_derivatives(A)
    s = u * ph
    s1 = u1 * ph + u * ph1 * A1
    s2 = u2 * ph + 2.0 * u1 * ph1 * A1 + u * ph2 * A1 * A1 + u * ph1 * A2
    q = 1.0 + x * s
    P = s / q
    P1 = (s1 - s * s) / q ** 2
    P2 = (s2 - 2.0 * s * s1) / q ** 2 - 2.0 * (s1 - s * s) * (s + x * s1) / q ** 3
    return P, P1, P2


def heat_exchanger_P(x: float, params: HeatExchangerParams = HeatExchangerParams()) -> float:
    """Dimensionless temperature change of the counter-current exchanger.

    ``(1 - exp(a)) / (1 - x exp(a))`` with ``a = -u (1 - x)``. The point
    ``x = 1`` is a removable singularity of that quotient; the evaluation
    used here is exact there and returns ``u / (1 + u)``.

    Examples
    --------
    >>> round(heat_exchanger_P(1.0, HeatExchangerParams(a_p=2.0, b_p=0.0, gamma1=1.0)), 12)
    0.666666666667
    """
    return heat_exchanger_derivatives(x, params)[0]


_HX = HeatExchangerParams()


def _component(fn: Callable, i: int, *args) -> Callable[[float], float]:
    def f(x):
        return fn(x, *args)[i]
    return f


# -- registry ---------------------------------------------------------------

def _build() -> Dict[str, CatalogEntry]:
    inf = math.inf
    entries = [
        CatalogEntry(
            ProblemDefinition("ex1", _ex12_f, _ex12_df, _ex12_d2f, (-inf, inf), 0.0, (-10.0, 8.0, 0.1)),
            "Example 1", "x exp(x^2) - sin^2 x + 3 cos x + 5; periodic terms can attract "
            "iterates to neighbouring roots", (-1.5, 1.5)),
        CatalogEntry(
            ProblemDefinition("ex2", _ex12_f, _ex12_df, _ex12_d2f, (-inf, inf), 1.0, (8.1, 100.0, 0.1)),
            "Example 2", "same function as ex1, upper range and x0 = 1", (-1.5, 2.2)),
        CatalogEntry(
            ProblemDefinition("ex3", _ex3_f, _ex3_df, _ex3_d2f, (-inf, inf), 0.5, (-80.0, -0.5, 0.1),
                              singular_points=(0.0,)),
            "Example 3", "real signed cube root; f' is unbounded at x = 0, which is "
            "declared singular", (0.1, 4.0)),
        CatalogEntry(
            ProblemDefinition("ex4", _ex4_f, _ex4_df, _ex4_d2f, (-inf, inf), 2.5, (0.1, 10000.0, 0.01),
                              singular_points=(0.0,)),
            "Example 4", "even in x and singular at 0; iterates may cross to x < 0 and reach "
            "the mirrored root; Newton from x0 = 2.5 breaks down from y ~ 3.33 upward", (0.5, 5.0)),
        CatalogEntry(
            ProblemDefinition("ex5", _ex5_f, _ex5_df, _ex5_d2f, (0.0, inf), 1.0, (0.1, 100.0, 0.1)),
            "Example 5", "domain x > 0", (0.3, 1.8)),
        CatalogEntry(
            ProblemDefinition("ex6", _ex6_f, _ex6_df, _ex6_d2f, (-inf, inf), 0.2, (0.1, 99.1, 0.1)),
            "Example 6", "polynomial of degree 9", (0.1, 1.6)),
        CatalogEntry(
            ProblemDefinition("ex7", _ex7_f, _ex7_df, _ex7_d2f, (-inf, inf), 1.0, (1.0, 70.0, 0.1)),
            "Example 7", "minimum at x = ln 5; roots left of it are not reached from x0 = 1",
            (2.0, 8.0)),
        CatalogEntry(
            ProblemDefinition("lambertw", _lw_f, _lw_df, _lw_d2f, (-inf, inf), 0.0, (-0.367, 39.983, 0.05)),
            "Lambert W", "principal branch; the lower sweep bound sits just above -1/e",
            (-0.9, 3.0)),
        CatalogEntry(
            ProblemDefinition("bioreactor", _component(bioreactor_derivatives, 0, _BIO),
                              _component(bioreactor_derivatives, 1, _BIO),
                              _component(bioreactor_derivatives, 2, _BIO),
                              (-inf, inf), 2.0, (1.3, 8.0, 0.01), singular_points=(_BIO.pole,)),
            "Chemostat", "lam = 0.8, nu = 0, t = 10; x = lam / (1 - nu) = 0.8 is declared "
            "singular although the quotient has a finite limit there", (1.0, 3.0)),
        CatalogEntry(
            ProblemDefinition("heatexchanger", _component(heat_exchanger_derivatives, 0, _HX),
                              _component(heat_exchanger_derivatives, 1, _HX),
                              _component(heat_exchanger_derivatives, 2, _HX),
                              (0.0, inf), 2.5, (0.10, 0.99, 0.01)),
            "Heat exchanger", "counter-current P(x); removable singularity at x = 1 handled "
            "analytically; Newton leaves the domain x > 0 for larger targets", (0.05, 30.0)),
    ]
    return {e.id: e for e in entries}


_REGISTRY = _build()


def catalog() -> List[CatalogEntry]:
    return list(_REGISTRY.values())


def problem_ids() -> List[str]:
    return list(_REGISTRY)


def get_entry(problem_id: str) -> CatalogEntry:
    try:
        return _REGISTRY[problem_id]
    except KeyError:
        raise UnknownProblem(problem_id) from None


def get_problem(problem_id: str) -> ProblemDefinition:
    return get_entry(problem_id).problem
