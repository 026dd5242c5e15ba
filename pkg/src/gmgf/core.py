"""The gMGF transform chain, its moments, degree selection and solver.

Notation
--------
``g(x) = f(x) - y`` is the target residual, ``sigma(z)`` is ``+1`` for
``z >= 0`` and ``-1`` otherwise. The degree-0 transform of the residual
increment is ``H_0(x, xi) = -sigma(g(x)) * (g(x + xi) - g(x))``; positive
degrees nest ``v -> exp(v) - 1``, negative degrees nest ``v -> log(1 + v)``.
Setting ``g(x + xi) = 0`` turns ``H_0`` into ``|g(x)|``, and the same chain
applied to it gives the step numerator ``frak_h``. The update is

    x_next = x + frak_h(x, kappa) / h01(x),     h01 = -sigma(g) * g'.

With ``kappa = 0`` this is Newton's step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .diagnostics import SolveOutcome, SolveTrace
from .exceptions import DerivativeVanished, DomainViolation, NonFinite
from .iteration import StopRule, default_tolerance, iterate
from .problem import EvalCounter, TargetEquation, eval_d2g, eval_dg, eval_g
from .schedule import (DEFAULT_CLAMP, DegreeSchedule, clamp_degree, lookup_degree,
                       validate_clamp)

__all__ = [
    "Direct",
    "Scheduled",
    "Fixed",
    "DegreePolicy",
    "parse_policy",
    "GmgfConfig",
    "GmgfStepResult",
    "sigma",
    "moment_h01",
    "moment_h02",
    "moment_hk2",
    "optimal_degree",
    "gmgf_value",
    "frak_H",
    "gmgf_step",
    "solve_gmgf",
    "predicted_error_constant",
]


@dataclass(frozen=True)
class Direct:
    """Degree from the analytic (or FD) second derivative at every step."""

    def __str__(self):
        return "direct"


@dataclass(frozen=True)
class Scheduled:
    """Degree magnitude looked up in a precomputed :class:`DegreeSchedule`."""

    schedule: DegreeSchedule

    def __str__(self):
        return "scheduled"


@dataclass(frozen=True)
class Fixed:
    """The same degree at every step; ``Fixed(0)`` is Newton's method."""

    degree: int

    def __str__(self):
        return f"fixed:{self.degree}"


DegreePolicy = Union[Direct, Scheduled, Fixed]


def parse_policy(text: str, schedule: Optional[DegreeSchedule] = None) -> DegreePolicy:
    """Parse ``direct``, ``scheduled`` or ``fixed:K``.

    ``scheduled`` needs ``schedule``.
    """
    text = text.strip().lower()
    if text == "direct":
        return Direct()
    if text == "scheduled":
        if schedule is None:
            raise ValueError("the scheduled policy needs a DegreeSchedule")
        return Scheduled(schedule)
    if text.startswith("fixed:"):
        try:
            return Fixed(int(text.split(":", 1)[1]))
        except ValueError:
            pass
    raise ValueError(f"unknown degree policy {text!r}; use direct, scheduled or fixed:K")


@dataclass(frozen=True)
class GmgfConfig:
    """Solver settings.

    ``stop_rule`` selects how the step and residual tolerances combine
    (see :class:`~gmgf.iteration.StopRule`); ``fp_floor`` lifts both
    tolerances to what double precision resolves at the current iterate.
    """

    tol_x: float = field(default_factory=default_tolerance)
    tol_f: float = field(default_factory=default_tolerance)
    max_iter: int = 1000
    degree_clamp: Tuple[int, int] = DEFAULT_CLAMP
    degree_policy: DegreePolicy = field(default_factory=Direct)
    stop_rule: str = "either"
    fp_floor: bool = True

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        object.__setattr__(self, "degree_clamp", validate_clamp(self.degree_clamp))
        object.__setattr__(self, "_stop", StopRule(self.tol_x, self.tol_f, self.stop_rule, self.fp_floor))

    def stop(self) -> StopRule:
        return self._stop


@dataclass(frozen=True)
class GmgfStepResult:
    x_next: float
    degree_used: int
    frak_H: float
    h01: float
    explog_applications: int


def sigma(z: float) -> int:
    return 1 if z >= 0 else -1


def moment_h01(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None) -> float:
    """First generalized moment ``-sigma(g(x)) * g'(x)``."""
    return -sigma(eval_g(eq, x, counter)) * eval_dg(eq, x, counter)


def moment_h02(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None) -> float:
    """Second moment of degree zero, ``-sigma(g(x)) * g''(x)``."""
    return -sigma(eval_g(eq, x, counter)) * eval_d2g(eq, x, counter)


def moment_hk2(h01: float, h02: float, k: int) -> float:
    """Second moment of degree ``k``: ``h02 + k * h01**2``."""
    return h02 + k * h01 * h01


def _degree_ratio(gx: float, dg: float, d2g: float) -> float:
    ratio = sigma(gx) * d2g / (dg * dg) if dg * dg != 0.0 else math.inf
    if math.isnan(ratio) or math.isinf(ratio):
        raise NonFinite(f"degree ratio sigma*g''/g'^2 is {ratio!r}")
    return ratio


def optimal_degree(eq: TargetEquation, x: float, counter: Optional[EvalCounter] = None,
                   clamp: Tuple[int, int] = DEFAULT_CLAMP) -> int:
    """``clamp(round(sigma(g) * g'' / g'**2))`` with ties away from zero."""
    gx = eval_g(eq, x, counter)
    dg = eval_dg(eq, x, counter)
    if dg == 0.0:
        raise DerivativeVanished(f"g'({x!r}) = 0")
    return clamp_degree(_degree_ratio(gx, dg, eval_d2g(eq, x, counter)), clamp)


def _chain(v: float, k: int) -> float:
    """Apply ``expm1`` (``k > 0``) or ``log1p`` (``k < 0``) ``|k|`` times."""
    if k > 0:
        for _ in range(k):
            try:
                v = math.expm1(v)
            except OverflowError as exc:
                raise NonFinite("exp chain overflowed") from exc
    else:
        for _ in range(-k):
            if v <= -1.0:
                raise DomainViolation(f"log1p argument {v!r} <= -1 in the log chain")
            v = math.log1p(v)
    return v


def gmgf_value(eq: TargetEquation, k: int, x: float, xi: float) -> float:
    """``H_k(x, xi)`` built from the residual increment ``g(x + xi) - g(x)``."""
    gx = eval_g(eq, x)
    h0 = -sigma(gx) * (eval_g(eq, x + xi) - gx)
    value = _chain(h0, k)
    if not math.isfinite(value):
        raise NonFinite(f"H_{k}({x!r}, {xi!r}) = {value!r}")
    return value


def frak_H(eq: TargetEquation, x: float, kappa: int, counter: Optional[EvalCounter] = None,
           gx: Optional[float] = None) -> float:
    """Step numerator: the degree-``kappa`` chain applied to ``|g(x)|``.

    A known residual ``gx`` avoids re-evaluating ``g``. The counter's
    ``n_explog`` grows by ``|kappa|`` on success.
    """
    if gx is None:
        gx = eval_g(eq, x, counter)
    value = _chain(abs(gx), kappa)
    if not math.isfinite(value):
        raise NonFinite(f"frak_H of degree {kappa} is {value!r}")
    if counter is not None:
        counter.n_explog += abs(kappa)
    return value


def _select_degree(eq: TargetEquation, x: float, gx: float, dg: float,
                   config: GmgfConfig, counter: Optional[EvalCounter]) -> int:
    policy = config.degree_policy
    if isinstance(policy, Direct):
        return clamp_degree(_degree_ratio(gx, dg, eval_d2g(eq, x, counter)), config.degree_clamp)
    if counter is not None:
        counter.n_lookup += 1
    if isinstance(policy, Scheduled):
        k = lookup_degree(policy.schedule, x, sigma(gx))
    elif isinstance(policy, Fixed):
        k = policy.degree
    else:
        raise TypeError(f"unsupported degree policy {policy!r}")
    lo, hi = config.degree_clamp
    return min(hi, max(lo, k))


def gmgf_step(eq: TargetEquation, x: float, config: GmgfConfig,
              counter: Optional[EvalCounter] = None, gx: Optional[float] = None) -> GmgfStepResult:
    """One gMGF update from ``x``.

    When the exp chain overflows the degree is lowered toward zero until
    the chain is finite; only the successful chain is counted. At degree
    zero there is nothing left to retry, so the failure is final.
    """
    if gx is None:
        gx = eval_g(eq, x, counter)
    dg = eval_dg(eq, x, counter)
    if dg == 0.0:
        raise DerivativeVanished(f"g'({x!r}) = 0")
    h01 = -sigma(gx) * dg
    kappa = _select_degree(eq, x, gx, dg, config, counter)
    while True:
        try:
            H = frak_H(eq, x, kappa, counter, gx=gx)
            break
        except NonFinite:
            if kappa <= 0:
                raise
            kappa -= 1
    x_next = x + H / h01
    if not math.isfinite(x_next):
        raise NonFinite(f"gMGF step from {x!r} produced {x_next!r}")
    return GmgfStepResult(x_next, kappa, H, h01, abs(kappa))


def solve_gmgf(eq: TargetEquation, x0: float,
               config: Optional[GmgfConfig] = None,
               record: bool = True) -> Tuple[SolveOutcome, SolveTrace]:
    """Iterate :func:`gmgf_step` from ``x0`` until the stop rule holds.

    Returns
    -------
    outcome : SolveOutcome
        Terminal status, root (converged runs only), iteration count and
        the evaluations charged to the iterations.
    trace : SolveTrace
        One record per executed step.

    Examples
    --------
    >>> from gmgf.catalog import get_problem
    >>> out, _ = solve_gmgf(TargetEquation(get_problem("lambertw"), 5.0), 0.0)
    >>> out.status.value, round(out.root, 9)
    ('Converged', 1.326724665)
    """
    config = config or GmgfConfig()

    def step(eq, x, gx, counter):
        r = gmgf_step(eq, x, config, counter, gx=gx)
        return r.x_next, r.degree_used, r.h01

    return iterate(eq, x0, step, config.stop(), config.max_iter, "gmgf", record)


def predicted_error_constant(eq: TargetEquation, zeta: float, kappa: int,
                             side: Optional[int] = None) -> float:
    """Asymptotic constant ``C`` in ``e_{n+1} ~ C * e_n**2`` at a simple root.

    ``C = h_{kappa,2} / (2 h01)``. Both moments carry ``sigma(g)``, which is
    not defined by the root itself; ``side`` (``+1`` or ``-1``) gives the
    residual sign on which the iterates approach. By default
    ``sigma(g(zeta))`` is used. For ``kappa = 0`` the sign cancels and
    ``C = g''/(2 g')``.
    """
    g0 = eval_g(eq, zeta)
    s = sigma(g0) if side is None else (1 if side >= 0 else -1)
    dg = eval_dg(eq, zeta)
    if dg == 0.0:
        raise DerivativeVanished(f"g'({zeta!r}) = 0")
    h01 = -s * dg
    h02 = -s * eval_d2g(eq, zeta)
    return moment_hk2(h01, h02, kappa) / (2.0 * h01)
