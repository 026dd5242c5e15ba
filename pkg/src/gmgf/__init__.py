"""Degree-adaptive gMGF root finding for scalar equations ``f(x) = y``."""

from .catalog import CatalogEntry, catalog, get_entry, get_problem, heat_exchanger_P, problem_ids
from .core import (Direct, Fixed, GmgfConfig, GmgfStepResult, Scheduled, frak_H, gmgf_step,
                   gmgf_value, moment_h01, moment_h02, optimal_degree, parse_policy,
                   predicted_error_constant, solve_gmgf)
from .diagnostics import (IterationRecord, SolveOutcome, SolveTrace, Status, coc_sequence,
                          eval_count_gmgf, eval_count_newton, gain_sequence, reference_root)
from .exceptions import DerivativeVanished, DomainViolation, NonFinite, SolverError, UnknownProblem
from .newton import NewtonConfig, newton_step, solve_newton
from .problem import EvalCounter, ProblemDefinition, TargetEquation, eval_d2g, eval_dg, eval_g
from .schedule import DegreeSchedule, build_schedule, lookup_degree

__version__ = "0.1.0"
