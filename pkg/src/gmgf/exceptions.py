"""Exception hierarchy shared by the solvers, the catalog and the harness."""


class SolverError(Exception):
    """Base class for failures that terminate a single solve."""

    status = "SolverError"


class DomainViolation(SolverError, ValueError):
    """An evaluation point lies outside the open domain or on a singular point."""

    status = "DomainViolation"


class NonFinite(SolverError, ArithmeticError):
    """A function value, derivative or transform is inf or nan."""

    status = "NonFinite"


class DerivativeVanished(SolverError, ZeroDivisionError):
    status = "DerivativeVanished"


class UnknownProblem(KeyError):
    """Raised when a problem id is not registered in the catalog."""
