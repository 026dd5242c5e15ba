"""Shared cases and finite-difference helpers for the test suite."""

import math
import sys

from gmgf.core import gmgf_value

EPS = sys.float_info.epsilon

# (problem, y, x0, Newton I, gMGF I) reference iteration counts
TABLE_CASES = [
    ("ex1", 7.0, 0.0, 7, 5),
    ("ex2", 20.0, 1.0, 17, 5),
    ("ex3", -10.0, 0.5, 13, 6),
    ("ex4", 1.5, 2.5, 17, 4),
    ("ex5", 7.0, 1.0, 16, 6),
    ("ex6", 5.0, 0.2, 26, 7),
    ("ex7", 3.0, 1.0, 19, 7),
    ("lambertw", 5.0, 0.0, 11, 6),
    ("bioreactor", 3.0, 2.0, 17, 5),
    ("heatexchanger", 0.2, 2.5, 7, 4),
]


def fd_first(eq, k, x, h):
    """Richardson-extrapolated central difference of H_k in xi at 0."""
    def d(h):
        return (gmgf_value(eq, k, x, h) - gmgf_value(eq, k, x, -h)) / (2 * h)
    return (4 * d(h / 2) - d(h)) / 3


def fd_second(eq, k, x, h):
    def d(h):
        return (gmgf_value(eq, k, x, h) - 2 * gmgf_value(eq, k, x, 0.0) + gmgf_value(eq, k, x, -h)) / (h * h)
    return (4 * d(h / 2) - d(h)) / 3


def fd_length(h01, h02, k, x):
    """Length over which H_k departs from its quadratic model.

    The residual's curvature sets ``1/sqrt|h02|``; a nested chain of degree
    ``k`` adds ``1/((1+|k|) |h01|)``; ``1 + |x|`` caps flat stretches.
    """
    L = 1.0 + abs(x)
    if h02:
        L = min(L, 1.0 / math.sqrt(abs(h02)))
    if k:
        L = min(L, 1.0 / ((1 + abs(k)) * abs(h01)))
    return L


def last_resolved_coc(errors, coc, floor=100 * EPS):
    """Last COC entry whose three errors all exceed ``floor`` (or None)."""
    best = None
    for i, c in enumerate(coc):
        n = i + 2
        if all(abs(errors[j]) > floor for j in (n, n - 1, n - 2)) and not math.isnan(c):
            best = c
    return best
