"""Side-by-side iteration tables for Newton and gMGF.

Run: python demos/iteration_tables.py [problem] [y] [x0]
"""

import math
import sys

from gmgf import TargetEquation, coc_sequence, gain_sequence, get_problem, reference_root
from gmgf import solve_gmgf, solve_newton


def table(eq, x0, solve):
    out, tr = solve(eq, x0)
    print(f"\n{tr.method}: {out.status}, I={out.iterations}, E={out.E}")
    if not out.converged:
        print(f"  {out.message}")
        return
    zeta = reference_root(eq, out.root)
    gains = gain_sequence(tr, zeta)
    coc = [math.nan] + coc_sequence(tr, zeta)
    print(f"{'n':>3} {'x_n':>22} {'|x_n - x_n-1|':>14} {'gain':>11} {'coc':>7} {'degree':>6}")
    for r, g, c in zip(tr, gains, coc):
        print(f"{r.n:>3} {r.x:>22.16f} {r.step_abs:>14.3e} {g:>11.3e} {c:>7.3f} {r.degree:>6}")


def main(argv):
    pid = argv[0] if argv else "ex1"
    y = float(argv[1]) if len(argv) > 1 else 7.0
    p = get_problem(pid)
    x0 = float(argv[2]) if len(argv) > 2 else p.default_x0
    eq = TargetEquation(p, y)
    print(f"{pid}: solve f(x) = {y} from x0 = {x0}")
    # Newton loses ground on the first step here; gMGF picks a negative
    # degree that shortens the step and lands close to the root at once.
    table(eq, x0, solve_newton)
    table(eq, x0, solve_gmgf)


if __name__ == "__main__":
    main(sys.argv[1:])
