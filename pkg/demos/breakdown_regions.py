"""Where Newton breaks down and what the degree does there.

Scans ex4 across the Newton transition near y = 3.33 and the heat
exchanger across its sweep range, then prints the degree schedule of the
heat exchanger. Run: python demos/breakdown_regions.py
"""

from gmgf import TargetEquation, build_schedule, get_problem, solve_gmgf, solve_newton
from gmgf.bench import sweep_grid


def scan(pid, ys, x0):
    p = get_problem(pid)
    print(f"\n{pid} from x0 = {x0}")
    print(f"{'y':>8} {'newton':>22} {'gmgf':>22} {'gmgf root':>20}")
    for y in ys:
        eq = TargetEquation(p, y)
        n, _ = solve_newton(eq, x0, record=False)
        g, _ = solve_gmgf(eq, x0, record=False)
        root = "" if g.root is None else f"{g.root:.12g}"
        print(f"{y:>8.3g} {str(n.status) + f'/{n.iterations}':>22} "
              f"{str(g.status) + f'/{g.iterations}':>22} {root:>20}")


def main():
    scan("ex4", sweep_grid(3.28, 3.38, 0.01), 2.5)
    scan("heatexchanger", sweep_grid(0.1, 0.6, 0.05), 2.5)
    s = build_schedule(get_problem("heatexchanger"), 0.05, 30.0)
    print(f"\nheatexchanger schedule on [0.05, 30]: {len(s.degrees)} cells, "
          f"|degree| from {min(s.degrees)} to {max(s.degrees)}")
    print("The applied degree is sign(g) * m, so a negative residual gives -m.")


if __name__ == "__main__":
    main()
