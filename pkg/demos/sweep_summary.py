"""Sweep a catalog problem and summarise iteration and evaluation counts.

Run: python demos/sweep_summary.py [problem] [--timing]
Timing uses 10 repeats per row to keep the demo short.
"""

import sys

from gmgf.bench import SweepSpec, run_sweep


def main(argv):
    pid = next((a for a in argv if not a.startswith("--")), "ex1")
    timing = "--timing" in argv
    rows = run_sweep(SweepSpec.from_catalog(pid, timing=timing, repeats=10))
    for name in ("newton", "gmgf"):
        res = [getattr(r, name) for r in rows]
        ok = [(r.y, m) for r, m in zip(rows, res) if m.status == "Converged"]
        print(f"{name:>6}: {len(ok)}/{len(rows)} converged", end="")
        if ok:
            y_i, worst = max(ok, key=lambda t: t[1].I)
            y_e, costly = max(ok, key=lambda t: t[1].E)
            print(f", max I={worst.I} (y={y_i:g}), max E={costly.E} (y={y_e:g})", end="")
        print()
    if timing:
        far = rows[-1] if abs(rows[-1].y) >= abs(rows[0].y) else rows[0]
        print(f"at y={far.y:g}: newton {far.newton.t_mean * 1e6:.1f} us, "
              f"gmgf {far.gmgf.t_mean * 1e6:.1f} us")


if __name__ == "__main__":
    main(sys.argv[1:])
