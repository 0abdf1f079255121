#!/usr/bin/env python3
"""Regenerate the three regression tables and the closed-form oracles.

Writes results/table_angenent.csv, results/table_mcgrath.csv,
results/table_cheng_wei.csv, results/oracles.csv. The default grid stops at
desk scale (1e4); --full extends the torus family to 1e6 and --quick trims
everything to the small dimensions.
"""

import argparse
import pathlib
import sys
import time

from shrinkshoot import solve_angenent, solve_cheng_wei, solve_mcgrath, solve_sphere
from shrinkshoot.reference import entropy_cylinder_closed_form, entropy_sphere_closed_form

GRID = [2, 3, 4, 5, 10, 30, 60, 100, 300, 500, 1000, 3000, 5000, 10000]
QUICK = [2, 3, 4, 5, 10]
HEADER = "dimension,r0,a0,perimeter,entropy,closure_residual,iterations,wall_time_s\n"


def sweep(solver, dims, out_path, label):
    t0 = time.perf_counter()
    with open(out_path, "w") as fh:
        fh.write(HEADER)
        for d in dims:
            rep = solver(d)
            a0 = rep.shoot_params.get("a0")
            fh.write(
                f"{d},{rep.shoot_params.get('r0', float('nan')):.8f},"
                f"{'' if a0 is None else f'{a0:.8f}'},"
                f"{rep.perimeter:.8f},{rep.entropy:.8f},"
                f"{rep.closure_residual:.8f},{rep.bisection_iterations},"
                f"{rep.wall_time_s:.8f}\n"
            )
            print(f"  {label} dim={d}: L={rep.perimeter:.8f} entropy={rep.entropy:.8f}")
    print(f"{label}: {len(dims)} rows in {time.perf_counter() - t0:.1f}s -> {out_path}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results", type=pathlib.Path)
    ap.add_argument("--quick", action="store_true", help="small dimensions only")
    ap.add_argument("--full", action="store_true",
                    help="extend the torus grid to 1e6 (minutes, not hours)")
    args = ap.parse_args(argv)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    grid = QUICK if args.quick else GRID
    torus_grid = grid + ([30000, 100000, 1000000] if args.full else [])

    sweep(solve_angenent, torus_grid, args.out_dir / "table_angenent.csv", "angenent")
    sweep(solve_mcgrath, grid, args.out_dir / "table_mcgrath.csv", "mcgrath")
    sweep(solve_cheng_wei, grid, args.out_dir / "table_cheng_wei.csv", "cheng-wei")

    with open(args.out_dir / "oracles.csv", "w") as fh:
        fh.write("kind,dimension,entropy_solver,entropy_closed_form\n")
        for n in (2, 3, 5, 10):
            rep = solve_sphere(n)
            fh.write(f"sphere,{n},{rep.entropy:.12f},{entropy_sphere_closed_form(n):.12f}\n")
        for m in (1, 2, 3, 10, 100):
            fh.write(f"cylinder,{m},,{entropy_cylinder_closed_form(m, m + 1):.12f}\n")
    print(f"oracles -> {args.out_dir / 'oracles.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
