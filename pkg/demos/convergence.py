"""Temporal convergence of the splitting scheme on a chosen benchmark.

Sweeps the global time step, runs each case to numerical periodicity and
reports the normalized space-time errors of velocity, pressure and circuit
state over the final period, together with the fitted log-log slopes.
First order in dt is expected.  The default coarse mesh finishes in well
under a minute; pass --nx 100 --ny 20 for the full benchmark mesh.
"""
import argparse

from stokes0d import build_case, convergence_study

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--example", type=int, default=1, choices=(1, 2, 3))
parser.add_argument("--nx", type=int, default=40)
parser.add_argument("--ny", type=int, default=8)
parser.add_argument("--dts", type=str, default="0.01,0.005,0.0025")
args = parser.parse_args()

dts = [float(v) for v in args.dts.split(",")]
study = convergence_study(
    lambda: build_case(args.example, nonlinear=args.example == 1,
                       nx=args.nx, ny=args.ny),
    dts, max_periods=10)

print(f"benchmark {args.example}, mesh {args.nx}x{args.ny}")
print(f"{'dt':>8} {'err_v':>12} {'err_p':>12} {'err_y':>12} {'periods':>8}")
for dt, err, periods, _ in study.rows:
    print(f"{dt:8.4f} {err.err_v:12.4e} {err.err_p:12.4e} {err.err_y:12.4e} "
          f"{periods:8d}")
print("\nfitted slopes (expect ~1):",
      "  ".join(f"{k}={v:.3f}" for k, v in sorted(study.slopes.items())))
