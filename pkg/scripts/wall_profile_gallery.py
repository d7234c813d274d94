#!/usr/bin/env python3
"""Minimized wall profiles across an eps ladder, written as CSVs.

One file per rung with columns x1, phi, m1, m2, g; useful for eyeballing
how the core sharpens and the logarithmic tails develop as eps shrinks.
"""

import argparse
import math
from pathlib import Path

from neelwall.asymptotics import grid_for_epsilon, run_ladder
from neelwall.domain import WallConfig
from neelwall.runio import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=math.pi / 2)
    ap.add_argument("--positions", type=float, nargs="+", default=[0.0])
    ap.add_argument("--signs", type=int, nargs="+", default=[1])
    ap.add_argument("--epsilons", type=float, nargs="+",
                    default=[1e-2, 1e-3, 1e-4])
    ap.add_argument("--outdir", type=Path, default=Path("profiles"))
    args = ap.parse_args()

    cfg = WallConfig(alpha=args.alpha, positions=tuple(args.positions),
                     signs=tuple(args.signs))
    args.outdir.mkdir(parents=True, exist_ok=True)
    points, _ = run_ladder(cfg, args.epsilons)
    for p in points:
        ph = p.report.phase
        rows = zip(ph.x.tolist(), ph.phi.tolist(), ph.m1.tolist(),
                   ph.m2.tolist(), p.report.trace.g.tolist())
        path = args.outdir / f"profile_eps{p.epsilon:g}.csv"
        write_csv(path, ["x1", "phi", "m1", "m2", "g"], rows)
        print(f"eps={p.epsilon:g} M={grid_for_epsilon(p.epsilon)} "
              f"E={p.E:.8f} Q={p.Q:.8f} -> {path}")


if __name__ == "__main__":
    main()
