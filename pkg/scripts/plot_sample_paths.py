#!/usr/bin/env python3
"""Simulate a subordinator path with its hitting-time inverse and plot both.

Writes <out>_g.csv, <out>_h.csv and <out>.svg; the inverse path is flat
exactly where the subordinator jumps.
"""

import argparse

import numpy as np

from ighit.hitting import invert_path
from ighit.subordinators import IGParams, IGSubordinator, SamplePath, simulate_path
from ighit.tables import write_svg_lines


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=1.0)
    ap.add_argument("--horizon", type=float, default=5.0)
    ap.add_argument("--dt", type=float, default=0.001)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="paths")
    args = ap.parse_args()

    params = IGParams(args.delta, args.gamma)
    model = IGSubordinator(params)
    rng = np.random.default_rng(args.seed)
    g_horizon = max(2.0 * args.horizon * max(params.gamma / params.delta, 1.0),
                    4.0 * args.dt)
    g_path = simulate_path(model, g_horizon, args.dt, rng)
    while g_path.values[-1] <= args.horizon:
        ext = simulate_path(model, g_horizon, args.dt, rng)
        g_path = SamplePath(
            np.concatenate([g_path.times, g_path.times[-1] + ext.times[1:]]),
            np.concatenate([g_path.values, g_path.values[-1] + ext.values[1:]]))
    t_grid = args.dt * np.arange(int(round(args.horizon / args.dt)) + 1)
    h_path = invert_path(g_path, t_grid)

    g_path.to_csv(f"{args.out}_g.csv")
    h_path.to_csv(f"{args.out}_h.csv")
    keep = g_path.values <= 1.05 * args.horizon
    write_svg_lines(f"{args.out}.svg", [
        ("subordinator", g_path.times[keep], g_path.values[keep], "steps"),
        ("hitting time", h_path.times, h_path.values, "line"),
    ], title=f"delta={args.delta} gamma={args.gamma} seed={args.seed}")
    n_plateau = int(np.sum(np.diff(h_path.values) == 0))
    print(f"{args.out}_g.csv {args.out}_h.csv {args.out}.svg "
          f"({n_plateau} plateau steps)")


if __name__ == "__main__":
    main()
