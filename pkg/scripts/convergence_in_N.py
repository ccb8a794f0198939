"""Torque curves for increasing multiplier degree against a high-degree reference.

On the 36-slot machine cogging needs two multiplier orders n, n' (odd
multiples of P) with n +- n' a multiple of 36, so torque appears only from
N = 21 on.  ``--slots 6`` gives a small analog where it appears from N = 3.
"""
import argparse
import math
from dataclasses import replace

import numpy as np

from hmortar import assemble_system, build_meshes, load_config, precompute_schur
from hmortar.diagnostics import cogging_order, torque_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/default.toml")
    ap.add_argument("--slots", type=int, default=None)
    ap.add_argument("--degrees", type=int, nargs="+", default=[15, 21, 27, 33, 45, 60])
    ap.add_argument("--reference", type=int, default=120)
    ap.add_argument("--count", type=int, default=60)
    args = ap.parse_args()

    cfg = load_config(args.config)
    if args.slots:
        cfg = replace(cfg, slots=args.slots)
    meshes = build_meshes(cfg)
    period = 2 * math.pi / cogging_order(cfg)
    alphas = period * np.arange(args.count) / args.count

    def curve(N):
        s = assemble_system(cfg, meshes=meshes, N=N)
        return torque_sweep(s, precompute_schur(s), alphas).torques

    ref = curve(args.reference)
    print(f"reference N={args.reference}: max|T| = {np.abs(ref).max():.6g} N m")
    print(f"{'N':>4} {'max|T|':>12} {'max|T - T_ref|':>16}")
    for N in args.degrees:
        T = curve(N)
        print(f"{N:>4} {np.abs(T).max():12.6g} {np.abs(T - ref).max():16.6g}")


if __name__ == "__main__":
    main()
