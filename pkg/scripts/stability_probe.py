"""Condition number of the interface matrix as the multiplier degree grows.

Once 2N+1 exceeds the total number of interface trace nodes of both sides
the interface matrix is singular.  On uniform traces aliasing between orders
n and K - n makes it singular a little earlier.
"""
import argparse

import numpy as np

from hmortar import assemble_system, build_meshes, load_config, precompute_schur
from hmortar.solver import COND_LIMIT, interface_condition


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/default.toml")
    ap.add_argument("--alpha", type=float, default=0.3, help="rotor angle (rad)")
    ap.add_argument("--points", type=int, default=12)
    args = ap.parse_args()

    cfg = load_config(args.config)
    meshes = build_meshes(cfg)
    bound = meshes[0].n_theta + meshes[1].n_theta
    print(f"trace nodes: rotor {meshes[0].n_theta}, stator {meshes[1].n_theta}, total {bound}")
    degrees = sorted({*np.linspace(5, bound // 2 - 2, args.points - 3).astype(int),
                      bound // 2 - 1, (bound + 1) // 2, (bound + 1) // 2 + 2})
    print(f"{'N':>5} {'2N+1':>6} {'cond(K_int)':>12}")
    for N in degrees:
        s = assemble_system(cfg, meshes=meshes, N=int(N))
        cond = interface_condition(precompute_schur(s).K_int(args.alpha))
        flag = "  unstable" if not cond <= COND_LIMIT else ""
        print(f"{N:>5} {2 * N + 1:>6} {cond:12.3e}{flag}")


if __name__ == "__main__":
    main()
