"""Cogging torque over one period, with multiplier and torque mode tables.

    python scripts/cogging_sweep.py --config configs/default.toml --count 72
"""
import argparse
import math
import time

import numpy as np

from hmortar import assemble_system, load_config, precompute_schur, solve_schur
from hmortar.diagnostics import (cogging_order, fourier_analyze, multiplier_symmetry_report,
                                 torque_sweep, torque_symmetry_report)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/default.toml")
    ap.add_argument("--count", type=int, default=72, help="samples per cogging period")
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    t0 = time.perf_counter()
    sys_ = assemble_system(cfg)
    pre = precompute_schur(sys_)
    t_off = time.perf_counter() - t0

    period = 2 * math.pi / cogging_order(cfg)
    alphas = period * np.arange(args.count) / args.count
    t0 = time.perf_counter()
    curve = torque_sweep(sys_, pre, alphas)
    t_on = (time.perf_counter() - t0) / args.count
    print(f"offline {t_off:.2f} s, online {1e3 * t_on:.2f} ms per angle, "
          f"dofs stator {sys_.K_S.shape[0]} rotor {sys_.K_R.shape[0]}, N={sys_.N}")

    lam = solve_schur(pre, math.radians(7.0)).lam
    rep = multiplier_symmetry_report(lam, cfg)
    print("\nmultiplier modes at 7 deg (relevant orders)")
    for n, amp in zip(rep.relevant_orders, rep.relevant_amplitudes):
        print(f"  C_{n:<3d} {amp:12.5e}")
    print(f"  sum of irrelevant C_n {rep.irrelevant_sum:.3e}")

    coeffs = fourier_analyze(alphas, curve.torques, period=period)
    trep = torque_symmetry_report(coeffs, cfg)
    print("\ntorque modes over one period")
    for m, c, d in zip(coeffs.orders[:6], coeffs.c[:6], coeffs.d[:6]):
        print(f"  m={m:<4d} c={c:12.4e} d={d:12.4e}")
    print(f"  sum|c| {trep.cos_sum:.3e}, max|T| {np.abs(curve.torques).max():.5f} N m")

    if args.csv:
        np.savetxt(args.csv, np.column_stack([np.degrees(alphas), curve.torques]), delimiter=",",
                   header="alpha_deg,torque_Nm", comments="", fmt="%.17g")


if __name__ == "__main__":
    main()
