"""Command line entry point: ``hmortar simulate | sweep | verify``."""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import expand, p1_gradients
from .config import load_config
from .diagnostics import (compute_energy, compute_torque, compute_torque_alt, fourier_analyze,
                          multiplier_symmetry_report, torque_sweep, torque_symmetry_report)
from .machine import ConfigError
from .mesh import MeshError, write_vtk
from .mortar import to_fourier
from .solver import InstabilityError, SolverError, assemble_system, factorizations, precompute_schur, solve_schur
from .verify import is_symmetric_config, run_checks

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunSpec:
    mode: str
    config: Path
    alpha_deg: float = 0.0
    start_deg: float = 0.0
    stop_deg: float = 360.0
    count: int = 360
    out: Path = Path("out")
    export_fields: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("simulate", "sweep", "verify"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not math.isfinite(self.alpha_deg):
            raise ConfigError("alpha must be finite")
        if self.mode == "sweep":
            if self.count < 2:
                raise ConfigError(f"sweep count must be >= 2, got {self.count}")
            if not (math.isfinite(self.start_deg) and math.isfinite(self.stop_deg)) \
                    or self.stop_deg <= self.start_deg:
                raise ConfigError("sweep needs finite start < stop")


def sweep_grid(start_deg: float, stop_deg: float, count: int) -> np.ndarray:
    """``count`` angles from ``start`` (inclusive) to ``stop`` (exclusive), in degrees."""
    return start_deg + (stop_deg - start_deg) * np.arange(count) / count


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _multiplier_dict(lam) -> dict:
    coeffs = to_fourier(lam)
    return {"c": [float(coeffs[0])] + [float(v) for v in coeffs[1::2]],
            "d": [0.0] + [float(v) for v in coeffs[2::2]]}


def run_simulate(spec: RunSpec) -> dict:
    cfg = load_config(spec.config)
    alpha = math.radians(spec.alpha_deg)
    sys_ = assemble_system(cfg)
    pre = precompute_schur(sys_)
    state = solve_schur(pre, alpha)
    field_energy = 0.5 * (state.a_S @ (sys_.K_S @ state.a_S) + state.a_R @ (sys_.K_R @ state.a_R))
    summary = {
        "alpha_deg": spec.alpha_deg,
        "energy_J_per_m": compute_energy(sys_, state),
        "field_energy_J_per_m": float(field_energy),
        "torque_Nm": compute_torque(sys_, state),
        "torque_alt_Nm": compute_torque_alt(sys_, state),
        "multiplier_degree": sys_.N,
        "multiplier": _multiplier_dict(state.lam),
        "dofs": {"stator": int(sys_.K_S.shape[0]), "rotor": int(sys_.K_R.shape[0])},
    }
    if is_symmetric_config(cfg):
        summary["symmetry"] = multiplier_symmetry_report(state.lam, cfg).as_dict()
    spec.out.mkdir(parents=True, exist_ok=True)
    _write_json(spec.out / "summary.json", summary)
    if spec.export_fields:
        for mesh, a, rot in ((sys_.stator, state.a_S, 0.0), (sys_.rotor, state.a_R, alpha)):
            full = expand(a, mesh)
            _, grads = p1_gradients(mesh.nodes, mesh.triangles)
            grad_norm = np.linalg.norm(np.einsum("tik,ti->tk", grads, full[mesh.triangles]), axis=1)
            write_vtk(spec.out / f"{mesh.side}.vtk", mesh, point_data={"a": full},
                      cell_data={"grad_a_norm": grad_norm}, alpha=rot)
    return summary


def run_sweep(spec: RunSpec) -> dict:
    cfg = load_config(spec.config)
    sys_ = assemble_system(cfg)
    before = factorizations.count
    pre = precompute_schur(sys_)
    grid_deg = sweep_grid(spec.start_deg, spec.stop_deg, spec.count)
    curve = torque_sweep(sys_, pre, np.radians(grid_deg), workers=spec.workers)
    spec.out.mkdir(parents=True, exist_ok=True)
    with open(spec.out / "torque.csv", "w") as fh:
        fh.write("alpha_deg,torque_Nm\n")
        for a, t in zip(grid_deg, curve.torques):
            fh.write(f"{a:.17g},{t:.17g}\n")

    result = {"count": spec.count, "factorizations": factorizations.count - before,
              "failures": {f"{math.degrees(a):.17g}": msg for a, msg in curve.failures.items()}}
    span = spec.stop_deg - spec.start_deg
    turns = 360.0 / span
    if abs(turns - round(turns)) < 1e-9 and not curve.failures:
        coeffs = fourier_analyze(curve.alphas, curve.torques, period=math.radians(span))
        curve.fourier = coeffs
        fourier = {"m": [int(m) for m in coeffs.orders], "c_hat": coeffs.c.tolist(),
                   "d_hat": coeffs.d.tolist()}
        report = torque_symmetry_report(coeffs, cfg)
        fourier.update(relevant_orders=report.as_dict()["relevant_orders"],
                       sum_abs_c_hat=report.cos_sum, sum_abs_d_hat_irrelevant=report.irrelevant_sum,
                       max_abs_d_hat_relevant=report.max_relevant)
        _write_json(spec.out / "fourier.json", fourier)
        _write_json(spec.out / "symmetry.json", report.as_dict())
        result["fourier"] = "fourier.json"
    else:
        result["fourier"] = None
    _write_json(spec.out / "sweep.json", result)
    result["curve"] = curve
    return result


def run_verify(spec: RunSpec, perturb_coupling: float = 0.0):
    cfg = load_config(spec.config)
    return run_checks(cfg, perturb_coupling=perturb_coupling)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hmortar", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("simulate", help="solve at one rotor angle")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--alpha-deg", required=True, type=float)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--export-fields", action="store_true")

    p = sub.add_parser("sweep", help="torque over a grid of rotor angles")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--start-deg", required=True, type=float)
    p.add_argument("--stop-deg", required=True, type=float)
    p.add_argument("--count", required=True, type=int)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", help="run the built-in consistency checks")
    p.add_argument("--config", required=True, type=Path)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kw = {k: v for k, v in vars(args).items() if v is not None}
    try:
        spec = RunSpec(**kw)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore" if spec.mode == "verify" else "default")
            if spec.mode == "simulate":
                s = run_simulate(spec)
                print(f"alpha = {s['alpha_deg']:g} deg  energy = {s['energy_J_per_m']:.10g} J/m  "
                      f"torque = {s['torque_Nm']:.10g} N m")
                return EXIT_OK
            if spec.mode == "sweep":
                r = run_sweep(spec)
                print(f"{spec.count} angles, {r['factorizations']} factorizations, "
                      f"{len(r['failures'])} unstable angles -> {spec.out / 'torque.csv'}")
                return EXIT_FAIL if r["failures"] else EXIT_OK
            checks = run_verify(spec)
            for c in checks:
                print(c.line())
            return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL
    except (ConfigError, MeshError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"unstable interface problem: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (SolverError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
