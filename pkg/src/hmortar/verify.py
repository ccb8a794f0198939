"""Self-checks run by ``hmortar verify``."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .diagnostics import (compute_energy, compute_torque, compute_torque_alt,
                          energy_balance_residual, multiplier_symmetry_report,
                          solve_derivative_system)
from .machine import MachineConfig
from .mortar import (assemble_coupling, mode_derivative, rotated_trace,
                     rotation_blocks, rotation_derivative)
from .solver import (AssembledSystem, InstabilityError, assemble_system, precompute_schur,
                     solve_interface, solve_monolithic, solve_schur)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    skipped: bool = False

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        return f"[{status}] {self.name}: {self.detail}"


def interface_dof_bound(sys: AssembledSystem) -> int:
    """Total interface trace dofs; beyond it the coupling cannot have full row rank."""
    return sum(sys.trace_dofs)


def quadrature_coupling(angles, N: int, r_gamma: float, columns=None) -> np.ndarray:
    """Coupling entries by adaptive quadrature of periodic linear interpolants."""
    angles = np.asarray(angles, dtype=float)
    K = len(angles)
    columns = range(K) if columns is None else columns
    out = np.zeros((2 * N + 1, len(columns)))
    for c, j in enumerate(columns):
        e = np.zeros(K)
        e[j] = 1.0
        lo = angles[j - 1] if j > 0 else angles[-1] - 2 * np.pi
        mid = angles[j]
        hi = angles[j + 1] if j + 1 < K else angles[0] + 2 * np.pi

        def hat(t, e=e):
            return np.interp(t, angles, e, period=2 * np.pi)

        for row in range(2 * N + 1):
            n = (row + 1) // 2
            trig = (lambda t: 1.0) if row == 0 else (math.cos if row % 2 else math.sin)

            def f(t, n=n, trig=trig):
                return trig(n * t) * hat(t)
            with warnings.catch_warnings():
                # tolerances sit at round-off on purpose
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val = sum(integrate.quad(f, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
                          for a, b in ((lo, mid), (mid, hi)))
            out[row, c] = r_gamma * val
    return out


def _rel(a, b) -> float:
    scale = max(np.abs(a).max(), np.abs(b).max())
    return float(np.abs(a - b).max() / scale) if scale > 0 else float(np.abs(a - b).max())


def check_rotation_identity(sys: AssembledSystem, n_angles: int = 20, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for alpha in rng.uniform(0, 2 * np.pi, n_angles):
        tr = rotated_trace(sys.rotor_trace, alpha)
        direct = assemble_coupling(tr, sys.N, sys.cfg.r_gamma)
        # map columns back to the reduced rotor dofs
        dof = sys.rotor.dof_map()[tr.node_ids]
        predicted = (rotation_blocks(alpha, sys.N) @ sys.B_R0)[:, dof]
        worst = max(worst, _rel(direct, predicted))
    return Check("rotation identity", worst <= 1e-12,
                 f"max relative deviation {worst:.2e} over {n_angles} angles (tol 1e-12)")


def check_quadrature(sys: AssembledSystem, n_columns: int = 6, seed: int = 0) -> Check:
    tr = sys.rotor_trace
    K = len(tr)
    rng = np.random.default_rng(seed)
    cols = sorted({0, K - 1, *rng.choice(K, size=min(n_columns, K), replace=False).tolist()})
    N = min(sys.N, 20)
    analytic = assemble_coupling(tr, N, sys.cfg.r_gamma)[:, cols]
    oracle = quadrature_coupling(tr.angles, N, sys.cfg.r_gamma, cols)
    err = float(np.abs(analytic - oracle).max())
    return Check("coupling quadrature", err <= 1e-12,
                 f"max abs deviation {err:.2e} on {len(cols)} columns incl. wrap-around (tol 1e-12)")


def check_schur_vs_monolithic(sys, pre, alphas) -> Check:
    worst = 0.0
    for a in alphas:
        m, s = solve_monolithic(sys, a), solve_schur(pre, a)
        for x, y in ((m.a_S, s.a_S), (m.a_R, s.a_R), (m.lam, s.lam)):
            nx = np.linalg.norm(x)
            worst = max(worst, np.linalg.norm(x - y) / nx if nx > 0 else np.linalg.norm(y))
    return Check("schur vs monolithic", worst <= 1e-8,
                 f"max relative block difference {worst:.2e} over {len(alphas)} angles (tol 1e-8)")


def check_energy_balance(sys, pre, alphas) -> Check:
    worst = 0.0
    for a in alphas:
        st = solve_schur(pre, a)
        ds = solve_derivative_system(sys, pre, st)
        scale = max(abs(compute_energy(sys, st)), abs(compute_torque(sys, st)), 1.0)
        worst = max(worst, energy_balance_residual(sys, st, ds) / scale)
    return Check("energy balance", worst <= 1e-10,
                 f"max relative residual {worst:.2e} over {len(alphas)} angles (tol 1e-10)")


def check_torque_forms(sys, pre, alphas) -> Check:
    """Both torque expressions, compared relative to the size of their factors.

    Cogging torque can cancel to round-off, so ``|T|`` itself is no scale.
    """
    worst = 0.0
    for a in alphas:
        st = solve_schur(pre, a)
        t1, t2 = compute_torque(sys, st), compute_torque_alt(sys, st)
        Ba = sys.B_R(a) @ st.a_R
        scale = sys.cfg.axial_length * max(
            np.linalg.norm(st.lam) * np.linalg.norm(rotation_derivative(a, sys.N) @ sys.B_R0 @ st.a_R),
            np.linalg.norm(mode_derivative(sys.N) @ st.lam) * np.linalg.norm(Ba))
        worst = max(worst, abs(t1 - t2) / scale if scale > 0 else abs(t1 - t2))
    return Check("torque formulas agree", worst <= 1e-12,
                 f"max difference {worst:.2e} relative to |lam||B'a| (tol 1e-12)")


def is_symmetric_config(cfg: MachineConfig) -> bool:
    """Mesh and sources are invariant under the machine's symmetry rotations."""
    P, S = cfg.pole_pairs, cfg.slots
    if S % (2 * P) or (cfg.angular_divisions_rotor // (2 * P)) % 2 or (cfg.angular_divisions_stator // S) % 2:
        return False
    j = cfg.slot_currents
    shift = S // (2 * P)
    return bool(np.allclose(np.roll(j, shift), -j, rtol=0, atol=1e-12 * (np.abs(j).max() + 1)))


def check_symmetry(sys, pre, alpha: float) -> Check:
    st = solve_schur(pre, alpha)
    rep = multiplier_symmetry_report(st.lam, sys.cfg)
    return Check("multiplier symmetry", rep.ratio <= 1e-8,
                 f"irrelevant/max relevant = {rep.ratio:.2e} at alpha={math.degrees(alpha):.3g} deg (tol 1e-8)")


def check_stability_probe(cfg: MachineConfig, sys: AssembledSystem) -> Check:
    bound = interface_dof_bound(sys)
    N_probe = (bound + 1) // 2  # smallest N with 2N+1 > bound
    if N_probe == sys.N:
        probe_sys = sys
    else:
        probe_sys = assemble_system(replace(cfg, multiplier_degree=N_probe),
                                    meshes=(sys.rotor, sys.stator), N=N_probe)
    try:
        solve_interface(precompute_schur(probe_sys), 0.3)
    except InstabilityError as exc:
        return Check("stability boundary", True,
                     f"N={N_probe} (2N+1={2 * N_probe + 1} > {bound} trace dofs) raised as expected, "
                     f"cond {exc.condition:.2e}")
    return Check("stability boundary", False,
                 f"N={N_probe} above the trace-dof bound {bound} did not raise")


def run_checks(cfg: MachineConfig, perturb_coupling: float = 0.0,
               n_angles: int = 5, seed: int = 0) -> list[Check]:
    """All verification checks for one configuration.

    ``perturb_coupling`` adds relative noise to B_R(0) after assembly; it is a
    negative control for the rotation-identity check.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sys = assemble_system(cfg)
    if perturb_coupling:
        rng = np.random.default_rng(seed)
        sys.B_R0 = sys.B_R0 * (1 + perturb_coupling * rng.standard_normal(sys.B_R0.shape))
    checks = [check_rotation_identity(sys, seed=seed), check_quadrature(sys, seed=seed)]
    rng = np.random.default_rng(seed + 1)
    alphas = rng.uniform(0, 2 * np.pi, n_angles)

    if 2 * sys.N + 1 > interface_dof_bound(sys):
        try:
            solve_interface(precompute_schur(sys), alphas[0])
            checks.append(Check("configured degree unstable", False,
                                f"2N+1={2 * sys.N + 1} exceeds the trace-dof bound but the solve succeeded"))
        except InstabilityError as exc:
            checks.append(Check("configured degree unstable", True,
                                f"2N+1={2 * sys.N + 1} exceeds {interface_dof_bound(sys)} trace dofs; "
                                f"instability detected (cond {exc.condition:.2e})"))
        for name in ("schur vs monolithic", "energy balance", "torque formulas agree"):
            checks.append(Check(name, True, "multiplier degree above stability bound", skipped=True))
        return checks

    pre = precompute_schur(sys)
    checks += [check_schur_vs_monolithic(sys, pre, alphas),
               check_energy_balance(sys, pre, alphas),
               check_torque_forms(sys, pre, alphas)]
    if is_symmetric_config(cfg):
        checks.append(check_symmetry(sys, pre, math.radians(7.0)))
    else:
        checks.append(Check("multiplier symmetry", True, "configuration not symmetric", skipped=True))
    checks.append(check_stability_probe(cfg, sys))
    return checks
