"""Saddle-point solves for a given rotation angle.

Two routes solve the same linear system

    K_S a_S            + B_S^T lam     = j_e
              K_R a_R  - B_R(a)^T lam  = j_M
    B_S a_S - B_R(a) a_R               = 0

with ``B_R(a) = R(a) B_R(0)``: a monolithic sparse LU of the full block matrix
(reference) and the Schur complement on the multiplier dofs (fast path).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import assemble_current_load, assemble_magnet_load, assemble_stiffness
from .machine import MachineConfig
from .mesh import InterfaceTrace, Mesh, build_meshes, extract_trace
from .mortar import assemble_coupling, n_modes, rotation_blocks

COND_LIMIT = 1e12


class SolverError(RuntimeError):
    """Factorization failure or inaccurate solve."""


class InstabilityError(SolverError):
    """Interface problem numerically singular (inf-sup failure)."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


@dataclass
class FactorizationCounter:
    count: int = 0

    def reset(self) -> None:
        self.count = 0


factorizations = FactorizationCounter()


def factorize(A):
    """Sparse LU factorization; every call is counted in ``factorizations``."""
    factorizations.count += 1
    try:
        return spla.splu(sp.csc_matrix(A))
    except RuntimeError as exc:
        raise SolverError(f"sparse factorization failed: {exc}") from exc


@dataclass
class AssembledSystem:
    cfg: MachineConfig
    rotor: Mesh
    stator: Mesh
    rotor_trace: InterfaceTrace
    stator_trace: InterfaceTrace
    K_S: sp.csc_matrix
    K_R: sp.csc_matrix
    j_e: np.ndarray
    j_M: np.ndarray
    B_S: np.ndarray
    B_R0: np.ndarray
    N: int
    _factors: dict = field(default_factory=dict, repr=False)

    @property
    def n_mult(self) -> int:
        return n_modes(self.N)

    @property
    def trace_dofs(self) -> tuple[int, int]:
        """(stator, rotor) interface node counts."""
        return len(self.stator_trace), len(self.rotor_trace)

    def factor(self, side: str):
        """Cached factorization of ``K_S`` (side "stator") or ``K_R``."""
        if side not in self._factors:
            self._factors[side] = factorize(self.K_S if side == "stator" else self.K_R)
        return self._factors[side]

    def B_R(self, alpha: float) -> np.ndarray:
        return rotation_blocks(alpha, self.N) @ self.B_R0


def _reduced_coupling(m: Mesh, trace: InterfaceTrace, N: int, r_gamma: float) -> np.ndarray:
    B = assemble_coupling(trace, N, r_gamma)
    dof = m.dof_map()[trace.node_ids]
    if np.any(dof < 0):
        raise SolverError(f"{m.side} interface touches the Dirichlet boundary")
    out = np.zeros((B.shape[0], len(m.free_nodes())))
    out[:, dof] = B
    return out


def assemble_system(cfg: MachineConfig, meshes: tuple[Mesh, Mesh] | None = None,
                    N: int | None = None) -> AssembledSystem:
    """Meshes, stiffness matrices, loads and coupling matrices at angle 0."""
    rotor, stator = meshes if meshes is not None else build_meshes(cfg)
    N = cfg.multiplier_degree if N is None else N
    rt, st = extract_trace(rotor), extract_trace(stator)
    return AssembledSystem(
        cfg=cfg, rotor=rotor, stator=stator, rotor_trace=rt, stator_trace=st,
        K_S=assemble_stiffness(stator, cfg), K_R=assemble_stiffness(rotor, cfg),
        j_e=assemble_current_load(stator, cfg), j_M=assemble_magnet_load(rotor, cfg),
        B_S=_reduced_coupling(stator, st, N, cfg.r_gamma),
        B_R0=_reduced_coupling(rotor, rt, N, cfg.r_gamma), N=N)


@dataclass(frozen=True)
class SolutionState:
    alpha: float
    a_S: np.ndarray
    a_R: np.ndarray
    lam: np.ndarray


def saddle_matrix(sys: AssembledSystem, alpha: float) -> sp.csc_matrix:
    B_R = sys.B_R(alpha)
    return sp.bmat([
        [sys.K_S, None, sp.csr_matrix(sys.B_S.T)],
        [None, sys.K_R, sp.csr_matrix(-B_R.T)],
        [sp.csr_matrix(sys.B_S), sp.csr_matrix(-B_R), None],
    ], format="csc")


def block_residuals(sys: AssembledSystem, alpha: float, a_S, a_R, lam, rhs=None):
    """Relative residual of each block equation."""
    f_S, f_R, g = rhs if rhs is not None else (sys.j_e, sys.j_M, np.zeros(sys.n_mult))
    B_R = sys.B_R(alpha)
    r1 = sys.K_S @ a_S + sys.B_S.T @ lam - f_S
    r2 = sys.K_R @ a_R - B_R.T @ lam - f_R
    r3 = sys.B_S @ a_S - B_R @ a_R - g
    scale1 = np.linalg.norm(sys.K_S @ a_S) + np.linalg.norm(f_S) + np.linalg.norm(sys.B_S.T @ lam)
    scale2 = np.linalg.norm(sys.K_R @ a_R) + np.linalg.norm(f_R) + np.linalg.norm(B_R.T @ lam)
    scale3 = np.linalg.norm(sys.B_S @ a_S) + np.linalg.norm(B_R @ a_R) + np.linalg.norm(g)
    return tuple(np.linalg.norm(r) / s if s > 0 else np.linalg.norm(r)
                 for r, s in ((r1, scale1), (r2, scale2), (r3, scale3)))


def solve_monolithic(sys: AssembledSystem, alpha: float, rhs=None,
                     tol: float = 1e-10) -> SolutionState:
    """Reference solve of the full block system with a sparse LU."""
    f_S, f_R, g = rhs if rhs is not None else (sys.j_e, sys.j_M, np.zeros(sys.n_mult))
    nS, nR = sys.K_S.shape[0], sys.K_R.shape[0]
    A = saddle_matrix(sys, alpha)
    b = np.concatenate([f_S, f_R, g])
    if not np.any(b):
        z = np.zeros
        return SolutionState(alpha, z(nS), z(nR), z(sys.n_mult))
    try:
        lu = factorize(A)
    except SolverError as exc:
        raise InstabilityError(f"saddle-point matrix is singular at alpha={alpha}: {exc}",
                               np.inf) from exc
    x = lu.solve(b)
    state = SolutionState(alpha, x[:nS], x[nS:nS + nR], x[nS + nR:])
    res = block_residuals(sys, alpha, state.a_S, state.a_R, state.lam, (f_S, f_R, g))
    if not np.all(np.isfinite(x)) or max(res) > tol:
        cond = _condition_estimate(A, lu)
        raise InstabilityError(f"saddle-point solve inaccurate at alpha={alpha} "
                               f"(block residuals {max(res):.2e})", cond)
    return state


def _condition_estimate(A, lu) -> float:
    n = A.shape[0]
    inv = spla.LinearOperator((n, n), matvec=lu.solve, rmatvec=lambda v: lu.solve(v, trans="T"),
                              dtype=float)
    try:
        return float(spla.onenormest(A) * spla.onenormest(inv))
    except Exception:  # noqa: BLE001 - estimate only decorates the error
        return np.inf


@dataclass(frozen=True)
class SchurPrecomputation:
    """Offline data of the interface problem.

    ``X_S = K_S^-1 B_S^T``, ``X_R = K_R^-1 B_R(0)^T``, ``y_S = K_S^-1 j_e``,
    ``y_R = K_R^-1 j_M`` and the small blocks ``G = B X``, ``g = B y``.
    """

    N: int
    X_S: np.ndarray
    X_R: np.ndarray
    y_S: np.ndarray
    y_R: np.ndarray
    G_S: np.ndarray
    G_R: np.ndarray
    g_S: np.ndarray
    g_R: np.ndarray

    def K_int(self, alpha: float) -> np.ndarray:
        R = rotation_blocks(alpha, self.N)
        K = self.G_S + R @ self.G_R @ R.T
        return 0.5 * (K + K.T)

    def f_int(self, alpha: float) -> np.ndarray:
        return self.g_S - rotation_blocks(alpha, self.N) @ self.g_R


def precompute_schur(sys: AssembledSystem) -> SchurPrecomputation:
    """One factorization per subdomain and ``2(2N+1) + 2`` substitutions."""
    lu_S, lu_R = sys.factor("stator"), sys.factor("rotor")
    X_S = lu_S.solve(np.ascontiguousarray(sys.B_S.T))
    X_R = lu_R.solve(np.ascontiguousarray(sys.B_R0.T))
    y_S = lu_S.solve(sys.j_e) if np.any(sys.j_e) else np.zeros_like(sys.j_e)
    y_R = lu_R.solve(sys.j_M) if np.any(sys.j_M) else np.zeros_like(sys.j_M)
    G_S = sys.B_S @ X_S
    G_R = sys.B_R0 @ X_R
    return SchurPrecomputation(
        N=sys.N, X_S=X_S, X_R=X_R, y_S=y_S, y_R=y_R,
        G_S=0.5 * (G_S + G_S.T), G_R=0.5 * (G_R + G_R.T),
        g_S=sys.B_S @ y_S, g_R=sys.B_R0 @ y_R)


def interface_condition(K: np.ndarray) -> float:
    w = np.linalg.eigvalsh(K)
    if w[-1] <= 0:
        return np.inf
    return float(w[-1] / w[0]) if w[0] > 0 else np.inf


def _solve_small(K: np.ndarray, f: np.ndarray, alpha: float) -> np.ndarray:
    w, V = np.linalg.eigh(K)
    cond = float(w[-1] / w[0]) if w[0] > 0 else np.inf
    if not cond <= COND_LIMIT:
        raise InstabilityError(f"interface matrix numerically singular at alpha={alpha}", cond)
    return V @ ((V.T @ f) / w)


def solve_interface(pre: SchurPrecomputation, alpha: float) -> np.ndarray:
    """Multiplier coefficients from ``K_int(alpha) lam = f_int(alpha)``."""
    return _solve_small(pre.K_int(alpha), pre.f_int(alpha), alpha)


def reconstruct(pre: SchurPrecomputation, lam, alpha: float) -> SolutionState:
    lam = np.asarray(lam, dtype=float)
    R = rotation_blocks(alpha, pre.N)
    a_S = pre.y_S - pre.X_S @ lam
    a_R = pre.y_R + pre.X_R @ (R.T @ lam)
    return SolutionState(alpha, a_S, a_R, lam)


def solve_schur(pre: SchurPrecomputation, alpha: float) -> SolutionState:
    return reconstruct(pre, solve_interface(pre, alpha), alpha)
