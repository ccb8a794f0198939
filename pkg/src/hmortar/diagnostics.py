"""Energy, torque, derivative system, energy balance and Fourier analysis.

Torque is positive counter-clockwise (right-handed z-axis) and is the
algebraic expression ``lam^T R'(alpha) B_R(0) a_R`` scaled by the axial
length.  With it, ``dE/dalpha = j_e^T a_S' - T/L`` holds exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .machine import MachineConfig
from .mortar import mode_derivative, rotation_blocks, rotation_derivative
from .solver import (AssembledSystem, InstabilityError, SchurPrecomputation, SolutionState,
                     _solve_small, solve_schur)


def compute_energy(sys: AssembledSystem, state: SolutionState) -> float:
    """Magnetic energy per unit axial length (J/m)."""
    a_S, a_R = state.a_S, state.a_R
    return float(0.5 * a_S @ (sys.K_S @ a_S) + 0.5 * a_R @ (sys.K_R @ a_R) - sys.j_M @ a_R)


def torque_per_length(sys: AssembledSystem, state: SolutionState) -> float:
    Bp = rotation_derivative(state.alpha, sys.N) @ sys.B_R0
    return float(state.lam @ (Bp @ state.a_R))


def compute_torque(sys: AssembledSystem, state: SolutionState) -> float:
    """Torque in N m: ``L * lam^T B_R'(alpha) a_R``."""
    return sys.cfg.axial_length * torque_per_length(sys, state)


def compute_torque_alt(sys: AssembledSystem, state: SolutionState) -> float:
    """Torque from the theta-derivative of the multiplier.

    ``<d lam/d theta, a_R o rho_-alpha>`` after integrating by parts along the
    interface; algebraically ``(D lam)^T B_R(alpha) a_R``.
    """
    dlam = mode_derivative(sys.N) @ state.lam
    return sys.cfg.axial_length * float(dlam @ (sys.B_R(state.alpha) @ state.a_R))


@dataclass(frozen=True)
class DerivativeState:
    alpha: float
    a_S: np.ndarray
    a_R: np.ndarray
    lam: np.ndarray


def solve_derivative_system(sys: AssembledSystem, pre: SchurPrecomputation,
                            state: SolutionState) -> DerivativeState:
    """alpha-derivatives of the solution, reusing the Schur factorizations.

    Differentiating the saddle-point system gives the same matrix with
    right-hand sides ``(0, B_R'^T lam, B_R' a_R)``.
    """
    alpha, N = state.alpha, sys.N
    R = rotation_blocks(alpha, N)
    Rp = rotation_derivative(alpha, N)
    # K_R^-1 B_R'^T lam = X_R R'^T lam
    w = pre.X_R @ (Rp.T @ state.lam)
    rhs = -(Rp @ (sys.B_R0 @ state.a_R)) - R @ (pre.G_R @ (Rp.T @ state.lam))
    dlam = _solve_small(pre.K_int(alpha), rhs, alpha)
    da_S = -pre.X_S @ dlam
    da_R = pre.X_R @ (R.T @ dlam) + w
    return DerivativeState(alpha, da_S, da_R, dlam)


def energy_balance_terms(sys: AssembledSystem, state: SolutionState, dstate: DerivativeState):
    """(dE/dalpha, electric power, torque per length) at the state's angle."""
    dE = float(state.a_S @ (sys.K_S @ dstate.a_S) + state.a_R @ (sys.K_R @ dstate.a_R)
               - sys.j_M @ dstate.a_R)
    power = float(sys.j_e @ dstate.a_S)
    return dE, power, torque_per_length(sys, state)


def energy_balance_residual(sys: AssembledSystem, state: SolutionState,
                            dstate: DerivativeState) -> float:
    """``|dE/dalpha - (j_e^T a_S' - T)|`` per unit length; zero up to round-off."""
    dE, power, torque = energy_balance_terms(sys, state, dstate)
    return abs(dE - (power - torque))


@dataclass(frozen=True)
class FourierCoefficients:
    """``f(alpha) ~ c[0]/2 + sum_m c[m] cos(m alpha) + d[m] sin(m alpha)``.

    ``orders[i]`` is the mechanical harmonic order of entry i.
    """

    orders: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def amplitude(self) -> np.ndarray:
        return np.hypot(self.c, self.d)

    def evaluate(self, alpha) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        m = self.orders[:, None]
        terms = self.c[:, None] * np.cos(m * alpha) + self.d[:, None] * np.sin(m * alpha)
        terms[self.orders == 0] *= 0.5
        return terms.sum(axis=0)


def fourier_analyze(alphas, values, period: float = 2 * np.pi, rtol: float = 1e-9,
                    max_order: int | None = None) -> FourierCoefficients:
    """Fourier coefficients of samples on a uniform grid over one period.

    The grid must be ``alpha_0 + k * period / K`` for k = 0..K-1.  Harmonic k
    of the period corresponds to mechanical order ``k * 2 pi / period``.
    """
    alphas = np.asarray(alphas, dtype=float)
    values = np.asarray(values, dtype=float)
    K = len(values)
    if len(alphas) != K or K < 1:
        raise ValueError("alphas and values must have the same nonzero length")
    step = period / K
    if K > 1 and np.max(np.abs(np.diff(alphas) - step)) > rtol * period:
        raise ValueError("samples are not on a uniform grid covering one period")
    spec = np.fft.rfft(values) / K
    # shift the phase to the actual grid origin
    k = np.arange(len(spec))
    spec = spec * np.exp(-2j * np.pi * k * alphas[0] / period)
    c = 2 * spec.real
    d = -2 * spec.imag
    if K % 2 == 0:
        c[-1] *= 0.5
        d[-1] = 0.0
    per_turn = 2 * np.pi / period
    if abs(per_turn - round(per_turn)) < 1e-9:
        orders = k * int(round(per_turn))
    else:
        orders = k * per_turn
    if max_order is not None:
        keep = orders <= max_order
        orders, c, d = orders[keep], c[keep], d[keep]
    return FourierCoefficients(orders=np.asarray(orders), c=c, d=d)


@dataclass
class TorqueCurve:
    alphas: np.ndarray
    torques: np.ndarray
    fourier: FourierCoefficients | None = None
    failures: dict = field(default_factory=dict)


def torque_sweep(sys: AssembledSystem, pre: SchurPrecomputation, alphas,
                 workers: int = 1) -> TorqueCurve:
    """Online torque evaluations; unstable angles are recorded as NaN."""
    alphas = np.asarray(alphas, dtype=float)
    failures = {}

    def one(a):
        try:
            return compute_torque(sys, solve_schur(pre, a)), None
        except InstabilityError as exc:
            return math.nan, str(exc)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(one, alphas))
    else:
        results = [one(a) for a in alphas]
    torques = np.array([t for t, _ in results])
    for a, (_, err) in zip(alphas, results):
        if err:
            failures[float(a)] = err
    return TorqueCurve(alphas=alphas, torques=torques, failures=failures)


def cogging_order(cfg: MachineConfig) -> int:
    """Torque periods per revolution: lcm(2P, S)."""
    return math.lcm(2 * cfg.pole_pairs, cfg.slots)


def relevant_multiplier_orders(cfg: MachineConfig, N: int) -> np.ndarray:
    """Orders allowed by the machine symmetry for the multiplier.

    With S a multiple of 2P and anti-periodic currents the field is
    anti-periodic over one pole pitch: only odd multiples of P survive.
    """
    P, S = cfg.pole_pairs, cfg.slots
    n = np.arange(N + 1)
    if S % (2 * P) == 0:
        return n[(n % P == 0) & ((n // P) % 2 == 1)]
    g = math.gcd(P, S)
    return n[n % g == 0]


@dataclass(frozen=True)
class SymmetryReport:
    kind: str
    relevant_orders: list
    relevant_amplitudes: list
    irrelevant_sum: float
    max_relevant: float
    cos_sum: float | None = None

    @property
    def ratio(self) -> float:
        worst = self.irrelevant_sum if self.cos_sum is None else max(self.irrelevant_sum, self.cos_sum)
        return worst / self.max_relevant if self.max_relevant > 0 else math.inf

    def as_dict(self) -> dict:
        out = dict(kind=self.kind, relevant_orders=[int(o) for o in self.relevant_orders],
                   relevant_amplitudes=[float(a) for a in self.relevant_amplitudes],
                   irrelevant_sum=float(self.irrelevant_sum), max_relevant=float(self.max_relevant),
                   ratio=float(self.ratio))
        if self.cos_sum is not None:
            out["cos_sum"] = float(self.cos_sum)
        return out


def multiplier_symmetry_report(lam, cfg: MachineConfig) -> SymmetryReport:
    """Split multiplier amplitudes ``C_n = sqrt(c_n^2 + d_n^2)`` by symmetry."""
    lam = np.asarray(lam, dtype=float)
    N = len(lam) // 2
    amp = np.concatenate([[abs(2 * lam[0])], np.hypot(lam[1::2], lam[2::2])])
    rel = relevant_multiplier_orders(cfg, N)
    mask = np.zeros(N + 1, dtype=bool)
    mask[rel] = True
    return SymmetryReport(kind="multiplier", relevant_orders=list(rel),
                          relevant_amplitudes=list(amp[mask]),
                          irrelevant_sum=float(amp[~mask].sum()),
                          max_relevant=float(amp[mask].max()) if mask.any() else 0.0)


def torque_symmetry_report(coeffs: FourierCoefficients, cfg: MachineConfig) -> SymmetryReport:
    """Torque modes: only sine terms at multiples of the cogging order are relevant."""
    order = cogging_order(cfg)
    orders = np.asarray(coeffs.orders)
    rel = (orders > 0) & (np.mod(orders, order) == 0)
    return SymmetryReport(kind="torque", relevant_orders=list(orders[rel]),
                          relevant_amplitudes=list(np.abs(coeffs.d[rel])),
                          irrelevant_sum=float(np.abs(coeffs.d[~rel]).sum()),
                          max_relevant=float(np.abs(coeffs.d[rel]).max()) if rel.any() else 0.0,
                          cos_sum=float(np.abs(coeffs.c).sum()))


def symmetry_report(data, cfg: MachineConfig) -> SymmetryReport:
    """Dispatch on multiplier coefficients or torque Fourier coefficients."""
    if isinstance(data, FourierCoefficients):
        return torque_symmetry_report(data, cfg)
    if isinstance(data, TorqueCurve):
        if data.fourier is None:
            raise ValueError("torque curve has no Fourier coefficients")
        return torque_symmetry_report(data.fourier, cfg)
    return multiplier_symmetry_report(data, cfg)
