"""Harmonic mortar coupling: trigonometric multipliers on the interface circle.

Multiplier coefficients are ordered ``[const, cos1, sin1, ..., cosN, sinN]``
and the constant basis function is 1.  The reported convention
``c0/2 + sum c_n cos + d_n sin`` is obtained with :func:`to_fourier`.
"""
from __future__ import annotations

import math

import numpy as np

from .mesh import InterfaceTrace, MeshError


def n_modes(N: int) -> int:
    return 2 * N + 1


def mode_orders(N: int) -> np.ndarray:
    """Harmonic order of each multiplier dof."""
    return np.concatenate([[0], np.repeat(np.arange(1, N + 1), 2)])


def basis_values(theta, N: int) -> np.ndarray:
    """Multiplier basis evaluated at ``theta``; shape ``(2N+1, len(theta))``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    n = np.arange(1, N + 1)[:, None]
    out = np.empty((2 * N + 1, len(theta)))
    out[0] = 1.0
    out[1::2] = np.cos(n * theta)
    out[2::2] = np.sin(n * theta)
    return out


def to_fourier(coeffs) -> np.ndarray:
    """Internal coefficients -> ``(c0, c1, d1, ...)`` with the ``c0/2`` convention."""
    out = np.array(coeffs, dtype=float)
    out[0] *= 2.0
    return out


def from_fourier(coeffs) -> np.ndarray:
    out = np.array(coeffs, dtype=float)
    out[0] *= 0.5
    return out


def eval_multiplier(coeffs, theta):
    """Evaluate ``c0/2 + sum_n c_n cos(n theta) + d_n sin(n theta)``.

    ``coeffs`` is ``(c0, c1, d1, ..., cN, dN)``.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if len(coeffs) % 2 != 1:
        raise ValueError(f"coefficient vector must have odd length 2N+1, got {len(coeffs)}")
    N = len(coeffs) // 2
    vals = from_fourier(coeffs) @ basis_values(theta, N)
    return vals[0] if np.ndim(theta) == 0 else vals


def _panel_moments(n: int, h: float):
    """Integrals over [0, h] of ``(t/h) cos(nt)``, ``(t/h) sin(nt)``, ``cos(nt)``, ``sin(nt)``."""
    if n == 0:
        return 0.5 * h, 0.0, h, 0.0
    x = n * h
    s, c = math.sin(x), math.cos(x)
    one_minus_c = 2.0 * math.sin(0.5 * x) ** 2
    if abs(x) < 1e-3:
        # series avoids cancellation in the t-weighted moments
        x2 = x * x
        tc = h * (0.5 - x2 / 8 + x2 * x2 / 144 - x2 ** 3 / 5760)
        ts = h * x * (1 / 3 - x2 / 30 + x2 * x2 / 840)
    else:
        tc = (x * s - one_minus_c) / (n * x)
        ts = (s - x * c) / (n * x)
    return tc, ts, s / n, one_minus_c / n


def assemble_coupling(trace: InterfaceTrace, N: int, r_gamma: float) -> np.ndarray:
    """Coupling matrix ``r * int psi_mode(theta) hat_j(theta) dtheta``.

    Columns follow the trace order.  ``hat_j`` is the piecewise linear (in
    theta) nodal function; the panel from the last node to the first one
    wraps through 2 pi.
    """
    angles = np.asarray(trace.angles, dtype=float)
    K = len(angles)
    if K < 3:
        raise MeshError(f"coupling needs at least 3 trace nodes, got {K}")
    if N < 0:
        raise ValueError(f"multiplier degree must be non-negative, got {N}")
    starts = angles
    ends = np.roll(angles, -1)
    ends[-1] += 2 * np.pi
    B = np.zeros((2 * N + 1, K))
    for k in range(K):
        t0, h = starts[k], ends[k] - starts[k]
        if h < 1e-14:
            continue
        left, right = k, (k + 1) % K
        # hat of `right` rises as t/h, hat of `left` falls as 1 - t/h
        B[0, right] += r_gamma * 0.5 * h
        B[0, left] += r_gamma * 0.5 * h
        for n in range(1, N + 1):
            tc, ts, c_int, s_int = _panel_moments(n, h)
            cn, sn = math.cos(n * t0), math.sin(n * t0)
            # cos(n(t0+t)) = cn cos(nt) - sn sin(nt); sin(n(t0+t)) = sn cos(nt) + cn sin(nt)
            cos_r = cn * tc - sn * ts
            sin_r = sn * tc + cn * ts
            cos_full = cn * c_int - sn * s_int
            sin_full = sn * c_int + cn * s_int
            B[2 * n - 1, right] += r_gamma * cos_r
            B[2 * n, right] += r_gamma * sin_r
            B[2 * n - 1, left] += r_gamma * (cos_full - cos_r)
            B[2 * n, left] += r_gamma * (sin_full - sin_r)
    return B


def rotation_blocks(alpha: float, N: int) -> np.ndarray:
    """Block-diagonal ``R(alpha)`` with ``B(alpha) = R(alpha) B(0)``."""
    R = np.zeros((2 * N + 1, 2 * N + 1))
    R[0, 0] = 1.0
    for n in range(1, N + 1):
        c, s = math.cos(n * alpha), math.sin(n * alpha)
        i = 2 * n - 1
        R[i:i + 2, i:i + 2] = ((c, -s), (s, c))
    return R


def rotation_derivative(alpha: float, N: int) -> np.ndarray:
    """``dR/dalpha``; the block for order n is ``n [[-sin, -cos], [cos, -sin]]``."""
    D = np.zeros((2 * N + 1, 2 * N + 1))
    for n in range(1, N + 1):
        c, s = math.cos(n * alpha), math.sin(n * alpha)
        i = 2 * n - 1
        D[i:i + 2, i:i + 2] = ((-n * s, -n * c), (n * c, -n * s))
    return D


def mode_derivative(N: int) -> np.ndarray:
    """Coefficient map of ``d/dtheta`` on the multiplier space."""
    D = np.zeros((2 * N + 1, 2 * N + 1))
    for n in range(1, N + 1):
        i = 2 * n - 1
        D[i, i + 1] = n
        D[i + 1, i] = -n
    return D


def rotated_trace(trace: InterfaceTrace, alpha: float) -> InterfaceTrace:
    """Trace with every node moved by ``alpha``, re-sorted into [0, 2 pi)."""
    angles = np.mod(trace.angles + alpha, 2 * np.pi)
    angles[angles >= 2 * np.pi] = 0.0
    order = np.argsort(angles, kind="stable")
    return InterfaceTrace(angles=angles[order], node_ids=np.asarray(trace.node_ids)[order],
                          side=trace.side)


def coupling_by_node(trace: InterfaceTrace, B: np.ndarray, n_nodes: int) -> np.ndarray:
    """Scatter trace-ordered columns into a node-indexed dense matrix."""
    out = np.zeros((B.shape[0], n_nodes))
    out[:, trace.node_ids] = B
    return out
