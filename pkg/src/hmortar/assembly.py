"""P1 finite element stiffness matrices and load vectors on one subdomain.

All element integrals are exact: gradients of linear basis functions are
constant per triangle and materials are piecewise constant.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .machine import MachineConfig, material_fields
from .mesh import Mesh


class AssemblyError(ValueError):
    """Degenerate element or inconsistent input."""


def p1_gradients(nodes, triangles, min_area: float = 0.0):
    """Areas ``(m,)`` and basis gradients ``(m, 3, 2)`` of P1 triangles."""
    p = np.asarray(nodes, dtype=float)[np.asarray(triangles)]
    x, y = p[..., 0], p[..., 1]
    # gradient of the basis function of vertex i is perp(x_{i+2} - x_{i+1}) / (2A)
    dx = np.roll(x, -2, axis=1) - np.roll(x, -1, axis=1)
    dy = np.roll(y, -2, axis=1) - np.roll(y, -1, axis=1)
    area2 = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    scale = np.abs(area2).max() if len(area2) else 1.0
    bad = np.flatnonzero(np.abs(area2) <= max(min_area, 1e-14 * scale))
    if len(bad):
        i = bad[0]
        raise AssemblyError(f"degenerate triangle {i} with vertices {np.asarray(triangles)[i].tolist()}")
    grads = np.stack([-dy, dx], axis=-1) / area2[:, None, None]
    return 0.5 * np.abs(area2), grads


def element_stiffness(xy, nu: float = 1.0) -> np.ndarray:
    """Local 3x3 stiffness matrix ``nu * area * G G^T`` of one triangle."""
    area, grads = p1_gradients(np.asarray(xy, dtype=float), np.array([[0, 1, 2]]))
    return nu * area[0] * grads[0] @ grads[0].T


def triangle_materials(m: Mesh, cfg: MachineConfig):
    """Per-triangle ``(nu, M_perp, j)`` from the region tags."""
    return material_fields(m.centroids, cfg, tags=m.tags)


def _reduce_matrix(K, m: Mesh, reduced: bool):
    if not reduced:
        return K
    free = m.free_nodes()
    return K[free][:, free]


def _reduce_vector(f, m: Mesh, reduced: bool):
    return f[m.free_nodes()] if reduced else f


def assemble_stiffness(m: Mesh, cfg: MachineConfig | None = None, *, nu=None,
                       reduced: bool = True) -> sp.csc_matrix:
    """Stiffness matrix of ``(nu grad a, grad v)``.

    With ``reduced`` the rows and columns of Dirichlet nodes are removed,
    leaving a symmetric positive definite matrix over the free nodes.
    """
    if nu is None:
        nu, _, _ = triangle_materials(m, cfg)
    nu = np.broadcast_to(np.asarray(nu, dtype=float), (len(m.triangles),))
    area, grads = p1_gradients(m.nodes, m.triangles)
    local = (nu * area)[:, None, None] * np.einsum("tik,tjk->tij", grads, grads)
    rows = np.repeat(m.triangles, 3, axis=1).ravel()
    cols = np.tile(m.triangles, (1, 3)).ravel()
    K = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(m.n_nodes, m.n_nodes)).tocsc()
    K.sum_duplicates()
    K = _reduce_matrix(K, m, reduced).tocsc()
    K.eliminate_zeros()
    return K


def assemble_current_load(m: Mesh, cfg: MachineConfig | None = None, *, j=None,
                          reduced: bool = True) -> np.ndarray:
    """Load vector of ``(j, v)``: each vertex gets ``j * area / 3``."""
    if j is None:
        _, _, j = triangle_materials(m, cfg)
    j = np.broadcast_to(np.asarray(j, dtype=float), (len(m.triangles),))
    area, _ = p1_gradients(m.nodes, m.triangles)
    f = np.zeros(m.n_nodes)
    np.add.at(f, m.triangles, np.repeat((j * area / 3.0)[:, None], 3, axis=1))
    return _reduce_vector(f, m, reduced)


def assemble_magnet_load(m: Mesh, cfg: MachineConfig | None = None, *, m_perp=None,
                         reduced: bool = True) -> np.ndarray:
    """Load vector of ``(-M_perp, grad v)``."""
    if m_perp is None:
        _, m_perp, _ = triangle_materials(m, cfg)
    m_perp = np.broadcast_to(np.asarray(m_perp, dtype=float), (len(m.triangles), 2))
    area, grads = p1_gradients(m.nodes, m.triangles)
    local = -area[:, None] * np.einsum("tik,tk->ti", grads, m_perp)
    f = np.zeros(m.n_nodes)
    np.add.at(f, m.triangles, local)
    return _reduce_vector(f, m, reduced)


def expand(values, m: Mesh) -> np.ndarray:
    """Reduced (free-node) vector -> full nodal vector with zero Dirichlet values."""
    out = np.zeros(m.n_nodes)
    out[m.free_nodes()] = values
    return out
