"""Structured polar-grid triangulations of the rotor and stator annuli."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .machine import MachineConfig, region_tags


class MeshError(ValueError):
    """Configuration or structural problem with a mesh."""


class StabilityWarning(UserWarning):
    """Multiplier degree too high for the interface resolution."""


@dataclass(frozen=True)
class Mesh:
    """Triangulated annulus.

    ``interface_nodes`` are sorted by increasing angle in [0, 2 pi) and lie on
    the interface circle.  ``dirichlet_nodes`` is the outer stator boundary or
    the inner rotor boundary.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    tags: np.ndarray
    dirichlet_nodes: np.ndarray
    interface_nodes: np.ndarray
    side: str
    radii: np.ndarray
    n_theta: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def min_angles(self) -> np.ndarray:
        """Smallest interior angle (degrees) of each triangle."""
        p = self.nodes[self.triangles]
        out = np.full(len(p), np.inf)
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cos = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            out = np.minimum(out, np.degrees(np.arccos(np.clip(cos, -1, 1))))
        return out

    def free_nodes(self) -> np.ndarray:
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[self.dirichlet_nodes] = False
        return np.flatnonzero(mask)

    def dof_map(self) -> np.ndarray:
        """Node index -> reduced dof index, -1 for Dirichlet nodes."""
        dof = np.full(self.n_nodes, -1, dtype=int)
        free = self.free_nodes()
        dof[free] = np.arange(len(free))
        return dof

    def permuted(self, perm) -> "Mesh":
        """Same mesh with node ``perm[i]`` renamed to ``i``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return Mesh(nodes=self.nodes[perm], triangles=inv[self.triangles], tags=self.tags,
                    dirichlet_nodes=np.sort(inv[self.dirichlet_nodes]),
                    interface_nodes=inv[self.interface_nodes], side=self.side,
                    radii=self.radii, n_theta=self.n_theta)


@dataclass(frozen=True)
class InterfaceTrace:
    """Interface nodes of one side, ordered by angle."""

    angles: np.ndarray
    node_ids: np.ndarray
    side: str

    def __len__(self) -> int:
        return len(self.angles)


def region_layers(r0: float, r1: float, n_theta: int, min_layers: int) -> int:
    """Layers needed for roughly square cells between radii ``r0`` and ``r1``."""
    return max(min_layers, math.ceil(math.log(r1 / r0) * n_theta / (2 * math.pi) - 1e-9))


def layer_radii(breaks, n_theta: int, min_layers: int) -> np.ndarray:
    """Ring radii with one ring exactly at every material radius.

    Rings inside a region are spaced geometrically so that cells keep the
    same aspect ratio from the inner to the outer edge.
    """
    radii = [breaks[0]]
    for r0, r1 in zip(breaks[:-1], breaks[1:]):
        n = region_layers(r0, r1, n_theta, min_layers)
        radii.extend(r0 * (r1 / r0) ** (np.arange(1, n + 1) / n))
        radii[-1] = r1
    return np.asarray(radii)


def annulus_mesh(radii, n_theta: int):
    """Nodes and triangles of a polar grid.

    Node ``i * n_theta + k`` sits at radius ``radii[i]`` and angle
    ``2 pi k / n_theta``.  Each cell is split along a diagonal whose direction
    alternates with the angular index, which keeps the mesh mirror symmetric
    about the x-axis (``n_theta`` must be even).
    """
    if n_theta % 2:
        raise MeshError(f"angular divisions must be even, got {n_theta}")
    radii = np.asarray(radii, dtype=float)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    nodes = np.column_stack([
        np.outer(radii, np.cos(theta)).ravel(),
        np.outer(radii, np.sin(theta)).ravel(),
    ])

    i, k = np.meshgrid(np.arange(len(radii) - 1), np.arange(n_theta), indexing="ij")
    i, k = i.ravel(), k.ravel()
    kn = (k + 1) % n_theta
    a = i * n_theta + k          # inner, left
    b = i * n_theta + kn         # inner, right
    c = (i + 1) * n_theta + kn   # outer, right
    d = (i + 1) * n_theta + k    # outer, left
    even = k % 2 == 0
    t1 = np.where(even[:, None], np.column_stack([a, b, c]), np.column_stack([a, b, d]))
    t2 = np.where(even[:, None], np.column_stack([a, c, d]), np.column_stack([b, c, d]))
    triangles = np.empty((2 * len(a), 3), dtype=int)
    triangles[0::2] = t1
    triangles[1::2] = t2
    p = nodes[triangles]
    area2 = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
             - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    flip = area2 < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return nodes, triangles


def closed_form_counts(n_layers: int, n_theta: int) -> tuple[int, int]:
    """(nodes, triangles) of a polar grid with ``n_layers`` radial layers."""
    return (n_layers + 1) * n_theta, 2 * n_layers * n_theta


def _side_mesh(cfg: MachineConfig, side: str) -> Mesh:
    if side == "rotor":
        breaks, n_theta = cfg.rotor_radii(), cfg.angular_divisions_rotor
    else:
        breaks, n_theta = cfg.stator_radii(), cfg.angular_divisions_stator
    radii = layer_radii(breaks, n_theta, cfg.radial_layers)
    nodes, triangles = annulus_mesh(radii, n_theta)
    centroids = nodes[triangles].mean(axis=1)
    tags = region_tags(centroids, cfg)
    inner = np.arange(n_theta)
    outer = (len(radii) - 1) * n_theta + np.arange(n_theta)
    if side == "rotor":
        dirichlet, interface = inner, outer
    else:
        dirichlet, interface = outer, inner
    return Mesh(nodes=nodes, triangles=triangles, tags=tags, dirichlet_nodes=dirichlet,
                interface_nodes=interface, side=side, radii=radii, n_theta=n_theta)


def build_meshes(cfg: MachineConfig) -> tuple[Mesh, Mesh]:
    """Independent (nonconforming) rotor and stator meshes."""
    for name, n, sym in (("angular_divisions_rotor", cfg.angular_divisions_rotor, 2 * cfg.pole_pairs),
                         ("angular_divisions_stator", cfg.angular_divisions_stator, cfg.slots)):
        if n % sym:
            raise MeshError(f"{name}={n} is not a multiple of the symmetry count {sym}")
        if n % 2:
            raise MeshError(f"{name}={n} must be even")
    check_multiplier_degree(cfg.multiplier_degree,
                            min(cfg.angular_divisions_rotor, cfg.angular_divisions_stator))
    return _side_mesh(cfg, "rotor"), _side_mesh(cfg, "stator")


def check_multiplier_degree(degree: int, trace_nodes: int) -> bool:
    """Warn if 2N+1 exceeds the smaller interface node count."""
    if 2 * degree + 1 > trace_nodes:
        warnings.warn(f"2N+1 = {2 * degree + 1} exceeds the interface node count {trace_nodes}; "
                      "the interface problem may be unstable", StabilityWarning, stacklevel=3)
        return False
    return True


def extract_trace(m: Mesh, rtol: float = 1e-12) -> InterfaceTrace:
    ids = np.asarray(m.interface_nodes)
    if len(ids) < 3:
        raise MeshError(f"interface needs at least 3 nodes, got {len(ids)}")
    p = m.nodes[ids]
    r = np.hypot(p[:, 0], p[:, 1])
    if np.ptp(r) > rtol * r.max():
        raise MeshError(f"interface nodes are not on a circle (radius spread {np.ptp(r):.3e})")
    angles = np.mod(np.arctan2(p[:, 1], p[:, 0]), 2 * np.pi)
    angles[angles >= 2 * np.pi] = 0.0
    order = np.argsort(angles, kind="stable")
    angles, ids = angles[order], ids[order]
    if np.any(np.diff(angles) <= 0):
        raise MeshError("duplicate interface node angles")
    return InterfaceTrace(angles=angles, node_ids=ids, side=m.side)


def write_vtk(path, mesh: Mesh, point_data: dict | None = None,
              cell_data: dict | None = None, alpha: float = 0.0) -> None:
    """Legacy ASCII VTK unstructured grid; region tags are always written."""
    nodes = mesh.nodes
    if alpha:
        c, s = math.cos(alpha), math.sin(alpha)
        nodes = nodes @ np.array([[c, s], [-s, c]])
    cells = dict(region=mesh.tags)
    cells.update(cell_data or {})
    lines = ["# vtk DataFile Version 3.0", f"{mesh.side} mesh", "ASCII",
             "DATASET UNSTRUCTURED_GRID", f"POINTS {len(nodes)} double"]
    lines += [f"{x:.17g} {y:.17g} 0" for x, y in nodes]
    nt = len(mesh.triangles)
    lines.append(f"CELLS {nt} {4 * nt}")
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    lines.append(f"CELL_TYPES {nt}")
    lines += ["5"] * nt
    lines.append(f"CELL_DATA {nt}")
    for name, values in cells.items():
        values = np.asarray(values)
        kind = "int" if values.dtype.kind in "iu" else "double"
        lines += [f"SCALARS {name} {kind} 1", "LOOKUP_TABLE default"]
        lines += [f"{v:.17g}" if kind == "double" else str(int(v)) for v in values]
    if point_data:
        lines.append(f"POINT_DATA {len(nodes)}")
        for name, values in point_data.items():
            lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
            lines += [f"{v:.17g}" for v in np.asarray(values, dtype=float)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
