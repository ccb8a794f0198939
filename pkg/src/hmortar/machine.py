"""Machine cross-section: configuration, materials and rigid rotation.

The geometry is a simplified surface-magnet machine made of concentric
annular regions.  Rotor (inside the interface circle):

    r_rotor_in .. r_rotor_out - magnet_thickness   rotor iron
    r_rotor_out - magnet_thickness .. r_rotor_out  magnet ring (magnets + air)
    r_rotor_out .. r_gamma                         rotor-side air gap

Stator (outside the interface circle):

    r_gamma .. r_stator_in                         stator-side air gap
    r_stator_in .. r_stator_in + slot_depth        slot ring (slots + teeth)
    r_stator_in + slot_depth .. r_stator_out       stator yoke

Magnet k is centred at rotor angle k*pi/P with sign (-1)**k, slot k is centred
at stator angle 2*pi*k/S.  Both patterns are mirror symmetric about the x-axis.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields

import numpy as np

MU0 = 4e-7 * math.pi


class ConfigError(ValueError):
    """Invalid machine configuration."""


class DomainError(ValueError):
    """Point outside both the rotor and the stator annulus."""


class RegionTag(enum.IntEnum):
    rotor_iron = 0
    magnet_pos = 1
    magnet_neg = 2
    stator_iron = 3
    slot = 4
    air_gap_rotor = 5
    air_gap_stator = 6


ROTOR_TAGS = (RegionTag.rotor_iron, RegionTag.magnet_pos, RegionTag.magnet_neg,
              RegionTag.air_gap_rotor)
STATOR_TAGS = (RegionTag.stator_iron, RegionTag.slot, RegionTag.air_gap_stator)


@dataclass(frozen=True)
class MachineConfig:
    """Geometry, materials, excitation and discretization of one machine.

    Lengths are in metres.  ``current_density`` holds one value (A/m^2) per
    slot; an empty tuple means no excitation.  ``magnetization_divisor``
    selects how the magnetization magnitude is derived from the remanence:
    ``"mu0_mur"`` gives ``B_rem / (mu0 mu_r)`` (linear magnet model),
    ``"mu0"`` gives ``B_rem / mu0``.
    """

    r_rotor_in: float = 0.016
    r_rotor_out: float = 0.044
    r_stator_in: float = 0.045
    r_stator_out: float = 0.0675
    r_gamma: float = 0.0445
    pole_pairs: int = 3
    slots: int = 36
    mu_r_iron: float = 500.0
    mu_r_copper: float = 1.0
    mu_r_magnet: float = 1.05
    b_remanence: float = 0.94
    axial_length: float = 0.1
    multiplier_degree: int = 30
    angular_divisions_rotor: int = 180
    angular_divisions_stator: int = 288
    radial_layers: int = 1
    current_density: tuple[float, ...] = ()
    magnet_thickness: float = 0.004
    slot_depth: float = 0.012
    magnet_coverage: float = 0.8
    slot_coverage: float = 0.5
    magnetization_divisor: str = "mu0_mur"

    def __post_init__(self):
        object.__setattr__(self, "current_density",
                           tuple(float(v) for v in self.current_density))
        self.validate()

    def validate(self) -> None:
        radii = (self.r_rotor_in, self.r_rotor_out, self.r_gamma,
                 self.r_stator_in, self.r_stator_out)
        if not (0 < radii[0] < radii[1] < radii[2] < radii[3] < radii[4]):
            raise ConfigError(
                "radii must satisfy 0 < r_rotor_in < r_rotor_out < r_gamma "
                f"< r_stator_in < r_stator_out, got {radii}")
        for name in ("pole_pairs", "slots", "angular_divisions_rotor",
                     "angular_divisions_stator", "radial_layers"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.multiplier_degree, (int, np.integer)) or self.multiplier_degree < 0:
            raise ConfigError("multiplier_degree must be a non-negative integer, "
                              f"got {self.multiplier_degree!r}")
        for name in ("mu_r_iron", "mu_r_copper", "mu_r_magnet", "axial_length"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.angular_divisions_rotor % (2 * self.pole_pairs):
            raise ConfigError("angular_divisions_rotor must be a multiple of 2*pole_pairs "
                              f"({2 * self.pole_pairs}), got {self.angular_divisions_rotor}")
        if self.angular_divisions_stator % self.slots:
            raise ConfigError("angular_divisions_stator must be a multiple of slots "
                              f"({self.slots}), got {self.angular_divisions_stator}")
        if not 0 < self.magnet_thickness < self.r_rotor_out - self.r_rotor_in:
            raise ConfigError(f"magnet_thickness out of range: {self.magnet_thickness!r}")
        if not 0 < self.slot_depth < self.r_stator_out - self.r_stator_in:
            raise ConfigError(f"slot_depth out of range: {self.slot_depth!r}")
        for name in ("magnet_coverage", "slot_coverage"):
            if not 0 < getattr(self, name) <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {getattr(self, name)!r}")
        if self.current_density and len(self.current_density) != self.slots:
            raise ConfigError(f"current_density needs {self.slots} entries (one per slot), "
                              f"got {len(self.current_density)}")
        if self.magnetization_divisor not in ("mu0_mur", "mu0"):
            raise ConfigError("magnetization_divisor must be 'mu0_mur' or 'mu0', "
                              f"got {self.magnetization_divisor!r}")

    # derived quantities

    @property
    def r_magnet_in(self) -> float:
        return self.r_rotor_out - self.magnet_thickness

    @property
    def r_slot_out(self) -> float:
        return self.r_stator_in + self.slot_depth

    @property
    def nu0(self) -> float:
        return 1.0 / MU0

    @property
    def magnetization(self) -> float:
        """Magnitude of M in A/m."""
        if self.magnetization_divisor == "mu0":
            return self.b_remanence / MU0
        return self.b_remanence / (MU0 * self.mu_r_magnet)

    @property
    def slot_currents(self) -> np.ndarray:
        if not self.current_density:
            return np.zeros(self.slots)
        return np.asarray(self.current_density, dtype=float)

    @property
    def has_excitation(self) -> bool:
        return bool(np.any(self.slot_currents != 0.0))

    def rotor_radii(self) -> list[float]:
        return [self.r_rotor_in, self.r_magnet_in, self.r_rotor_out, self.r_gamma]

    def stator_radii(self) -> list[float]:
        return [self.r_gamma, self.r_stator_in, self.r_slot_out, self.r_stator_out]


FIELD_NAMES = tuple(f.name for f in fields(MachineConfig))


def default_config() -> MachineConfig:
    """Six-pole, 36-slot machine with the reference radii and materials."""
    return MachineConfig()


def sinusoidal_slot_currents(cfg: MachineConfig, amplitude: float,
                             phase: float = 0.0) -> tuple[float, ...]:
    """Slot current pattern ``amplitude * cos(P*theta_k - phase)``.

    The pattern is anti-periodic under one pole pitch, like a balanced
    three-phase winding, so it keeps the half-period symmetry of the rotor.
    """
    theta = 2 * np.pi * np.arange(cfg.slots) / cfg.slots
    return tuple(amplitude * np.cos(cfg.pole_pairs * theta - phase))


def rotate_point(p, alpha: float) -> np.ndarray:
    """Rotate point(s) ``p`` (shape (2,) or (n, 2)) counter-clockwise by ``alpha``."""
    p = np.asarray(p, dtype=float)
    c, s = math.cos(alpha), math.sin(alpha)
    x, y = p[..., 0], p[..., 1]
    return np.stack([c * x - s * y, s * x + c * y], axis=-1)



def region_tags(points, cfg: MachineConfig) -> np.ndarray:
    """Region tag for each point, rotor points given in the rotor frame."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    if np.any((r < cfg.r_rotor_in) | (r > cfg.r_stator_out)):
        bad = pts[(r < cfg.r_rotor_in) | (r > cfg.r_stator_out)][0]
        raise DomainError(f"point {tuple(bad)} lies outside rotor and stator annuli")

    tags = np.full(len(pts), -1, dtype=int)
    rotor = r <= cfg.r_gamma
    tags[rotor & (r < cfg.r_magnet_in)] = RegionTag.rotor_iron
    tags[rotor & (r > cfg.r_rotor_out)] = RegionTag.air_gap_rotor

    ring = rotor & (r >= cfg.r_magnet_in) & (r <= cfg.r_rotor_out)
    pole_pitch = np.pi / cfg.pole_pairs
    k = np.round(theta / pole_pitch)
    in_magnet = np.abs(theta - k * pole_pitch) < 0.5 * cfg.magnet_coverage * pole_pitch
    tags[ring & ~in_magnet] = RegionTag.air_gap_rotor
    tags[ring & in_magnet & (k % 2 == 0)] = RegionTag.magnet_pos
    tags[ring & in_magnet & (k % 2 != 0)] = RegionTag.magnet_neg

    stator = ~rotor
    tags[stator & (r < cfg.r_stator_in)] = RegionTag.air_gap_stator
    tags[stator & (r > cfg.r_slot_out)] = RegionTag.stator_iron
    band = stator & (r >= cfg.r_stator_in) & (r <= cfg.r_slot_out)
    slot_pitch = 2 * np.pi / cfg.slots
    ks = np.round(theta / slot_pitch)
    in_slot = np.abs(theta - ks * slot_pitch) < 0.5 * cfg.slot_coverage * slot_pitch
    tags[band & in_slot] = RegionTag.slot
    tags[band & ~in_slot] = RegionTag.stator_iron
    return tags


def material_fields(points, cfg: MachineConfig, tags=None):
    """Vectorised ``material_at``: returns ``(nu, M_perp, j)`` arrays."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if tags is None:
        tags = region_tags(pts, cfg)
    tags = np.asarray(tags)
    nu0 = cfg.nu0
    nu_by_tag = np.array([
        nu0 / cfg.mu_r_iron,    # rotor_iron
        nu0 / cfg.mu_r_magnet,  # magnet_pos
        nu0 / cfg.mu_r_magnet,  # magnet_neg
        nu0 / cfg.mu_r_iron,    # stator_iron
        nu0 / cfg.mu_r_copper,  # slot
        nu0,                    # air_gap_rotor
        nu0,                    # air_gap_stator
    ])
    nu = nu_by_tag[tags]

    theta = np.arctan2(pts[:, 1], pts[:, 0])
    sign = np.where(tags == RegionTag.magnet_pos, 1.0,
                    np.where(tags == RegionTag.magnet_neg, -1.0, 0.0))
    m = cfg.magnetization * sign[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    m_perp = np.column_stack([m[:, 1], -m[:, 0]])

    j = np.zeros(len(pts))
    slot_mask = tags == RegionTag.slot
    if np.any(slot_mask):
        pitch = 2 * np.pi / cfg.slots
        k = np.round(theta[slot_mask] / pitch).astype(int) % cfg.slots
        j[slot_mask] = cfg.slot_currents[k]
    return nu, m_perp, j


def material_at(p, cfg: MachineConfig):
    """Reluctivity (m/H), rotated magnetization ``(m_y, -m_x)`` (A/m) and
    current density (A/m^2) at a single point.

    Rotor points are expected in rotor coordinates.
    """
    nu, m_perp, j = material_fields(np.asarray(p, dtype=float)[None, :], cfg)
    return float(nu[0]), m_perp[0], float(j[0])
