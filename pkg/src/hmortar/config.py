"""TOML machine configuration files.

Keys are the :class:`MachineConfig` field names.  They may sit at the top
level or inside the sections ``[geometry]``, ``[materials]``,
``[discretization]`` and ``[excitation]``.  Missing keys take the default
machine's value; unknown keys and sections are errors.
"""
from __future__ import annotations

from dataclasses import asdict, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .machine import FIELD_NAMES, ConfigError, MachineConfig, default_config

SECTIONS = {
    "geometry": ("r_rotor_in", "r_rotor_out", "r_stator_in", "r_stator_out", "r_gamma",
                 "pole_pairs", "slots", "axial_length", "magnet_thickness", "slot_depth",
                 "magnet_coverage", "slot_coverage"),
    "materials": ("mu_r_iron", "mu_r_copper", "mu_r_magnet", "b_remanence",
                  "magnetization_divisor"),
    "discretization": ("multiplier_degree", "angular_divisions_rotor",
                       "angular_divisions_stator", "radial_layers"),
    "excitation": ("current_density",),
}
_INT_FIELDS = {"pole_pairs", "slots", "multiplier_degree", "angular_divisions_rotor",
               "angular_divisions_stator", "radial_layers"}


def config_from_dict(data: dict, base: MachineConfig | None = None) -> MachineConfig:
    values: dict = {}

    def put(key, value, where):
        if key not in FIELD_NAMES:
            raise ConfigError(f"unknown key {where}{key!r}")
        if key in values:
            raise ConfigError(f"key {key!r} given more than once")
        if key in _INT_FIELDS and not (isinstance(value, int) and not isinstance(value, bool)):
            raise ConfigError(f"key {key!r} must be an integer, got {value!r}")
        values[key] = value

    for key, value in data.items():
        if isinstance(value, dict):
            if key not in SECTIONS:
                raise ConfigError(f"unknown section [{key}]")
            for sub, v in value.items():
                if sub not in SECTIONS[key]:
                    if sub in FIELD_NAMES:
                        raise ConfigError(f"key {sub!r} does not belong in section [{key}]")
                    raise ConfigError(f"unknown key {sub!r} in section [{key}]")
                put(sub, v, f"[{key}].")
        else:
            put(key, value, "")
    if "current_density" in values:
        values["current_density"] = tuple(values["current_density"])
    try:
        return replace(base or default_config(), **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> MachineConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(data)


def dump_config(cfg: MachineConfig) -> str:
    """TOML text that :func:`load_config` reads back to ``cfg``."""
    d = asdict(cfg)
    lines = []
    for section, keys in SECTIONS.items():
        lines.append(f"[{section}]")
        for key in keys:
            v = d[key]
            if isinstance(v, str):
                lines.append(f'{key} = "{v}"')
            elif isinstance(v, tuple):
                lines.append(f"{key} = [{', '.join(repr(float(x)) for x in v)}]")
            else:
                lines.append(f"{key} = {v!r}")
        lines.append("")
    return "\n".join(lines)
