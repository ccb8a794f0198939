"""Harmonic mortar finite element simulation of rotating electric machines."""
from .machine import MachineConfig, RegionTag, default_config, material_at, rotate_point
from .config import dump_config, load_config
from .mesh import Mesh, InterfaceTrace, build_meshes, extract_trace
from .solver import (AssembledSystem, SchurPrecomputation, SolutionState, InstabilityError,
                     assemble_system, precompute_schur, solve_interface, solve_monolithic,
                     reconstruct, solve_schur)
from .diagnostics import (compute_energy, compute_torque, compute_torque_alt,
                          solve_derivative_system, energy_balance_residual, fourier_analyze,
                          symmetry_report, torque_sweep)

__version__ = "0.1.0"
