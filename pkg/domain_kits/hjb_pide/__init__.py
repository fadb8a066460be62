# HJB PIDE Domain Kit
# Explicit monotone grid scheme for the obstacle and penalized HJB
# equations with exact atomic quadrature of the jump operators

from .grid import SpaceGrid
from .surface import ValueSurface, OBSTACLE, PENALIZED
from .operators import (
    Stencil,
    default_delta,
    control_point,
    local_operator,
    nonlocal_B,
    nonlocal_C,
    hamiltonian,
    hamiltonian_field,
    min_hamiltonian,
    field_coefficients,
)
from .scheme import (
    PdeGrids,
    CFL_LIMIT,
    cfl_number,
    driver_depends_on_z,
    march_step,
    solve_penalized_hjb,
    solve_obstacle_hjb,
    hjb_residual,
    monotonicity_probe,
)
from .studies import box_study, refinement_study, observed_order, finest_error

__all__ = [
    'SpaceGrid', 'ValueSurface', 'OBSTACLE', 'PENALIZED', 'Stencil', 'default_delta', 'control_point',
    'local_operator', 'nonlocal_B', 'nonlocal_C', 'hamiltonian', 'hamiltonian_field', 'min_hamiltonian',
    'field_coefficients', 'PdeGrids', 'CFL_LIMIT', 'cfl_number', 'driver_depends_on_z', 'march_step', 'solve_penalized_hjb',
    'solve_obstacle_hjb', 'hjb_residual', 'monotonicity_probe', 'box_study', 'refinement_study',
    'observed_order', 'finest_error',
]
__version__ = '1.0.0'
