# Forward Simulation Domain Kit
# Euler simulation of controlled jump diffusions with reproducible
# counter-based noise, control laws and moment diagnostics

from .grid import TimeGrid
from .controls import ControlLaw, ConstantControl, ControlTable, FeedbackControl, as_control_law
from .ensemble import PathEnsemble
from .simulate import simulate, simulate_from_noise, draw_noise, resimulate, moment_checks, gronwall_bound

__all__ = [
    'TimeGrid', 'ControlLaw', 'ConstantControl', 'ControlTable', 'FeedbackControl',
    'as_control_law', 'PathEnsemble', 'simulate', 'simulate_from_noise', 'draw_noise',
    'resimulate', 'moment_checks', 'gronwall_bound',
]
__version__ = '1.0.0'
