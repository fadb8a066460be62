# Value Analysis Domain Kit
# Monte Carlo value estimates, the dynamic programming residual and
# sampled regularity probes of value functions

from .estimate import ValueEstimate, value_mc, lipschitz_mc, UPPER_ESTIMATE
from .dpp import dpp_check, dpp_residual
from .regularity import RegularityReport, regularity_probe

__all__ = [
    'ValueEstimate', 'value_mc', 'lipschitz_mc', 'UPPER_ESTIMATE',
    'dpp_check', 'dpp_residual', 'RegularityReport', 'regularity_probe',
]
__version__ = '1.0.0'
