# Kulik Domain Kit
# Deterministic time stretching between [t_i, T] and [t_lambda, T], the
# identities it satisfies, its change-of-measure weight and stretched paths

from .time_change import TimeChange, tau, rho
from .identities import identity_suite, c_delta, weighted_constant
from .weight import girsanov_weight, weight_check
from .stretch import StretchedEnsemble, stretched_forward_spec, stretched_simulate

__all__ = [
    'TimeChange', 'tau', 'rho', 'identity_suite', 'c_delta', 'weighted_constant',
    'girsanov_weight', 'weight_check', 'StretchedEnsemble', 'stretched_forward_spec',
    'stretched_simulate',
]
__version__ = '1.0.0'
