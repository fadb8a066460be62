# RBSDE Solver Domain Kit
# Penalized and reflected BSDEs with jumps by regression backward
# induction, with a brute-force tree oracle and the cost functional

from .basis import RegressionBasis
from .solution import BackwardSolution, PENALIZED, REFLECTED
from .implicit import solve_step, penalty_projection
from .solver import (
    solve_penalized,
    solve_reflected,
    penalization_ladder,
    LadderResult,
    skorokhod_residual,
    obstacle_excess,
    comparison_check,
    apriori_report,
)
from .tree_oracle import TREE_INSTANCES, TreeInstance, tree_noise, tree_ensemble, tree_value, enumerate_policies
from .cost import McConfig, CostEstimate, cost_functional, controlled_ensemble

__all__ = [
    'RegressionBasis', 'BackwardSolution', 'PENALIZED', 'REFLECTED', 'solve_step', 'penalty_projection',
    'solve_penalized', 'solve_reflected', 'penalization_ladder', 'LadderResult', 'skorokhod_residual',
    'obstacle_excess', 'comparison_check', 'apriori_report',
    'TREE_INSTANCES', 'TreeInstance', 'tree_noise', 'tree_ensemble', 'tree_value', 'enumerate_policies',
    'McConfig', 'CostEstimate', 'cost_functional', 'controlled_ensemble',
]
__version__ = '1.0.0'
