# Problem Model Domain Kit
# Control-problem definitions: finite Lévy measures, jump weights,
# parametric coefficient families and sampled assumption checks

from .levy import LevyMeasure, JumpWeight, levy_integral, aggregate_v
from .spec import ProblemSpec
from .families import FAMILIES, FamilyDef, build_problem
from .assumptions import AssumptionCheck, ValidationReport, validate_assumptions, GATE_CHECKS

__all__ = [
    'LevyMeasure', 'JumpWeight', 'levy_integral', 'aggregate_v',
    'ProblemSpec', 'FAMILIES', 'FamilyDef', 'build_problem',
    'AssumptionCheck', 'ValidationReport', 'validate_assumptions', 'GATE_CHECKS',
]
__version__ = '1.0.0'
