"""Deterministic acceptance contracts.

Rule-based evaluation of suite metric dictionaries. It performs no code
execution and returns rule-level results only.
"""

from .engine import RULE_TYPES, CheckResult, evaluate_contract
from .tolerances import ToleranceConfig

__all__ = ['RULE_TYPES', 'CheckResult', 'evaluate_contract', 'ToleranceConfig']
__version__ = '1.0.0'
