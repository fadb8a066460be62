"""
Solver error hierarchy and taxonomy.

Every kit raises a subclass of RSCLabError. Each error carries a stable
`code` that the taxonomy maps to a severity, a short impact statement and the
CLI exit code, so suites and the runner can report failures in a
machine-readable way without inspecting messages.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class RSCLabError(Exception):
    """Base error; `code` is stable, `details` is JSON-safe."""

    code = "rsclab_error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        info = ErrorTaxonomy.classify(self.code)
        return {
            "code": self.code,
            "message": self.message,
            "severity": info["severity"],
            "impact": info["impact"],
            "details": self.details,
        }


class ConfigError(RSCLabError):
    code = "config_error"


class IllPosedSpecError(RSCLabError):
    code = "ill_posed_spec"


class AssumptionError(RSCLabError):
    code = "assumption_failed"


class PreconditionError(RSCLabError):
    code = "precondition_failed"


class SimulationBlowUpError(RSCLabError):
    code = "simulation_blow_up"

    def __init__(self, message: str, path: int, step: int):
        super().__init__(message, {"path": int(path), "step": int(step)})
        self.path = int(path)
        self.step = int(step)


class SingularDesignError(RSCLabError):
    code = "singular_design"


class FixedPointError(RSCLabError):
    code = "fixed_point_divergence"


class CFLViolationError(RSCLabError):
    code = "cfl_violation"


class GridMismatchError(RSCLabError):
    code = "grid_mismatch"


class WindowError(RSCLabError):
    code = "outside_window"


class AcceptanceError(RSCLabError):
    code = "acceptance_failed"


class ErrorTaxonomy:
    """Map error codes to severity, impact and exit code."""

    CATEGORIES = {
        'config_error': {
            'severity': 'critical',
            'pattern': 'Unknown key, non-finite number, unknown family or missing seed',
            'impact': 'Experiment cannot start; nothing was computed',
            'exit_code': 2,
        },
        'ill_posed_spec': {
            'severity': 'critical',
            'pattern': 'Coefficient returned NaN/inf at a probe, or inconsistent dimensions',
            'impact': 'Problem is not well defined on the probed box',
            'exit_code': 2,
        },
        'assumption_failed': {
            'severity': 'critical',
            'pattern': 'Obstacle compatibility, monotonicity in v, or jump-weight bound violated',
            'impact': 'Solver guarantees do not apply to this problem',
            'exit_code': 2,
        },
        'precondition_failed': {
            'severity': 'high',
            'pattern': 'Operation called outside its documented preconditions',
            'impact': 'Result would be meaningless; call rejected',
            'exit_code': 2,
        },
        'simulation_blow_up': {
            'severity': 'high',
            'pattern': 'Euler state became non-finite',
            'impact': 'Time step too coarse or coefficients explode on the path',
            'exit_code': 1,
        },
        'singular_design': {
            'severity': 'high',
            'pattern': 'Regression design has rank zero or non-finite entries',
            'impact': 'Conditional expectations cannot be estimated; basis/domain mismatch',
            'exit_code': 1,
        },
        'fixed_point_divergence': {
            'severity': 'high',
            'pattern': 'Implicit driver iteration did not converge within max_iters',
            'impact': 'Backward step value is unreliable',
            'exit_code': 1,
        },
        'cfl_violation': {
            'severity': 'high',
            'pattern': 'Explicit march step exceeds the monotonicity bound',
            'impact': 'Scheme would not be monotone; march refused',
            'exit_code': 2,
        },
        'grid_mismatch': {
            'severity': 'medium',
            'pattern': 'Surfaces or ensembles on different grids',
            'impact': 'Node-wise comparison impossible',
            'exit_code': 2,
        },
        'outside_window': {
            'severity': 'medium',
            'pattern': 'Time argument outside the valid window of a time change',
            'impact': 'Identity not defined at that point',
            'exit_code': 2,
        },
        'acceptance_failed': {
            'severity': 'critical',
            'pattern': 'A contract rule on suite metrics failed',
            'impact': 'Numerical claim not reproduced at the configured tolerance',
            'exit_code': 1,
        },
    }

    @classmethod
    def classify(cls, error_code: str) -> dict:
        if error_code in cls.CATEGORIES:
            return cls.CATEGORIES[error_code]
        return {
            'severity': 'unknown',
            'pattern': 'Unknown error category',
            'impact': 'See logs for details',
            'exit_code': 1,
        }

    @classmethod
    def all_categories(cls) -> list:
        return list(cls.CATEGORIES.keys())

    @classmethod
    def exit_code(cls, error_code: str) -> int:
        return int(cls.classify(error_code).get('exit_code', 1))
