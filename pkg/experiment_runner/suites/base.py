"""Suite plumbing: the shared context, what a suite returns, and how it is run and judged."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from domain_kits.contract_invariants import evaluate_contract
from domain_kits.errors import ErrorTaxonomy, RSCLabError
from domain_kits.hjb_pide import PdeGrids
from domain_kits.problem_model import ProblemSpec, ValidationReport
from domain_kits.rbsde_solver import McConfig
from experiment_runner import problems
from experiment_runner.artifacts import ArtifactWriter
from experiment_runner.run_logging import RunLogger
from experiment_runner.schemas import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass
class SuiteContext:
    """Everything a suite needs; the configured spec is built and gated once."""

    config: ExperimentConfig
    writer: ArtifactWriter
    threads: int = 1
    run_logger: Optional[RunLogger] = None
    _spec: Optional[ProblemSpec] = field(default=None, init=False, repr=False)
    _validation: Optional[ValidationReport] = field(default=None, init=False, repr=False)

    @property
    def seed(self) -> int:
        return self.config.solver.seed

    @property
    def spec(self) -> ProblemSpec:
        if self._spec is None:
            self._spec, self._validation = problems.validated_spec(self.config)
        return self._spec

    @property
    def validation(self) -> ValidationReport:
        if self._validation is None:
            self._spec, self._validation = problems.validated_spec(self.config)
        return self._validation

    @property
    def x0(self) -> np.ndarray:
        return np.asarray(self.config.grids.x0, dtype=float)

    @property
    def t0(self) -> float:
        return self.config.grids.t0

    def mc(self, **overrides: Any) -> McConfig:
        return problems.mc_config(self.config, self.threads, **overrides)

    def grids(self, dim: Optional[int] = None) -> PdeGrids:
        return problems.pde_grids(self.config, self.spec.dim_x if dim is None else dim)


@dataclass
class SuiteOutcome:
    """Metrics (JSON-ready), the contract rules judged against them, and tables to write."""

    metrics: Dict[str, Any]
    rules: List[Dict[str, Any]]
    tables: Dict[str, Any] = field(default_factory=dict)
    reports: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class SuiteDef:
    suite_id: str
    suite_version: str
    suite_type: str
    description: str
    run: Callable[[SuiteContext], SuiteOutcome]


def run_suite(suite: SuiteDef, ctx: SuiteContext) -> Dict[str, Any]:
    """Run one suite, write its artifacts and judge its contract.

    RSCLabError inside the suite becomes a failed report carrying the error;
    its taxonomy exit code is kept so the CLI can tell config trouble from
    numerical failure.
    """
    start = time.perf_counter()
    writer = ctx.writer
    error = None
    try:
        outcome = suite.run(ctx)
    except RSCLabError as exc:
        error = {**exc.to_dict(), "exit_code": ErrorTaxonomy.exit_code(exc.code)}
        outcome = SuiteOutcome(metrics={}, rules=[])
        logger.warning("suite %s raised %s: %s", suite.suite_id, exc.code, exc.message)

    for name, frame in sorted(outcome.tables.items()):
        writer.write_csv(f"{suite.suite_id}/{name}.csv", frame)
    for name, payload in sorted(outcome.reports.items()):
        writer.write_json(f"{suite.suite_id}/{name}.json", payload)

    contract = evaluate_contract(metrics=outcome.metrics, contract={"rules": outcome.rules})
    if error is not None:
        status = "error"
    elif contract["total_checks"] and contract["failed_checks"] == 0:
        status = "passed"
    else:
        status = "failed"
    report = {
        "suite": suite.suite_id,
        "version": suite.suite_version,
        "type": suite.suite_type,
        "status": status,
        "metrics": outcome.metrics,
        "contract": contract,
        "error": error,
    }
    writer.write_json(f"{suite.suite_id}/report.json", report, always=True)
    if ctx.run_logger is not None:
        ctx.run_logger.event("suite_finished", suite=suite.suite_id, status=status,
                             latency_ms=(time.perf_counter() - start) * 1000.0,
                             error_code=None if error is None else error["code"],
                             failed_checks=contract["failed_checks"])
    return report
