"""
Acceptance suites.

Each suite is a module with `run(ctx) -> SuiteOutcome`; SUITES registers them
in the order the `run` verb executes them when a config names none.
"""

from typing import Dict

from experiment_runner.suites import (
    comparison,
    cross_check,
    determinism,
    dpp,
    feedback,
    heat_closed_form,
    kulik,
    pde_ladder,
    penalization_ladder,
    regularity,
    skorokhod,
    tree_oracle,
    trivial_zero,
)
from experiment_runner.suites.base import SuiteContext, SuiteDef, SuiteOutcome, run_suite

SUITES: Dict[str, SuiteDef] = {
    "trivial-zero": SuiteDef(
        suite_id="trivial-zero",
        suite_version="1.0.0",
        suite_type="closed_form",
        description="Zero data with h = 0: grid and Monte Carlo solvers return exactly 0.",
        run=trivial_zero.run,
    ),
    "tree-oracle": SuiteDef(
        suite_id="tree-oracle",
        suite_version="1.0.0",
        suite_type="oracle",
        description="Bundled binary trees: solvers and value_mc against exhaustive enumeration.",
        run=tree_oracle.run,
    ),
    "penalization-ladder": SuiteDef(
        suite_id="penalization-ladder",
        suite_version="1.0.0",
        suite_type="monte_carlo",
        description="Penalized BSDEs decrease in n on shared noise and approach the reflected solution.",
        run=penalization_ladder.run,
    ),
    "pde-ladder": SuiteDef(
        suite_id="pde-ladder",
        suite_version="1.0.0",
        suite_type="scheme",
        description="Penalized HJB surfaces are ordered node-wise and stay above the obstacle surface.",
        run=pde_ladder.run,
    ),
    "cross-check": SuiteDef(
        suite_id="cross-check",
        suite_version="1.0.0",
        suite_type="monte_carlo",
        description="Grid value and Monte Carlo value agree at (t0, x0) within scheme and sampling error.",
        run=cross_check.run,
    ),
    "heat-closed-form": SuiteDef(
        suite_id="heat-closed-form",
        suite_version="1.0.0",
        suite_type="closed_form",
        description="Quadratic heat solution at the nodes; first-order convergence on the cosine problem.",
        run=heat_closed_form.run,
    ),
    "skorokhod": SuiteDef(
        suite_id="skorokhod",
        suite_version="1.0.0",
        suite_type="monte_carlo",
        description="Reflected solutions push only on the obstacle.",
        run=skorokhod.run,
    ),
    "comparison": SuiteDef(
        suite_id="comparison",
        suite_version="1.0.0",
        suite_type="monte_carlo",
        description="Ordered driver, terminal value and obstacle give ordered reflected solutions.",
        run=comparison.run,
    ),
    "dpp": SuiteDef(
        suite_id="dpp",
        suite_version="1.0.0",
        suite_type="monte_carlo",
        description="Backward semigroup identity on the heat closed form and the controlled tree.",
        run=dpp.run,
    ),
    "kulik": SuiteDef(
        suite_id="kulik",
        suite_version="1.0.0",
        suite_type="deterministic",
        description="Time-change relations on random configurations; change-of-measure weight moments.",
        run=kulik.run,
    ),
    "regularity": SuiteDef(
        suite_id="regularity",
        suite_version="1.0.0",
        suite_type="scheme",
        description="Semiconcavity and joint Lipschitz estimates stable under grid refinement.",
        run=regularity.run,
    ),
    "feedback": SuiteDef(
        suite_id="feedback",
        suite_version="1.0.0",
        suite_type="monte_carlo",
        description="Synthesized feedback against constant controls, plus Z and Gamma consistency.",
        run=feedback.run,
    ),
    "determinism": SuiteDef(
        suite_id="determinism",
        suite_version="1.0.0",
        suite_type="reproducibility",
        description="Artifacts are byte-identical across worker counts.",
        run=determinism.run,
    ),
}

__all__ = ['SUITES', 'SuiteContext', 'SuiteDef', 'SuiteOutcome', 'run_suite']
