"""
Enumerated binary-tree instances and a brute-force dynamic-programming oracle.

Each step has Brownian increments +-sqrt(dt) per component (equiprobable)
and, per Lévy atom, a Bernoulli jump with probability w_a dt. The full
outcome tree becomes a weighted PathEnsemble; the oracle walks the same tree
node by node with exact sums and scipy root finding, sharing nothing with
the regression solver except the problem coefficients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.controls import ControlLaw
from domain_kits.forward_sim.ensemble import PathEnsemble
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.forward_sim.simulate import simulate_from_noise
from domain_kits.problem_model.families import build_problem
from domain_kits.problem_model.levy import JumpWeight, LevyMeasure
from domain_kits.problem_model.spec import ProblemSpec

MAX_LEAVES = 1 << 16

Outcome = Tuple[np.ndarray, np.ndarray, float]


def step_outcomes(spec: ProblemSpec, dt: float) -> List[Outcome]:
    """(dB, jump counts, probability) for every one-step outcome."""
    q = spec.levy.weights * dt
    if np.any(q > 1.0):
        raise PreconditionError("tree needs w_a dt <= 1 for every atom", {"max_probability": float(q.max())})
    root = np.sqrt(dt)
    out: List[Outcome] = []
    for signs in itertools.product((1.0, -1.0), repeat=spec.dim_w):
        for jumps in itertools.product((0, 1), repeat=spec.levy.n_atoms):
            p = 0.5 ** spec.dim_w
            for a, j in enumerate(jumps):
                p *= q[a] if j else 1.0 - q[a]
            if p > 0.0:
                out.append((root * np.array(signs), np.array(jumps, dtype=np.int64), p))
    return out


def tree_noise(spec: ProblemSpec, grid: TimeGrid) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Noise record and probabilities of every leaf of the K-step tree."""
    outcomes = step_outcomes(spec, grid.dt)
    leaves = len(outcomes) ** grid.steps
    if leaves > MAX_LEAVES:
        raise PreconditionError("tree too large to enumerate", {"leaves": leaves, "max": MAX_LEAVES})
    dB = np.empty((leaves, grid.steps, spec.dim_w))
    counts = np.empty((leaves, grid.steps, spec.levy.n_atoms), dtype=np.int64)
    weights = np.empty(leaves)
    for p, path in enumerate(itertools.product(range(len(outcomes)), repeat=grid.steps)):
        prob = 1.0
        for k, o in enumerate(path):
            dB[p, k], counts[p, k], po = outcomes[o]
            prob *= po
        weights[p] = prob
    return dB, counts, weights


def tree_ensemble(spec: ProblemSpec, grid: TimeGrid, x0, control: Union[int, ControlLaw] = 0) -> PathEnsemble:
    dB, counts, weights = tree_noise(spec, grid)
    return simulate_from_noise(spec, grid, x0, control, dB, counts, weights=weights)


def _root(g: Callable[[float], float], guess: float) -> float:
    span = 1.0 + abs(guess)
    lo, hi = guess - span, guess + span
    for _ in range(200):
        if g(lo) >= 0.0 >= g(hi):
            break
        span *= 2.0
        lo, hi = guess - span, guess + span
    else:
        raise PreconditionError("oracle could not bracket the implicit equation")
    return brentq(g, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=500)


NodePolicy = Callable[[int, Tuple[int, ...], np.ndarray], int]


def tree_value(
    spec: ProblemSpec,
    grid: TimeGrid,
    x0,
    mode: str = "reflected",
    n: float = 0.0,
    policy: Union[int, str, NodePolicy] = 0,
) -> float:
    """
    Exact discrete value at the root by recursion over the tree.

    policy: a control index, "optimal" (node-wise minimum over the control
    grid) or a callable (k, history, x) -> index.
    """
    outcomes = step_outcomes(spec, grid.dt)
    dt, K = grid.dt, grid.steps
    l_vals = spec.l_values
    rates = spec.levy.weights
    reflected = mode == "reflected"

    def candidates(k, hist, x):
        if policy == "optimal":
            return range(spec.n_controls)
        if callable(policy):
            return [int(policy(k, hist, x))]
        return [int(policy)]

    def node(k: int, hist: Tuple[int, ...], x: np.ndarray) -> float:
        xb = x[None, :]
        if k == K:
            return float(spec.terminal(xb)[0])
        t = float(grid.nodes[k])
        h = float(spec.obstacle(t, xb)[0])
        best = np.inf
        for ui in candidates(k, hist, x):
            u = spec.controls[ui][None, :]
            drift = spec.drift(t, xb, u)[0]
            sig = spec.diffusion(t, xb, u)[0]
            gam = spec.jump_sizes(t, xb, u)[:, 0, :]
            comp = dt * (rates @ gam) if spec.levy.n_atoms else 0.0
            C, Zv, G = 0.0, np.zeros(spec.dim_w), 0.0
            for o, (db, cnt, p) in enumerate(outcomes):
                xn = x + dt * drift + sig @ db
                if spec.levy.n_atoms:
                    xn = xn + cnt @ gam - comp
                yc = node(k + 1, hist + (o,), xn)
                C += p * yc
                Zv = Zv + p * yc * db / dt
                if spec.levy.n_atoms:
                    G += p * yc * (float(cnt @ l_vals) - dt * float(rates @ l_vals)) / dt

            def g(y, n_eff):
                f = spec.driver(t, xb, np.array([y]), Zv[None, :], np.array([G]), u)[0]
                return C + dt * f - dt * n_eff * max(y - h, 0.0) - y

            if reflected:
                y = min(_root(lambda y: g(y, 0.0), C), h)
            else:
                y = _root(lambda y: g(y, float(n)), C)
            best = min(best, y)
        return float(best)

    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    return node(0, (), x0)


def enumerate_policies(spec: ProblemSpec, grid: TimeGrid, x0, mode: str = "reflected",
                       n: float = 0.0, limit: int = 4096) -> List[float]:
    """Root value under every adapted policy (one control per interior node)."""
    n_out = len(step_outcomes(spec, grid.dt))
    nodes = [h for k in range(grid.steps) for h in itertools.product(range(n_out), repeat=k)]
    total = spec.n_controls ** len(nodes)
    if total > limit:
        raise PreconditionError("too many adapted policies to enumerate", {"policies": total, "limit": limit})
    values = []
    for choice in itertools.product(range(spec.n_controls), repeat=len(nodes)):
        table = dict(zip(nodes, choice))
        values.append(tree_value(spec, grid, x0, mode, n, policy=lambda k, hist, x, table=table: table[hist]))
    return values


@dataclass(frozen=True)
class TreeInstance:
    name: str
    description: str
    build: Callable[[], ProblemSpec]
    x0: float = 0.3
    horizon: float = 0.5
    steps: int = 2

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(0.0, self.horizon, self.steps)

    def spec(self) -> ProblemSpec:
        return self.build()


def _lq(params: Dict[str, Any], **kwargs) -> Callable[[], ProblemSpec]:
    return lambda: build_problem("lq1d", params, horizon=0.5, **kwargs)


TREE_INSTANCES: Dict[str, TreeInstance] = {
    "linear": TreeInstance(
        "linear", "no jumps, driver linear in y, inactive obstacle",
        _lq({"sigma0": 1.0, "fy": 0.5, "fx": 0.3, "phi2": 1.0}, name="tree-linear"),
    ),
    "obstacle-flat": TreeInstance(
        "obstacle-flat", "Phi = 1 above a flat obstacle h = 0.5; root value 0.5",
        _lq({"sigma0": 1.0, "phi0": 1.0, "h0": 0.5}, name="tree-obstacle-flat"),
    ),
    "obstacle-active": TreeInstance(
        "obstacle-active", "positive driver pushes Y into h = 0.3 + x^2",
        _lq({"sigma0": 1.0, "f0": 0.5, "fy": 0.2, "phi2": 1.0, "h0": 0.3, "h2": 1.0}, name="tree-obstacle-active"),
    ),
    "jump": TreeInstance(
        "jump", "one jump atom, driver depends on the jump aggregate",
        _lq({"sigma0": 1.0, "jump_c": 0.7, "fv": 0.4, "fy": 0.3, "phi2": 1.0, "h0": 1.2, "h2": 1.0},
            levy=LevyMeasure.from_atoms([([1.0], 2.0)]), jump_weight=JumpWeight.truncated(1.0),
            name="tree-jump"),
    ),
    "controlled": TreeInstance(
        "controlled", "two controls entering the driver as u x; optimum u = -sign(x)",
        _lq({"sigma0": 1.0, "fux": 1.0, "fy": 0.2, "phi2": 1.0}, controls=[[-1.0], [1.0]],
            name="tree-controlled"),
    ),
}
