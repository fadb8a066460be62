"""
Experiment config models.

Configs are YAML files validated here; unknown keys and non-finite numbers
are rejected, and every failure surfaces as ConfigError.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from domain_kits.errors import ConfigError
from domain_kits.problem_model import FAMILIES

DEFAULT_LADDER = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0]


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class ProblemConfig(Section):
    family: str = Field(..., description="Registered problem family")
    params: Dict[str, Union[int, float]] = Field(default_factory=dict, description="Family parameters")
    horizon: float = Field(1.0, gt=0.0, description="Terminal time T")
    name: Optional[str] = None

    @field_validator("family")
    @classmethod
    def known_family(cls, v: str) -> str:
        if v not in FAMILIES:
            raise ValueError(f"unknown problem family {v!r}; known: {sorted(FAMILIES)}")
        return v

    @field_validator("params")
    @classmethod
    def finite_params(cls, v: Dict[str, Union[int, float]]) -> Dict[str, Union[int, float]]:
        bad = [k for k, x in v.items() if not math.isfinite(float(x))]
        if bad:
            raise ValueError(f"non-finite parameters: {bad}")
        return v


class AtomConfig(Section):
    mark: List[float] = Field(..., min_length=1, description="Atom location e_a")
    weight: float = Field(..., gt=0.0, description="Atom mass w_a")


class LevyConfig(Section):
    atoms: List[AtomConfig] = Field(default_factory=list)
    jump_weight: Literal["zero", "truncated"] = "zero"
    kappa: float = Field(1.0, gt=0.0)
    scale: float = Field(1.0, ge=0.0)


class ControlGridConfig(Section):
    lo: float
    hi: float
    count: int = Field(..., ge=1)

    @model_validator(mode="after")
    def ordered(self) -> "ControlGridConfig":
        if self.count > 1 and not self.lo < self.hi:
            raise ValueError("control grid needs lo < hi")
        return self


class ControlsConfig(Section):
    points: Optional[List[List[float]]] = None
    grid: Optional[ControlGridConfig] = None

    @model_validator(mode="after")
    def one_source(self) -> "ControlsConfig":
        if self.points is not None and self.grid is not None:
            raise ValueError("give control points or a control grid, not both")
        if self.points is not None and (not self.points or len({len(p) for p in self.points}) != 1):
            raise ValueError("control points must be non-empty rows of equal length")
        return self

    def values(self) -> np.ndarray:
        if self.points is not None:
            return np.asarray(self.points, dtype=float)
        if self.grid is not None:
            return np.linspace(self.grid.lo, self.grid.hi, self.grid.count).reshape(-1, 1)
        return np.zeros((1, 1))


class GridsConfig(Section):
    t0: float = Field(0.0, ge=0.0)
    x0: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    mc_steps: int = Field(50, ge=1)
    pde_steps: int = Field(200, ge=1)
    space_lo: float = -4.0
    space_hi: float = 4.0
    space_points: int = Field(50, ge=3)

    @model_validator(mode="after")
    def box(self) -> "GridsConfig":
        if not self.space_lo < self.space_hi:
            raise ValueError("space box needs space_lo < space_hi")
        return self


class BasisConfig(Section):
    kind: Literal["polynomial", "local-partition", "exact"] = "polynomial"
    degree: int = Field(3, ge=0)
    cells: int = Field(8, ge=1)
    box: Optional[Tuple[float, float]] = None


class TolerancesConfig(Section):
    combined_max: float = Field(2e-2, gt=0.0, description="Cap on the cross-check tolerance")
    closed_form_max: float = Field(5e-3, gt=0.0)
    min_order: float = Field(0.9, gt=0.0)
    diagnostics_max: float = Field(5e-2, gt=0.0)
    stability_rel: float = Field(0.2, gt=0.0)
    kulik_stderr: float = Field(4.0, gt=0.0)


class SolverConfig(Section):
    paths: int = Field(20000, ge=2)
    seed: int = Field(..., ge=0, description="Root seed of every random stream")
    basis: BasisConfig = Field(default_factory=BasisConfig)
    ladder: List[float] = Field(default_factory=lambda: list(DEFAULT_LADDER), min_length=1)
    delta: Optional[float] = Field(None, gt=0.0)
    max_iters: int = Field(50, ge=1)
    tol: float = Field(1e-12, gt=0.0)
    damping: float = Field(1.0, gt=0.0, le=1.0)
    box_study: bool = False
    dpp_fractions: List[float] = Field(default_factory=lambda: [0.1, 0.25], min_length=1)
    regularity_triples: int = Field(1000, ge=1)
    kulik_configs: int = Field(1000, ge=1)
    kulik_draws: int = Field(100000, ge=2)
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)

    @field_validator("ladder")
    @classmethod
    def increasing(cls, v: List[float]) -> List[float]:
        if any(n <= 0.0 for n in v) or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("penalty ladder must be positive and strictly increasing")
        return v

    @field_validator("dpp_fractions")
    @classmethod
    def fractions(cls, v: List[float]) -> List[float]:
        if any(not 0.0 < f <= 1.0 for f in v):
            raise ValueError("dpp fractions must lie in (0, 1]")
        return v


class OutputsConfig(Section):
    dir: Optional[str] = None
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])


class ExperimentConfig(Section):
    name: str = "experiment"
    problem: ProblemConfig
    levy: LevyConfig = Field(default_factory=LevyConfig)
    controls: ControlsConfig = Field(default_factory=ControlsConfig)
    grids: GridsConfig = Field(default_factory=GridsConfig)
    solver: SolverConfig
    outputs: OutputsConfig = Field(default_factory=OutputsConfig)
    suites: List[str] = Field(default_factory=list)

    @field_validator("suites")
    @classmethod
    def known_suites(cls, v: List[str]) -> List[str]:
        from experiment_runner.suites import SUITES
        unknown = [s for s in v if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suites {unknown}; known: {sorted(SUITES)}")
        return v

    @model_validator(mode="after")
    def start_inside_horizon(self) -> "ExperimentConfig":
        if not self.grids.t0 < self.problem.horizon:
            raise ValueError("grids.t0 must lie below the horizon")
        return self

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return self.model_copy(update={"solver": self.solver.model_copy(update={"seed": int(seed)})})

    def with_suites(self, suites: List[str]) -> "ExperimentConfig":
        return parse_config({**self.model_dump(mode="json"), "suites": list(suites)})


def config_hash(config: ExperimentConfig) -> str:
    """sha256 of the canonical JSON form of the validated config."""
    payload = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


def parse_config(raw: object) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at the top level")
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        errors = [{"loc": ".".join(str(p) for p in e["loc"]), "msg": e["msg"]} for e in exc.errors()]
        raise ConfigError("invalid experiment config", {"errors": errors}) from exc


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a YAML config."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}", {"reason": str(exc)}) from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {str(path)!r} is not valid YAML", {"reason": str(exc)}) from exc
    return parse_config(raw)
