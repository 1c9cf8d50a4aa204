"""Run configuration: one validated document wiring all module knobs.

Files are YAML key/value documents; unknown keys are rejected. Flag and
``--set key=value`` overrides are merged before validation so every run sees
a fully checked configuration.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .clustering import WPRConfig
from .kgraph import GraphKnobs
from .planner import PlannerConfig
from .sim import MissionConfig
from .ted import TEDConfig

DEFAULT_SEEDS = tuple(range(20))


class RunConfig(BaseModel):
    """All pipeline knobs; defaults follow the reference mission setup
    (horizon 6, gamma 0.9, observational radius 0.5 degrees, 3 agents)."""

    model_config = ConfigDict(extra="forbid")

    tau_poi: float = Field(default=1.0, gt=0)
    tau_haz: float = Field(default=0.5, gt=0)
    radius: float = Field(default=0.5, gt=0)
    alpha: float = Field(default=1.0, ge=0)
    beta: float = Field(default=1.0, ge=0)
    prep_lambda: float = Field(default=0.1, ge=0)
    ted_delta: float = Field(default=0.5, ge=0)
    predictor: Literal["persistence", "linear_trend"] = "linear_trend"
    confidence_decay: float = Field(default=0.9, gt=0, le=1)
    gamma: float = Field(default=0.9, gt=0, le=1)
    horizon: int = Field(default=6, ge=1)
    planner_lambda: float = Field(default=0.1, ge=0)
    speed: int = Field(default=1, ge=1)
    beam: int = Field(default=8, ge=1)
    agents: int = Field(default=3, ge=1)
    connect_radius: float = Field(default=0.75, gt=0)
    bridge_spacing: int = Field(default=2, ge=1)
    lambda_edge: float = Field(default=1.0, ge=0)
    h_coef: float = Field(default=1.0, ge=0, allow_inf_nan=True)
    pathlet_block: int = Field(default=0, ge=0)
    seeds: list[int] = Field(default_factory=lambda: list(DEFAULT_SEEDS))

    @field_validator("h_coef")
    @classmethod
    def _finite_or_inf(cls, v: float) -> float:
        if math.isnan(v):
            raise ValueError("h_coef cannot be NaN")
        return v

    def mission(self) -> MissionConfig:
        return MissionConfig(
            tau_poi=self.tau_poi,
            tau_haz=self.tau_haz,
            agents=self.agents,
            pathlet_block=self.pathlet_block,
            wpr=WPRConfig(radius=self.radius, alpha=self.alpha, beta=self.beta,
                          lam=self.prep_lambda),
            ted=TEDConfig(delta=self.ted_delta, predictor_kind=self.predictor,
                          horizon=self.horizon, confidence_decay=self.confidence_decay),
            planner=PlannerConfig(horizon=self.horizon, gamma=self.gamma,
                                  lam=self.planner_lambda, radius=self.radius,
                                  speed=self.speed, beam=self.beam),
            knobs=GraphKnobs(connect_radius=self.connect_radius,
                             bridge_spacing=self.bridge_spacing,
                             lambda_edge=self.lambda_edge, h_coef=self.h_coef,
                             obs_radius=self.radius, alpha=self.alpha, beta=self.beta),
        )


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a YAML config file, merging overrides on top."""
    data: dict = {}
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text())
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ValueError(f"config root must be a mapping, got {type(raw).__name__}")
        data.update(raw)
    if overrides:
        data.update(overrides)
    return RunConfig(**data)


def parse_overrides(pairs: list[str]) -> dict:
    """Parse repeated ``key=value`` flags; values go through YAML typing."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"override {pair!r} is not of the form key=value")
        key, value = pair.split("=", 1)
        out[key.strip()] = yaml.safe_load(value)
    return out
