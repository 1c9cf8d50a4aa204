"""Request/response models for the planning service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class SynthRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    width: int = Field(default=20, ge=1)
    height: int = Field(default=20, ge=1)
    frames: int = Field(default=7, ge=2)
    cell_size: float = Field(default=0.25, gt=0)
    origin_lat: float = 25.0
    origin_lon: float = -90.0
    blobs: int | None = Field(default=None, ge=0)
    swirls: int | None = Field(default=None, ge=0)
    patches: int | None = Field(default=None, ge=0)


class SynthResponse(BaseModel):
    env_text: str
    sha256: str


class ExtractRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env_text: str
    tau_poi: float = Field(default=1.0, gt=0)
    tau_haz: float = Field(default=0.5, gt=0)


class EventModel(BaseModel):
    frame: int
    row: int
    col: int
    magnitude: float
    count: int


class HazardModel(BaseModel):
    frame: int
    row: int
    col: int
    severity: float


class ExtractResponse(BaseModel):
    events: list[EventModel]
    hazards: list[HazardModel]
    events_csv: str
    hazards_csv: str


class ClusterRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env_text: str
    config: dict = Field(default_factory=dict)
    frame: int | None = None


class ClusterModel(BaseModel):
    rank: int
    row: int
    col: int
    score: float
    covered_count: int


class ClusterResponse(BaseModel):
    clusters: list[ClusterModel]
    csv: str


class GraphRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env_text: str
    config: dict = Field(default_factory=dict)
    include_geojson: bool = False


class GraphNodeModel(BaseModel):
    id: int
    kind: str
    row: int
    col: int


class GraphEdgeModel(BaseModel):
    a: int
    b: int
    base_distance: float


class GraphResponse(BaseModel):
    frames: int
    nodes: list[GraphNodeModel]
    edges: list[GraphEdgeModel]
    nodes_csv: str
    edges_csv: str
    geojson: list[dict] | None = None


class PlanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env_text: str
    config: dict = Field(default_factory=dict)
    planner: str = "waitr"
    frame: int = Field(default=0, ge=0)


class PlanStepModel(BaseModel):
    step: int
    node: int
    row: int
    col: int


class PlanModel(BaseModel):
    agent: int
    projected_score: float
    waypoints: list[PlanStepModel]


class PlanResponse(BaseModel):
    frame: int
    planner: str
    plans: list[PlanModel]
    csv: str


class FrameStatsModel(BaseModel):
    frame: int
    newly_covered: int
    cumulative_covered: int
    hazard_exposure_steps: int


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env_text: str
    config: dict = Field(default_factory=dict)
    planner: str = "waitr"
    seed: int = 0
    include_geojson: bool = False


class RunResponse(BaseModel):
    planner: str
    seed: int
    per_frame: list[FrameStatsModel]
    covered: int
    total_events: int
    ecr: float
    zero_total: bool
    positions: list[list[int]]
    metrics_csv: str
    geojson: list[dict] | None = None


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env_text: str | None = None
    config: dict = Field(default_factory=dict)
    seeds: list[int] | None = None


class CompareSeedRow(BaseModel):
    seed: int
    waitr_covered: int
    greedy_covered: int
    total_events: int
    win: str


class CompareResponse(BaseModel):
    rows: list[CompareSeedRow]
    totals: dict[str, int]
    wins: dict[str, int]
    summary_csv: str
    table_csv: str
    metrics_csv: str
