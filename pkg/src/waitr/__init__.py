"""Multi-agent spatiotemporal path planning on dynamic gridded environments."""

__version__ = "0.1.0"

from .clustering import Cluster, WeightedPOI, WPRConfig, prep_select, weight_poi, wpr_cluster
from .env_model import (
    EnvFormatError,
    EnvSeries,
    Event,
    GridSpec,
    Hazard,
    SynthParams,
    extract_events,
    extract_hazards,
    load_env,
    synth_scenario,
    write_env,
)
from .kgraph import GraphKnobs, KEdge, KGraph, KNode, build_graph, neighbors, update_frame
from .pathlets import Pathlet, auto_block, partition, precompute_tables, route
from .planner import AgentState, Plan, PlannerConfig, plan_greedy, plan_waitr, score_plan
from .sim import MetricsReport, MissionConfig, compare, ecr, run_mission, simulate
from .ted import EventDensitySeries, TEDConfig, activate, density_rate, forecast_weights

__all__ = [
    "AgentState",
    "Cluster",
    "EnvFormatError",
    "EnvSeries",
    "Event",
    "EventDensitySeries",
    "GraphKnobs",
    "GridSpec",
    "Hazard",
    "KEdge",
    "KGraph",
    "KNode",
    "MetricsReport",
    "MissionConfig",
    "Pathlet",
    "Plan",
    "PlannerConfig",
    "SynthParams",
    "TEDConfig",
    "WPRConfig",
    "WeightedPOI",
    "activate",
    "auto_block",
    "build_graph",
    "compare",
    "density_rate",
    "ecr",
    "extract_events",
    "extract_hazards",
    "forecast_weights",
    "load_env",
    "neighbors",
    "partition",
    "plan_greedy",
    "plan_waitr",
    "precompute_tables",
    "prep_select",
    "route",
    "run_mission",
    "score_plan",
    "simulate",
    "synth_scenario",
    "update_frame",
    "weight_poi",
    "wpr_cluster",
    "write_env",
]
