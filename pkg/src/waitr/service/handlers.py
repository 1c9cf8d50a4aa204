"""Service handlers: the single implementation behind both the HTTP API and
the command-line client."""

from __future__ import annotations

import hashlib

from .. import __version__
from ..clustering import clusters_to_csv, wpr_cluster
from ..config import RunConfig
from ..env_model import (
    GridSpec,
    SynthParams,
    dumps_env,
    extract_events,
    extract_hazards,
    loads_env,
    synth_scenario,
)
from ..kgraph import edges_to_csv, frame_geojson, nodes_to_csv
from ..planner import plan_greedy, plan_waitr, plans_to_csv
from ..sim import compare as sim_compare
from ..sim import metrics_to_csv, prepare_mission, simulate, summary_to_csv, table_to_csv
from . import schemas


def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


def synth(req: schemas.SynthRequest) -> schemas.SynthResponse:
    spec = GridSpec(width=req.width, height=req.height, frames=req.frames,
                    cell_size=req.cell_size, origin=(req.origin_lat, req.origin_lon))
    params = SynthParams()
    updates = {k: getattr(req, k) for k in ("blobs", "swirls", "patches")
               if getattr(req, k) is not None}
    if updates:
        params = SynthParams(**{**params.__dict__, **updates})
    text = dumps_env(synth_scenario(req.seed, spec, params))
    return schemas.SynthResponse(env_text=text,
                                 sha256=hashlib.sha256(text.encode()).hexdigest())


def _events_csv(events) -> str:
    lines = ["frame,row,col,magnitude,count"]
    lines += [f"{e.frame},{e.cell[0]},{e.cell[1]},{e.magnitude:.6f},{e.count}" for e in events]
    return "\n".join(lines) + "\n"


def _hazards_csv(hazards) -> str:
    lines = ["frame,row,col,severity"]
    lines += [f"{h.frame},{h.cell[0]},{h.cell[1]},{h.severity:.6f}" for h in hazards]
    return "\n".join(lines) + "\n"


def extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
    env = loads_env(req.env_text)
    events = extract_events(env, req.tau_poi)
    hazards = extract_hazards(env, req.tau_haz)
    return schemas.ExtractResponse(
        events=[schemas.EventModel(frame=e.frame, row=e.cell[0], col=e.cell[1],
                                   magnitude=e.magnitude, count=e.count) for e in events],
        hazards=[schemas.HazardModel(frame=h.frame, row=h.cell[0], col=h.cell[1],
                                     severity=h.severity) for h in hazards],
        events_csv=_events_csv(events),
        hazards_csv=_hazards_csv(hazards),
    )


def cluster(req: schemas.ClusterRequest) -> schemas.ClusterResponse:
    env = loads_env(req.env_text)
    cfg = RunConfig(**req.config)
    mission = cfg.mission()
    events = extract_events(env, cfg.tau_poi)
    hazards = extract_hazards(env, cfg.tau_haz)
    clusters = wpr_cluster(events, hazards, env.spec, mission.wpr, frame=req.frame)
    return schemas.ClusterResponse(
        clusters=[schemas.ClusterModel(rank=i + 1, row=c.centroid[0], col=c.centroid[1],
                                       score=c.score, covered_count=c.covered_count)
                  for i, c in enumerate(clusters)],
        csv=clusters_to_csv(clusters),
    )


def graph(req: schemas.GraphRequest) -> schemas.GraphResponse:
    env = loads_env(req.env_text)
    cfg = RunConfig(**req.config)
    prepared = prepare_mission(env, cfg.mission())
    g = prepared.graph
    geo = None
    if req.include_geojson:
        geo = [frame_geojson(g, t) for t in range(g.frames)]
    return schemas.GraphResponse(
        frames=g.frames,
        nodes=[schemas.GraphNodeModel(id=n.id, kind=n.kind, row=n.cell[0], col=n.cell[1])
               for n in g.nodes],
        edges=[schemas.GraphEdgeModel(a=e.a, b=e.b, base_distance=e.base_distance)
               for e in g.edges],
        nodes_csv=nodes_to_csv(g),
        edges_csv=edges_to_csv(g),
        geojson=geo,
    )


def plan(req: schemas.PlanRequest) -> schemas.PlanResponse:
    if req.planner not in ("waitr", "greedy"):
        raise ValueError(f"unknown planner {req.planner!r}")
    env = loads_env(req.env_text)
    cfg = RunConfig(**req.config)
    mission = cfg.mission()
    if req.frame >= env.spec.frames:
        raise ValueError(f"frame {req.frame} out of range for {env.spec.frames}-frame env")
    prepared = prepare_mission(env, mission)
    rewards = prepared.rewards_at(req.frame, mission)
    if req.planner == "waitr":
        plans = plan_waitr(prepared.graph, prepared.pathlets, prepared.agents,
                           rewards, mission.planner, frame=req.frame)
    else:
        plans = plan_greedy(prepared.graph, prepared.pathlets, prepared.agents,
                            prepared.events, set(), mission.planner, frame=req.frame)
    return schemas.PlanResponse(
        frame=req.frame,
        planner=req.planner,
        plans=[schemas.PlanModel(
            agent=p.agent,
            projected_score=p.projected_score,
            waypoints=[schemas.PlanStepModel(step=t, node=n,
                                             row=prepared.graph.nodes[n].cell[0],
                                             col=prepared.graph.nodes[n].cell[1])
                       for t, n in enumerate(p.waypoints)],
        ) for p in plans],
        csv=plans_to_csv(plans, prepared.graph, req.frame, rewards),
    )


def run(req: schemas.RunRequest) -> schemas.RunResponse:
    env = loads_env(req.env_text)
    cfg = RunConfig(**req.config)
    report, trace = simulate(env, req.planner, cfg.mission(), seed=req.seed)
    geo = None
    if req.include_geojson and trace.graph is not None:
        geo = [frame_geojson(trace.graph, t, agent_positions=trace.positions[t])
               for t in range(trace.graph.frames)]
    return schemas.RunResponse(
        planner=report.planner,
        seed=report.seed,
        per_frame=[schemas.FrameStatsModel(frame=fs.frame, newly_covered=fs.newly_covered,
                                           cumulative_covered=fs.covered_cum,
                                           hazard_exposure_steps=fs.hazard_exposure_steps)
                   for fs in report.per_frame],
        covered=report.covered,
        total_events=report.total_events,
        ecr=report.ecr,
        zero_total=report.zero_total,
        positions=trace.positions,
        metrics_csv=metrics_to_csv([report]),
        geojson=geo,
    )


def compare(req: schemas.CompareRequest) -> schemas.CompareResponse:
    cfg = RunConfig(**req.config)
    env = loads_env(req.env_text) if req.env_text is not None else None
    seeds = req.seeds if req.seeds is not None else cfg.seeds
    comparison = sim_compare(cfg.mission(), seeds=seeds, env=env)
    by_seed: dict[int, dict[str, int]] = {}
    totals_by_seed: dict[int, int] = {}
    for r in comparison.reports:
        by_seed.setdefault(r.seed, {})[r.planner] = r.covered
        totals_by_seed[r.seed] = r.total_events
    rows = []
    for seed in sorted(by_seed):
        w, g = by_seed[seed]["waitr"], by_seed[seed]["greedy"]
        win = "waitr" if w > g else ("greedy" if g > w else "tie")
        rows.append(schemas.CompareSeedRow(seed=seed, waitr_covered=w, greedy_covered=g,
                                           total_events=totals_by_seed[seed], win=win))
    return schemas.CompareResponse(
        rows=rows,
        totals=comparison.totals(),
        wins=comparison.wins,
        summary_csv=summary_to_csv(comparison),
        table_csv=table_to_csv(comparison),
        metrics_csv=metrics_to_csv(comparison.reports),
    )
