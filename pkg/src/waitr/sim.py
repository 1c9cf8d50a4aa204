"""Mission simulation: run planners over an environment and score coverage.

A mission walks every frame of the environment: refresh the graph, plan,
move each agent one step, then credit events lying within the observational
radius of any end-of-frame agent position. Events are one-shot rewards; the
Event Coverage Ratio is covered / total. The comparison harness runs the
WAITR and greedy planners over identical extracted event and hazard sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .clustering import WPRConfig, wpr_cluster
from .env_model import EnvSeries, Event, GridSpec, Hazard, extract_events, extract_hazards, synth_scenario
from .kgraph import GraphKnobs, KGraph, WAYPOINT, build_graph, update_frame
from .pathlets import Pathlet, auto_block, partition
from .planner import AgentState, Plan, PlannerConfig, forecast_rewards, plan_greedy, plan_waitr
from .ted import TEDConfig, activate, density_series_for_cells, forecast_weights

PLANNER_KINDS = ("waitr", "greedy")


@dataclass(frozen=True)
class MissionConfig:
    tau_poi: float = 1.0
    tau_haz: float = 0.5
    agents: int = 3
    pathlet_block: int = 0  # 0 = auto from speed, horizon and cell size
    wpr: WPRConfig = WPRConfig()
    ted: TEDConfig = TEDConfig()
    planner: PlannerConfig = PlannerConfig()
    knobs: GraphKnobs = GraphKnobs()

    def __post_init__(self):
        if self.agents < 1:
            raise ValueError(f"agents must be >= 1, got {self.agents}")
        if self.tau_poi <= 0 or self.tau_haz <= 0:
            raise ValueError("tau_poi and tau_haz must be positive")


@dataclass(frozen=True)
class FrameStats:
    frame: int
    newly_covered: int
    covered_cum: int
    hazard_exposure_steps: int


@dataclass(frozen=True)
class MetricsReport:
    planner: str
    seed: int
    per_frame: tuple[FrameStats, ...]
    covered: int
    total_events: int
    ecr: float
    zero_total: bool = False


@dataclass
class MissionTrace:
    graph: KGraph | None = None
    pathlets: list[Pathlet] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    hazards: list[Hazard] = field(default_factory=list)
    positions: list[list[int]] = field(default_factory=list)   # per frame, per agent node
    activations: list[set[int]] = field(default_factory=list)
    activation_rows: list[tuple[int, int, float, bool]] = field(default_factory=list)
    plans: list[list[Plan]] = field(default_factory=list)


def ecr(covered: int, total: int) -> float:
    """Event coverage ratio; 0.0 for the empty mission (flagged upstream)."""
    if total < 0 or covered < 0:
        raise ValueError("counts must be nonnegative")
    if covered > total:
        raise ValueError(f"covered ({covered}) exceeds total ({total})")
    if total == 0:
        return 0.0
    return covered / total


def place_agents(
    graph: KGraph,
    events: Sequence[Event],
    hazards: Sequence[Hazard],
    cfg: MissionConfig,
) -> list[AgentState]:
    """Start each agent at the graph node nearest one of the top first-frame
    clustering waypoints (cycling when fewer clusters than agents)."""
    spec = graph.spec
    first = wpr_cluster(events, hazards, spec, cfg.wpr, frame=1)
    if not first:
        first = wpr_cluster(events, hazards, spec, cfg.wpr)
    navigable = [graph.nodes[i] for i in graph.navigable_ids()]
    agents = []
    for i in range(cfg.agents):
        centroid = first[i % len(first)].centroid
        node = min(navigable, key=lambda n: (spec.cell_distance(n.cell, centroid), n.id))
        agents.append(AgentState(id=i, node=node.id, visited=[node.id]))
    return agents


@dataclass
class PreparedMission:
    env: EnvSeries
    events: list[Event]
    hazards: list[Hazard]
    clusters: list
    graph: KGraph
    pathlets: list[Pathlet]
    agents: list[AgentState]
    series: list

    def rewards_at(self, frame: int, cfg: MissionConfig):
        forecasts = forecast_weights(self.series, max(frame - 1, 0), cfg.ted)
        return forecast_rewards(self.graph, frame, cfg.planner.horizon, forecasts)


def prepare_mission(
    env: EnvSeries,
    cfg: MissionConfig,
    events: Sequence[Event] | None = None,
    hazards: Sequence[Hazard] | None = None,
) -> PreparedMission:
    """Everything a mission (or a one-off planning query) needs: extracted
    events and hazards, clusters, the frame-updated graph, pathlets, placed
    agents and the per-waypoint density series. Requires a nonempty event set."""
    spec = env.spec
    if events is None:
        events = extract_events(env, cfg.tau_poi)
    if hazards is None:
        hazards = extract_hazards(env, cfg.tau_haz)
    clusters = wpr_cluster(events, hazards, spec, cfg.wpr)
    graph = build_graph(clusters, hazards, spec, cfg.knobs)
    for t in range(graph.frames):
        update_frame(graph, t, events, hazards)
    block = cfg.pathlet_block or auto_block(cfg.planner.speed, cfg.planner.horizon, spec.cell_size)
    pathlets = partition(graph, block)
    pathlet_of = {nid: p.id for p in pathlets for nid in p.node_ids}
    agents = place_agents(graph, events, hazards, cfg)
    for agent in agents:
        agent.pathlet = pathlet_of[agent.node]
    waypoint_cells = {n.id: n.cell for n in graph.nodes if n.kind == WAYPOINT}
    series = density_series_for_cells(waypoint_cells, events, spec, cfg.knobs.obs_radius)
    return PreparedMission(env=env, events=list(events), hazards=list(hazards),
                           clusters=clusters, graph=graph, pathlets=list(pathlets),
                           agents=agents, series=series)


def simulate(
    env: EnvSeries,
    planner_kind: str,
    cfg: MissionConfig = MissionConfig(),
    seed: int = 0,
    events: Sequence[Event] | None = None,
    hazards: Sequence[Hazard] | None = None,
) -> tuple[MetricsReport, MissionTrace]:
    """Run one mission and return its metrics plus the full trace."""
    if planner_kind not in PLANNER_KINDS:
        raise ValueError(f"unknown planner {planner_kind!r}; use one of {PLANNER_KINDS}")
    spec = env.spec
    if events is None:
        events = extract_events(env, cfg.tau_poi)
    if hazards is None:
        hazards = extract_hazards(env, cfg.tau_haz)
    total = sum(e.count for e in events)
    if total == 0:
        per_frame = tuple(FrameStats(t, 0, 0, 0) for t in range(spec.frames))
        report = MetricsReport(planner=planner_kind, seed=seed, per_frame=per_frame,
                               covered=0, total_events=0, ecr=0.0, zero_total=True)
        return report, MissionTrace(events=list(events), hazards=list(hazards))

    prepared = prepare_mission(env, cfg, events, hazards)
    graph, pathlets, agents, series = (prepared.graph, prepared.pathlets,
                                       prepared.agents, prepared.series)
    pathlet_of = {nid: p.id for p in pathlets for nid in p.node_ids}

    covered: set[Event] = set()
    covered_cum = 0
    per_frame: list[FrameStats] = []
    trace = MissionTrace(graph=graph, pathlets=list(pathlets),
                         events=list(events), hazards=list(hazards))
    hazard_cells_by_frame: dict[int, list[tuple[int, int]]] = {}
    for h in hazards:
        hazard_cells_by_frame.setdefault(h.frame, []).append(h.cell)

    for f in range(spec.frames):
        activations = activate(series, f - 1, cfg.ted) if f >= 2 else set()
        if f >= 2:
            for s in series:
                rate = density_rate(s, f - 1)
                trace.activation_rows.append((f, s.node, rate, s.node in activations))
        update_frame(graph, f, events, hazards, activations)

        if planner_kind == "waitr":
            forecasts = forecast_weights(series, max(f - 1, 0), cfg.ted)
            rewards = forecast_rewards(graph, f, cfg.planner.horizon, forecasts)
            plans = plan_waitr(graph, pathlets, agents, rewards, cfg.planner, frame=f)
        else:
            plans = plan_greedy(graph, pathlets, agents, events, covered, cfg.planner, frame=f)

        for agent, plan in zip(agents, plans):
            agent.node = plan.waypoints[1] if len(plan.waypoints) > 1 else plan.waypoints[0]
            agent.pathlet = pathlet_of[agent.node]
            agent.visited.append(agent.node)

        newly = 0
        for e in events:
            if e.frame == f and e not in covered:
                if any(spec.cell_distance(graph.nodes[a.node].cell, e.cell) <= cfg.planner.radius
                       for a in agents):
                    covered.add(e)
                    newly += e.count
        covered_cum += newly

        exposure = 0
        for a in agents:
            cell = graph.nodes[a.node].cell
            if any(spec.cell_distance(cell, hc) <= graph.hazard_radius()
                   for hc in hazard_cells_by_frame.get(f, ())):
                exposure += 1

        per_frame.append(FrameStats(frame=f, newly_covered=newly,
                                    covered_cum=covered_cum, hazard_exposure_steps=exposure))
        trace.positions.append([a.node for a in agents])
        trace.activations.append(activations)
        trace.plans.append(plans)

    report = MetricsReport(planner=planner_kind, seed=seed, per_frame=tuple(per_frame),
                           covered=covered_cum, total_events=total,
                           ecr=ecr(covered_cum, total))
    return report, trace


def run_mission(
    env: EnvSeries,
    planner_kind: str,
    cfg: MissionConfig = MissionConfig(),
    seed: int = 0,
) -> MetricsReport:
    report, _ = simulate(env, planner_kind, cfg, seed)
    return report


@dataclass(frozen=True)
class Comparison:
    reports: tuple[MetricsReport, ...]
    wins: dict[str, int]

    def totals(self) -> dict[str, int]:
        out = {kind: 0 for kind in PLANNER_KINDS}
        for r in self.reports:
            out[r.planner] += r.covered
        return out


def compare(
    cfg: MissionConfig,
    seeds: Sequence[int],
    env: EnvSeries | None = None,
    spec: GridSpec | None = None,
) -> Comparison:
    """Both planners on identical (env, events, hazards) per seed.

    Without a fixed env, each seed generates its own synthetic scenario on
    `spec` (default 20x20x7).
    """
    if not seeds:
        raise ValueError("need at least one seed")
    if spec is None:
        spec = GridSpec(width=20, height=20, frames=7)
    reports: list[MetricsReport] = []
    wins = {"waitr": 0, "greedy": 0, "tie": 0}
    for seed in seeds:
        scenario = env if env is not None else synth_scenario(seed, spec)
        events = extract_events(scenario, cfg.tau_poi)
        hazards = extract_hazards(scenario, cfg.tau_haz)
        by_kind = {}
        for kind in PLANNER_KINDS:
            report, _ = simulate(scenario, kind, cfg, seed=seed, events=events, hazards=hazards)
            reports.append(report)
            by_kind[kind] = report.covered
        if by_kind["waitr"] > by_kind["greedy"]:
            wins["waitr"] += 1
        elif by_kind["waitr"] < by_kind["greedy"]:
            wins["greedy"] += 1
        else:
            wins["tie"] += 1
    return Comparison(reports=tuple(reports), wins=wins)


def metrics_to_csv(reports: Sequence[MetricsReport]) -> str:
    lines = ["planner,seed,frame,newly_covered,cumulative_covered,hazard_exposure_steps"]
    for r in reports:
        for fs in r.per_frame:
            lines.append(f"{r.planner},{r.seed},{fs.frame},{fs.newly_covered},"
                         f"{fs.covered_cum},{fs.hazard_exposure_steps}")
    return "\n".join(lines) + "\n"


def summary_to_csv(comparison: Comparison) -> str:
    """One row per (planner, seed): per-frame newly covered counts, total,
    percentage and the seed's win flag."""
    frames = max(len(r.per_frame) for r in comparison.reports)
    header = ["planner", "seed"] + [f"frame_{t}" for t in range(frames)] + ["total", "pct", "win"]
    lines = [",".join(header)]
    by_seed: dict[int, dict[str, MetricsReport]] = {}
    for r in comparison.reports:
        by_seed.setdefault(r.seed, {})[r.planner] = r
    for seed in sorted(by_seed):
        pair = by_seed[seed]
        for kind in PLANNER_KINDS:
            r = pair[kind]
            other = pair["greedy" if kind == "waitr" else "waitr"]
            if r.covered > other.covered:
                win = kind
            elif r.covered < other.covered:
                win = other.planner
            else:
                win = "tie"
            pct = 100.0 * ecr(r.covered, r.total_events)
            row = [kind, str(seed)] + [str(fs.newly_covered) for fs in r.per_frame] + \
                  [str(r.covered), f"{pct:.2f}", win]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def table_to_csv(comparison: Comparison) -> str:
    """Per-frame counts summed over seeds, one row per frame plus totals and
    percentages, one column per planner."""
    frames = max(len(r.per_frame) for r in comparison.reports)
    per_frame = {kind: [0] * frames for kind in PLANNER_KINDS}
    totals = {kind: 0 for kind in PLANNER_KINDS}
    grand_total = 0
    seen_seeds = set()
    for r in comparison.reports:
        for fs in r.per_frame:
            per_frame[r.planner][fs.frame] += fs.newly_covered
        totals[r.planner] += r.covered
        if r.seed not in seen_seeds:
            seen_seeds.add(r.seed)
            grand_total += r.total_events
    lines = ["timestep,waitr,greedy"]
    for t in range(frames):
        lines.append(f"frame_{t},{per_frame['waitr'][t]},{per_frame['greedy'][t]}")
    lines.append(f"total,{totals['waitr']},{totals['greedy']}")
    waitr_pct = 100.0 * ecr(totals["waitr"], grand_total)
    greedy_pct = 100.0 * ecr(totals["greedy"], grand_total)
    lines.append(f"pct,{waitr_pct:.2f},{greedy_pct:.2f}")
    return "\n".join(lines) + "\n"
