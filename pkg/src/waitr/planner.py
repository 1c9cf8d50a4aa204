"""Receding-horizon discounted-reward planning and the greedy baseline.

The WAITR planner scores node sequences by sum over steps t of
gamma^t * (reward(node, t) - lam * travel_cost(t)), with the step-0 travel
term zero, and searches them with a deterministic beam (a wide-enough beam
is exhaustive). Agents plan sequentially in id order; each plan claims its
(node, step) rewards so later agents steer to unclaimed ones.

The greedy baseline follows the four classic rules: chase the in-range POI
with the highest event count, break count ties by distance, residual ties
by position, and stay put when nothing is in range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .env_model import Event
from .kgraph import KGraph, reward_layer_frame
from .pathlets import Pathlet, route
from .ted import Forecast

Rewards = Mapping[tuple[int, int], float]


@dataclass(frozen=True)
class PlannerConfig:
    horizon: int = 6      # steps ahead per replanning pass
    gamma: float = 0.9
    lam: float = 0.1      # travel penalty per unit edge cost
    radius: float = 0.5   # observational radius, degrees
    speed: int = 1        # max edge hops per frame
    beam: int = 8

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.horizon < 1 or self.beam < 1 or self.speed < 1:
            raise ValueError("horizon, beam and speed must all be >= 1")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")


@dataclass
class AgentState:
    id: int
    node: int
    pathlet: int = 0
    visited: list[int] = field(default_factory=list)


@dataclass
class Plan:
    agent: int
    waypoints: list[int]
    projected_score: float


def forecast_rewards(
    graph: KGraph,
    frame: int,
    horizon: int,
    forecasts: Mapping[int, Sequence[Forecast]],
) -> dict[tuple[int, int], float]:
    """Predicted reward per (waypoint node, plan step).

    Step 0 is the node's current frame weight; steps ahead combine the
    forecast density with its decayed confidence and the node's current risk,
    mirroring the clustering weight alpha*C*V - beta*R.
    """
    knobs = graph.knobs
    rewards: dict[tuple[int, int], float] = {}
    for node in graph.nodes:
        if node.kind != "waypoint":
            continue
        nf = node.per_frame[frame]
        rewards[(node.id, 0)] = nf.weight
        node_forecasts = forecasts.get(node.id, ())
        for t in range(1, horizon + 1):
            if t - 1 < len(node_forecasts):
                f = node_forecasts[t - 1]
                rewards[(node.id, t)] = knobs.alpha * f.confidence * f.weight - knobs.beta * nf.hazard_severity
    return rewards


def transition_costs(graph: KGraph, start: int, frame: int, speed: int) -> dict[int, float]:
    """Min travel cost to every node reachable within <= speed hops.

    Staying costs zero. Edges with infinite weight (hard-blocked) are not
    traversable.
    """
    best = {start: 0.0}
    frontier = {start: 0.0}
    for _ in range(speed):
        updated: dict[int, float] = {}
        for u in sorted(frontier):
            du = frontier[u]
            for v, edge in graph.adj[u]:
                w = edge.per_frame_weight[frame]
                if math.isinf(w):
                    continue
                nd = du + w
                if nd < best.get(v, math.inf):
                    best[v] = nd
                    updated[v] = nd
        frontier = updated
        if not frontier:
            break
    return best


def score_plan(
    seq: Sequence[int],
    graph: KGraph,
    rewards: Rewards,
    cfg: PlannerConfig,
    frame: int = 0,
    claimed: frozenset[tuple[int, int]] = frozenset(),
) -> float:
    """Discounted net reward of a node sequence starting at mission `frame`."""
    if not seq:
        raise ValueError("empty sequence")
    if len(seq) > cfg.horizon + 1:
        raise ValueError(f"sequence of {len(seq)} exceeds horizon+1 = {cfg.horizon + 1}")
    score = 0.0
    for t, node in enumerate(seq):
        graph.node(node)
        reward = 0.0 if (node, t) in claimed else rewards.get((node, t), 0.0)
        travel = 0.0
        if t > 0:
            f = min(frame + t, graph.frames - 1)
            costs = transition_costs(graph, seq[t - 1], f, cfg.speed)
            if node not in costs:
                raise ValueError(f"transition {seq[t - 1]} -> {node} exceeds speed {cfg.speed}")
            travel = costs[node]
        score += cfg.gamma ** t * (reward - cfg.lam * travel)
    return score


def plan_waitr(
    graph: KGraph,
    pathlets: Sequence[Pathlet],
    agents: Sequence[AgentState],
    rewards: Rewards,
    cfg: PlannerConfig,
    frame: int = 0,
    claimed: set[tuple[int, int]] | None = None,
) -> list[Plan]:
    """Beam-search plans for all agents, claiming rewards sequentially."""
    claimed = set(claimed or ())
    plans = []
    for agent in sorted(agents, key=lambda a: a.id):
        start = agent.node
        r0 = 0.0 if (start, 0) in claimed else rewards.get((start, 0), 0.0)
        beam: list[tuple[float, tuple[int, ...]]] = [(r0, (start,))]
        for t in range(1, cfg.horizon + 1):
            f = min(frame + t, graph.frames - 1)
            moves_cache: dict[int, dict[int, float]] = {}
            candidates = []
            for sc, seq in beam:
                tail = seq[-1]
                if tail not in moves_cache:
                    moves_cache[tail] = transition_costs(graph, tail, f, cfg.speed)
                for v in sorted(moves_cache[tail]):
                    cost = moves_cache[tail][v]
                    r = 0.0 if (v, t) in claimed else rewards.get((v, t), 0.0)
                    candidates.append((sc + cfg.gamma ** t * (r - cfg.lam * cost), seq + (v,)))
            candidates.sort(key=lambda item: (-item[0], item[1]))
            beam = candidates[:cfg.beam]
        best_score, best_seq = beam[0]
        plans.append(Plan(agent=agent.id, waypoints=list(best_seq), projected_score=best_score))
        claimed.update((node, t) for t, node in enumerate(best_seq))
    return plans


def plan_greedy(
    graph: KGraph,
    pathlets: Sequence[Pathlet],
    agents: Sequence[AgentState],
    events: Sequence[Event],
    covered: set[Event],
    cfg: PlannerConfig,
    frame: int = 0,
) -> list[Plan]:
    """One greedy step per agent for the current frame's event layer."""
    spec = graph.spec
    layer = reward_layer_frame(frame)
    live = [e for e in events if e.frame == layer and e not in covered]
    navigable = [graph.nodes[i] for i in graph.navigable_ids()]

    plans = []
    for agent in sorted(agents, key=lambda a: a.id):
        here = graph.nodes[agent.node].cell
        visible: dict[tuple[int, int], int] = {}
        for e in live:
            if spec.cell_distance(here, e.cell) <= cfg.radius:
                visible[e.cell] = visible.get(e.cell, 0) + e.count
        if not visible:
            plans.append(Plan(agent=agent.id, waypoints=[agent.node, agent.node],
                              projected_score=0.0))
            continue
        # highest count, then closest to the agent, then row/col
        target_cell = min(visible,
                          key=lambda c: (-visible[c], spec.cell_distance(here, c), c))
        target_node = min(navigable,
                          key=lambda n: (spec.cell_distance(n.cell, target_cell), n.id)).id
        next_node = agent.node
        if target_node != agent.node:
            found = route(pathlets, graph, agent.node, target_node, frame)
            if found is not None:
                path = found[1]
                next_node = path[min(cfg.speed, len(path) - 1)]
        plans.append(Plan(agent=agent.id, waypoints=[agent.node, next_node],
                          projected_score=float(visible[target_cell])))
    return plans


def plans_to_csv(plans: Sequence[Plan], graph: KGraph, frame: int, rewards: Rewards) -> str:
    lines = ["agent,frame,node,row,col,claimed_reward"]
    seen: set[tuple[int, int]] = set()
    for plan in plans:
        for t, node_id in enumerate(plan.waypoints):
            cell = graph.nodes[node_id].cell
            reward = 0.0 if (node_id, t) in seen else rewards.get((node_id, t), 0.0)
            seen.add((node_id, t))
            lines.append(f"{plan.agent},{frame + t},{node_id},{cell[0]},{cell[1]},{reward:.6f}")
    return "\n".join(lines) + "\n"
