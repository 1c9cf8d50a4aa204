"""Weighted proximal-recurrence clustering and reward-minus-distance selection.

Each candidate waypoint is an event-bearing cell; its cluster collects every
weighted POI within the clustering radius. Weights follow
W = alpha * C * V - beta * R with V the aggregated event count, R the
normalized hazard risk and C a confidence score. Selected clusters claim
their covered events so the returned ranking covers disjoint event sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Mapping, Sequence

from .env_model import Event, GridSpec, Hazard

Cell = tuple[int, int]


@dataclass(frozen=True)
class WPRConfig:
    radius: float = 0.5   # degrees
    alpha: float = 1.0
    beta: float = 1.0
    lam: float = 0.1      # distance penalty, reward units per degree

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.alpha < 0 or self.beta < 0 or self.lam < 0:
            raise ValueError("alpha, beta and lam must be nonnegative")


@dataclass(frozen=True)
class WeightedPOI:
    cell: Cell
    V: float
    R: float
    C: float
    W: float


@dataclass(frozen=True)
class Cluster:
    centroid: Cell
    members: tuple[WeightedPOI, ...]
    score: float
    covered_count: int


def weight_poi(V: float, R: float, C: float, cfg: WPRConfig) -> float:
    """alpha * C * V - beta * R; may be negative."""
    if not 0.0 <= C <= 1.0:
        raise ValueError(f"confidence must be in [0, 1], got {C}")
    if R < 0:
        raise ValueError(f"risk must be nonnegative, got {R}")
    return cfg.alpha * C * V - cfg.beta * R


def normalized_severities(hazards: Sequence[Hazard]) -> dict[Cell, float]:
    """Per-cell max hazard severity, min-max normalized over the given set.

    A degenerate set (all severities equal) normalizes to 1.0: every hazard
    cell is then at the population maximum.
    """
    if not hazards:
        return {}
    lo = min(h.severity for h in hazards)
    hi = max(h.severity for h in hazards)
    span = hi - lo
    out: dict[Cell, float] = {}
    for h in hazards:
        norm = (h.severity - lo) / span if span > 0 else 1.0
        if norm > out.get(h.cell, -1.0):
            out[h.cell] = norm
    return out


def _cells_within(center: Cell, cells, spec: GridSpec, radius: float):
    for cell in cells:
        if spec.cell_distance(center, cell) <= radius:
            yield cell


def wpr_cluster(
    events: Sequence[Event],
    hazards: Sequence[Hazard],
    spec: GridSpec,
    cfg: WPRConfig,
    confidence: Mapping[Cell, float] | None = None,
    frame: int | None = None,
) -> list[Cluster]:
    """Ranked clusters over the events of one frame (or all frames when None).

    Candidate centroids default to event-bearing cells. Selection is greedy:
    the best-scoring candidate claims the events it covers, remaining
    candidates are rescored on the uncovered events, ties break by
    (score desc, row asc, col asc).
    """
    sel_events = [e for e in events if frame is None or e.frame == frame]
    if not sel_events:
        return []
    sel_hazards = [h for h in hazards if frame is None or h.frame == frame]
    conf = confidence or {}

    remaining: dict[Cell, list[Event]] = {}
    for e in sel_events:
        remaining.setdefault(e.cell, []).append(e)
    event_cells = sorted(remaining)

    hazard_norm = normalized_severities(sel_hazards)
    risk = {
        cell: max((hazard_norm[hc] for hc in _cells_within(cell, hazard_norm, spec, cfg.radius)),
                  default=0.0)
        for cell in event_cells
    }

    def build(center: Cell) -> tuple[tuple[WeightedPOI, ...], float, int, list[Event]]:
        members = []
        score = 0.0
        claimed: list[Event] = []
        for cell in _cells_within(center, event_cells, spec, cfg.radius):
            evs = remaining[cell]
            if not evs:
                continue
            V = float(sum(e.count for e in evs))
            C = float(conf.get(cell, 1.0))
            W = weight_poi(V, risk[cell], C, cfg)
            members.append(WeightedPOI(cell=cell, V=V, R=risk[cell], C=C, W=W))
            score += W
            claimed.extend(evs)
        return tuple(members), score, sum(e.count for e in claimed), claimed

    clusters: list[Cluster] = []
    open_candidates = list(event_cells)
    while open_candidates:
        best = None
        for center in open_candidates:
            members, score, covered, claimed = build(center)
            if covered == 0:
                continue
            key = (-score, center[0], center[1])
            if best is None or key < best[0]:
                best = (key, center, members, score, covered, claimed)
        if best is None:
            break
        _, center, members, score, covered, claimed = best
        clusters.append(Cluster(centroid=center, members=members, score=score, covered_count=covered))
        for e in claimed:
            remaining[e.cell].remove(e)
        open_candidates.remove(center)
    return clusters


def prep_select(
    clusters: Sequence[Cluster],
    k: int,
    lam: float,
    cell_size: float = 1.0,
) -> list[Cluster]:
    """Pick k clusters and a visiting order maximizing score sum minus
    lam-scaled consecutive centroid travel.

    Exact enumeration over selections and orders up to 8 candidates,
    greedy best-insertion beyond. Asking for more clusters than exist
    returns them all, ordered.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(clusters)
    if n == 0:
        return []
    m = min(k, n)

    def dist(a: Cluster, b: Cluster) -> float:
        return math.hypot(a.centroid[0] - b.centroid[0],
                          a.centroid[1] - b.centroid[1]) * cell_size

    def objective(order: Sequence[Cluster]) -> float:
        total = sum(c.score for c in order)
        travel = sum(dist(order[i], order[i + 1]) for i in range(len(order) - 1))
        return total - lam * travel

    if n <= 8:
        best_order = None
        best_key = None
        for combo in combinations(range(n), m):
            for perm in permutations(combo):
                order = [clusters[i] for i in perm]
                key = (-objective(order), tuple(c.centroid for c in order))
                if best_key is None or key < best_key:
                    best_key = key
                    best_order = order
        return list(best_order)

    order: list[Cluster] = []
    chosen: set[int] = set()
    while len(order) < m:
        best = None
        for i, cand in enumerate(clusters):
            if i in chosen:
                continue
            for pos in range(len(order) + 1):
                before = order[pos - 1] if pos > 0 else None
                after = order[pos] if pos < len(order) else None
                added = 0.0
                if before is not None:
                    added += dist(before, cand)
                if after is not None:
                    added += dist(cand, after)
                if before is not None and after is not None:
                    added -= dist(before, after)
                delta = cand.score - lam * added
                key = (-delta, i, pos)
                if best is None or key < best[0]:
                    best = (key, i, pos)
        _, i, pos = best
        order.insert(pos, clusters[i])
        chosen.add(i)
    return order


def clusters_to_csv(clusters: Sequence[Cluster]) -> str:
    lines = ["rank,centroid_row,centroid_col,score,covered_count"]
    for rank, c in enumerate(clusters, start=1):
        lines.append(f"{rank},{c.centroid[0]},{c.centroid[1]},{c.score:.6f},{c.covered_count}")
    return "\n".join(lines) + "\n"
