"""Spatiotemporal knowledge graph over waypoints, hazards and bridge nodes.

Waypoint nodes come from cluster centroids and carry per-frame rewards;
bridge nodes are reward-free lattice filler guaranteeing connectivity;
hazard nodes annotate hazardous cells and take no part in routing. Edge
weights combine base distance with a per-frame hazard penalty, so hazards
make paths expensive without ever disconnecting the graph (an infinite
h_coef hard-blocks affected edges).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .clustering import Cluster, normalized_severities
from .env_model import Event, GridSpec, Hazard

Cell = tuple[int, int]

WAYPOINT = "waypoint"
HAZARD = "hazard"
BRIDGE = "bridge"


def reward_layer_frame(frame: int) -> int:
    """Event layer feeding frame-level rewards.

    Differentials start at frame 1, so frame 0 borrows the frame-1 layer as
    its first reward surface.
    """
    return max(frame, 1)


@dataclass
class NodeFrame:
    weight: float = 0.0
    event_count: int = 0
    active: bool = False
    hazard_severity: float = 0.0


@dataclass
class KNode:
    id: int
    kind: str
    cell: Cell
    per_frame: dict[int, NodeFrame] = field(default_factory=dict)


@dataclass
class KEdge:
    a: int
    b: int
    base_distance: float
    per_frame_weight: dict[int, float] = field(default_factory=dict)

    def other(self, node_id: int) -> int:
        return self.b if node_id == self.a else self.a


@dataclass(frozen=True)
class GraphKnobs:
    connect_radius: float = 0.75   # degrees
    bridge_spacing: int = 2        # cells
    lambda_edge: float = 1.0
    h_coef: float = 1.0
    obs_radius: float = 0.5        # degrees
    hazard_radius: float | None = None  # degrees; defaults to cell_size
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.connect_radius <= 0 or self.bridge_spacing < 1:
            raise ValueError("connect_radius must be positive and bridge_spacing >= 1")
        if self.lambda_edge < 0 or self.h_coef < 0:
            raise ValueError("lambda_edge and h_coef must be nonnegative")


@dataclass
class KGraph:
    spec: GridSpec
    knobs: GraphKnobs
    nodes: list[KNode]
    edges: list[KEdge]
    adj: dict[int, list[tuple[int, KEdge]]]
    frames: int

    def node(self, node_id: int) -> KNode:
        if not 0 <= node_id < len(self.nodes):
            raise KeyError(f"unknown node id {node_id}")
        return self.nodes[node_id]

    def navigable_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind != HAZARD]

    def waypoint_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.kind == WAYPOINT]

    def hazard_radius(self) -> float:
        return self.knobs.hazard_radius if self.knobs.hazard_radius is not None else self.spec.cell_size


def build_graph(
    waypoints: Sequence[Cluster],
    hazards: Sequence[Hazard],
    spec: GridSpec,
    knobs: GraphKnobs = GraphKnobs(),
) -> KGraph:
    """Assemble the graph: waypoint nodes in cluster-rank order, bridge nodes
    on the lattice where no waypoint is near, hazard nodes per hazardous cell,
    plus minimum-spanning extra edges whenever the lattice leaves the
    navigable part disconnected."""
    if not waypoints:
        raise ValueError("cannot build a knowledge graph without waypoints")

    nodes: list[KNode] = []
    for cluster in waypoints:
        nodes.append(KNode(id=len(nodes), kind=WAYPOINT, cell=cluster.centroid))

    waypoint_cells = [n.cell for n in nodes]
    for r in range(0, spec.height, knobs.bridge_spacing):
        for c in range(0, spec.width, knobs.bridge_spacing):
            cell = (r, c)
            if any(spec.cell_distance(cell, wc) <= knobs.connect_radius for wc in waypoint_cells):
                continue
            nodes.append(KNode(id=len(nodes), kind=BRIDGE, cell=cell))

    hazard_cells = sorted({h.cell for h in hazards})
    for cell in hazard_cells:
        nodes.append(KNode(id=len(nodes), kind=HAZARD, cell=cell))

    for node in nodes:
        node.per_frame = {t: NodeFrame() for t in range(spec.frames)}

    navigable = [n for n in nodes if n.kind != HAZARD]
    edges: list[KEdge] = []
    for i, na in enumerate(navigable):
        for nb in navigable[i + 1:]:
            d = spec.cell_distance(na.cell, nb.cell)
            if 0 < d <= knobs.connect_radius:
                edges.append(_mk_edge(na.id, nb.id, d, spec.frames, knobs))

    # union-find over navigable nodes; connect components with shortest links
    parent = {n.id: n.id for n in navigable}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        parent[find(e.a)] = find(e.b)
    while True:
        roots = {find(n.id) for n in navigable}
        if len(roots) <= 1:
            break
        best = None
        for i, na in enumerate(navigable):
            for nb in navigable[i + 1:]:
                if find(na.id) == find(nb.id):
                    continue
                d = spec.cell_distance(na.cell, nb.cell)
                key = (d, na.id, nb.id)
                if best is None or key < best:
                    best = key
        d, a, b = best
        edges.append(_mk_edge(a, b, d, spec.frames, knobs))
        parent[find(a)] = find(b)

    adj: dict[int, list[tuple[int, KEdge]]] = {n.id: [] for n in nodes}
    for e in edges:
        adj[e.a].append((e.b, e))
        adj[e.b].append((e.a, e))
    for node_id in adj:
        adj[node_id].sort(key=lambda pair: pair[0])

    return KGraph(spec=spec, knobs=knobs, nodes=nodes, edges=edges, adj=adj, frames=spec.frames)


def _mk_edge(a: int, b: int, distance: float, frames: int, knobs: GraphKnobs) -> KEdge:
    weights = {t: knobs.lambda_edge * distance for t in range(frames)}
    return KEdge(a=a, b=b, base_distance=distance, per_frame_weight=weights)


def update_frame(
    graph: KGraph,
    frame: int,
    events: Sequence[Event],
    hazards: Sequence[Hazard],
    activations: Iterable[int] = (),
) -> None:
    """Refresh frame-resolved attributes: waypoint rewards from the frame's
    event layer, activation flags, hazard severities and edge penalties.
    Touches only frame `frame`; idempotent for fixed inputs."""
    if not 0 <= frame < graph.frames:
        raise IndexError(f"frame {frame} out of range 0..{graph.frames - 1}")
    spec, knobs = graph.spec, graph.knobs
    active_set = set(activations)

    layer = reward_layer_frame(frame)
    frame_events = [e for e in events if e.frame == layer]
    frame_hazards = [h for h in hazards if h.frame == frame]
    hazard_norm = normalized_severities(frame_hazards)
    severity_by_cell: dict[Cell, float] = {}
    for h in frame_hazards:
        severity_by_cell[h.cell] = max(severity_by_cell.get(h.cell, 0.0), h.severity)

    for node in graph.nodes:
        nf = node.per_frame[frame]
        if node.kind == WAYPOINT:
            count = sum(e.count for e in frame_events
                        if spec.cell_distance(node.cell, e.cell) <= knobs.obs_radius)
            risk = max((v for c, v in hazard_norm.items()
                        if spec.cell_distance(node.cell, c) <= knobs.obs_radius), default=0.0)
            nf.event_count = count
            nf.hazard_severity = risk
            nf.weight = knobs.alpha * count - knobs.beta * risk
            nf.active = node.id in active_set
        elif node.kind == HAZARD:
            nf.hazard_severity = severity_by_cell.get(node.cell, 0.0)
            nf.weight = 0.0
            nf.event_count = 0
            nf.active = nf.hazard_severity > 0.0
        else:
            nf.weight = 0.0
            nf.event_count = 0
            nf.active = False
            nf.hazard_severity = 0.0

    hz_radius = graph.hazard_radius()
    for edge in graph.edges:
        a = graph.nodes[edge.a].cell
        b = graph.nodes[edge.b].cell
        near = [sev for cell, sev in sorted(severity_by_cell.items())
                if _point_segment_distance(cell, a, b) * spec.cell_size <= hz_radius]
        if near:
            penalty = knobs.h_coef * (sum(near) / len(near))
        else:
            penalty = 0.0
        edge.per_frame_weight[frame] = knobs.lambda_edge * edge.base_distance + penalty


def _point_segment_distance(p: Cell, a: Cell, b: Cell) -> float:
    """Distance from point to segment in cell units."""
    pr, pc = float(p[0]), float(p[1])
    ar, ac = float(a[0]), float(a[1])
    br, bc = float(b[0]), float(b[1])
    vr, vc = br - ar, bc - ac
    vv = vr * vr + vc * vc
    if vv == 0.0:
        return math.hypot(pr - ar, pc - ac)
    t = ((pr - ar) * vr + (pc - ac) * vc) / vv
    t = min(1.0, max(0.0, t))
    return math.hypot(pr - (ar + t * vr), pc - (ac + t * vc))


def neighbors(graph: KGraph, node_id: int, frame: int) -> list[tuple[int, float]]:
    """Frame-resolved adjacency of a node, sorted by neighbor id."""
    graph.node(node_id)
    if not 0 <= frame < graph.frames:
        raise IndexError(f"frame {frame} out of range")
    return [(other, edge.per_frame_weight[frame]) for other, edge in graph.adj[node_id]]


def nodes_to_csv(graph: KGraph) -> str:
    lines = ["id,kind,row,col,frame,W,active"]
    for node in graph.nodes:
        for t in range(graph.frames):
            nf = node.per_frame[t]
            lines.append(f"{node.id},{node.kind},{node.cell[0]},{node.cell[1]},"
                         f"{t},{nf.weight:.6f},{int(nf.active)}")
    return "\n".join(lines) + "\n"


def edges_to_csv(graph: KGraph) -> str:
    lines = ["a,b,frame,weight"]
    for edge in sorted(graph.edges, key=lambda e: (e.a, e.b)):
        for t in range(graph.frames):
            lines.append(f"{edge.a},{edge.b},{t},{edge.per_frame_weight[t]:.6f}")
    return "\n".join(lines) + "\n"


def frame_geojson(graph: KGraph, frame: int, agent_positions: Sequence[int] = ()) -> dict:
    """FeatureCollection of node points and edge line strings at one frame."""
    if not 0 <= frame < graph.frames:
        raise IndexError(f"frame {frame} out of range")
    features = []
    for node in graph.nodes:
        nf = node.per_frame[frame]
        lat, lon = graph.spec.cell_latlon(node.cell)
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {
                "id": node.id, "kind": node.kind, "frame": frame,
                "weight": round(nf.weight, 6), "event_count": nf.event_count,
                "active": nf.active, "hazard_severity": round(nf.hazard_severity, 6),
            },
        })
    for edge in sorted(graph.edges, key=lambda e: (e.a, e.b)):
        a_lat, a_lon = graph.spec.cell_latlon(graph.nodes[edge.a].cell)
        b_lat, b_lon = graph.spec.cell_latlon(graph.nodes[edge.b].cell)
        weight = edge.per_frame_weight[frame]
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString",
                         "coordinates": [[a_lon, a_lat], [b_lon, b_lat]]},
            "properties": {"a": edge.a, "b": edge.b, "frame": frame,
                           "weight": weight if math.isinf(weight) else round(weight, 6)},
        })
    for i, node_id in enumerate(agent_positions):
        lat, lon = graph.spec.cell_latlon(graph.nodes[node_id].cell)
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {"kind": "agent", "agent": i, "frame": frame, "node": node_id},
        })
    return {"type": "FeatureCollection", "features": features}


def geojson_dumps(collection: dict) -> str:
    return json.dumps(collection, sort_keys=True, separators=(",", ":"), allow_nan=True)
