"""Pathlets: spatial blocks of the knowledge graph with shortest-path tables.

Nodes are assigned to pathlets by integer block of their grid cell. Within a
pathlet, all-pairs shortest paths over the pathlet-induced subgraph are
precomputed per frame and stored as (cost, next_hop) lookup tables. Routing
between pathlets runs a search over boundary nodes that combines the tables
with the edges crossing pathlet borders, trading bounded suboptimality for
never touching the full graph.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

from .kgraph import KGraph

Table = dict[tuple[int, int], tuple[float, int]]


@dataclass
class Pathlet:
    id: int
    node_ids: set[int]
    boundary_ids: set[int]
    block: tuple[int, int]
    tables: dict[int, Table] = field(default_factory=dict)


def auto_block(speed: int, horizon: int, cell_size: float) -> int:
    """Block side sized so an agent can cross a pathlet within one horizon."""
    return max(1, math.floor(speed * horizon / cell_size))


def partition(graph: KGraph, block: int) -> list[Pathlet]:
    """Disjoint covering pathlets keyed by (row // block, col // block)."""
    if block < 1:
        raise ValueError(f"block must be >= 1, got {block}")
    by_block: dict[tuple[int, int], set[int]] = {}
    for node in graph.nodes:
        key = (node.cell[0] // block, node.cell[1] // block)
        by_block.setdefault(key, set()).add(node.id)

    assignment = {}
    pathlets = []
    for pid, key in enumerate(sorted(by_block)):
        pathlets.append(Pathlet(id=pid, node_ids=by_block[key], boundary_ids=set(), block=key))
        for node_id in by_block[key]:
            assignment[node_id] = pid

    for edge in graph.edges:
        if assignment[edge.a] != assignment[edge.b]:
            pathlets[assignment[edge.a]].boundary_ids.add(edge.a)
            pathlets[assignment[edge.b]].boundary_ids.add(edge.b)
    return pathlets


def precompute_tables(pathlet: Pathlet, graph: KGraph, frame: int) -> None:
    """Populate the pathlet's (src, dst) -> (cost, next_hop) table at a frame.

    Costs are shortest paths over the pathlet-induced subgraph; unreachable
    pairs get no entry. next_hop is the first node after src on an optimal
    path, so chains terminate at dst.
    """
    if not 0 <= frame < graph.frames:
        raise IndexError(f"frame {frame} out of range")
    table: Table = {}
    members = pathlet.node_ids
    for src in sorted(members):
        dist, first = _dijkstra_restricted(graph, src, members, frame)
        for dst, cost in dist.items():
            table[(src, dst)] = (cost, first[dst])
    pathlet.tables[frame] = table


def _dijkstra_restricted(graph: KGraph, src: int, members: set[int], frame: int):
    dist = {src: 0.0}
    first: dict[int, int] = {src: src}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, edge in graph.adj[u]:
            if v not in members:
                continue
            w = edge.per_frame_weight[frame]
            if math.isinf(w):
                continue
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                first[v] = v if u == src else first[u]
                heapq.heappush(heap, (nd, v))
    return dist, first


def _ensure_table(pathlet: Pathlet, graph: KGraph, frame: int) -> Table:
    if frame not in pathlet.tables:
        precompute_tables(pathlet, graph, frame)
    return pathlet.tables[frame]


def _expand(pathlet: Pathlet, src: int, dst: int, frame: int) -> list[int]:
    path = [src]
    cur = src
    while cur != dst:
        cur = pathlet.tables[frame][(cur, dst)][1]
        path.append(cur)
    return path


def route(
    pathlets: Sequence[Pathlet],
    graph: KGraph,
    src: int,
    dst: int,
    frame: int,
) -> tuple[float, list[int]] | None:
    """(cost, node path) from src to dst at a frame, or None when unreachable.

    Same-pathlet queries are table lookups; cross-pathlet queries search the
    boundary skeleton, so the returned cost can exceed (never undercut) the
    full-graph optimum.
    """
    graph.node(src)
    graph.node(dst)
    if src == dst:
        return 0.0, [src]

    assignment = {}
    for p in pathlets:
        for node_id in p.node_ids:
            assignment[node_id] = p.id

    if assignment[src] == assignment[dst]:
        pathlet = pathlets[assignment[src]]
        entry = _ensure_table(pathlet, graph, frame).get((src, dst))
        if entry is not None:
            return entry[0], _expand(pathlet, src, dst, frame)
        # same block but only connected through other pathlets

    # condensed graph over {src, dst} + boundary nodes
    skeleton: set[int] = {src, dst}
    for p in pathlets:
        skeleton.update(p.boundary_ids)
    links: dict[int, list[tuple[int, float, int]]] = {n: [] for n in skeleton}  # (to, cost, pathlet or -1)
    for p in pathlets:
        table = _ensure_table(p, graph, frame)
        local = sorted(skeleton & p.node_ids)
        for i, a in enumerate(local):
            for b in local[i + 1:]:
                entry = table.get((a, b))
                if entry is not None:
                    links[a].append((b, entry[0], p.id))
                    links[b].append((a, entry[0], p.id))
    for edge in graph.edges:
        if assignment[edge.a] != assignment[edge.b]:
            w = edge.per_frame_weight[frame]
            if math.isinf(w):
                continue
            links[edge.a].append((edge.b, w, -1))
            links[edge.b].append((edge.a, w, -1))

    dist = {src: 0.0}
    prev: dict[int, tuple[int, int]] = {}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == dst:
            break
        done.add(u)
        for v, w, via in sorted(links[u]):
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = (u, via)
                heapq.heappush(heap, (nd, v))
    if dst not in dist:
        return None

    hops = []
    cur = dst
    while cur != src:
        u, via = prev[cur]
        hops.append((u, cur, via))
        cur = u
    hops.reverse()
    path = [src]
    for a, b, via in hops:
        if via == -1:
            path.append(b)
        else:
            path.extend(_expand(pathlets[via], a, b, frame)[1:])
    return dist[dst], path


def tables_to_csv(pathlets: Sequence[Pathlet]) -> str:
    lines = ["pathlet,frame,src,dst,cost,next_hop"]
    for p in pathlets:
        for frame in sorted(p.tables):
            for (src, dst), (cost, nxt) in sorted(p.tables[frame].items()):
                lines.append(f"{p.id},{frame},{src},{dst},{cost:.6f},{nxt}")
    return "\n".join(lines) + "\n"
