import copy
import math

import pytest

from waitr.clustering import Cluster, WPRConfig, wpr_cluster
from waitr.env_model import Event, GridSpec, Hazard, extract_events, extract_hazards, synth_scenario
from waitr.kgraph import (
    BRIDGE,
    GraphKnobs,
    HAZARD,
    WAYPOINT,
    build_graph,
    edges_to_csv,
    frame_geojson,
    neighbors,
    nodes_to_csv,
    reward_layer_frame,
    update_frame,
)


def mk_cluster(row, col, score=1.0):
    return Cluster(centroid=(row, col), members=(), score=score, covered_count=0)


def seeded_graph(seed=42, tau_poi=1.0, tau_haz=0.5, knobs=GraphKnobs()):
    spec = GridSpec(width=20, height=20, frames=7)
    env = synth_scenario(seed, spec)
    events = extract_events(env, tau_poi)
    hazards = extract_hazards(env, tau_haz)
    clusters = wpr_cluster(events, hazards, spec, WPRConfig())
    graph = build_graph(clusters, hazards, spec, knobs)
    return graph, events, hazards


def components_by_union_find(node_ids, edge_pairs):
    parent = {n: n for n in node_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edge_pairs:
        if a in parent and b in parent:
            parent[find(a)] = find(b)
    return {find(n) for n in node_ids}


def segment_distance_oracle(p, a, b):
    # dense sampling along the segment: independent of the closed form
    best = float("inf")
    steps = 2000
    for i in range(steps + 1):
        t = i / steps
        r = a[0] + t * (b[0] - a[0])
        c = a[1] + t * (b[1] - a[1])
        best = min(best, math.hypot(p[0] - r, p[1] - c))
    return best


class TestBuildGraph:
    def test_zero_waypoints_rejected(self):
        spec = GridSpec(width=5, height=5, frames=2)
        with pytest.raises(ValueError):
            build_graph([], [], spec)

    def test_single_waypoint_with_lattice_is_connected(self):
        spec = GridSpec(width=10, height=10, frames=3)
        graph = build_graph([mk_cluster(5, 5)], [], spec)
        kinds = {n.kind for n in graph.nodes}
        assert WAYPOINT in kinds and BRIDGE in kinds
        nav = graph.navigable_ids()
        pairs = [(e.a, e.b) for e in graph.edges]
        assert len(components_by_union_find(nav, pairs)) == 1

    def test_two_close_waypoints_direct_edge(self):
        spec = GridSpec(width=40, height=40, frames=2, cell_size=0.25)
        knobs = GraphKnobs(connect_radius=0.75, bridge_spacing=100, lambda_edge=2.0)
        graph = build_graph([mk_cluster(0, 0), mk_cluster(0, 2)], [], spec, knobs)
        update_frame(graph, 0, [], [])
        direct = [e for e in graph.edges if {e.a, e.b} == {0, 1}]
        assert len(direct) == 1
        assert direct[0].per_frame_weight[0] == pytest.approx(2.0 * 0.5)

    def test_seeded_graph_connected_and_deterministic(self):
        g1, _, _ = seeded_graph()
        g2, _, _ = seeded_graph()
        assert [(n.id, n.kind, n.cell) for n in g1.nodes] == [(n.id, n.kind, n.cell) for n in g2.nodes]
        assert [(e.a, e.b, e.base_distance) for e in g1.edges] == \
               [(e.a, e.b, e.base_distance) for e in g2.edges]
        nav = g1.navigable_ids()
        pairs = [(e.a, e.b) for e in g1.edges]
        assert len(components_by_union_find(nav, pairs)) == 1

    def test_hazard_nodes_present_but_not_routed(self):
        graph, _, hazards = seeded_graph()
        hazard_ids = {n.id for n in graph.nodes if n.kind == HAZARD}
        assert hazard_ids == {n.id for n in graph.nodes} - set(graph.navigable_ids())
        assert {n.cell for n in graph.nodes if n.kind == HAZARD} == {h.cell for h in hazards}
        for e in graph.edges:
            assert e.a not in hazard_ids and e.b not in hazard_ids

    def test_no_self_loops(self):
        graph, _, _ = seeded_graph()
        assert all(e.a != e.b for e in graph.edges)


class TestUpdateFrame:
    def test_no_hazards_gives_base_weights(self):
        spec = GridSpec(width=10, height=10, frames=3)
        graph = build_graph([mk_cluster(5, 5)], [], spec)
        update_frame(graph, 1, [], [])
        for e in graph.edges:
            assert e.per_frame_weight[1] == graph.knobs.lambda_edge * e.base_distance

    def test_midpoint_hazard_single_sample_mean(self):
        spec = GridSpec(width=40, height=40, frames=2, cell_size=0.25)
        knobs = GraphKnobs(connect_radius=0.6, bridge_spacing=100, h_coef=3.0)
        graph = build_graph([mk_cluster(0, 0), mk_cluster(0, 2)], [], spec, knobs)
        hazard = Hazard(frame=0, cell=(0, 1), severity=2.5)
        update_frame(graph, 0, [], [hazard])
        edge = graph.edges[0]
        assert edge.per_frame_weight[0] == pytest.approx(edge.base_distance + 3.0 * 2.5)

    def test_waypoint_rewards_from_obs_radius(self):
        spec = GridSpec(width=20, height=20, frames=3, cell_size=0.25)
        graph = build_graph([mk_cluster(5, 5)], [], spec)
        events = [Event(frame=1, cell=(5, 5), magnitude=2.0),
                  Event(frame=1, cell=(5, 7), magnitude=2.0),   # 0.5 deg away: inside
                  Event(frame=1, cell=(5, 8), magnitude=2.0),   # 0.75 deg: outside
                  Event(frame=2, cell=(5, 5), magnitude=2.0)]
        update_frame(graph, 1, events, [])
        nf = graph.nodes[0].per_frame[1]
        assert nf.event_count == 2
        assert nf.weight == 2.0

    def test_frame_zero_uses_frame_one_layer(self):
        assert reward_layer_frame(0) == 1
        assert reward_layer_frame(3) == 3
        spec = GridSpec(width=10, height=10, frames=3, cell_size=0.25)
        graph = build_graph([mk_cluster(4, 4)], [], spec)
        events = [Event(frame=1, cell=(4, 4), magnitude=2.0)]
        update_frame(graph, 0, events, [])
        assert graph.nodes[0].per_frame[0].event_count == 1

    def test_touches_only_target_frame(self):
        graph, events, hazards = seeded_graph()
        for t in range(graph.frames):
            update_frame(graph, t, events, hazards)
        before = copy.deepcopy(graph.edges)
        before_nodes = copy.deepcopy(graph.nodes)
        update_frame(graph, 3, events, hazards, activations={0})
        for e_new, e_old in zip(graph.edges, before):
            for t in range(graph.frames):
                if t != 3:
                    assert e_new.per_frame_weight[t] == e_old.per_frame_weight[t]
        for n_new, n_old in zip(graph.nodes, before_nodes):
            for t in range(graph.frames):
                if t != 3:
                    assert n_new.per_frame[t] == n_old.per_frame[t]

    def test_idempotent(self):
        graph, events, hazards = seeded_graph()
        update_frame(graph, 2, events, hazards, activations={1, 3})
        snap_edges = [(e.a, e.b, e.per_frame_weight[2]) for e in graph.edges]
        snap_nodes = [copy.deepcopy(n.per_frame[2]) for n in graph.nodes]
        update_frame(graph, 2, events, hazards, activations={1, 3})
        assert snap_edges == [(e.a, e.b, e.per_frame_weight[2]) for e in graph.edges]
        assert snap_nodes == [n.per_frame[2] for n in graph.nodes]

    def test_seeded_edge_weights_match_geometric_oracle(self):
        graph, events, hazards = seeded_graph()
        update_frame(graph, 3, events, hazards)
        frame_hazards = [h for h in hazards if h.frame == 3]
        sev_by_cell = {}
        for h in frame_hazards:
            sev_by_cell[h.cell] = max(sev_by_cell.get(h.cell, 0.0), h.severity)
        spec, knobs = graph.spec, graph.knobs
        checked_with_penalty = 0
        for e in graph.edges:
            a = graph.nodes[e.a].cell
            b = graph.nodes[e.b].cell
            near = [sev for cell, sev in sorted(sev_by_cell.items())
                    if segment_distance_oracle(cell, a, b) * spec.cell_size <= graph.hazard_radius() + 1e-9]
            expected = knobs.lambda_edge * e.base_distance
            if near:
                expected += knobs.h_coef * sum(near) / len(near)
                checked_with_penalty += 1
            assert e.per_frame_weight[3] == pytest.approx(expected, abs=1e-6)
        assert checked_with_penalty > 0

    def test_edge_weights_nonnegative_all_frames(self):
        graph, events, hazards = seeded_graph()
        for t in range(graph.frames):
            update_frame(graph, t, events, hazards)
            for e in graph.edges:
                assert e.per_frame_weight[t] >= 0.0

    def test_out_of_range_frame(self):
        graph, _, _ = seeded_graph()
        with pytest.raises(IndexError):
            update_frame(graph, graph.frames, [], [])


class TestNeighbors:
    def test_two_node_graph(self):
        spec = GridSpec(width=40, height=40, frames=2, cell_size=0.25)
        knobs = GraphKnobs(connect_radius=0.6, bridge_spacing=100)
        graph = build_graph([mk_cluster(0, 0), mk_cluster(0, 2)], [], spec, knobs)
        update_frame(graph, 0, [], [])
        assert [n for n, _ in neighbors(graph, 0, 0)] == [1]
        assert [n for n, _ in neighbors(graph, 1, 0)] == [0]

    def test_unknown_node(self):
        graph, _, _ = seeded_graph()
        with pytest.raises(KeyError):
            neighbors(graph, 10_000, 0)

    def test_matches_adjacency_matrix_oracle(self):
        graph, events, hazards = seeded_graph(seed=5)
        update_frame(graph, 1, events, hazards)
        n = len(graph.nodes)
        matrix = [[None] * n for _ in range(n)]
        for e in graph.edges:
            matrix[e.a][e.b] = e.per_frame_weight[1]
            matrix[e.b][e.a] = e.per_frame_weight[1]
        for node in graph.nodes:
            expected = [(j, matrix[node.id][j]) for j in range(n) if matrix[node.id][j] is not None]
            assert neighbors(graph, node.id, 1) == expected


class TestExports:
    def test_csv_shapes(self):
        graph, events, hazards = seeded_graph()
        update_frame(graph, 0, events, hazards)
        node_lines = nodes_to_csv(graph).splitlines()
        assert node_lines[0] == "id,kind,row,col,frame,W,active"
        assert len(node_lines) == 1 + len(graph.nodes) * graph.frames
        edge_lines = edges_to_csv(graph).splitlines()
        assert edge_lines[0] == "a,b,frame,weight"
        assert len(edge_lines) == 1 + len(graph.edges) * graph.frames

    def test_geojson_feature_counts(self):
        graph, events, hazards = seeded_graph()
        update_frame(graph, 0, events, hazards)
        gj = frame_geojson(graph, 0, agent_positions=[0, 1])
        assert gj["type"] == "FeatureCollection"
        assert len(gj["features"]) == len(graph.nodes) + len(graph.edges) + 2
        kinds = {f["properties"].get("kind") for f in gj["features"]}
        assert "agent" in kinds
