import random

from waitr.clustering import Cluster, WPRConfig, wpr_cluster
from waitr.env_model import GridSpec, extract_events, extract_hazards, synth_scenario
from waitr.kgraph import GraphKnobs, build_graph, update_frame


def build_seeded_graph(seed=42, knobs=GraphKnobs(), update_all=True):
    """Default 20x20x7 scenario wired through clustering into a graph."""
    spec = GridSpec(width=20, height=20, frames=7)
    env = synth_scenario(seed, spec)
    events = extract_events(env, 1.0)
    hazards = extract_hazards(env, 0.5)
    clusters = wpr_cluster(events, hazards, spec, WPRConfig())
    graph = build_graph(clusters, hazards, spec, knobs)
    if update_all:
        for t in range(graph.frames):
            update_frame(graph, t, events, hazards)
    return graph, env, events, hazards


def random_weight_graph(rng: random.Random, width=14, height=14, waypoints=4, frames=3):
    """Connected graph with randomized positive per-frame edge weights."""
    spec = GridSpec(width=width, height=height, frames=max(frames, 2))
    cells = set()
    while len(cells) < waypoints:
        cells.add((rng.randrange(height), rng.randrange(width)))
    clusters = [Cluster(centroid=cell, members=(), score=1.0, covered_count=0)
                for cell in sorted(cells)]
    graph = build_graph(clusters, [], spec, GraphKnobs(connect_radius=0.75, bridge_spacing=2))
    for e in graph.edges:
        for t in range(graph.frames):
            e.per_frame_weight[t] = rng.uniform(0.05, 3.0)
    return graph
