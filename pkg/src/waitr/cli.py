"""Command-line client for the planning pipeline.

Every subcommand builds a service request, runs the shared handler in
process, and writes the returned artifacts to disk. ``waitr serve`` exposes
the same handlers over HTTP. Verbosity is controlled by the WAITR_LOG
environment variable (DEBUG, INFO, WARNING, ...).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import yaml
from pydantic import ValidationError

from .config import parse_overrides
from .env_model import EnvFormatError
from .render import render_frame_svg
from .service import handlers, schemas

log = logging.getLogger("waitr")


def _read_env_text(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"environment file not found: {p}")
    return p.read_text()


def _config_dict(args) -> dict:
    data: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        p = Path(config_path)
        if not p.exists():
            raise FileNotFoundError(f"config file not found: {p}")
        raw = yaml.safe_load(p.read_text())
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ValueError(f"config root must be a mapping, got {type(raw).__name__}")
        data.update(raw)
    for pair in getattr(args, "set", None) or []:
        data.update(parse_overrides([pair]))
    return data


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


def _geojson_text(collection: dict) -> str:
    from .kgraph import geojson_dumps

    return geojson_dumps(collection)


def cmd_synth(args) -> int:
    req = schemas.SynthRequest(
        seed=args.seed, width=args.width, height=args.height, frames=args.frames,
        cell_size=args.cell_size, origin_lat=args.origin_lat, origin_lon=args.origin_lon,
        blobs=args.blobs, swirls=args.swirls, patches=args.patches)
    resp = handlers.synth(req)
    _write(Path(args.out), resp.env_text)
    print(f"wrote {args.out} sha256={resp.sha256}")
    return 0


def cmd_extract(args) -> int:
    req = schemas.ExtractRequest(env_text=_read_env_text(args.env),
                                 tau_poi=args.tau_poi, tau_haz=args.tau_haz)
    resp = handlers.extract(req)
    out = Path(args.out_dir)
    _write(out / "events.csv", resp.events_csv)
    _write(out / "hazards.csv", resp.hazards_csv)
    print(f"{len(resp.events)} events, {len(resp.hazards)} hazards -> {out}")
    return 0


def cmd_cluster(args) -> int:
    req = schemas.ClusterRequest(env_text=_read_env_text(args.env),
                                 config=_config_dict(args), frame=args.frame)
    resp = handlers.cluster(req)
    _write(Path(args.out), resp.csv)
    print(f"{len(resp.clusters)} clusters -> {args.out}")
    return 0


def cmd_graph(args) -> int:
    req = schemas.GraphRequest(env_text=_read_env_text(args.env),
                               config=_config_dict(args), include_geojson=args.geojson)
    resp = handlers.graph(req)
    out = Path(args.out_dir)
    _write(out / "nodes.csv", resp.nodes_csv)
    _write(out / "edges.csv", resp.edges_csv)
    if resp.geojson:
        for t, collection in enumerate(resp.geojson):
            _write(out / f"graph_frame_{t:03d}.geojson", _geojson_text(collection))
    print(f"{len(resp.nodes)} nodes, {len(resp.edges)} edges -> {out}")
    return 0


def cmd_plan(args) -> int:
    req = schemas.PlanRequest(env_text=_read_env_text(args.env), config=_config_dict(args),
                              planner=args.planner, frame=args.frame)
    resp = handlers.plan(req)
    _write(Path(args.out), resp.csv)
    for plan in resp.plans:
        log.info("agent %d projected score %.4f", plan.agent, plan.projected_score)
    print(f"{len(resp.plans)} agent plans at frame {resp.frame} -> {args.out}")
    return 0


def cmd_run(args) -> int:
    req = schemas.RunRequest(env_text=_read_env_text(args.env), config=_config_dict(args),
                             planner=args.planner, seed=args.seed, include_geojson=True)
    resp = handlers.run(req)
    out = Path(args.out_dir)
    _write(out / "metrics.csv", resp.metrics_csv)
    for t, collection in enumerate(resp.geojson or []):
        _write(out / f"frame_{t:03d}.geojson", _geojson_text(collection))
    pct = 100.0 * resp.ecr
    flag = " (zero-event environment)" if resp.zero_total else ""
    print(f"{resp.planner}: covered {resp.covered}/{resp.total_events} "
          f"events (ECR {pct:.2f}%){flag} -> {out}")
    return 0


def cmd_compare(args) -> int:
    env_text = _read_env_text(args.env) if args.env else None
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else None
    req = schemas.CompareRequest(env_text=env_text, config=_config_dict(args), seeds=seeds)
    resp = handlers.compare(req)
    out = Path(args.out_dir)
    _write(out / "summary.csv", resp.summary_csv)
    _write(out / "table2.csv", resp.table_csv)
    _write(out / "metrics.csv", resp.metrics_csv)
    print(f"waitr {resp.totals['waitr']} vs greedy {resp.totals['greedy']} "
          f"(wins: {resp.wins['waitr']}-{resp.wins['greedy']}-{resp.wins['tie']}) -> {out}")
    return 0


def cmd_render(args) -> int:
    from .config import RunConfig
    from .env_model import loads_env
    from .sim import simulate

    env = loads_env(_read_env_text(args.env))
    cfg = RunConfig(**_config_dict(args))
    report, trace = simulate(env, args.planner, cfg.mission())
    out = Path(args.out_dir)
    if trace.graph is None:
        print("nothing to render: environment has no events", file=sys.stderr)
        return 1
    for t in range(trace.graph.frames):
        svg = render_frame_svg(trace.graph, t, trace.positions[t], cfg.radius)
        _write(out / f"frame_{t:03d}.svg", svg)
    print(f"{trace.graph.frames} frames ({report.planner}) -> {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _add_config_flags(parser) -> None:
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="waitr",
                                     description="Multi-agent spatiotemporal path planning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic environment file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", "--w", type=int, default=20)
    p.add_argument("--height", "--h", type=int, default=20)
    p.add_argument("--frames", type=int, default=7)
    p.add_argument("--cell-size", type=float, default=0.25)
    p.add_argument("--origin-lat", type=float, default=25.0)
    p.add_argument("--origin-lon", type=float, default=-90.0)
    p.add_argument("--blobs", type=int, default=None)
    p.add_argument("--swirls", type=int, default=None)
    p.add_argument("--patches", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="extract events and hazards to CSV")
    p.add_argument("--env", required=True)
    p.add_argument("--tau-poi", type=float, default=1.0)
    p.add_argument("--tau-haz", type=float, default=0.5)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("cluster", help="rank weighted waypoint clusters")
    p.add_argument("--env", required=True)
    p.add_argument("--frame", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("graph", help="build the knowledge graph and export it")
    p.add_argument("--env", required=True)
    p.add_argument("--geojson", action="store_true", help="also emit per-frame GeoJSON")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("plan", help="plan one frame from initial placement")
    p.add_argument("--env", required=True)
    p.add_argument("--planner", choices=("waitr", "greedy"), default="waitr")
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("run", help="run a full mission")
    p.add_argument("--env", required=True)
    p.add_argument("--planner", choices=("waitr", "greedy"), default="waitr")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run both planners over the seed suite")
    p.add_argument("--env", help="fixed environment (default: synthesize per seed)")
    p.add_argument("--seeds", help="comma-separated seed list (default: config seeds)")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", help="render mission frames to SVG")
    p.add_argument("--env", required=True)
    p.add_argument("--planner", choices=("waitr", "greedy"), default="waitr")
    p.add_argument("--out-dir", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve the HTTP planning API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("WAITR_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (EnvFormatError, ValidationError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
