"""Static SVG rendering of mission frames.

One SVG per frame: hazard cells as red squares, waypoints as filled circles
(lime when active, dark green otherwise), bridge nodes as small gray dots,
agents as gold stars with a dotted circle marking the observational radius.
Output is deterministic text, suitable for golden-file comparison.
"""

from __future__ import annotations

import math
from typing import Sequence

from .kgraph import BRIDGE, KGraph, WAYPOINT

CELL_PX = 28
MARGIN_PX = 24


def _xy(cell: tuple[int, int]) -> tuple[float, float]:
    return (MARGIN_PX + cell[1] * CELL_PX, MARGIN_PX + cell[0] * CELL_PX)


def _star_points(cx: float, cy: float, outer: float, inner: float) -> str:
    pts = []
    for k in range(10):
        angle = -math.pi / 2 + k * math.pi / 5
        radius = outer if k % 2 == 0 else inner
        pts.append(f"{cx + radius * math.cos(angle):.2f},{cy + radius * math.sin(angle):.2f}")
    return " ".join(pts)


def render_frame_svg(
    graph: KGraph,
    frame: int,
    agent_nodes: Sequence[int],
    obs_radius: float,
) -> str:
    """Render one frame of a mission over the graph's grid."""
    spec = graph.spec
    width = 2 * MARGIN_PX + (spec.width - 1) * CELL_PX
    height = 2 * MARGIN_PX + (spec.height - 1) * CELL_PX
    radius_px = obs_radius / spec.cell_size * CELL_PX

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#fbfcfe"/>',
        f'<text x="{MARGIN_PX}" y="16" font-family="monospace" font-size="12">frame {frame}</text>',
    ]

    for node in graph.nodes:
        if node.kind != "hazard":
            continue
        severity = node.per_frame[frame].hazard_severity
        if severity <= 0:
            continue
        x, y = _xy(node.cell)
        opacity = min(0.85, 0.25 + 0.2 * severity)
        parts.append(f'<rect x="{x - CELL_PX / 2:.2f}" y="{y - CELL_PX / 2:.2f}" '
                     f'width="{CELL_PX}" height="{CELL_PX}" fill="#d33" '
                     f'opacity="{opacity:.2f}"/>')

    for node in graph.nodes:
        if node.kind != BRIDGE:
            continue
        x, y = _xy(node.cell)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" fill="#bbb"/>')

    for node in graph.nodes:
        if node.kind != WAYPOINT:
            continue
        x, y = _xy(node.cell)
        color = "#8ef03e" if node.per_frame[frame].active else "#1d6b2a"
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="7" fill="{color}" '
                     f'stroke="#123" stroke-width="1"/>')

    for node_id in agent_nodes:
        x, y = _xy(graph.nodes[node_id].cell)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius_px:.2f}" fill="none" '
                     f'stroke="#444" stroke-width="1" stroke-dasharray="4 3"/>')
        parts.append(f'<polygon points="{_star_points(x, y, 11, 4.5)}" fill="#f5c518" '
                     f'stroke="#7a5c00" stroke-width="1"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
