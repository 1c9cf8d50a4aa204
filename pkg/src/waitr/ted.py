"""Temporal event dynamics: density rates, activation, reward forecasting.

Each waypoint carries an event-density series rho with one value per
differential frame (index 0 corresponds to frame 1). A node activates when
its density rate of change strictly exceeds the threshold delta. Forecasts
extrapolate the current density either flat (persistence) or linearly
(linear_trend), with confidence decaying geometrically per step ahead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .env_model import Event, GridSpec

PREDICTOR_KINDS = ("persistence", "linear_trend")


@dataclass
class EventDensitySeries:
    node: int
    rho: list[float]            # one density per differential frame; index 0 <-> frame 1
    frame_interval: float = 1.0

    def __post_init__(self):
        if any(v < 0 for v in self.rho):
            raise ValueError("densities must be nonnegative")


@dataclass(frozen=True)
class TEDConfig:
    delta: float = 0.5
    predictor_kind: str = "linear_trend"
    horizon: int = 6
    confidence_decay: float = 0.9

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.predictor_kind not in PREDICTOR_KINDS:
            raise ValueError(f"unknown predictor {self.predictor_kind!r}; use one of {PREDICTOR_KINDS}")


class Forecast(NamedTuple):
    weight: float
    confidence: float


def density_rate(series: EventDensitySeries, t: int) -> float:
    """Backward finite difference (rho[t] - rho[t-1]) per frame interval."""
    if not 1 <= t < len(series.rho):
        raise IndexError(f"t={t} out of range for series of length {len(series.rho)}")
    return (series.rho[t] - series.rho[t - 1]) / series.frame_interval


def activate(all_series: Iterable[EventDensitySeries], t: int, cfg: TEDConfig) -> set[int]:
    """Node ids whose density rate strictly exceeds delta at t."""
    return {s.node for s in all_series if density_rate(s, t) > cfg.delta}


def forecast_weights(
    all_series: Iterable[EventDensitySeries],
    t: int,
    cfg: TEDConfig,
) -> dict[int, list[Forecast]]:
    """Per-node forecasts for k = 1..horizon steps ahead of index t.

    persistence holds the current density flat; linear_trend extrapolates the
    rate at t, clamped at zero. At t = 0 no rate exists yet and linear_trend
    degrades to persistence. Confidence is confidence_decay**k.
    """
    if t < 0:
        raise IndexError(f"t must be >= 0, got {t}")
    out: dict[int, list[Forecast]] = {}
    for series in all_series:
        if t >= len(series.rho):
            raise IndexError(f"t={t} out of range for node {series.node}")
        base = series.rho[t]
        rate = 0.0
        if cfg.predictor_kind == "linear_trend" and t >= 1:
            rate = density_rate(series, t)
        forecasts = []
        for k in range(1, cfg.horizon + 1):
            weight = base if cfg.predictor_kind == "persistence" else max(0.0, base + k * rate)
            forecasts.append(Forecast(weight=weight, confidence=cfg.confidence_decay ** k))
        out[series.node] = forecasts
    return out


def density_series_for_cells(
    cells: dict[int, tuple[int, int]],
    events: Sequence[Event],
    spec: GridSpec,
    radius: float,
) -> list[EventDensitySeries]:
    """Event densities per node: events within radius of the node's cell,
    tallied per differential frame."""
    series = []
    for node, cell in sorted(cells.items()):
        rho = [0.0] * (spec.frames - 1)
        for e in events:
            if spec.cell_distance(cell, e.cell) <= radius:
                rho[e.frame - 1] += e.count
        series.append(EventDensitySeries(node=node, rho=rho, frame_interval=spec.frame_interval))
    return series


def activations_to_csv(rows: Sequence[tuple[int, int, float, bool]]) -> str:
    """Rows of (frame, node_id, rate, activated)."""
    lines = ["frame,node_id,rate,activated"]
    for frame, node, rate, activated in rows:
        lines.append(f"{frame},{node},{rate:.6f},{int(activated)}")
    return "\n".join(lines) + "\n"
