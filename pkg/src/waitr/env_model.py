"""Gridded dynamic environment: scalar fields, POI events, hazards.

The environment is a fixed grid observed over a number of frames. Each frame
carries a temperature field and a current field (u/v components). Events are
cells whose temperature changed significantly between consecutive frames;
hazards are cells with strong current magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

FIELD_NAMES = ("TEMP", "CUR_U", "CUR_V")
DECIMALS = 6


class EnvFormatError(ValueError):
    """Raised when a grid environment file violates the format contract."""


@dataclass(frozen=True)
class GridSpec:
    """Spatial and temporal discretization of the environment."""

    width: int
    height: int
    frames: int
    cell_size: float = 0.25
    origin: tuple[float, float] = (25.0, -90.0)
    frame_interval: float = 1.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.width}x{self.height}")
        if self.cell_size <= 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        if self.frames < 2:
            raise ValueError(f"need at least 2 frames for differentials, got {self.frames}")
        if self.frame_interval <= 0:
            raise ValueError(f"frame_interval must be positive, got {self.frame_interval}")

    def cell_latlon(self, cell: tuple[int, int]) -> tuple[float, float]:
        """(lat, lon) of a cell center; origin is the center of cell (0, 0)."""
        return (self.origin[0] + cell[0] * self.cell_size,
                self.origin[1] + cell[1] * self.cell_size)

    def cell_distance(self, a: tuple[int, int], b: tuple[int, int]) -> float:
        """Euclidean distance between cell centers, in degrees."""
        return math.hypot(a[0] - b[0], a[1] - b[1]) * self.cell_size


@dataclass
class EnvSeries:
    """Per-frame temperature and current fields over a grid."""

    spec: GridSpec
    temperature: np.ndarray  # (frames, height, width), degC
    current_u: np.ndarray    # (frames, height, width), m/s
    current_v: np.ndarray    # (frames, height, width), m/s

    def __post_init__(self):
        shape = (self.spec.frames, self.spec.height, self.spec.width)
        for name, arr in (("temperature", self.temperature),
                          ("current_u", self.current_u),
                          ("current_v", self.current_v)):
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")


@dataclass(frozen=True, order=True)
class Event:
    """A significant temperature differential at (cell, frame)."""

    frame: int
    cell: tuple[int, int]
    magnitude: float
    count: int = 1

    def __post_init__(self):
        if self.frame < 1:
            raise ValueError("events exist only from frame 1 (differentials need a predecessor)")
        if self.count < 1:
            raise ValueError("event count must be >= 1")


@dataclass(frozen=True, order=True)
class Hazard:
    """A strong-current cell at a frame; severity is the current magnitude."""

    frame: int
    cell: tuple[int, int]
    severity: float


def extract_events(env: EnvSeries, tau_poi: float) -> list[Event]:
    """All (cell, frame) pairs with |T[t] - T[t-1]| >= tau_poi, t >= 1.

    Sorted by (frame, row, col); one event of count 1 per qualifying pair.
    """
    if tau_poi <= 0:
        raise ValueError(f"tau_poi must be positive, got {tau_poi}")
    events = []
    temp = env.temperature
    for t in range(1, env.spec.frames):
        diff = np.abs(temp[t] - temp[t - 1])
        for r, c in np.argwhere(diff >= tau_poi):
            events.append(Event(frame=t, cell=(int(r), int(c)), magnitude=float(diff[r, c])))
    return events


def extract_hazards(env: EnvSeries, tau_haz: float) -> list[Hazard]:
    """All (cell, frame) pairs with current magnitude sqrt(u^2+v^2) >= tau_haz."""
    if tau_haz <= 0:
        raise ValueError(f"tau_haz must be positive, got {tau_haz}")
    hazards = []
    magnitude = np.sqrt(env.current_u ** 2 + env.current_v ** 2)
    for t in range(env.spec.frames):
        for r, c in np.argwhere(magnitude[t] >= tau_haz):
            hazards.append(Hazard(frame=t, cell=(int(r), int(c)), severity=float(magnitude[t, r, c])))
    return hazards


@dataclass(frozen=True)
class SynthParams:
    """Knobs for the synthetic scenario generator."""

    blobs: int = 4
    swirls: int = 2
    patches: int = 3
    base_temp: float = 20.0
    blob_amp: tuple[float, float] = (4.0, 9.0)
    blob_sigma: tuple[float, float] = (1.5, 3.5)       # cells
    blob_drift: tuple[float, float] = (0.6, 1.8)       # cells per frame
    swirl_strength: tuple[float, float] = (0.25, 0.6)  # m/s
    swirl_sigma: tuple[float, float] = (2.5, 5.0)
    patch_mag: tuple[float, float] = (0.8, 2.2)        # m/s
    patch_sigma: tuple[float, float] = (1.0, 2.5)
    patch_drift: tuple[float, float] = (0.3, 1.2)


def synth_scenario(seed: int, spec: GridSpec, params: SynthParams = SynthParams()) -> EnvSeries:
    """Deterministic synthetic environment.

    Temperature is a constant background plus drifting Gaussian blobs; currents
    are divergence-free swirls (derived from a Gaussian streamfunction) plus
    drifting high-magnitude directed patches. Identical (seed, spec, params)
    yield bit-identical series.
    """
    rng = np.random.default_rng(seed)
    h, w, frames = spec.height, spec.width, spec.frames
    rows, cols = np.meshgrid(np.arange(h, dtype=float), np.arange(w, dtype=float), indexing="ij")

    def draw(lo_hi):
        return rng.uniform(lo_hi[0], lo_hi[1])

    def drift_vector(speed_range):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        speed = draw(speed_range)
        return speed * math.cos(angle), speed * math.sin(angle)

    blobs = []
    for _ in range(params.blobs):
        blobs.append((rng.uniform(0, h - 1), rng.uniform(0, w - 1),
                      *drift_vector(params.blob_drift),
                      draw(params.blob_amp), draw(params.blob_sigma)))
    swirls = []
    for _ in range(params.swirls):
        swirls.append((rng.uniform(0, h - 1), rng.uniform(0, w - 1),
                       *drift_vector((0.1, 0.5)),
                       draw(params.swirl_strength), draw(params.swirl_sigma)))
    patches = []
    for _ in range(params.patches):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        patches.append((rng.uniform(0, h - 1), rng.uniform(0, w - 1),
                        *drift_vector(params.patch_drift),
                        draw(params.patch_mag), draw(params.patch_sigma), theta))

    temperature = np.full((frames, h, w), params.base_temp, dtype=float)
    current_u = np.zeros((frames, h, w), dtype=float)
    current_v = np.zeros((frames, h, w), dtype=float)

    for t in range(frames):
        for r0, c0, vr, vc, amp, sigma in blobs:
            dr = rows - (r0 + vr * t)
            dc = cols - (c0 + vc * t)
            temperature[t] += amp * np.exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma))
        for r0, c0, vr, vc, strength, sigma in swirls:
            dr = rows - (r0 + vr * t)
            dc = cols - (c0 + vc * t)
            g = np.exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma))
            # u = dpsi/drow, v = -dpsi/dcol for psi = strength*sigma*g: divergence-free
            current_u[t] += -strength * (dr / sigma) * g
            current_v[t] += strength * (dc / sigma) * g
        for r0, c0, vr, vc, mag, sigma, theta in patches:
            dr = rows - (r0 + vr * t)
            dc = cols - (c0 + vc * t)
            g = np.exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma))
            current_u[t] += mag * math.cos(theta) * g
            current_v[t] += mag * math.sin(theta) * g

    return EnvSeries(spec=spec, temperature=temperature, current_u=current_u, current_v=current_v)


def write_env(env: EnvSeries, path: str | Path) -> None:
    """Write the plain-text grid format (6 fractional digits, bit-exact)."""
    Path(path).write_text(dumps_env(env))


def dumps_env(env: EnvSeries) -> str:
    spec = env.spec
    fmt = f"%.{DECIMALS}f"
    lines = ["GRID %d %d %d %s %s %s" % (
        spec.width, spec.height, spec.frames,
        fmt % spec.cell_size, fmt % spec.origin[0], fmt % spec.origin[1])]
    arrays = {"TEMP": env.temperature, "CUR_U": env.current_u, "CUR_V": env.current_v}
    for name in FIELD_NAMES:
        for t in range(spec.frames):
            lines.append(f"FIELD {name} {t}")
            for row in arrays[name][t]:
                lines.append(" ".join(fmt % v for v in row))
    return "\n".join(lines) + "\n"


def load_env(path: str | Path) -> EnvSeries:
    """Parse a grid environment file; rejects malformed or mismatched content."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"environment file not found: {path}")
    return loads_env(path.read_text())


def loads_env(text: str) -> EnvSeries:
    lines = iter(enumerate(text.splitlines(), start=1))
    lineno, header = _next_line(lines)
    parts = header.split()
    if len(parts) != 7 or parts[0] != "GRID":
        raise EnvFormatError(f"line {lineno}: malformed header {header!r}")
    try:
        w, h, frames = int(parts[1]), int(parts[2]), int(parts[3])
        cell_size, lat, lon = float(parts[4]), float(parts[5]), float(parts[6])
    except ValueError as exc:
        raise EnvFormatError(f"line {lineno}: malformed header {header!r}") from exc
    spec = GridSpec(width=w, height=h, frames=frames, cell_size=cell_size, origin=(lat, lon))

    arrays = {}
    for name in FIELD_NAMES:
        frames_data = np.empty((frames, h, w), dtype=float)
        for t in range(frames):
            lineno, line = _next_line(lines)
            expected = f"FIELD {name} {t}"
            if line.strip() != expected:
                raise EnvFormatError(
                    f"line {lineno}: expected {expected!r}, got {line!r} (field/frame shape mismatch)")
            for r in range(h):
                lineno, line = _next_line(lines)
                values = line.split()
                if len(values) != w:
                    raise EnvFormatError(
                        f"line {lineno}: expected {w} values, got {len(values)} (shape mismatch)")
                try:
                    row = [float(v) for v in values]
                except ValueError as exc:
                    raise EnvFormatError(f"line {lineno}: unparseable value in row") from exc
                if not all(math.isfinite(v) for v in row):
                    raise EnvFormatError(f"line {lineno}: non-finite value")
                frames_data[t, r, :] = row
        arrays[name] = frames_data
    for lineno, line in lines:
        if line.strip():
            raise EnvFormatError(f"line {lineno}: trailing content {line!r}")
    return EnvSeries(spec=spec, temperature=arrays["TEMP"],
                     current_u=arrays["CUR_U"], current_v=arrays["CUR_V"])


def _next_line(lines: Iterator[tuple[int, str]]) -> tuple[int, str]:
    for lineno, line in lines:
        if line.strip():
            return lineno, line
    raise EnvFormatError("unexpected end of file")
