"""Two-slit instrument as a black box: far-field screen intensity, seeded
event sampling, fringe visibility, and the operator-facing source
representation.

The optical model is standard Fraunhofer: a sinc^2 single-slit envelope and
cos^2 two-slit fringes. Opening both slits with which-path marking gives the
incoherent sum of the single-slit patterns; the interference term is gone.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import json
import math

import numpy as np

from . import kernels
from .errors import ConfigurationError, ContractViolation, DomainError

# Inverse-CDF tabulation density over [-W, W].
GRID_POINTS = 65536

MIN_VISIBILITY_EVENTS = 10_000
MIN_VISIBILITY_BINS = 16


@dataclass(frozen=True)
class SlitConfig:
    """Instrument settings, SI units throughout."""

    wavelength: float = 500e-9
    slit_width: float = 2e-6
    separation: float = 10e-6
    screen_distance: float = 1.0
    screen_halfwidth: float = 0.2
    left_open: bool = True
    right_open: bool = True
    which_path: bool = False
    rate: float = 100.0

    def __post_init__(self):
        for name in (
            "wavelength",
            "slit_width",
            "separation",
            "screen_distance",
            "screen_halfwidth",
            "rate",
        ):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(f"{name} must be a number")
            object.__setattr__(self, name, float(value))
        for name in ("left_open", "right_open", "which_path"):
            if not isinstance(getattr(self, name), bool):
                raise ConfigurationError(f"{name} must be true or false")
        if self.wavelength <= 0:
            raise ConfigurationError("wavelength must be positive")
        if self.slit_width <= 0:
            raise ConfigurationError("slit width must be positive")
        if self.separation <= self.slit_width:
            raise ConfigurationError("separation must exceed slit width")
        if self.screen_distance <= 0:
            raise ConfigurationError("screen distance must be positive")
        if self.screen_halfwidth <= 0:
            raise ConfigurationError("screen halfwidth must be positive")
        if self.rate < 0:
            raise ConfigurationError("rate must be non-negative")

    @property
    def any_open(self) -> bool:
        return self.left_open or self.right_open

    @property
    def coherent(self) -> bool:
        return self.left_open and self.right_open and not self.which_path

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "SlitConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def patched(self, changes: dict) -> "SlitConfig":
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        return replace(self, **changes)


class DetectionEvent(NamedTuple):
    tick: int
    x: float
    y: float


@dataclass(eq=False)
class DetectionEvents:
    """Column-wise batch of detection events."""

    ticks: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __len__(self) -> int:
        return self.ticks.size

    def __iter__(self):
        for t, x, y in zip(self.ticks, self.x, self.y):
            yield DetectionEvent(int(t), float(x), float(y))

    def to_jsonl(self) -> str:
        return "".join(
            f'{{"tick":{int(t)},"x_m":{float(x)!r},"y_m":{float(y)!r}}}\n'
            for t, x, y in zip(self.ticks, self.x, self.y)
        )

    @classmethod
    def from_jsonl(cls, text: str) -> "DetectionEvents":
        ticks, xs, ys = [], [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            ticks.append(int(rec["tick"]))
            xs.append(float(rec["x_m"]))
            ys.append(float(rec["y_m"]))
        return cls(
            ticks=np.asarray(ticks, dtype=np.int64),
            x=np.asarray(xs, dtype=np.float64),
            y=np.asarray(ys, dtype=np.float64),
        )


def _envelope(u, cfg: SlitConfig):
    # np.sinc(z) = sin(pi z)/(pi z), so the pi is folded into the argument.
    z = cfg.slit_width * np.asarray(u, dtype=np.float64)
    z /= cfg.wavelength * cfg.screen_distance
    return np.sinc(z) ** 2


def intensity(x, cfg: SlitConfig):
    """Relative screen intensity at x for the configured mode.

    Neither slit: 0. One slit at +-d/2: shifted envelope. Both slits,
    unmarked: 4 cos^2 fringes under the envelope. Both slits with which-path
    marking: incoherent sum of the two single-slit patterns.
    """
    x = np.asarray(x, dtype=np.float64)
    half = cfg.separation / 2.0
    if not cfg.any_open:
        return np.zeros_like(x)
    if cfg.left_open and cfg.right_open:
        if cfg.which_path:
            return _envelope(x - half, cfg) + _envelope(x + half, cfg)
        arg = math.pi * cfg.separation / (cfg.wavelength * cfg.screen_distance) * x
        return 4.0 * np.cos(arg) ** 2 * _envelope(x, cfg)
    center = -half if cfg.left_open else half
    return _envelope(x - center, cfg)


def fringe_spacing(cfg: SlitConfig) -> float:
    """Distance between adjacent interference maxima, lambda*L/d."""
    if not cfg.coherent:
        raise DomainError("fringe spacing needs both slits open, unmarked")
    return cfg.wavelength * cfg.screen_distance / cfg.separation


def pattern_table(cfg: SlitConfig, grid: int = GRID_POINTS):
    """(xs, intensity) tabulated on a uniform grid over [-W, W]."""
    if grid < 2:
        raise ContractViolation("grid needs at least two points")
    xs = np.linspace(-cfg.screen_halfwidth, cfg.screen_halfwidth, grid)
    return xs, intensity(xs, cfg)


def cdf_table(cfg: SlitConfig, grid: int = GRID_POINTS):
    """(xs, cdf) of the normalized intensity, trapezoid rule on the grid."""
    xs, dens = pattern_table(cfg, grid)
    dx = xs[1] - xs[0]
    segments = 0.5 * (dens[:-1] + dens[1:]) * dx
    cdf = np.concatenate(([0.0], np.cumsum(segments)))
    total = cdf[-1]
    if total <= 0.0:
        raise DomainError("pattern has no weight; nothing to sample")
    return xs, cdf / total


def pattern_csv(cfg: SlitConfig, grid: int = GRID_POINTS) -> str:
    xs, dens = pattern_table(cfg, grid)
    lines = ["x_m,intensity"]
    lines.extend(f"{float(x)!r},{float(v)!r}" for x, v in zip(xs, dens))
    return "\n".join(lines) + "\n"


def sample_events(
    cfg: SlitConfig,
    count: int,
    seed: int,
    first_tick: int = 0,
    draw_start: int = 0,
) -> DetectionEvents:
    """Draw `count` detections from the configured pattern, inverse-CDF on
    the tabulated cumulative; y is uniform over the display's y-range
    (a quarter of the screen halfwidth each side).

    `first_tick` and `draw_start` let a streaming caller continue a session's
    event numbering and uniform stream without resampling earlier events.
    """
    if count < 0:
        raise ContractViolation("count must be non-negative")
    if not cfg.any_open and count > 0:
        raise DomainError("both slits closed; no distribution to sample")
    if count == 0:
        empty = np.empty(0)
        return DetectionEvents(
            ticks=np.empty(0, dtype=np.int64), x=empty, y=empty.copy()
        )
    xs, cdf = cdf_table(cfg)
    draws = kernels.unit_uniforms(seed, draw_start, 2 * count)
    x = kernels.sample_icdf(xs, cdf, draws[0::2])
    y_half = cfg.screen_halfwidth / 4.0
    y = (draws[1::2] * 2.0 - 1.0) * y_half
    ticks = np.arange(first_tick, first_tick + count, dtype=np.int64)
    return DetectionEvents(ticks=ticks, x=x, y=y)


def visibility(events, bin_count: int, cfg: SlitConfig) -> float:
    """Fringe contrast (I_max - I_min)/(I_max + I_min) of the central region.

    The central region is |x| <= 2 fringe spacings when the config defines a
    spacing, else |x| <= W/4. Bin counts are smoothed by projection onto the
    constant-plus-fringe-harmonic subspace at the geometric fringe frequency
    (a matched filter), and the extrema of that smoothed profile give I_max
    and I_min. Raw bin extrema would measure shot noise and envelope slope
    rather than fringe contrast.
    """
    if len(events) < MIN_VISIBILITY_EVENTS:
        raise DomainError(f"need at least {MIN_VISIBILITY_EVENTS} events")
    if bin_count < MIN_VISIBILITY_BINS:
        raise DomainError(f"need at least {MIN_VISIBILITY_BINS} bins")
    spacing = cfg.wavelength * cfg.screen_distance / cfg.separation
    if cfg.coherent:
        half = min(2.0 * spacing, cfg.screen_halfwidth)
    else:
        half = cfg.screen_halfwidth / 4.0
    x = events.x if hasattr(events, "x") else np.asarray(events, dtype=np.float64)
    counts, edges = np.histogram(x, bins=bin_count, range=(-half, half))
    centers = 0.5 * (edges[:-1] + edges[1:])
    k = 2.0 * math.pi / spacing
    design = np.column_stack(
        (np.ones_like(centers), np.cos(k * centers), np.sin(k * centers))
    )
    coef, *_ = np.linalg.lstsq(design, counts.astype(np.float64), rcond=None)
    base = float(coef[0])
    amp = float(np.hypot(coef[1], coef[2]))
    i_max = base + amp
    i_min = max(base - amp, 0.0)
    if i_max <= 0.0:
        return 0.0
    return min(1.0, (i_max - i_min) / (i_max + i_min))


@dataclass(frozen=True)
class SourceRepresentation:
    """What the operator may say about a detected particle's source."""

    mode: str
    state_form: str
    system_form: str

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "state_form": self.state_form,
            "system_form": self.system_form,
        }


def source_representation(cfg: SlitConfig) -> SourceRepresentation:
    """Source description for the current slit settings.

    Both slits open and unmarked is a superposition; with which-path marking
    the ambiguity is resolved per event, leaving an equal-weight classical
    mixture; a single slit gives a determinate answer; closed slits give
    nothing to describe.
    """
    if not cfg.any_open:
        return SourceRepresentation(mode="none", state_form="0", system_form="0")
    if cfg.left_open and not cfg.right_open:
        return SourceRepresentation(
            mode="left-only", state_form="|l⟩", system_form="S₃ₗ"
        )
    if cfg.right_open and not cfg.left_open:
        return SourceRepresentation(
            mode="right-only", state_form="|r⟩", system_form="S₃ᵣ"
        )
    if cfg.which_path:
        return SourceRepresentation(
            mode="mixture",
            state_form="½|l⟩⟨l| + ½|r⟩⟨r|",
            system_form="equal mixture of S₃ₗ and S₃ᵣ",
        )
    return SourceRepresentation(
        mode="superposed",
        state_form="(1/√2)(|l⟩ + |r⟩)",
        system_form="(1/√2)(S₃ₗ + S₃ᵣ)",
    )


def events_due(rate: float, elapsed: float) -> int:
    """Deterministic cadence: the number of events due after `elapsed` time
    at the configured rate (one event every 1/rate)."""
    if rate < 0 or elapsed < 0:
        raise DomainError("rate and elapsed must be non-negative")
    return int(math.floor(rate * elapsed))
