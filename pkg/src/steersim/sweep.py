"""Two-axis parameter grids over normalized parameters, and the figure presets."""

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .errors import SteerSimError, UnknownPreset
from .model import NormalizedParams
from .steering import Classification, evaluate

MAX_POINTS = 2001

# axis name -> NormalizedParams fields it sets
AXES = {
    "delta_over_wm": ("delta1", "delta2"),
    "g1_over_wm": ("g1",),
    "g2_over_wm": ("g2",),
    "nth_common": ("nth1", "nth2"),
    "zeta_over_wm": ("zeta",),
}

# experimental values: omega_m/2pi = 947 kHz, kappa/2pi = 215 kHz, gamma/2pi = 140 Hz
KAPPA = 215.0 / 947.0
GAMMA = 140.0 / 947_000.0


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of {sorted(AXES)}")
        if not 2 <= self.points <= MAX_POINTS:
            raise ValueError(f"points must be in [2, {MAX_POINTS}], got {self.points}")
        if self.start == self.stop:
            raise ValueError("axis start and stop must differ")

    @classmethod
    def parse(cls, text):
        """Parse ``name:start:stop:points``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"axis must be name:start:stop:points, got {text!r}")
        name, start, stop, points = parts
        return cls(name.strip(), float(start), float(stop), int(points))

    def values(self):
        step = (self.stop - self.start) / (self.points - 1)
        vals = [self.start + i * step for i in range(self.points)]
        vals[-1] = self.stop
        return vals


@dataclass(frozen=True)
class Constraint:
    """``target = ratio * source`` between two coupling fields, e.g. ``g2 = 0.5 * g1``."""

    target: str
    ratio: float
    source: str

    _PATTERN = re.compile(
        r"^\s*(g[12])\s*=\s*([-+0-9.eE]+)\s*\*\s*(g[12])\s*$"
    )

    def __post_init__(self):
        for f in (self.target, self.source):
            if f not in ("g1", "g2"):
                raise ValueError(f"constraint fields must be g1 or g2, got {f!r}")
        if self.target == self.source:
            raise ValueError("constraint target and source must differ")

    @classmethod
    def parse(cls, text):
        m = cls._PATTERN.match(text)
        if not m:
            raise ValueError(f"constraint must look like 'g2=0.5*g1', got {text!r}")
        return cls(m.group(1), float(m.group(2)), m.group(3))

    def apply(self, params):
        return params.replace(**{self.target: self.ratio * getattr(params, self.source)})

    def __str__(self):
        return f"{self.target}={self.ratio:g}*{self.source}"


@dataclass(frozen=True)
class SweepRecord:
    x1: float
    x2: float
    g_12: Optional[float]
    g_21: Optional[float]
    energy_imbalance: Optional[float]
    classification: Classification
    spectral_abscissa: Optional[float]
    note: str = ""


def point_params(base, ax1, x1, ax2, x2, constraint=None):
    changes = {}
    for f in AXES[ax1.name]:
        changes[f] = x1
    for f in AXES[ax2.name]:
        changes[f] = x2
    params = base.replace(**changes)
    if constraint is not None:
        params = constraint.apply(params)
    return params


def evaluate_point(params, x1, x2, gate=True):
    """One grid point; failures become records instead of exceptions."""
    try:
        r = evaluate(params, gate=gate)
    except (SteerSimError, ValueError, ArithmeticError) as exc:
        return SweepRecord(
            x1, x2, None, None, None, Classification.UNSTABLE, None,
            note=f"{type(exc).__name__}: {exc}",
        )
    return SweepRecord(
        x1, x2, r.g_12, r.g_21, r.energy_imbalance, r.classification, r.spectral_abscissa,
    )


def default_workers():
    """Worker count from ``STEERSIM_THREADS`` (0 or unset = one per CPU)."""
    raw = os.environ.get("STEERSIM_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError(f"STEERSIM_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def run_sweep(base, ax1, ax2, constraint=None, workers=None, gate=True):
    """Evaluate every point of the ``ax1 x ax2`` grid.

    Records come back row-major (``ax1`` outer) regardless of how many
    workers are used.
    """
    if set(AXES[ax1.name]) & set(AXES[ax2.name]):
        raise ValueError(f"axes {ax1.name} and {ax2.name} set the same parameter")
    if constraint is not None:
        moved = set(AXES[ax1.name]) | set(AXES[ax2.name])
        if constraint.target in moved:
            raise ValueError(f"constraint target {constraint.target} is also a sweep axis")

    tasks = [
        (point_params(base, ax1, x1, ax2, x2, constraint), x1, x2)
        for x1 in ax1.values()
        for x2 in ax2.values()
    ]
    if workers is None:
        workers = default_workers()
    if workers <= 1:
        return [evaluate_point(p, x1, x2, gate) for p, x1, x2 in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: evaluate_point(*t, gate), tasks))


@dataclass(frozen=True)
class FigurePreset:
    id: str
    base: NormalizedParams
    ax1: Axis
    ax2: Axis
    constraint: Optional[Constraint]
    field: str

    def with_axes(self, ax1=None, ax2=None):
        return FigurePreset(
            self.id, self.base, ax1 or self.ax1, ax2 or self.ax2, self.constraint, self.field,
        )


DELTA_AXIS = Axis("delta_over_wm", -2.0, 0.0, 51)
NTH_AXIS = Axis("nth_common", 0.0, 250.0, 51)


def _coupling_preset(fid, source, field):
    # G sweeps: the other coupling is half the swept one
    target = "g2" if source == "g1" else "g1"
    base = NormalizedParams.symmetric(
        delta=-1.0, g1=0.0, g2=0.0, kappa=KAPPA, gamma=GAMMA, zeta=0.05, nth=25.0,
    )
    return FigurePreset(
        fid, base, DELTA_AXIS, Axis(f"{source}_over_wm", 0.0, 1.0, 51),
        Constraint(target, 0.5, source), field,
    )


def _thermal_preset(fid, g1, g2, field):
    base = NormalizedParams.symmetric(
        delta=-1.0, g1=g1, g2=g2, kappa=KAPPA, gamma=GAMMA, zeta=0.1, nth=0.0,
    )
    return FigurePreset(fid, base, DELTA_AXIS, NTH_AXIS, None, field)


PRESETS = {
    p.id: p
    for p in (
        _coupling_preset("fig2a", "g1", "g_12"),
        _coupling_preset("fig2b", "g1", "g_21"),
        _coupling_preset("fig2c", "g2", "g_12"),
        _coupling_preset("fig2d", "g2", "g_21"),
        _coupling_preset("fig3a", "g1", "energy_imbalance"),
        _coupling_preset("fig3b", "g2", "energy_imbalance"),
        _thermal_preset("fig4a", 0.5, 0.4, "g_12"),
        _thermal_preset("fig4b", 0.5, 0.4, "g_21"),
        _thermal_preset("fig4c", 0.4, 0.5, "g_12"),
        _thermal_preset("fig4d", 0.4, 0.5, "g_21"),
        _thermal_preset("fig5a", 0.5, 0.4, "energy_imbalance"),
        _thermal_preset("fig5b", 0.4, 0.5, "energy_imbalance"),
    )
}


def figure_preset(fid):
    try:
        return PRESETS[fid]
    except KeyError:
        raise UnknownPreset(f"unknown preset {fid!r}; choose from {', '.join(PRESETS)}") from None


def run_preset(fid, ax1=None, ax2=None, workers=None, gate=True):
    p = figure_preset(fid).with_axes(ax1, ax2)
    return run_sweep(p.base, p.ax1, p.ax2, p.constraint, workers=workers, gate=gate)
