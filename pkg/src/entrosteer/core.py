"""Grid densities, window histograms and the trapezoid quadrature behind them.

All integrals in the package go through :func:`trapezoid_weights`; window
edges always sit on grid nodes, so integrals over a tiling of windows add up
to the full-grid integral exactly (up to rounding).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ArityError, NormalizationError, OutOfDomainError, ValidationError

EPS_NORM = 1e-6
EPS_TAIL = 1e-9
JITTER = 1e-12
MAX_AXES = 4


@dataclass(frozen=True)
class Axis:
    """Uniform grid axis: node ``i`` sits at ``origin + i * step``."""

    origin: float
    step: float
    count: int

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValidationError(f"axis step must be positive, got {self.step}")
        if int(self.count) != self.count or self.count < 2:
            raise ValidationError(f"axis needs at least 2 nodes, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def stop(self) -> float:
        return self.origin + (self.count - 1) * self.step

    @property
    def coords(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.count)

    @property
    def length(self) -> float:
        return (self.count - 1) * self.step

    @classmethod
    def spanning(cls, lo: float, hi: float, step: float) -> "Axis":
        """Axis from ``lo`` to ``hi``; ``hi - lo`` must be a whole number of steps."""
        n = (hi - lo) / step
        if abs(n - round(n)) > 1e-9 * max(1.0, abs(n)):
            raise ValidationError(f"[{lo}, {hi}] is not a whole number of steps {step}")
        return cls(lo, step, int(round(n)) + 1)


@dataclass(frozen=True)
class Windows:
    """Equal-width contiguous windows along one axis.

    Window ``l`` is centred at ``first_center + l * width`` and covers
    ``[center - width/2, center + width/2)``.
    """

    width: float
    count: int
    first_center: float

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValidationError(f"window width must be positive, got {self.width}")
        if int(self.count) != self.count or self.count < 1:
            raise ValidationError(f"need at least one window, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def centers(self) -> np.ndarray:
        return self.first_center + self.width * np.arange(self.count)

    @property
    def lo(self) -> float:
        return self.first_center - 0.5 * self.width

    @property
    def hi(self) -> float:
        return self.lo + self.count * self.width

    def halved(self) -> "Windows":
        """Split every window in two (nested refinement)."""
        return Windows(self.width / 2, self.count * 2, self.first_center - self.width / 4)


@dataclass(frozen=True)
class BinningSpec:
    """Per-axis windowing used to turn a density into a histogram."""

    windows: tuple

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(self.windows))
        if not 1 <= len(self.windows) <= MAX_AXES:
            raise ArityError(f"binning needs 1-{MAX_AXES} axes, got {len(self.windows)}")

    @property
    def ndim(self) -> int:
        return len(self.windows)

    @property
    def widths(self) -> tuple:
        return tuple(w.width for w in self.windows)

    @property
    def shape(self) -> tuple:
        return tuple(w.count for w in self.windows)

    def halved(self) -> "BinningSpec":
        return BinningSpec(tuple(w.halved() for w in self.windows))

    @classmethod
    def tiling(cls, axes: Sequence[Axis], widths) -> "BinningSpec":
        """Windows laid edge to edge from the left end of each axis.

        As many whole windows as fit are used; ``widths`` may be a scalar.
        """
        widths = _broadcast(widths, len(axes))
        wins = []
        for ax, w in zip(axes, widths):
            n = int(math.floor(ax.length / w + 1e-9))
            if n < 1:
                raise OutOfDomainError(f"window width {w} exceeds axis length {ax.length}")
            wins.append(Windows(w, n, ax.origin + 0.5 * w))
        return cls(tuple(wins))

    @classmethod
    def centered(cls, axes: Sequence[Axis], widths, center=0.0) -> "BinningSpec":
        """Windows with one window centred on ``center``, covering as much of each axis as fits."""
        widths = _broadcast(widths, len(axes))
        centers = _broadcast(center, len(axes))
        wins = []
        for ax, w, c in zip(axes, widths, centers):
            first = math.ceil((ax.origin - (c - 0.5 * w)) / w - 1e-9)
            last = math.floor((ax.stop - (c + 0.5 * w)) / w + 1e-9)
            if last < first:
                raise OutOfDomainError(f"no window of width {w} centred on {c} fits the axis")
            wins.append(Windows(w, last - first + 1, c + first * w))
        return cls(tuple(wins))


def _broadcast(value, n):
    if np.ndim(value) == 0:
        return (float(value),) * n
    value = tuple(float(v) for v in value)
    if len(value) != n:
        raise ArityError(f"expected {n} per-axis values, got {len(value)}")
    return value


def _checked_values(values, shape, what):
    arr = np.array(values, dtype=float)
    if arr.shape != tuple(shape):
        try:
            arr = arr.reshape(shape)
        except ValueError:
            raise ValidationError(f"{what}: {arr.size} values do not fit shape {tuple(shape)}") from None
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what}: non-finite values")
    notes = []
    neg = arr < 0
    if neg.any():
        worst = float(arr.min())
        if worst < -JITTER:
            raise ValidationError(
                f"{what}: {int((arr < -JITTER).sum())} negative values (min {worst:.3e})"
            )
        notes.append(f"clamped {int(neg.sum())} values in [-1e-12, 0) to zero")
        arr[neg] = 0.0
    arr.flags.writeable = False
    return arr, notes


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Probability density sampled on a uniform rectangular grid (1-4 axes).

    Discontinuities (plateau edges, window boundaries) are represented by a
    node on the boundary that carries the inside value.
    """

    axes: tuple
    values: np.ndarray
    names: tuple = None
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        axes = tuple(self.axes)
        if not 1 <= len(axes) <= MAX_AXES:
            raise ArityError(f"density needs 1-{MAX_AXES} axes, got {len(axes)}")
        values, notes = _checked_values(self.values, [a.count for a in axes], "density")
        names = tuple(self.names) if self.names is not None else tuple(f"x{i}" for i in range(len(axes)))
        if len(names) != len(axes):
            raise ArityError("one name per axis required")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "notes", tuple(self.notes) + tuple(notes))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @classmethod
    def from_function(cls, fn, axes, names=None) -> "GridDensity":
        """Sample ``fn(*meshgrid)`` on the grid (no normalisation)."""
        mesh = np.meshgrid(*[a.coords for a in axes], indexing="ij")
        return cls(tuple(axes), fn(*mesh), names)

    def subgrid(self, slices: Sequence[slice]) -> "GridDensity":
        """Restrict to node index ranges ``[start, stop)`` per axis."""
        axes = []
        for ax, s in zip(self.axes, slices):
            start, stop, _ = s.indices(ax.count)
            axes.append(Axis(ax.origin + start * ax.step, ax.step, stop - start))
        return GridDensity(tuple(axes), self.values[tuple(slices)], self.names)

    def scaled(self, factor: float, note: str = None) -> "GridDensity":
        notes = self.notes + ((note,) if note else ())
        return GridDensity(self.axes, self.values * factor, self.names, notes)


@dataclass(frozen=True, eq=False)
class Histogram:
    """Discrete probability table over equal-width windows, one :class:`Windows` per axis."""

    windows: tuple
    probs: np.ndarray
    names: tuple = None
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        windows = tuple(self.windows)
        if not 1 <= len(windows) <= MAX_AXES:
            raise ArityError(f"histogram needs 1-{MAX_AXES} axes, got {len(windows)}")
        probs, notes = _checked_values(self.probs, [w.count for w in windows], "histogram")
        names = tuple(self.names) if self.names is not None else tuple(f"x{i}" for i in range(len(windows)))
        if len(names) != len(windows):
            raise ArityError("one name per axis required")
        object.__setattr__(self, "windows", windows)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "notes", tuple(self.notes) + tuple(notes))

    @property
    def ndim(self) -> int:
        return len(self.windows)

    @property
    def widths(self) -> tuple:
        return tuple(w.width for w in self.windows)

    @property
    def spec(self) -> BinningSpec:
        return BinningSpec(self.windows)

    def marginal(self, keep) -> "Histogram":
        keep = _axes_tuple(keep, self.ndim)
        drop = tuple(i for i in range(self.ndim) if i not in keep)
        probs = self.probs.sum(axis=drop) if drop else self.probs
        order = sorted(keep)
        probs = np.transpose(probs, [order.index(k) for k in keep])
        return Histogram(
            tuple(self.windows[k] for k in keep), probs, tuple(self.names[k] for k in keep)
        )

    def scaled(self, factor: float, note: str = None) -> "Histogram":
        notes = self.notes + ((note,) if note else ())
        return Histogram(self.windows, self.probs * factor, self.names, notes)


def _axes_tuple(axes, ndim):
    if isinstance(axes, (int, np.integer)):
        axes = (int(axes),)
    axes = tuple(int(a) for a in axes)
    if len(set(axes)) != len(axes) or any(not 0 <= a < ndim for a in axes):
        raise ArityError(f"invalid axes {axes} for {ndim}-axis input")
    return axes


def trapezoid_weights(axis: Axis) -> np.ndarray:
    """Composite trapezoid weights for the full axis."""
    w = np.full(axis.count, axis.step)
    w[0] = w[-1] = 0.5 * axis.step
    return w


def interval_weights(axis: Axis, lo: float, hi: float) -> np.ndarray:
    """Weights integrating the piecewise-linear interpolant over ``[lo, hi]``.

    Equal to :func:`trapezoid_weights` on the node-aligned sub-range when
    ``lo`` and ``hi`` are nodes.
    """
    tol = 1e-9 * axis.step
    if lo < axis.origin - tol or hi > axis.stop + tol or hi < lo:
        raise OutOfDomainError(f"[{lo}, {hi}] outside grid [{axis.origin}, {axis.stop}]")
    x = axis.coords
    h = axis.step
    a = np.clip(lo, x[:-1], x[1:])
    b = np.clip(hi, x[:-1], x[1:])
    # linear interpolant on cell [x_i, x_i+1]: f_i (x_i+1 - t)/h + f_i+1 (t - x_i)/h
    left = ((x[1:] - a) ** 2 - (x[1:] - b) ** 2) / (2 * h)
    right = ((b - x[:-1]) ** 2 - (a - x[:-1]) ** 2) / (2 * h)
    w = np.zeros(axis.count)
    w[:-1] += left
    w[1:] += right
    return w


def contract(values: np.ndarray, weights: Sequence[np.ndarray]) -> float:
    """Weighted sum of an N-d array with one weight vector per axis."""
    out = values
    for w in reversed(weights):
        out = out @ w
    return float(out)


def integrate(density: GridDensity, region=None) -> float:
    """Trapezoid integral of the density over the grid or an axis-aligned box.

    ``region`` is a sequence of ``(lo, hi)`` pairs, one per axis.
    """
    if region is None:
        weights = [trapezoid_weights(a) for a in density.axes]
    else:
        if len(region) != density.ndim:
            raise ArityError(f"region has {len(region)} intervals for {density.ndim} axes")
        weights = [interval_weights(a, lo, hi) for a, (lo, hi) in zip(density.axes, region)]
    return max(contract(density.values, weights), 0.0)


def marginalize(joint: GridDensity, keep_axis) -> GridDensity:
    """Integrate out every axis not in ``keep_axis`` (an index or tuple of indices)."""
    if joint.ndim < 2:
        raise ArityError("marginalize needs a joint density with at least 2 axes")
    keep = _axes_tuple(keep_axis, joint.ndim)
    if len(keep) == joint.ndim:
        raise ArityError("nothing to integrate out")
    vals = joint.values
    for ax in sorted(set(range(joint.ndim)) - set(keep), reverse=True):
        vals = np.moveaxis(vals, ax, -1) @ trapezoid_weights(joint.axes[ax])
    order = sorted(keep)
    vals = np.transpose(vals, [order.index(k) for k in keep])
    return GridDensity(tuple(joint.axes[k] for k in keep), vals, tuple(joint.names[k] for k in keep))


@dataclass(frozen=True)
class Diagnostics:
    """Read-only health report produced by :func:`validate`."""

    mass: float
    normalization_defect: float
    negative_values: int
    clamped_values: int
    tail_mass_estimate: float
    notes: tuple

    @property
    def ok(self) -> bool:
        return self.normalization_defect <= EPS_NORM and self.negative_values == 0

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "normalization_defect": self.normalization_defect,
            "negative_values": self.negative_values,
            "clamped_values": self.clamped_values,
            "tail_mass_estimate": self.tail_mass_estimate,
            "notes": list(self.notes),
            "ok": self.ok,
        }


def _clamped_count(notes):
    for n in notes:
        if n.startswith("clamped "):
            return int(n.split()[1])
    return 0


def _edge_tail(marginal: np.ndarray, step: float) -> float:
    # geometric extrapolation of the decay between the last two nodes on each side
    total = 0.0
    for edge, inner in ((marginal[0], marginal[1]), (marginal[-1], marginal[-2])):
        if edge <= 0:
            continue
        r = edge / inner if inner > 0 else 1.0
        total += edge * step * (r / (1 - r) if r < 1 else 1.0)
    return total


def validate(obj: Union[GridDensity, Histogram]) -> Diagnostics:
    """Diagnose normalisation, sign and (for densities) tail mass. Never raises."""
    if isinstance(obj, Histogram):
        mass = float(obj.probs.sum())
        tail = 0.0
        neg = int((obj.probs < 0).sum())
    else:
        mass = integrate(obj)
        neg = int((obj.values < 0).sum())
        tail = 0.0
        for i, ax in enumerate(obj.axes):
            m = obj.values if obj.ndim == 1 else marginalize(obj, i).values
            tail += _edge_tail(m, ax.step)
    return Diagnostics(
        mass=mass,
        normalization_defect=abs(mass - 1.0),
        negative_values=neg,
        clamped_values=_clamped_count(obj.notes),
        tail_mass_estimate=tail,
        notes=tuple(obj.notes),
    )


def normalize(obj):
    """Rescale a density or histogram to unit mass; the factor is recorded in ``notes``."""
    mass = float(obj.probs.sum()) if isinstance(obj, Histogram) else integrate(obj)
    if mass <= 0:
        raise NormalizationError("cannot normalise zero mass")
    if mass == 1.0:
        return obj
    return obj.scaled(1.0 / mass, f"renormalized by factor {1.0 / mass!r}")


def require_normalized(obj) -> None:
    d = validate(obj)
    if d.normalization_defect > EPS_NORM:
        raise NormalizationError(
            f"mass {d.mass!r} differs from 1 by {d.normalization_defect:.3e} (> {EPS_NORM})"
        )
