"""Windowing of grid densities into histograms and in-window conditional densities."""
from __future__ import annotations

import numpy as np

from .core import Axis, BinningSpec, GridDensity, Histogram, Windows, integrate
from .errors import (
    ArityError,
    CommensurabilityError,
    OutOfDomainError,
    ZeroProbabilityWindowError,
)

P_MIN = 1e-15


def _whole(x, what):
    k = round(x)
    if abs(x - k) > 1e-6:
        raise CommensurabilityError(what)
    return int(k)


def edge_nodes(axis: Axis, windows: Windows) -> np.ndarray:
    """Grid-node indices of the ``count + 1`` window edges along one axis."""
    per = _whole(
        windows.width / axis.step,
        f"window width {windows.width} is not a multiple of grid step {axis.step}",
    )
    if per < 1:
        raise CommensurabilityError(f"window width {windows.width} is below grid step {axis.step}")
    first = _whole(
        (windows.lo - axis.origin) / axis.step,
        f"window edge {windows.lo} does not fall on a grid node",
    )
    last = first + per * windows.count
    if first < 0 or last > axis.count - 1:
        raise OutOfDomainError(
            f"windows [{windows.lo}, {windows.hi}] exceed grid [{axis.origin}, {axis.stop}]"
        )
    return first + per * np.arange(windows.count + 1)


def _check_arity(density, spec):
    if density.ndim != spec.ndim:
        raise ArityError(f"{spec.ndim}-axis binning for a {density.ndim}-axis density")


def integrate_windows_along(values: np.ndarray, axis: Axis, windows: Windows, dim: int) -> np.ndarray:
    """Trapezoid integrals over each window along array dimension ``dim``.

    Cells are summed per window, so the windows of a tiling add up to the
    integral over the tiled region.
    """
    edges = edge_nodes(axis, windows)
    a = np.moveaxis(np.asarray(values, dtype=float), dim, -1)[..., edges[0]:edges[-1] + 1]
    cells = 0.5 * axis.step * (a[..., 1:] + a[..., :-1])
    per = int(edges[1] - edges[0])
    sums = cells.reshape(cells.shape[:-1] + (windows.count, per)).sum(axis=-1)
    return np.moveaxis(sums, -1, dim)


def windowed_integrals(values: np.ndarray, axes, spec: BinningSpec) -> np.ndarray:
    """Trapezoid integral of a node array over every window cell."""
    out = values
    for i, (ax, win) in enumerate(zip(axes, spec.windows)):
        out = integrate_windows_along(out, ax, win, i)
    return out


def bin_density(density: GridDensity, spec: BinningSpec) -> Histogram:
    """Window probabilities ``P(X_l) = integral of rho over window l`` (joint for multi-axis)."""
    _check_arity(density, spec)
    probs = windowed_integrals(density.values, density.axes, spec)
    return Histogram(spec.windows, np.clip(probs, 0.0, None), density.names)


def binned_region(density: GridDensity, spec: BinningSpec) -> GridDensity:
    """The density restricted to the box covered by the windows."""
    _check_arity(density, spec)
    slices = []
    for ax, win in zip(density.axes, spec.windows):
        e = edge_nodes(ax, win)
        slices.append(slice(int(e[0]), int(e[-1]) + 1))
    return density.subgrid(slices)


def window_slices(density: GridDensity, window, spec: BinningSpec) -> tuple:
    """Node slices (edges inclusive) of one window cell."""
    _check_arity(density, spec)
    if isinstance(window, (int, np.integer)):
        window = (int(window),)
    if len(window) != spec.ndim:
        raise ArityError(f"window index {window} for {spec.ndim}-axis binning")
    slices = []
    for ax, win, l in zip(density.axes, spec.windows, window):
        if not 0 <= l < win.count:
            raise OutOfDomainError(f"window {l} outside 0..{win.count - 1}")
        e = edge_nodes(ax, win)
        slices.append(slice(int(e[l]), int(e[l + 1]) + 1))
    return tuple(slices)


def window_conditional(density: GridDensity, window, spec: BinningSpec) -> GridDensity:
    """In-window conditional density ``rho / P`` on the window's own subgrid.

    The returned grid spans exactly the window (both edge nodes included) and
    integrates to one; outside the window the conditional is zero and is not
    stored.
    """
    sub = density.subgrid(window_slices(density, window, spec))
    p = integrate(sub)
    if not p > P_MIN:
        raise ZeroProbabilityWindowError(f"window {window} has probability {p:.3e}")
    return sub.scaled(1.0 / p)


def coarsen(hist: Histogram, factors) -> Histogram:
    """Merge groups of ``factor`` adjacent windows per axis; counts must divide evenly."""
    if np.ndim(factors) == 0:
        factors = (int(factors),) * hist.ndim
    probs = hist.probs
    windows = []
    for i, (win, k) in enumerate(zip(hist.windows, factors)):
        if win.count % k:
            raise CommensurabilityError(f"{win.count} windows do not split into groups of {k}")
        shape = probs.shape[:i] + (win.count // k, k) + probs.shape[i + 1:]
        probs = probs.reshape(shape).sum(axis=i + 1)
        windows.append(Windows(win.width * k, win.count // k, win.first_center + 0.5 * (k - 1) * win.width))
    return Histogram(tuple(windows), probs, hist.names)

