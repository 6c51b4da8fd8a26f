"""File formats: histogram CSV (+ JSON sidecar), density JSON, JSON reports."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import core
from .core import EPS_NORM, Axis, GridDensity, Histogram, Windows
from .errors import EntroSteerError, NormalizationError, ValidationError


class ParseError(EntroSteerError):
    """Input file could not be parsed."""


class MissingWidthError(EntroSteerError):
    """No window width is available for an axis."""


def _float(text, line, col):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"line {line}: column {col!r}: cannot parse {text!r} as a number") from None
    if not math.isfinite(v):
        raise ParseError(f"line {line}: column {col!r}: non-finite value {text!r}")
    return v


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def read_histogram_csv(path, widths=None, sidecar=None, normalize=False):
    """Read a ``name1,...,nameN,prob`` (or ``...,count``) table keyed by window centres.

    Widths come from ``widths`` (one per axis or a scalar), else from the
    sidecar JSON (``{"widths": [...]}``), else from the spacing of the
    centres. Missing cells are zero. Returns ``(histogram, meta)``.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [(i + 1, r) for i, r in enumerate(rows) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    _, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 2:
        raise ParseError("line 1: header needs at least one axis column and a value column")
    names, value_col = header[:-1], header[-1].lower()
    if value_col not in ("prob", "probability", "count", "counts"):
        raise ParseError(f"line 1: last column must be 'prob' or 'count', got {header[-1]!r}")
    centers, values = [], []
    for line, r in rows[1:]:
        if len(r) != len(header):
            raise ParseError(f"line {line}: expected {len(header)} fields, got {len(r)}")
        centers.append([_float(c.strip(), line, n) for c, n in zip(r[:-1], names)])
        values.append(_float(r[-1].strip(), line, header[-1]))
    if not values:
        raise ParseError(f"{path}: no data rows")
    centers = np.array(centers)
    values = np.array(values)

    meta = {"source": str(path), "widths_inferred": False}
    side = Path(sidecar) if sidecar else sidecar_path(path)
    side_data = {}
    if side.exists() and side != path:
        try:
            side_data = json.loads(side.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{side}: line {exc.lineno}: {exc.msg}") from None
    if widths is None and "widths" in side_data:
        widths = side_data["widths"]
    if "base" in side_data:
        meta["base"] = str(side_data["base"])

    ndim = len(names)
    if widths is not None:
        widths = [float(widths)] * ndim if np.ndim(widths) == 0 else [float(w) for w in widths]
        if len(widths) != ndim:
            raise ValidationError(f"{len(widths)} widths for {ndim} axes")
    else:
        widths = []
        for j in range(ndim):
            u = np.unique(centers[:, j])
            if len(u) < 2:
                raise MissingWidthError(f"axis {names[j]!r}: single window, width must be given")
            widths.append(float(np.min(np.diff(u))))
        meta["widths_inferred"] = True

    windows, index = [], []
    for j, w in enumerate(widths):
        lo = centers[:, j].min()
        k = (centers[:, j] - lo) / w
        if np.any(np.abs(k - np.round(k)) > 1e-6):
            raise ValidationError(f"axis {names[j]!r}: centres are not on a lattice of width {w}")
        k = np.round(k).astype(int)
        windows.append(Windows(w, int(k.max()) + 1, float(lo)))
        index.append(k)
    table = np.zeros([win.count for win in windows])
    flat = np.ravel_multi_index(tuple(index), table.shape)
    if len(np.unique(flat)) != len(flat):
        raise ValidationError("duplicate window centres")
    if np.any(values < 0):
        raise ValidationError(f"{int((values < 0).sum())} negative cell values")
    table.flat[flat] = values

    is_count = value_col.startswith("count")
    total = float(table.sum())
    if is_count:
        if total <= 0:
            raise ValidationError("counts sum to zero")
        meta["total_counts"] = total
        table = table / total
        meta["normalized"] = True
    elif abs(total - 1.0) > EPS_NORM:
        if not normalize:
            raise NormalizationError(f"probabilities sum to {total!r}; pass --normalize to rescale")
        table = table / total
        meta["normalized"] = True
        meta["renormalization_factor"] = 1.0 / total
    return Histogram(tuple(windows), table, tuple(names)), meta


def write_histogram_csv(hist: Histogram, path, base=None) -> None:
    """Write every cell (zeros included) plus a sidecar with the widths."""
    path = Path(path)
    mesh = np.meshgrid(*[w.centers for w in hist.windows], indexing="ij")
    with path.open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(list(hist.names) + ["prob"])
        for idx in np.ndindex(hist.probs.shape):
            out.writerow([repr(float(m[idx])) for m in mesh] + [repr(float(hist.probs[idx]))])
    side = {"widths": list(hist.widths)}
    if base is not None:
        side["base"] = base
    sidecar_path(path).write_text(dump_json(side))


def read_density_json(path, normalize=False):
    """``{"axes": [{"origin", "step", "count"}, ...], "values": [...row-major...], "names": [...]}``."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    try:
        axes = tuple(Axis(float(a["origin"]), float(a["step"]), int(a["count"])) for a in data["axes"])
        values = np.asarray(data["values"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed density ({exc})") from None
    density = GridDensity(axes, values, data.get("names"))
    meta = {"source": str(path)}
    if normalize:
        density = core.normalize(density)
        meta["normalized"] = True
    return density, meta


def density_to_dict(density: GridDensity) -> dict:
    return {
        "axes": [{"origin": a.origin, "step": a.step, "count": a.count} for a in density.axes],
        "names": list(density.names),
        "values": [float(v) for v in density.values.ravel()],
    }


def write_density_json(density: GridDensity, path) -> None:
    Path(path).write_text(dump_json(density_to_dict(density)))


def dump_json(obj) -> str:
    """Canonical report text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
