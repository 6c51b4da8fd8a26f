"""Discrete/continuous entropy connection: the exact identity and the bound family.

For a density binned into equal windows,

    h(x) = sum_l P(X_l) h_l(x) + H(X)

holds exactly, and bounding each in-window entropy by ``log(width)`` yields
``h <= H + log(width)`` together with its joint, conditional and mutual
information relatives. The quantities here are evaluated on the binned region
with the same trapezoid rule on both sides, so the identity residual is pure
rounding and every gap is non-negative up to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import BinningSpec, GridDensity, _axes_tuple, integrate, marginalize, normalize, require_normalized
from .discretize import (
    P_MIN,
    bin_density,
    binned_region,
    integrate_windows_along,
    windowed_integrals,
)
from .entropy import EntropyValue, _plogp, differential_nats, log_base, shannon_nats
from .errors import ArityError

IDENTITY_TOL = 1e-10
INEQUALITY_FLOOR = -1e-10


@dataclass(frozen=True, eq=False)
class ConnectionReport:
    """Both sides of ``h = sum P h_l + H`` in one base.

    ``residual`` is computed from the reported values:
    ``lhs - (mixture_term + discrete_entropy)``.
    """

    lhs: EntropyValue
    mixture_term: EntropyValue
    discrete_entropy: EntropyValue
    residual: float
    window_index: np.ndarray
    window_prob: np.ndarray
    window_entropy: np.ndarray
    outside_mass: float
    negligible_windows: int

    @property
    def rhs_terms(self) -> dict:
        return {"sum_P_h_window": self.mixture_term, "H": self.discrete_entropy}

    @property
    def per_window(self) -> list:
        return [
            (tuple(int(i) for i in idx), float(p), float(h))
            for idx, p, h in zip(self.window_index, self.window_prob, self.window_entropy)
        ]

    @property
    def passed(self) -> bool:
        return abs(self.residual) < IDENTITY_TOL

    def to_dict(self, max_windows: int = 256) -> dict:
        out = {
            "lhs_h": self.lhs.to_dict(),
            "sum_P_h_window": self.mixture_term.to_dict(),
            "H": self.discrete_entropy.to_dict(),
            "residual": self.residual,
            "outside_mass": self.outside_mass,
            "negligible_windows": self.negligible_windows,
            "windows": len(self.window_prob),
            "passed": self.passed,
        }
        if len(self.window_prob) <= max_windows:
            out["per_window"] = [
                {"index": list(i), "P": p, "h": h} for i, p, h in self.per_window
            ]
        return out


def verify_connection(rho: GridDensity, spec: BinningSpec, base) -> ConnectionReport:
    """Evaluate both sides of the fundamental connection on the binned region."""
    require_normalized(rho)
    region = binned_region(rho, spec)
    probs = bin_density(region, spec).probs
    plogp_w = windowed_integrals(_plogp(region.values), region.axes, spec)
    full = differential_nats(region)

    # every window with positive mass enters the sums; dropping the sub-P_MIN
    # ones would break the identity once there are ~1e5 of them
    nonempty = probs > 0
    p = probs[nonempty]
    h_window = -plogp_w[nonempty] / p + np.log(p)
    mixture = float(np.sum(-plogp_w[nonempty] + p * np.log(p)))
    shannon = shannon_nats(p)

    lb = log_base(base)
    lhs = EntropyValue(full / lb, base)
    mix = EntropyValue(mixture / lb, base)
    disc = EntropyValue(shannon / lb, base)
    return ConnectionReport(
        lhs=lhs,
        mixture_term=mix,
        discrete_entropy=disc,
        residual=lhs.value - (mix.value + disc.value),
        window_index=np.argwhere(nonempty),
        window_prob=p,
        window_entropy=h_window / lb,
        outside_mass=integrate(rho) - float(probs.sum()),
        negligible_windows=int((probs <= P_MIN).sum()),
    )


@dataclass(frozen=True)
class GapReport:
    """Signed slack of one discrete/continuous inequality (``gap >= 0`` means it holds)."""

    id: str
    label: str
    relation: str
    applicable: bool
    continuous: Optional[EntropyValue] = None
    discrete: Optional[EntropyValue] = None
    log_width: Optional[float] = None
    gap: Optional[float] = None
    widths: tuple = ()

    @property
    def satisfied(self) -> Optional[bool]:
        return None if not self.applicable else self.gap >= INEQUALITY_FLOOR

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "relation": self.relation,
            "applicable": self.applicable,
            "continuous": self.continuous.to_dict() if self.continuous else None,
            "discrete": self.discrete.to_dict() if self.discrete else None,
            "log_width": self.log_width,
            "gap": self.gap,
            "widths": list(self.widths),
            "satisfied": self.satisfied,
        }


class _EntropyTable:
    """Memoised h and H (nats) over axis subsets of one binned, normalised region."""

    def __init__(self, rho: GridDensity, spec: BinningSpec):
        self.region = normalize(binned_region(rho, spec))
        self.hist = bin_density(self.region, spec)
        self.ndim = rho.ndim
        self.names = rho.names
        self.widths = spec.widths
        self._h = {}
        self._H = {}

    def h(self, axes) -> float:
        axes = tuple(sorted(axes))
        if not axes:
            return 0.0
        if axes not in self._h:
            d = self.region if len(axes) == self.ndim else marginalize(self.region, axes)
            self._h[axes] = differential_nats(d)
        return self._h[axes]

    def H(self, axes) -> float:
        axes = tuple(sorted(axes))
        if not axes:
            return 0.0
        if axes not in self._H:
            hist = self.hist if len(axes) == self.ndim else self.hist.marginal(axes)
            self._H[axes] = shannon_nats(hist.probs)
        return self._H[axes]


# (id, kind, first group, second group): "cond" rows bound h(first | second),
# "mi" rows bound h(first : second).
ROWS = (
    ("h(x)", "cond", (0,), ()),
    ("h(x,y)", "cond", (0, 1), ()),
    ("h(x|y)", "cond", (0,), (1,)),
    ("h(x:y)", "mi", (0,), (1,)),
    ("h(x,y,z)", "cond", (0, 1, 2), ()),
    ("h(x,y|z)", "cond", (0, 1), (2,)),
    ("h(x|y,z)", "cond", (0,), (1, 2)),
    ("h(x:y,z)", "mi", (0,), (1, 2)),
)
ROW_IDS = tuple(r[0] for r in ROWS) + ("vector",)


def _label(names, kind, first, second):
    a = ",".join(names[i] for i in first)
    b = ",".join(names[i] for i in second)
    if kind == "mi":
        return f"h({a}:{b}) >= H({a}:{b})"
    if second:
        return f"h({a}|{b}) <= H({a}|{b}) + log(prod width[{a}])"
    return f"h({a}) <= H({a}) + log(prod width[{a}])"


def _gap(table: _EntropyTable, row_id, kind, first, second, base) -> GapReport:
    lb = log_base(base)
    both = first + second
    widths = tuple(table.widths[i] for i in (both if kind == "mi" else first))
    label = _label(table.names, kind, first, second)
    if kind == "mi":
        cont = table.h(first) + table.h(second) - table.h(both)
        disc = table.H(first) + table.H(second) - table.H(both)
        return GapReport(
            row_id, label, ">=", True,
            EntropyValue(cont / lb, base), EntropyValue(disc / lb, base),
            0.0, (cont - disc) / lb, widths,
        )
    cont = table.h(both) - table.h(second)
    disc = table.H(both) - table.H(second)
    lw = sum(math.log(table.widths[i]) for i in first)
    return GapReport(
        row_id, label, "<=", True,
        EntropyValue(cont / lb, base), EntropyValue(disc / lb, base),
        lw / lb, (disc + lw - cont) / lb, widths,
    )


def _row(table, row_id, base) -> GapReport:
    if row_id == "vector":
        if table.ndim < 2:
            return GapReport("vector", "h(rest|x0) <= H(rest|x0) + log(prod width)", "<=", False)
        return _gap(table, "vector", "cond", tuple(range(1, table.ndim)), (0,), base)
    for rid, kind, first, second in ROWS:
        if rid == row_id:
            if max(first + second) >= table.ndim:
                return GapReport(rid, rid, ">=" if kind == "mi" else "<=", False)
            return _gap(table, rid, kind, first, second, base)
    raise KeyError(f"unknown inequality {row_id!r}; choose from {ROW_IDS}")


def gap_suite(joint: GridDensity, spec: BinningSpec, base) -> list:
    """All eight tabulated inequalities plus the vector-conditional row.

    Rows needing more axes than ``joint`` has are reported as not applicable;
    rows needing fewer use the marginal over the leading axes.
    """
    require_normalized(joint)
    table = _EntropyTable(joint, spec)
    return [_row(table, rid, base) for rid in ROW_IDS]


def vector_gap(joint: GridDensity, condition_axes, target_axes, spec: BinningSpec, base) -> GapReport:
    """Slack of ``h(T|C) <= H(T|C) + log prod width(T)`` where ``T``, ``C`` partition the axes."""
    cond = _axes_tuple(condition_axes, joint.ndim)
    target = _axes_tuple(target_axes, joint.ndim)
    if sorted(cond + target) != list(range(joint.ndim)):
        raise ArityError(f"target {target} and condition {cond} do not partition {joint.ndim} axes")
    require_normalized(joint)
    return _gap(_EntropyTable(joint, spec), "vector", "cond", target, cond, base)


def refine_convergence(joint: GridDensity, spec: BinningSpec, halvings: int, base, row="h(x)") -> list:
    """Gap of one inequality for widths ``w, w/2, ..., w/2**halvings`` (nested windows)."""
    if halvings < 1:
        raise ValueError("halvings must be at least 1")
    require_normalized(joint)
    specs = [spec]
    for _ in range(halvings):
        specs.append(specs[-1].halved())
    binned_region(joint, specs[-1])  # commensurability at the finest level, before any work
    out = []
    for s in specs:
        report = _row(_EntropyTable(joint, s), row, base)
        if not report.applicable:
            raise ArityError(f"row {row} does not apply to a {joint.ndim}-axis density")
        out.append((s.widths, report.gap))
    return out


def jensen_step(joint: GridDensity, spec: BinningSpec, base) -> tuple:
    """Per x-window slack of ``h_l(x) >= sum_m P(Y_m|X_l) h_lm(x)`` for a 2-axis joint.

    Returns ``(window_indices, gaps)`` over windows with non-negligible mass.
    """
    if joint.ndim != 2:
        raise ArityError("the conditioning step is checked on 2-axis joints")
    region = binned_region(joint, spec)
    ax_x, ax_y = region.axes
    win_x, win_y = spec.windows
    strip = integrate_windows_along(region.values, ax_y, win_y, 1)  # (x nodes, y windows)
    rho_x = strip.sum(axis=1)
    p_l = integrate_windows_along(rho_x, ax_x, win_x, 0)
    p_lm = integrate_windows_along(strip, ax_x, win_x, 0)
    a_l = integrate_windows_along(_plogp(rho_x), ax_x, win_x, 0)
    b_lm = integrate_windows_along(_plogp(strip), ax_x, win_x, 0)

    ok = p_l > P_MIN
    keep_lm = p_lm > 0
    safe_lm = np.where(keep_lm, p_lm, 1.0)
    inner = np.where(keep_lm, -b_lm + p_lm * np.log(safe_lm), 0.0).sum(axis=1)
    p = p_l[ok]
    h_l = -a_l[ok] / p + np.log(p)
    averaged = inner[ok] / p
    return np.flatnonzero(ok), (h_l - averaged) / log_base(base)


@dataclass(frozen=True)
class ProbeReport:
    continuous: EntropyValue
    discrete: EntropyValue
    difference: float
    label: str = "exploratory"
    note: str = field(default="signed h(x:y|z) - H(X:Y|Z); no inequality is asserted")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "note": self.note,
            "h_cmi": self.continuous.to_dict(),
            "H_cmi": self.discrete.to_dict(),
            "difference": self.difference,
        }


def conditional_mi_probe(joint3: GridDensity, spec: BinningSpec, base) -> ProbeReport:
    """Record ``h(x:y|z) - H(X:Y|Z)`` without asserting its sign."""
    if joint3.ndim != 3:
        raise ArityError("conditional mutual information probe needs a 3-axis joint")
    require_normalized(joint3)
    t = _EntropyTable(joint3, spec)
    cont = t.h((0, 2)) + t.h((1, 2)) - t.h((0, 1, 2)) - t.h((2,))
    disc = t.H((0, 2)) + t.H((1, 2)) - t.H((0, 1, 2)) - t.H((2,))
    lb = log_base(base)
    return ProbeReport(EntropyValue(cont / lb, base), EntropyValue(disc / lb, base), (cont - disc) / lb)
