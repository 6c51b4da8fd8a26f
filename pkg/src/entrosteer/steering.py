"""Entropic EPR-steering witnesses, continuous and discretised.

Party B is the steered party: the witness conditions B's outcomes on A's.
A non-steerable state satisfies

    H(X_B|X_A) + H(K_B|K_A) >= sum_i log(pi e / (dx_Bi * dk_Bi)),

so ``margin = RHS - LHS > 0`` certifies steering. Only the B-side widths
enter the right-hand side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import BinningSpec, GridDensity, Histogram, marginalize, require_normalized
from .discretize import bin_density
from .entropy import (
    EntropyValue,
    conditional_entropy_differential,
    log_base,
    shannon_nats,
)
from .errors import ArityError, ValidationError
from .gaussian_model import (
    FOURIER_CONVENTION,
    BiphotonParams,
    analytic_entropies,
    model_axes,
    momentum_joint,
    position_joint,
)

LOG_PI_E = math.log(math.pi * math.e)


@dataclass(frozen=True)
class AxisRecord:
    H_x: float
    H_k: float
    dx: float
    dk: float
    rhs: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SteeringReport:
    """Outcome of one discrete witness evaluation; all entropies in ``base`` units."""

    lhs: float
    rhs: float
    margin: float
    violated: bool
    vacuous: bool
    base: str
    mode: str
    steered: str = "B"
    axes: Optional[tuple] = None
    convention: Optional[str] = None
    widths: tuple = ()

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "steered": self.steered,
            "conditioning": "B|A" if self.steered == "B" else "A|B",
            "base": self.base,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "violated": self.violated,
            "vacuous": self.vacuous,
            "axes": [a.to_dict() for a in self.axes] if self.axes is not None else None,
            "widths": [list(w) for w in self.widths],
            "convention": self.convention,
        }


def _sides(n, steered):
    a = tuple(range(n))
    b = tuple(range(n, 2 * n))
    return (b, a) if steered == "B" else (a, b)


def _conditional_nats(hist: Histogram, target, given) -> float:
    both = tuple(sorted(target + given))
    joint = hist if len(both) == hist.ndim else hist.marginal(both)
    return shannon_nats(joint.probs) - shannon_nats(hist.marginal(given).probs)


def _pairs(obj, kind):
    """Split input into ``("vector", single)`` or ``("per-axis", [2-axis items])``."""
    if isinstance(obj, kind):
        if obj.ndim % 2:
            raise ArityError(f"need an even number of axes (A then B), got {obj.ndim}")
        if obj.ndim == 2:
            return "per-axis", [obj]
        return "vector", obj
    items = list(obj)
    if not items or any(not isinstance(i, kind) or i.ndim != 2 for i in items):
        raise ArityError("per-axis input must be a non-empty sequence of 2-axis objects")
    return "per-axis", items


def _rhs_nats(dx, dk):
    return math.log(math.pi * math.e / (dx * dk))


def discrete_steering_test(x_hist, k_hist, base, steered: str = "B", convention=None) -> SteeringReport:
    """Evaluate the discrete witness.

    ``x_hist``/``k_hist`` are either one histogram each with axes
    ``(A_1..A_n, B_1..B_n)`` (the vector form, valid without assuming the
    spatial axes are independent) or equal-length sequences of 2-axis
    ``(A_i, B_i)`` histograms (the per-axis sum).
    """
    if steered not in ("A", "B"):
        raise ValueError("steered party must be 'A' or 'B'")
    mode_x, xs = _pairs(x_hist, Histogram)
    mode_k, ks = _pairs(k_hist, Histogram)
    if mode_x != mode_k:
        raise ArityError("position and wavenumber inputs must both be per-axis or both vector")
    lb = log_base(base)
    if mode_x == "vector":
        n = xs.ndim // 2
        if ks.ndim != xs.ndim:
            raise ArityError(f"position has {n} axes per party, wavenumber {ks.ndim // 2}")
        for h in (xs, ks):
            require_normalized(h)
        target, given = _sides(n, steered)
        lhs = _conditional_nats(xs, target, given) + _conditional_nats(ks, target, given)
        widths = [(xs.widths[t], ks.widths[t]) for t in target]
        rhs = sum(_rhs_nats(dx, dk) for dx, dk in widths)
        records = None
    else:
        if len(xs) != len(ks):
            raise ArityError(f"{len(xs)} position axes but {len(ks)} wavenumber axes")
        target, given = _sides(1, steered)
        records = []
        for hx, hk in zip(xs, ks):
            require_normalized(hx)
            require_normalized(hk)
            dx, dk = hx.widths[target[0]], hk.widths[target[0]]
            records.append((
                _conditional_nats(hx, target, given),
                _conditional_nats(hk, target, given),
                dx, dk, _rhs_nats(dx, dk),
            ))
        lhs = sum(r[0] + r[1] for r in records)
        rhs = sum(r[4] for r in records)
        widths = [(r[2], r[3]) for r in records]
        records = tuple(AxisRecord(r[0] / lb, r[1] / lb, r[2], r[3], r[4] / lb) for r in records)
    lhs, rhs = lhs / lb, rhs / lb
    margin = rhs - lhs
    return SteeringReport(
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        violated=margin > 0,
        vacuous=rhs <= 0,
        base=EntropyValue(0.0, base).base,
        mode=mode_x,
        steered=steered,
        axes=records,
        convention=convention,
        widths=tuple(widths),
    )


def continuous_steering_lhs(xs_joint, ks_joint, base, steered: str = "B") -> EntropyValue:
    """``h(x_B|x_A) + h(k_B|k_A)`` (vector form or summed over per-axis joints).

    Non-steerable states give at least ``n log(pi e)``.
    """
    mode_x, xs = _pairs(xs_joint, GridDensity)
    mode_k, ks = _pairs(ks_joint, GridDensity)
    if mode_x != mode_k:
        raise ArityError("position and wavenumber inputs must both be per-axis or both vector")
    if mode_x == "vector":
        if xs.ndim != ks.ndim:
            raise ArityError("position and wavenumber joints differ in dimensionality")
        xs, ks = [xs], [ks]
    elif len(xs) != len(ks):
        raise ArityError(f"{len(xs)} position axes but {len(ks)} wavenumber axes")
    total = 0.0
    for x, k in zip(xs, ks):
        target, given = _sides(x.ndim // 2, steered)
        total += conditional_entropy_differential(x, given, "e", target).value
        total += conditional_entropy_differential(k, given, "e", target).value
    return EntropyValue.from_nats(total, base)


@dataclass(frozen=True)
class ModelBinning:
    """Grids and window specs used to discretise the model at one width pair."""

    x_density: GridDensity
    k_density: GridDensity
    x_spec: BinningSpec
    k_spec: BinningSpec


def _refines(refine):
    if isinstance(refine, (tuple, list)):
        return int(refine[0]), int(refine[1])
    return int(refine), int(refine)


def bin_model(params: BiphotonParams, dx: float, dk: float, refine=4) -> ModelBinning:
    """Single-axis model joints on grids where windows centred on 0 tile exactly.

    ``refine`` is the number of grid steps per window, either one value or an
    ``(x, k)`` pair.
    """
    rx, rk = _refines(refine)
    one = BiphotonParams(params.sigma_plus, params.sigma_minus, 1)
    ax = model_axes(one, dx, "x", rx)
    ak = model_axes(one, dk, "k", rk)
    x = position_joint(one, ax)
    k = momentum_joint(one, ak)
    return ModelBinning(x, k, BinningSpec.tiling((ax, ax), dx), BinningSpec.tiling((ak, ak), dk))


def _model_report(params, hx, hk, base, steered):
    # axes are independent and identical, so one binned pair stands in for every axis
    return discrete_steering_test([hx] * params.dims, [hk] * params.dims, base, steered, FOURIER_CONVENTION)


@dataclass(frozen=True)
class ScanResult:
    reports: tuple
    continuous_lhs: float
    base: str
    flip_widths: Optional[tuple] = None

    @property
    def refined_lhs(self) -> list:
        """``LHS + sum log(dx dk)`` per report; tends to the continuous LHS from above."""
        lb = log_base(self.base)
        return [
            r.lhs + sum(math.log(dx * dk) for dx, dk in r.widths) / lb for r in self.reports
        ]

    def table(self) -> list:
        return [
            {
                "dx": r.widths[0][0],
                "dk": r.widths[0][1],
                "lhs": r.lhs,
                "rhs": r.rhs,
                "margin": r.margin,
                "violated": r.violated,
                "vacuous": r.vacuous,
                "lhs_plus_log_widths": v,
            }
            for r, v in zip(self.reports, self.refined_lhs)
        ]

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "continuous_lhs": self.continuous_lhs,
            "flip_widths": list(self.flip_widths) if self.flip_widths else None,
            "rows": self.table(),
        }


def steering_bin_scan(
    params: BiphotonParams,
    widths: Sequence,
    base,
    refine=4,
    shared_grid: Optional[ModelBinning] = None,
    steered: str = "B",
) -> ScanResult:
    """One witness evaluation per ``(dx, dk)`` pair.

    Without ``shared_grid`` every pair gets its own aligned grid. With it, all
    windows tile that grid from its left edge, which keeps halved widths
    nested. ``flip_widths`` is the first pair (in the given order) whose
    verdict differs from the first pair's.
    """
    reports = []
    for dx, dk in widths:
        if shared_grid is None:
            mb = bin_model(params, dx, dk, refine)
            x, k, sx, sk = mb.x_density, mb.k_density, mb.x_spec, mb.k_spec
        else:
            x, k = shared_grid.x_density, shared_grid.k_density
            sx = BinningSpec.tiling(x.axes, dx)
            sk = BinningSpec.tiling(k.axes, dk)
        reports.append(_model_report(params, bin_density(x, sx), bin_density(k, sk), base, steered))
    flip = None
    for r in reports[1:]:
        if r.violated != reports[0].violated:
            flip = r.widths[0]
            break
    cont = analytic_entropies(params, base).steering_lhs.value
    return ScanResult(tuple(reports), cont, EntropyValue(0.0, base).base, flip)


def halving_widths(dx: float, dk: float, halvings: int) -> list:
    return [(dx / 2**i, dk / 2**i) for i in range(halvings + 1)]


def nested_scan(params: BiphotonParams, dx: float, dk: float, halvings: int, base, refine=2) -> ScanResult:
    """Scan over ``dx/2**i, dk/2**i`` on one grid fine enough for the last level."""
    rx, rk = _refines(refine)
    grid = bin_model(params, dx, dk, (rx * 2**halvings, rk * 2**halvings))
    return steering_bin_scan(params, halving_widths(dx, dk, halvings), base, shared_grid=grid)


@dataclass(frozen=True)
class PathComparison:
    per_axis: SteeringReport
    vector: SteeringReport
    difference: float

    def to_dict(self) -> dict:
        return {
            "per_axis": self.per_axis.to_dict(),
            "vector": self.vector.to_dict(),
            "vector_minus_per_axis_lhs": self.difference,
        }


def per_axis_vs_vector(x_joint: GridDensity, k_joint: GridDensity, spec, base, steered: str = "B") -> PathComparison:
    """Witness LHS as a per-axis sum and as one vector conditional entropy.

    ``spec`` is a ``(x_spec, k_spec)`` pair of full ``2n``-axis binnings. Both
    paths use the same binned histograms; the per-axis path marginalises them
    to each ``(A_i, B_i)`` pair.
    """
    if x_joint.ndim < 4 or x_joint.ndim % 2 or k_joint.ndim != x_joint.ndim:
        raise ArityError("need matching joints with n >= 2 spatial axes per party")
    x_spec, k_spec = spec
    hx = bin_density(x_joint, x_spec)
    hk = bin_density(k_joint, k_spec)
    n = x_joint.ndim // 2
    pairs_x = [hx.marginal((i, n + i)) for i in range(n)]
    pairs_k = [hk.marginal((i, n + i)) for i in range(n)]
    per = discrete_steering_test(pairs_x, pairs_k, base, steered)
    vec = discrete_steering_test(hx, hk, base, steered)
    return PathComparison(per, vec, vec.lhs - per.lhs)


def marginal_pair(joint: GridDensity, i: int) -> GridDensity:
    """The ``(A_i, B_i)`` marginal of a ``2n``-axis joint."""
    n = joint.ndim // 2
    return marginalize(joint, (i, n + i))


def require_widths(hist: Histogram) -> None:
    if any(not (w > 0) for w in hist.widths):
        raise ValidationError("histogram is missing window widths")
