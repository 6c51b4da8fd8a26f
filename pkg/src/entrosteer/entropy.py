"""Shannon and differential entropies with joint, conditional and mutual variants.

Every quantity is computed in nats and converted on output. Conditional
entropies are always joint minus marginal; mutual informations are sums of
marginal entropies minus the joint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import (
    GridDensity,
    Histogram,
    Windows,
    _axes_tuple,
    contract,
    marginalize,
    require_normalized,
    trapezoid_weights,
)
from .errors import ArityError

BASES = {"2": 2.0, "e": math.e, "10": 10.0}


def canonical_base(base) -> str:
    """Map 2, 10, ``"e"`` or ``math.e`` (or their string forms) to ``"2"``, ``"e"``, ``"10"``."""
    if isinstance(base, str):
        key = base.strip().lower()
        if key in ("e", "nat", "nats"):
            return "e"
        if key in ("2", "bit", "bits"):
            return "2"
        if key == "10":
            return "10"
    elif base == 2:
        return "2"
    elif base == 10:
        return "10"
    elif base == math.e:
        return "e"
    raise ValueError(f"unsupported logarithm base {base!r}; use 2, e or 10")


def log_base(base) -> float:
    """Natural log of the base, i.e. the divisor turning nats into ``base`` units."""
    key = canonical_base(base)
    return 1.0 if key == "e" else math.log(BASES[key])


@dataclass(frozen=True)
class EntropyValue:
    value: float
    base: str

    def __post_init__(self):
        object.__setattr__(self, "base", canonical_base(self.base))
        object.__setattr__(self, "value", float(self.value))

    @classmethod
    def from_nats(cls, nats: float, base) -> "EntropyValue":
        return cls(nats / log_base(base), base)

    @property
    def nats(self) -> float:
        return self.value * log_base(self.base)

    def to(self, base) -> "EntropyValue":
        return EntropyValue.from_nats(self.nats, base)

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {"value": self.value, "base": self.base}


def _plogp(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def shannon_nats(probs) -> float:
    """``-sum p log p`` with ``0 log 0 = 0``."""
    return float(-_plogp(np.asarray(probs, dtype=float)).sum())


def differential_nats(density: GridDensity) -> float:
    """``-integral rho log rho`` with the trapezoid rule; zero nodes contribute nothing."""
    return -contract(_plogp(density.values), [trapezoid_weights(a) for a in density.axes])


def _as_histogram(h) -> Histogram:
    if isinstance(h, Histogram):
        return h
    probs = np.atleast_1d(np.asarray(h, dtype=float))
    return Histogram(tuple(Windows(1.0, n, 0.0) for n in probs.shape), probs)


def _subset_hist(h: Histogram, axes) -> Histogram:
    if axes is None:
        return h
    axes = _axes_tuple(axes, h.ndim)
    return h if axes == tuple(range(h.ndim)) else h.marginal(axes)


def _subset_density(d: GridDensity, axes) -> GridDensity:
    if axes is None:
        return d
    axes = _axes_tuple(axes, d.ndim)
    return d if axes == tuple(range(d.ndim)) else marginalize(d, axes)


def discrete_entropy(h: Union[Histogram, np.ndarray], base, axes=None) -> EntropyValue:
    """Shannon entropy of a histogram (or of the marginal over ``axes``)."""
    h = _as_histogram(h)
    require_normalized(h)
    return EntropyValue.from_nats(shannon_nats(_subset_hist(h, axes).probs), base)


def differential_entropy(rho: GridDensity, base, axes=None) -> EntropyValue:
    """Differential entropy of a density (or of its marginal over ``axes``). May be negative."""
    require_normalized(rho)
    return EntropyValue.from_nats(differential_nats(_subset_density(rho, axes)), base)


def _split(ndim, condition_axis, target_axes):
    if ndim < 2:
        raise ArityError("conditional quantities need a joint with at least 2 axes")
    cond = _axes_tuple(condition_axis, ndim)
    if target_axes is None:
        target = tuple(i for i in range(ndim) if i not in cond)
    else:
        target = _axes_tuple(target_axes, ndim)
    if not target or not cond or set(target) & set(cond):
        raise ArityError(f"target {target} and condition {cond} must be disjoint and non-empty")
    return target, cond


def conditional_entropy_discrete(joint, condition_axis, base, target_axes=None) -> EntropyValue:
    """``H(T|C) = H(T, C) - H(C)``; by default ``T`` is every axis not in ``C``."""
    joint = _as_histogram(joint)
    target, cond = _split(joint.ndim, condition_axis, target_axes)
    require_normalized(joint)
    both = tuple(sorted(target + cond))
    value = shannon_nats(_subset_hist(joint, both).probs) - shannon_nats(joint.marginal(cond).probs)
    return EntropyValue.from_nats(value, base)


def conditional_entropy_differential(joint: GridDensity, condition_axis, base, target_axes=None) -> EntropyValue:
    """``h(t|c) = h(t, c) - h(c)`` from the same trapezoid quadrature."""
    target, cond = _split(joint.ndim, condition_axis, target_axes)
    require_normalized(joint)
    both = tuple(sorted(target + cond))
    value = differential_nats(_subset_density(joint, both)) - differential_nats(marginalize(joint, cond))
    return EntropyValue.from_nats(value, base)


def _mi_groups(ndim, axes_a, axes_b):
    if ndim < 2:
        raise ArityError("mutual information needs a joint with at least 2 axes")
    a = _axes_tuple(axes_a, ndim)
    b = tuple(i for i in range(ndim) if i not in a) if axes_b is None else _axes_tuple(axes_b, ndim)
    if not a or not b or set(a) & set(b):
        raise ArityError(f"groups {a} and {b} must be disjoint and non-empty")
    return a, b


def mutual_information_discrete(joint, base, axes_a=(0,), axes_b=None) -> EntropyValue:
    """``H(A) + H(B) - H(A, B)``; ``B`` defaults to the remaining axes."""
    joint = _as_histogram(joint)
    a, b = _mi_groups(joint.ndim, axes_a, axes_b)
    require_normalized(joint)
    hs = [shannon_nats(_subset_hist(joint, g).probs) for g in (a, b, tuple(sorted(a + b)))]
    return EntropyValue.from_nats(hs[0] + hs[1] - hs[2], base)


def mutual_information_differential(joint: GridDensity, base, axes_a=(0,), axes_b=None) -> EntropyValue:
    """``h(a) + h(b) - h(a, b)``; may come out a rounding error below zero."""
    a, b = _mi_groups(joint.ndim, axes_a, axes_b)
    require_normalized(joint)
    hs = [differential_nats(_subset_density(joint, g)) for g in (a, b, tuple(sorted(a + b)))]
    return EntropyValue.from_nats(hs[0] + hs[1] - hs[2], base)


def _cmi(entropy_of, a, b, c):
    ac = tuple(sorted(a + c))
    bc = tuple(sorted(b + c))
    abc = tuple(sorted(a + b + c))
    return entropy_of(ac) + entropy_of(bc) - entropy_of(abc) - entropy_of(c)


def conditional_mutual_information_discrete(joint, base, a=(0,), b=(1,), c=(2,)) -> EntropyValue:
    """``H(A:B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)``."""
    joint = _as_histogram(joint)
    a, b, c = (_axes_tuple(g, joint.ndim) for g in (a, b, c))
    require_normalized(joint)
    value = _cmi(lambda g: shannon_nats(_subset_hist(joint, g).probs), a, b, c)
    return EntropyValue.from_nats(value, base)


def conditional_mutual_information_differential(joint: GridDensity, base, a=(0,), b=(1,), c=(2,)) -> EntropyValue:
    a, b, c = (_axes_tuple(g, joint.ndim) for g in (a, b, c))
    require_normalized(joint)
    value = _cmi(lambda g: differential_nats(_subset_density(joint, g)), a, b, c)
    return EntropyValue.from_nats(value, base)
