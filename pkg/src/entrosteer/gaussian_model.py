"""Double-Gaussian biphoton model: grid densities and closed-form entropies.

Each of the ``dims`` spatial degrees of freedom is an independent two-mode
Gaussian. In position the symmetric mode ``(x_A + x_B)/sqrt(2)`` has standard
deviation ``sigma_plus`` and the antisymmetric mode ``(x_A - x_B)/sqrt(2)`` has
``sigma_minus``, i.e.

    rho(x_A, x_B) ∝ exp(-(x_A + x_B)**2 / (4 sigma_plus**2) - (x_A - x_B)**2 / (4 sigma_minus**2)).

Wavenumbers are conjugate with ``sigma_x * sigma_k = 1/2`` per mode, so the
momentum modes have widths ``1/(2 sigma_plus)`` and ``1/(2 sigma_minus)``.
Every pure Gaussian mode then saturates ``h(x) + h(k) = log(pi e)``.

Grid axes are ordered ``(A_1, ..., A_n, B_1, ..., B_n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .core import EPS_TAIL, Axis, GridDensity, normalize
from .entropy import EntropyValue, log_base
from .errors import TailMassError, ValidationError

FOURIER_CONVENTION = "sigma_x * sigma_k = 1/2 per mode (wavenumber k conjugate to x)"
LOG_PI_E = math.log(math.pi * math.e)
MAX_RATIO = 1e3


@dataclass(frozen=True)
class BiphotonParams:
    sigma_plus: float
    sigma_minus: float
    dims: int = 1

    def __post_init__(self):
        if not (self.sigma_plus > 0 and self.sigma_minus > 0):
            raise ValidationError("sigma_plus and sigma_minus must be positive")
        ratio = max(self.sigma_plus, self.sigma_minus) / min(self.sigma_plus, self.sigma_minus)
        if ratio > MAX_RATIO:
            raise ValidationError(f"sigma ratio {ratio:.3g} exceeds {MAX_RATIO:g}")
        if int(self.dims) != self.dims or self.dims < 1:
            raise ValidationError("dims must be a positive integer")

    @property
    def entangled(self) -> bool:
        return self.sigma_plus != self.sigma_minus

    @property
    def purity_factor(self) -> float:
        """``F = (s+^2 + s-^2)^2 / (4 s+^2 s-^2) >= 1``, equal to one only when separable."""
        sp2, sm2 = self.sigma_plus**2, self.sigma_minus**2
        return (sp2 + sm2) ** 2 / (4 * sp2 * sm2)


def _mode_covariance(var_plus, var_minus):
    a = 0.5 * (var_plus + var_minus)
    b = 0.5 * (var_plus - var_minus)
    return np.array([[a, b], [b, a]])


def _embed(pair_cov, n):
    cov = np.zeros((2 * n, 2 * n))
    for i in range(n):
        idx = [i, n + i]
        cov[np.ix_(idx, idx)] = pair_cov
    return cov


def position_covariance(params: BiphotonParams) -> np.ndarray:
    return _embed(_mode_covariance(params.sigma_plus**2, params.sigma_minus**2), params.dims)


def momentum_covariance(params: BiphotonParams) -> np.ndarray:
    return _embed(
        _mode_covariance(1 / (4 * params.sigma_plus**2), 1 / (4 * params.sigma_minus**2)),
        params.dims,
    )


def tail_mass_bound(cov: np.ndarray, axes: Sequence[Axis], mean=None) -> float:
    """Union bound on the Gaussian mass falling outside the grid box."""
    mean = np.zeros(len(axes)) if mean is None else np.asarray(mean, dtype=float)
    out = 0.0
    for i, ax in enumerate(axes):
        s = math.sqrt(cov[i, i])
        out += float(ndtr((ax.origin - mean[i]) / s) + ndtr((mean[i] - ax.stop) / s))
    return out


def gaussian_density(cov, axes: Sequence[Axis], mean=None, names=None, coverage=EPS_TAIL) -> GridDensity:
    """Multivariate normal sampled on the grid and renormalised there.

    Raises :class:`TailMassError` when the grid misses more than ``coverage``
    of the mass.
    """
    cov = np.asarray(cov, dtype=float)
    axes = tuple(axes)
    if cov.shape != (len(axes), len(axes)):
        raise ValidationError(f"covariance shape {cov.shape} does not match {len(axes)} axes")
    tail = tail_mass_bound(cov, axes, mean)
    if tail > coverage:
        raise TailMassError(f"grid leaves up to {tail:.2e} of the mass outside (limit {coverage:g})")
    mean = np.zeros(len(axes)) if mean is None else np.asarray(mean, dtype=float)
    prec = np.linalg.inv(cov)
    mesh = np.meshgrid(*[a.coords - m for a, m in zip(axes, mean)], indexing="ij")
    q = sum(prec[i, j] * mesh[i] * mesh[j] for i in range(len(axes)) for j in range(len(axes)))
    norm = 1.0 / math.sqrt((2 * math.pi) ** len(axes) * np.linalg.det(cov))
    return normalize(GridDensity(axes, norm * np.exp(-0.5 * q), names))


def _pair_names(prefix, n):
    if n == 1:
        return (f"{prefix}_A", f"{prefix}_B")
    return tuple(f"{prefix}_A{i + 1}" for i in range(n)) + tuple(f"{prefix}_B{i + 1}" for i in range(n))


def _axes_for(axes, n):
    if isinstance(axes, Axis):
        return (axes,) * (2 * n)
    axes = tuple(axes)
    if len(axes) != 2 * n:
        raise ValidationError(f"need {2 * n} axes for {n} spatial dimensions, got {len(axes)}")
    return axes


def position_joint(params: BiphotonParams, axes) -> GridDensity:
    """Joint position density; ``axes`` is one Axis (reused) or one per variable."""
    return gaussian_density(
        position_covariance(params), _axes_for(axes, params.dims), names=_pair_names("x", params.dims)
    )


def momentum_joint(params: BiphotonParams, axes) -> GridDensity:
    """Joint wavenumber density under :data:`FOURIER_CONVENTION`."""
    return gaussian_density(
        momentum_covariance(params), _axes_for(axes, params.dims), names=_pair_names("k", params.dims)
    )


def aligned_axis(std: float, width: float, refine: int = 4, coverage: float = EPS_TAIL, sides: int = 2) -> Axis:
    """Symmetric axis on which width-``width`` windows centred on 0 tile the grid exactly.

    The half-extent is ``(M + 1/2) * width`` with ``M`` the smallest integer
    keeping each of ``sides`` normal tails (standard deviation ``std``) below
    ``coverage / sides``; pass two tails per axis of the joint.
    """
    z = -float(ndtri(coverage / sides))
    m = max(1, math.ceil(z * std / width - 0.5))
    half = (m + 0.5) * width
    return Axis(-half, width / refine, (2 * m + 1) * refine + 1)


def model_axes(params: BiphotonParams, width: float, space: str, refine: int = 4) -> Axis:
    """Single axis (shared by every variable) for the position ("x") or wavenumber ("k") joint."""
    cov = position_covariance(params) if space == "x" else momentum_covariance(params)
    std = math.sqrt(cov[0, 0])
    return aligned_axis(std, width, refine, sides=2 * cov.shape[0])


@dataclass(frozen=True)
class AnalyticEntropies:
    """Closed-form single-axis entropies of the model, plus totals over ``dims`` axes."""

    h_xB: EntropyValue
    h_xB_given_xA: EntropyValue
    h_kB: EntropyValue
    h_kB_given_kA: EntropyValue
    steering_lhs: EntropyValue
    steering_bound: EntropyValue
    conditional_var_x: float
    conditional_var_k: float
    dims: int

    def to_dict(self) -> dict:
        return {
            k: (v.to_dict() if isinstance(v, EntropyValue) else v)
            for k, v in self.__dict__.items()
        }


def gaussian_entropy_nats(var: float) -> float:
    return 0.5 * math.log(2 * math.pi * math.e * var)


def schur_conditional_variance(cov: np.ndarray, target: int, given: int) -> float:
    return cov[target, target] - cov[target, given] ** 2 / cov[given, given]


def analytic_entropies(params: BiphotonParams, base) -> AnalyticEntropies:
    """Gaussian entropies per axis; ``steering_lhs`` sums ``h(x_B|x_A) + h(k_B|k_A)`` over all axes.

    For this model the sum equals ``n * (log(pi e) - log(F)/2)`` with ``F``
    the :attr:`BiphotonParams.purity_factor`.
    """
    n = params.dims
    cx = position_covariance(params)[np.ix_([0, n], [0, n])]
    ck = momentum_covariance(params)[np.ix_([0, n], [0, n])]
    vx = schur_conditional_variance(cx, 1, 0)
    vk = schur_conditional_variance(ck, 1, 0)
    lb = log_base(base)
    hx_c = gaussian_entropy_nats(vx)
    hk_c = gaussian_entropy_nats(vk)
    return AnalyticEntropies(
        h_xB=EntropyValue(gaussian_entropy_nats(cx[1, 1]) / lb, base),
        h_xB_given_xA=EntropyValue(hx_c / lb, base),
        h_kB=EntropyValue(gaussian_entropy_nats(ck[1, 1]) / lb, base),
        h_kB_given_kA=EntropyValue(hk_c / lb, base),
        steering_lhs=EntropyValue(n * (hx_c + hk_c) / lb, base),
        steering_bound=EntropyValue(n * LOG_PI_E / lb, base),
        conditional_var_x=vx,
        conditional_var_k=vk,
        dims=n,
    )
