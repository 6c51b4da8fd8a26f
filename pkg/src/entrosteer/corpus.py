"""Seeded Gaussian-mixture test corpus for the inequality property checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Axis, GridDensity, normalize

HALF_WIDTH = 12.0
# (grid step, bin widths) per dimensionality; every width tiles [-12, 12]
LAYOUT = {
    1: (1 / 16, (0.25, 0.5, 1.0)),
    2: (1 / 8, (0.25, 0.5, 1.0)),
    3: (1 / 4, (0.5, 1.0, 2.0)),
}


@dataclass(frozen=True, eq=False)
class CorpusCase:
    index: int
    density: GridDensity
    widths: tuple
    components: int


def _correlation(rng, d):
    if d == 1:
        return np.ones((1, 1))
    a = rng.normal(size=(d, d))
    g = a @ a.T + 0.25 * d * np.eye(d)
    s = np.sqrt(np.diag(g))
    return g / np.outer(s, s)


def mixture_density(rng, dims: int) -> tuple:
    """Random 1-4 component mixture on the ``[-12, 12]^dims`` grid, renormalised there."""
    step, _ = LAYOUT[dims]
    ax = Axis.spanning(-HALF_WIDTH, HALF_WIDTH, step)
    mesh = np.stack(np.meshgrid(*([ax.coords] * dims), indexing="ij"), axis=-1)
    k = int(rng.integers(1, 5))
    weights = rng.dirichlet(np.ones(k))
    values = np.zeros(mesh.shape[:-1])
    for w in weights:
        mean = rng.uniform(-3, 3, size=dims)
        sig = rng.uniform(0.3, 2.0, size=dims)
        cov = _correlation(rng, dims) * np.outer(sig, sig)
        prec = np.linalg.inv(cov)
        r = mesh - mean
        q = np.einsum("...i,ij,...j->...", r, prec, r)
        values += w * np.exp(-0.5 * q) / np.sqrt((2 * np.pi) ** dims * np.linalg.det(cov))
    return normalize(GridDensity((ax,) * dims, values)), k


def gaussian_mixture_corpus(n_cases: int = 200, seed: int = 0, dims=(1, 2)) -> list:
    """Deterministic corpus cycling through ``dims``; case ``i`` depends only on ``(seed, i)``."""
    out = []
    for i in range(n_cases):
        d = dims[i % len(dims)]
        rng = np.random.default_rng([seed, i])
        density, k = mixture_density(rng, d)
        out.append(CorpusCase(i, density, LAYOUT[d][1], k))
    return out
