import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from entrosteer.core import Axis, GridDensity, normalize


def normal_density(sigma=1.0, half=8.5, step=1 / 64, mean=0.0):
    ax = Axis.spanning(-half, half, step)
    x = ax.coords
    return GridDensity((ax,), np.exp(-0.5 * ((x - mean) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi)))


def uniform_density(width, start=0.0, steps=16):
    ax = Axis(start, width / steps, steps + 1)
    return GridDensity((ax,), np.full(ax.count, 1.0 / width))


@pytest.fixture
def std_normal():
    return normalize(normal_density())


@pytest.fixture
def product_2d():
    ax = Axis.spanning(-8, 8, 1 / 8)
    x = ax.coords
    gx = np.exp(-0.5 * x**2)
    gy = np.exp(-0.5 * ((x - 0.5) / 1.5) ** 2)
    return normalize(GridDensity((ax, ax), np.outer(gx, gy)))


@pytest.fixture
def correlated_2d():
    ax = Axis.spanning(-8, 8, 1 / 8)
    x, y = np.meshgrid(ax.coords, ax.coords, indexing="ij")
    cov = np.array([[1.0, 0.6], [0.6, 1.2]])
    p = np.linalg.inv(cov)
    q = p[0, 0] * x * x + 2 * p[0, 1] * x * y + p[1, 1] * y * y
    return normalize(GridDensity((ax, ax), np.exp(-0.5 * q)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = [mod.RESULTS[k] for k in sorted(mod.RESULTS)] if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
