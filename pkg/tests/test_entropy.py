import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import normal_density, uniform_density
from entrosteer.core import Axis, BinningSpec, GridDensity, Histogram, Windows, normalize
from entrosteer.discretize import bin_density, window_conditional
from entrosteer.entropy import (
    EntropyValue,
    canonical_base,
    conditional_entropy_differential,
    conditional_entropy_discrete,
    conditional_mutual_information_discrete,
    differential_entropy,
    discrete_entropy,
    mutual_information_differential,
    mutual_information_discrete,
)
from entrosteer.errors import ArityError, NormalizationError
from entrosteer.gaussian_model import BiphotonParams, model_axes, position_joint

HALF_LN_2PIE = 1.4189385332046727  # 0.5 * ln(2 pi e)
BINARY_H_02 = 0.7219280948873623  # bits
MI_1_02 = 0.955511445027436  # -0.5 ln(1 - r^2), r = 0.96 / 1.04


def hist2(table):
    table = np.asarray(table, dtype=float)
    return Histogram(tuple(Windows(1.0, n, 0.0) for n in table.shape), table)


class TestDiscrete:
    def test_uniform(self):
        assert discrete_entropy([0.25] * 4, 2).value == 2.0

    @pytest.mark.parametrize("base", [2, "e", 10])
    def test_deterministic(self, base):
        assert discrete_entropy([1.0], base).value == 0.0

    def test_hand_value(self):
        # -(0.5 log2 0.5 + 2 * 0.25 log2 0.25) = 0.5 + 1
        assert discrete_entropy([0.5, 0.25, 0.25], 2).value == pytest.approx(1.5, abs=1e-15)

    def test_zero_cells(self):
        assert discrete_entropy([0.5, 0.0, 0.5], 2).value == pytest.approx(1.0)

    def test_rejects_unnormalized(self):
        with pytest.raises(NormalizationError):
            discrete_entropy([0.5, 0.6], 2)

    @settings(max_examples=100, deadline=None)
    @given(arrays(float, st.integers(1, 30), elements=st.floats(0, 1)))
    def test_bounds(self, raw):
        if raw.sum() <= 0:
            return
        p = raw / raw.sum()
        h = discrete_entropy(p, "e").value
        assert -1e-15 <= h <= math.log(len(p)) + 1e-12


class TestDifferential:
    def test_uniform_half(self):
        assert differential_entropy(uniform_density(0.5), 2).value == -1.0

    def test_uniform_unit(self):
        assert differential_entropy(uniform_density(1.0), 2).value == 0.0

    @pytest.mark.parametrize("width", [0.125, 0.3, 2.0, 7.0])
    def test_uniform_is_log_width(self, width):
        assert differential_entropy(uniform_density(width, steps=8), "e").value == pytest.approx(
            math.log(width), abs=1e-14
        )

    def test_gaussian(self, std_normal):
        assert differential_entropy(std_normal, "e").value == pytest.approx(HALF_LN_2PIE, abs=1e-6)

    def test_zero_nodes_contribute_nothing(self):
        ax = Axis(0.0, 0.25, 9)
        d = GridDensity((ax,), [0, 0, 0, 0, 2, 2, 2, 0, 0])
        assert np.isfinite(differential_entropy(normalize(d), 2).value)


class TestConditional:
    def test_independent_uniform(self):
        assert conditional_entropy_discrete(hist2(np.full((4, 4), 1 / 16)), 0, 2).value == pytest.approx(2.0)

    def test_diagonal(self):
        assert conditional_entropy_discrete(hist2(np.eye(4) / 4), 0, 2).value == pytest.approx(0.0, abs=1e-15)

    def test_binary_rows(self):
        h = conditional_entropy_discrete(hist2([[0.4, 0.1], [0.1, 0.4]]), 0, 2)
        assert h.value == pytest.approx(BINARY_H_02, abs=1e-12)

    def test_arity(self):
        with pytest.raises(ArityError):
            conditional_entropy_discrete(hist2([0.5, 0.5]), 0, 2)
        with pytest.raises(ArityError):
            conditional_entropy_differential(normal_density(), 0, 2)

    def test_product_density(self, product_2d):
        assert conditional_entropy_differential(product_2d, 0, "e").value == pytest.approx(
            differential_entropy(product_2d, "e", axes=1).value, abs=1e-9
        )

    def test_gaussian_schur(self, correlated_2d):
        # cov [[1, .6], [.6, 1.2]]: var(y|x) = 1.2 - .36
        expected = 0.5 * math.log(2 * math.pi * math.e * (1.2 - 0.36))
        assert conditional_entropy_differential(correlated_2d, 0, "e").value == pytest.approx(expected, abs=1e-6)

    def test_equal_sigmas_are_independent(self):
        p = BiphotonParams(1.0, 1.0)
        j = position_joint(p, model_axes(p, 0.25, "x", 2))
        assert conditional_entropy_differential(j, 0, "e").value == pytest.approx(
            differential_entropy(j, "e", axes=1).value, abs=1e-9
        )

    def test_three_axis_default_target(self):
        rng = np.random.default_rng(1)
        t = rng.random((2, 3, 4))
        h = hist2(t / t.sum())
        expected = discrete_entropy(h, "e").value - discrete_entropy(h, "e", axes=0).value
        assert conditional_entropy_discrete(h, 0, "e").value == pytest.approx(expected, abs=1e-14)


class TestMutualInformation:
    def test_product_histogram(self):
        t = np.outer([0.2, 0.3, 0.5], [0.6, 0.4])
        assert mutual_information_discrete(hist2(t), 2).value == pytest.approx(0.0, abs=1e-9)

    def test_product_density(self, product_2d):
        assert mutual_information_differential(product_2d, "e").value == pytest.approx(0.0, abs=1e-9)

    def test_diagonal(self):
        assert mutual_information_discrete(hist2(np.eye(4) / 4), 2).value == pytest.approx(2.0)

    def test_double_gaussian(self):
        p = BiphotonParams(1.0, 0.2)
        j = position_joint(p, model_axes(p, 0.05, "x", 2))
        assert mutual_information_differential(j, "e").value == pytest.approx(MI_1_02, abs=1e-5)

    def test_symmetric(self, correlated_2d):
        a = mutual_information_differential(correlated_2d, 2, (0,), (1,)).value
        b = mutual_information_differential(correlated_2d, 2, (1,), (0,)).value
        assert a == pytest.approx(b, abs=1e-14)

    def test_cmi_independent(self):
        t = np.einsum("i,j,k->ijk", [0.3, 0.7], [0.1, 0.9], [0.5, 0.25, 0.25])
        assert conditional_mutual_information_discrete(hist2(t), "e").value == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(0, 1)))
def test_chain_and_conditioning(raw):
    if raw.sum() <= 0:
        return
    h = hist2(raw / raw.sum())
    joint = discrete_entropy(h, "e").value
    hx = discrete_entropy(h, "e", axes=0).value
    hy = discrete_entropy(h, "e", axes=1).value
    cond = conditional_entropy_discrete(h, 0, "e").value
    assert joint == pytest.approx(hx + cond, abs=1e-12)
    assert cond <= hy + 1e-12


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.tuples(st.integers(2, 5), st.integers(2, 5)), elements=st.floats(0.01, 1)))
def test_base_covariance(raw):
    h = hist2(raw / raw.sum())
    for fn in (
        lambda b: discrete_entropy(h, b),
        lambda b: conditional_entropy_discrete(h, 0, b),
        lambda b: mutual_information_discrete(h, b),
    ):
        e = fn("e").value
        assert fn(2).value == pytest.approx(e / math.log(2), rel=1e-12, abs=1e-15)
        assert fn(10).value == pytest.approx(e / math.log(10), rel=1e-12, abs=1e-15)


def test_base_covariance_differential(correlated_2d):
    for fn in (
        lambda b: differential_entropy(correlated_2d, b),
        lambda b: conditional_entropy_differential(correlated_2d, 1, b),
        lambda b: mutual_information_differential(correlated_2d, b),
    ):
        assert fn(2).value == pytest.approx(fn("e").value / math.log(2), rel=1e-12)


def test_entropy_value_conversion():
    v = EntropyValue(1.0, "e")
    assert v.to(2).value == 1.0 / math.log(2)
    assert canonical_base(math.e) == "e" and canonical_base("10") == "10"
    with pytest.raises(ValueError):
        canonical_base(3)


def test_window_conditional_bounded_by_log_width(correlated_2d):
    # uniform maximises entropy: h_lm(y|x) <= log(width_y) for every joint window
    spec = BinningSpec.tiling(correlated_2d.axes, (0.5, 0.25))
    probs = bin_density(correlated_2d, spec).probs
    worst = -np.inf
    for idx in zip(*np.nonzero(probs > 1e-6)):
        c = window_conditional(correlated_2d, idx, spec)
        worst = max(worst, conditional_entropy_differential(c, 0, "e").value - math.log(0.25))
    assert worst <= 1e-12
