from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tlfrac.dyadic import (
    DyadicError,
    DyadicIndex,
    HolderExpansion,
    dyadic_grid,
    eval_expansion,
    expand,
    expand_samples,
    haar_eval,
    schauder_eval,
    sup_distance,
    takagi_landsberg,
    takagi_max,
)

indices = st.integers(0, 12).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, (1 << m) - 1)))
unit = st.floats(0.0, 1.0, allow_nan=False)
hursts = st.floats(0.05, 1.0)


def test_haar_values():
    assert haar_eval(DyadicIndex(0, 0), 0.25) == 1.0
    assert haar_eval(DyadicIndex(0, 0), 0.75) == -1.0
    assert haar_eval(DyadicIndex(2, 1), 0.3) == 2.0
    # left-open supports
    assert haar_eval(DyadicIndex(1, 0), 0.0) == 0.0
    assert haar_eval(DyadicIndex(0, 0), 0.5) == 1.0


def test_schauder_values():
    assert schauder_eval(DyadicIndex(0, 0), 0.5) == 0.5
    assert schauder_eval(DyadicIndex(0, 0), 0.0) == 0.0
    assert schauder_eval(DyadicIndex(3, 5), 5.5 / 8) == pytest.approx(2**-1.5 * 0.5, abs=1e-15)


@pytest.mark.parametrize("m,k", [(0, 1), (2, 4), (-1, 0), (3, -1)])
def test_invalid_index(m, k):
    with pytest.raises(DyadicError):
        DyadicIndex(m, k)


@given(indices)
def test_flat_round_trip(mk):
    idx = DyadicIndex(*mk)
    assert DyadicIndex.from_flat(idx.n) == idx


@given(indices, unit)
def test_tent_is_primitive_of_haar(mk, t):
    idx = DyadicIndex(*mk)
    # closed-form integral of the Haar step up to t
    a, c, b = idx.left, idx.mid, idx.right
    amp = 2.0 ** (idx.m / 2)
    prim = amp * (min(max(t, a), c) - a) - amp * (min(max(t, c), b) - c)
    assert abs(schauder_eval(idx, t) - prim) <= 1e-12


def test_expand_affine_and_parabola():
    x = expand(lambda t: t, 0.5, 6)
    assert x.f0 == 0 and x.f1 == 1
    assert all(np.all(c == 0) for c in x.levels)
    y = expand(lambda t: t * (1 - t), 0.5, 3)
    assert y.levels[0][0] == pytest.approx(0.5)
    assert y.levels[1][0] == pytest.approx(2**0.5 * 0.125)
    assert expand(lambda t: t * (1 - t), 0.9, 0).levels[0][0] == pytest.approx(0.5)


def test_expand_rejects_non_finite():
    with pytest.raises(DyadicError):
        with np.errstate(divide="ignore"):
            expand(lambda t: 1.0 / t, 0.5, 3)


def test_eval_examples():
    x = HolderExpansion(0.5, 2.0, 5.0, (np.zeros(1), np.zeros(2)))
    assert eval_expansion(x, 0.5) == 3.5
    y = expand(lambda t: t * (1 - t), 0.5, 8)
    assert y(3 / 8) == 0.234375


@given(st.integers(0, 9), hursts, st.floats(-2, 2), st.floats(0.5, 3))
def test_interpolation(p, h, a, w):
    f = lambda t: np.sin(w * t + a) + t**2
    x = expand(f, h, p)
    t = dyadic_grid(p + 1)
    assert np.max(np.abs(x(t) - f(t))) <= 1e-12


@given(st.integers(0, 8), hursts, st.floats(-3, 3), st.floats(-3, 3))
def test_affine_annihilation(p, h, a, b):
    x = expand(lambda t: a + b * t, h, p)
    assert all(np.max(np.abs(c)) <= 1e-12 for c in x.levels)


@given(st.integers(0, 7), hursts, st.integers(0, 2**32 - 1))
def test_reexpansion_is_identity(p, h, seed):
    rng = np.random.default_rng(seed)
    x = HolderExpansion.from_flat(h, rng.normal(), rng.normal(), rng.uniform(-1, 1, (1 << (p + 1)) - 1))
    y = expand(x, h, p)
    assert np.max(np.abs(y.flat() - x.flat())) <= 1e-12
    assert y.f0 == pytest.approx(x.f0, abs=1e-14) and y.f1 == pytest.approx(x.f1, abs=1e-14)


def test_expand_samples_matches_expand():
    f = lambda t: np.exp(t)
    np.testing.assert_array_equal(expand(f, 0.7, 5).flat(), expand_samples(f(dyadic_grid(6)), 0.7).flat())


def test_takagi_landsberg():
    assert takagi_landsberg(0.5, 10)(0.0) == 0.0
    # classical Takagi function: T(1/2) = 1/2, max 2/3 attained at 1/3
    assert takagi_landsberg(1.0, 20)(0.5) == 0.5
    assert takagi_landsberg(1.0, 20)(dyadic_grid(12)).max() == pytest.approx(2 / 3, abs=1e-3)
    assert takagi_max(1.0) == pytest.approx(2 / 3)
    assert takagi_max(0.5) == pytest.approx(1.1380711874576983)


def test_sup_distance():
    a = HolderExpansion.affine(0.0, 1.0)
    assert sup_distance(a, a, 8) == 0.0
    assert sup_distance(a, HolderExpansion.affine(0.0, 0.0), 3) == 1.0
    x = takagi_landsberg(0.5, 4)
    assert sup_distance(x, takagi_landsberg(0.5, 4), 10) == 0.0


def test_truncation_distance_decreases():
    d = [sup_distance(expand(np.sqrt, 0.5, p), np.sqrt, 14) for p in range(2, 8)]
    assert all(v >= 0 for v in d)
    assert all(b < a for a, b in zip(d, d[1:]))


def test_json_round_trip():
    x = expand(lambda t: np.cos(3 * t), 0.3, 4)
    y = HolderExpansion.from_json(x.to_json())
    assert y.hurst == x.hurst and y.f0 == x.f0 and y.f1 == x.f1
    np.testing.assert_array_equal(y.flat(), x.flat())


def test_expansion_is_immutable():
    x = takagi_landsberg(0.5, 2)
    with pytest.raises(ValueError):
        x.levels[0][0] = 3.0


def test_bad_level_shape():
    with pytest.raises(DyadicError):
        HolderExpansion(0.5, 0, 0, (np.zeros(2),))
    with pytest.raises(DyadicError):
        HolderExpansion.from_flat(0.5, 0, 0, np.zeros(4))


def test_bound_and_depth():
    x = HolderExpansion.from_flat(0.5, 0, 0, [0.5, -2.0, 1.0])
    assert x.bound == 2.0 and x.max_level == 1
    assert HolderExpansion.affine(1, 2).max_level == -1
    assert math.isclose(x.truncated(0)(0.5), 0.25)
