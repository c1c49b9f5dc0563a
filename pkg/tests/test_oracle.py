from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from tlfrac.dyadic import expand
from tlfrac.fraccalc import FracDomainError
from tlfrac.oracle import (
    GridFunction,
    exact_langevin,
    exact_linear,
    gl_derivative,
    grid_expansion,
    rl_derivative_pl,
    rl_integral_pl,
    rl_integral_step,
    rs_sum,
    volterra_picard,
)
from tlfrac.solvers import VolterraProblem
from tlfrac.xoshiro import Xoshiro256, splitmix64

alphas = st.floats(0.05, 0.95)
level8 = st.integers(0, 256).map(lambda j: j / 256)


def test_grid_function_validation():
    f = GridFunction.sample(lambda t: t**2, 3)
    assert f.h == 0.125 and f.index(0.375) == 3
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(ValueError):
        f.index(0.3)
    with pytest.raises(ValueError):
        GridFunction(np.zeros(5), 3)
    with pytest.raises(ValueError):
        GridFunction(np.array([0.0, np.nan, 1.0]), 1)


@given(alphas, level8)
def test_pl_integral_exact_on_linear_functions(alpha, t):
    one = GridFunction.sample(np.ones_like, 8)
    lin = GridFunction.sample(lambda s: s, 8)
    assert rl_integral_pl(one, alpha, t) == pytest.approx(t**alpha / math.gamma(alpha + 1), abs=1e-12)
    assert rl_integral_pl(lin, alpha, t) == pytest.approx(t ** (1 + alpha) / math.gamma(alpha + 2), abs=1e-12)
    T = 0.75
    if t <= T:
        rev = GridFunction.sample(lambda s: T - s, 8)
        val = rl_integral_pl(rev, alpha, t, "right", T)
        assert val == pytest.approx((T - t) ** (1 + alpha) / math.gamma(alpha + 2), abs=1e-12)
    assert rl_integral_step(np.ones(256), alpha, t) == pytest.approx(t**alpha / math.gamma(alpha + 1), abs=1e-12)


@given(alphas, level8)
def test_pl_derivative_exact_on_linear_functions(alpha, t):
    lin = GridFunction.sample(lambda s: 0.3 + s, 8)
    if t > 0:
        exact = 0.3 * t**-alpha / math.gamma(1 - alpha) + t ** (1 - alpha) / math.gamma(2 - alpha)
        assert rl_derivative_pl(lin, alpha, t) == pytest.approx(exact, rel=1e-11)


def test_gl_first_order_convergence():
    f = lambda s: np.sin(2 * s)
    errs = []
    for q in (10, 12, 14):
        g = GridFunction.sample(f, q)
        val = gl_derivative(g, 0.4, 0.5)
        ref = rl_derivative_pl(GridFunction.sample(f, 18), 0.4, 0.5)
        errs.append(abs(val - ref))
    assert errs[2] < 1e-3 and errs[2] < errs[0] / 8
    with pytest.raises(FracDomainError):
        gl_derivative(GridFunction.sample(np.ones_like, 4), 0.4, 0.0)
    with pytest.raises(FracDomainError):
        rl_derivative_pl(GridFunction.sample(np.ones_like, 4), 0.4, 1.0, "right")


def test_rs_sum_examples():
    g = GridFunction.sample(lambda s: s**2, 10)
    one = GridFunction.sample(np.ones_like, 10)
    assert rs_sum(one, g, 0.5).value == pytest.approx(0.25, abs=1e-15)
    s = GridFunction.sample(lambda u: u, 10)
    r = rs_sum(s, s, 1.0)
    assert abs(r.extrapolated - 0.5) < 1e-14 < abs(r.value - 0.5)
    assert r.error_estimate == pytest.approx(abs(r.value - 0.5), rel=1e-9)


def test_picard_without_feedback():
    g = expand(lambda t: np.sqrt(t) * (1 - t), 0.4, 6)
    pic = volterra_picard(VolterraProblem(0.2, 0.0, 0.7, g), 4, q=6)
    np.testing.assert_allclose(pic.values, 0.2 + g(pic.t), atol=1e-15)
    assert grid_expansion(pic, 0.4)(pic.t) == pytest.approx(pic.values, abs=1e-13)


@pytest.mark.parametrize("h,alpha", [(0.2, 0.5), (0.5, 0.8), (0.01, 0.05)])
def test_langevin_benchmark_solves_its_equation(h, alpha):
    g, theta, exact = exact_langevin(h, alpha)
    for t in (0.3, 0.8, 1.0):
        # I^alpha s^h (t) by quadrature after substituting u = (t - s)^alpha
        val = integrate.quad(lambda u: (t - u ** (1 / alpha)) ** h, 0, t**alpha, epsabs=1e-13)[0]
        val /= alpha * math.gamma(alpha)
        assert exact(t) == pytest.approx(theta * val + t**h * (1 - t**alpha), abs=1e-8)
    with pytest.raises(FracDomainError):
        exact_langevin(0.5, 0.4)


def test_linear_benchmark_solves_its_ode():
    g = lambda t: np.sin(3 * t)
    x = exact_linear(1.3, -2.0, 0.7, g)
    t, eps = np.linspace(0.1, 0.9, 9), 1e-6
    deriv = (x(t + eps) - x(t - eps)) / (2 * eps)
    np.testing.assert_allclose(deriv, x(t) * (-2.0 + 0.7 * 3 * np.cos(3 * t)), rtol=1e-7)
    assert x(0.0) == pytest.approx(1.3 * np.exp(0.7 * g(0.0)))


def test_splitmix_and_xoshiro_vectors():
    s, out = splitmix64(0)
    assert out == 0xE220A8397B1DCDAF
    assert splitmix64(s)[1] == 0x6E789E6AA1B965F4
    gen = Xoshiro256.from_state([1, 2, 3, 4])
    assert [gen.next_u64() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]
    assert Xoshiro256(0).next_u64() == 0x99EC5F36CB75F2B4
    with pytest.raises(ValueError):
        Xoshiro256.from_state([0, 0, 0, 0])


@given(st.integers(0, 2**64 - 1))
def test_uniform_draws_in_range(seed):
    draws = Xoshiro256(seed).uniform_pm1(50)
    assert all(-1.0 <= d < 1.0 for d in draws)
    assert Xoshiro256(seed).uniform_pm1(50) == draws
