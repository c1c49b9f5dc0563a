"""Riemann-Stieltjes (Young) integrals of Takagi-Landsberg expansions.

For ``f`` in H^{H1} and ``g`` in H^{H2} with ``H1 + H2 > 1`` the integral is a
double series over both coefficient sets,

    int_0^t f dg = - sum 2^{m(1-H1) + n(1-H2)} c1[m,k] c2[n,l] Delta^2_{(m,k),(n,l)}(t),

plus closed-form contributions of the affine parts.
"""

from __future__ import annotations

import numpy as np

from .dyadic import DyadicIndex, HolderExpansion, dyadic_grid, expand_samples, schauder_eval
from .fraccalc import tau1_mk


class YoungRegimeError(ValueError):
    """Hölder exponents do not satisfy ``H1 + H2 > 1``."""


def level_index(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Levels and shifts of flat indices ``n = 1 .. 2^{p+1} - 1``."""
    n = np.arange(1, 1 << (p + 1))
    m = np.floor(np.log2(n)).astype(np.int64)
    return m, n - (1 << m)


def delta(order: float, outer: DyadicIndex, inner: DyadicIndex, t: float) -> float:
    """``Delta^order_{outer, inner}(t)``: second difference of ``tau^order_{1,outer}``
    over the clipped dyadic triple of ``inner``."""
    pts = np.minimum(t, np.array([inner.left, inner.mid, inner.right]))
    v = tau1_mk(order, outer.m, outer.k, pts)
    return float(v[0] - 2.0 * v[1] + v[2])


def delta2(outer: DyadicIndex, inner: DyadicIndex, t: float) -> float:
    return delta(2.0, outer, inner, t)


def delta_matrix(order: float, p_outer: int, p_inner: int, t: float) -> np.ndarray:
    """All ``Delta^order_{n1, n2}(t)`` for flat ``n1 <= 2^{p_outer+1}-1``, ``n2 <= 2^{p_inner+1}-1``."""
    mo, ko = level_index(p_outer)
    mi, ki = level_index(p_inner)
    scale = 2.0**-mi
    out = np.zeros((len(mo), len(mi)))
    for w, pts in ((1.0, ki * scale), (-2.0, (ki + 0.5) * scale), (1.0, (ki + 1) * scale)):
        out += w * tau1_mk(order, mo[:, None], ko[:, None], np.minimum(t, pts)[None, :])
    return out


def d_constant(inner: DyadicIndex, outer: DyadicIndex) -> float:
    """``D_{2^n+l, 2^m+k}`` for inner ``(n, l)`` and outer ``(m, k)``.

    ``2^{mH}`` times this, weighted by ``2^{n(1/2-H)} c[n,l]``, gives the
    off-diagonal part of the coefficients of ``t g(t) - I^1 g(t)``.
    """
    h = 2.0**-outer.m
    return (
        h * schauder_eval(inner, outer.mid)
        - h * schauder_eval(inner, outer.right)
        + 2.0 ** (inner.m / 2) * delta2(inner, outer, 1.0)
    )


def primitive(x: HolderExpansion, t, up_to: int | None = None) -> np.ndarray:
    """``I^1 x(t) = int_0^t x`` in closed form (tau^2 kernels)."""
    up_to = x.max_level if up_to is None else up_to
    t = np.asarray(t, dtype=float)
    out = x.f0 * t + (x.f1 - x.f0) * t**2 / 2
    for m in range(up_to + 1):
        ks = np.arange(1 << m)
        vals = tau1_mk(2.0, m, ks[None, :], t.reshape(-1, 1))
        out = out + (2.0 ** (m * (1 - x.hurst)) * (vals @ x.levels[m])).reshape(t.shape)
    return out


def _check_young(f: HolderExpansion, g: HolderExpansion) -> None:
    if not f.hurst + g.hurst > 1:
        raise YoungRegimeError(f"H1 + H2 = {f.hurst + g.hurst} must exceed 1")


def _split(x: HolderExpansion, p: int | None) -> HolderExpansion:
    return x if p is None else x.truncated(p)


def rs_series(f: HolderExpansion, g: HolderExpansion, t) -> np.ndarray:
    """The double series part (affine parts of ``f`` and ``g`` ignored)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    pf, pg = f.max_level, g.max_level
    if pf < 0 or pg < 0:
        return np.zeros_like(t)
    mf, _ = level_index(pf)
    mg, _ = level_index(pg)
    cf = 2.0 ** (mf * (1 - f.hurst)) * f.flat()
    cg = 2.0 ** (mg * (1 - g.hurst)) * g.flat()
    return np.array([-(cf @ delta_matrix(2.0, pf, pg, s) @ cg) for s in t])


def rs_integral(
    f: HolderExpansion,
    g: HolderExpansion,
    t,
    pf: int | None = None,
    pg: int | None = None,
):
    """``int_0^t f dg`` from the truncated double series plus affine corrections.

    ``pf`` / ``pg`` truncate ``f`` / ``g``; each defaults to its stored depth.

    With ``f = f0 + (f1-f0) s + y_f`` and ``g = g0 + (g1-g0) s + y_g``::

        f0 (g(t) - g(0)) + (f1-f0)(t g(t) - I^1 g(t)) + (g1-g0) I^1 y_f(t) + series(y_f, y_g)
    """
    _check_young(f, g)
    f, g = _split(f, pf), _split(g, pg)
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    gt = g(t)
    yf = HolderExpansion(f.hurst, 0.0, 0.0, f.levels)
    out = (
        f.f0 * (gt - g.f0)
        + (f.f1 - f.f0) * (t * gt - primitive(g, t))
        + (g.f1 - g.f0) * primitive(yf, t)
        + rs_series(f, g, t)
    )
    return float(out[0]) if scalar else out


def _haar_moment(prim, idx_m: np.ndarray, idx_k: np.ndarray, t: float) -> np.ndarray:
    """``int_0^t H_{m,k}(u) x(u) du`` for each index, given the primitive of ``x``."""
    scale = 2.0**-idx_m
    a = prim(np.minimum(t, idx_k * scale))
    c = prim(np.minimum(t, (idx_k + 0.5) * scale))
    b = prim(np.minimum(t, (idx_k + 1) * scale))
    return 2.0 ** (idx_m / 2) * (2 * c - a - b)


def rs_integral_haar(f: HolderExpansion, g: HolderExpansion, t: float, over: str = "g") -> float:
    """Single-series forms of the integral (sum over one function's Haar coefficients).

    ``over="g"``: ``(g1-g0) I^1 f(t) + sum_n 2^{n(1/2-H2)} c2[n] int_0^t H_n f``.
    ``over="f"``: ``f0 (g(t)-g0) + (f1-f0)(t g(t) - I^1 g(t))
    + sum_m 2^{m(1/2-H1)} c1[m] int_0^t H_m (g(t) - g)``.
    """
    _check_young(f, g)
    if over == "g":
        out = (g.f1 - g.f0) * float(primitive(f, t))
        if g.max_level >= 0:
            m, k = level_index(g.max_level)
            w = 2.0 ** (m * (0.5 - g.hurst)) * g.flat()
            out += float(w @ _haar_moment(lambda s: primitive(f, s), m, k, t))
        return out
    if over == "f":
        gt = float(g(t))
        out = f.f0 * (gt - g.f0) + (f.f1 - f.f0) * (t * gt - float(primitive(g, t)))
        if f.max_level >= 0:
            m, k = level_index(f.max_level)
            w = 2.0 ** (m * (0.5 - f.hurst)) * f.flat()
            e_t = np.array([schauder_eval(DyadicIndex(int(a), int(b)), t) for a, b in zip(m, k)])
            out += float(w @ (gt * e_t - _haar_moment(lambda s: primitive(g, s), m, k, t)))
        return out
    raise ValueError(f"over must be 'f' or 'g', got {over!r}")


def cumulative_rs(fv: np.ndarray, gv: np.ndarray) -> np.ndarray:
    """Exact ``int_0^{t_j} f dg`` on a grid where both ``f`` and ``g`` are linear per cell."""
    cell = np.diff(gv) * (fv[:-1] + fv[1:]) / 2
    return np.concatenate([[0.0], np.cumsum(cell)])


def cumulative_integral(fv: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Exact ``int_0^{t_j} f`` for ``f`` linear per grid cell."""
    return cumulative_rs(fv, t)


def rs_integral_grid(f: HolderExpansion, g: HolderExpansion, level: int | None = None) -> np.ndarray:
    """``int_0^t f dg`` at every point of a dyadic grid.

    Partial sums are piecewise linear on level ``max_level + 1`` cells, so on
    any grid at least that fine the integral is an exact trapezoid sum.
    """
    _check_young(f, g)
    need = max(f.max_level, g.max_level) + 1
    level = max(need, 0) if level is None else level
    if level < need:
        raise ValueError(f"grid level {level} coarser than the expansions (need {need})")
    t = dyadic_grid(level)
    return cumulative_rs(f(t), g(t))


def rs_integral_coeffs(f: HolderExpansion, g: HolderExpansion, p: int) -> HolderExpansion:
    """Takagi-Landsberg expansion (Hurst ``H2``) of ``R(t) = int_0^t f dg`` to level ``p``.

    ``R`` is evaluated by :func:`rs_integral` on the level ``p + 1`` dyadic grid
    and the coefficients are its scaled second differences.
    """
    _check_young(f, g)
    t = dyadic_grid(p + 1)
    return expand_samples(rs_integral(f, g, t), g.hurst)


def rs_integral_coeffs_slow(f: HolderExpansion, g: HolderExpansion, p: int) -> HolderExpansion:
    """Coefficient-level triple sum over ``Delta^2`` (zero affine parts only).

    ``c^R[m,k] = 2^{m H2} sum 2^{n1(1-H1) + n2(1-H2)} c1 c2
    (Delta(k/2^m) - 2 Delta((k+.5)/2^m) + Delta((k+1)/2^m))``.
    Cost grows like ``8^depth``; meant for cross-checks at depth <= 4.
    """
    _check_young(f, g)
    if f.f0 or f.f1 or g.f0 or g.f1:
        raise ValueError("slow path assumes zero boundary values")
    mf, _ = level_index(f.max_level)
    mg, _ = level_index(g.max_level)
    cf = 2.0 ** (mf * (1 - f.hurst)) * f.flat()
    cg = 2.0 ** (mg * (1 - g.hurst)) * g.flat()

    def quad(s: float) -> float:
        return float(cf @ delta_matrix(2.0, f.max_level, g.max_level, s) @ cg)

    levels = []
    for m in range(p + 1):
        row = np.empty(1 << m)
        for k in range(1 << m):
            h = 2.0**-m
            row[k] = 2.0 ** (m * g.hurst) * (quad(k * h) - 2 * quad((k + 0.5) * h) + quad((k + 1) * h))
        levels.append(row)
    return HolderExpansion(g.hurst, 0.0, -quad(1.0), tuple(levels))


def s_dg_coeffs(g: HolderExpansion, p: int) -> tuple[float, np.ndarray]:
    """Right boundary value and coefficients of ``int_0^t s dg`` for ``g(0) = g(1) = 0``.

    Returns ``(x1, flat coefficients up to level p)`` built from the
    ``D`` constants; ``g`` is used up to its stored depth.
    """
    if g.f0 or g.f1:
        raise ValueError("requires g(0) = g(1) = 0")
    mg, kg = level_index(g.max_level)
    cg = g.flat()
    x1 = -float(np.sum(2.0 ** (-mg * (1 + g.hurst) - 2) * cg))
    # every outer triple lies on the level p + 1 grid
    mo, ko = level_index(p)
    t = dyadic_grid(p + 1)
    span = 1 << (p + 1 - mo)
    left, mid, right = ko * span, ko * span + span // 2, (ko + 1) * span
    u = 2.0 ** mg[None, :] * t[:, None] - kg[None, :]
    etab = 2.0 ** (-mg / 2)[None, :] * np.maximum(np.minimum(u, 1 - u), 0.0)
    tau = tau1_mk(2.0, mg[None, :], kg[None, :], t[:, None])
    h = 2.0**-mo
    dmat = h[:, None] * (etab[mid] - etab[right]) + 2.0 ** (mg / 2)[None, :] * (tau[left] - 2 * tau[mid] + tau[right])
    diag = np.zeros(len(mo))
    shared = min(p, g.max_level)
    nd = (1 << (shared + 1)) - 1
    diag[:nd] = ko[:nd] * cg[:nd] / 2.0 ** mo[:nd]
    return x1, diag + 2.0 ** (mo * g.hurst) * (dmat @ (2.0 ** (mg * (0.5 - g.hurst)) * cg))


__all__ = [
    "YoungRegimeError",
    "cumulative_integral",
    "cumulative_rs",
    "d_constant",
    "delta",
    "delta2",
    "delta_matrix",
    "level_index",
    "primitive",
    "rs_integral",
    "rs_integral_coeffs",
    "rs_integral_coeffs_slow",
    "rs_integral_grid",
    "rs_integral_haar",
    "rs_series",
    "s_dg_coeffs",
]
