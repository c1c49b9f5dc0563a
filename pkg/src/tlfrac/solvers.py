"""Truncated Takagi-Landsberg solvers for two linear integral equations.

Both equations are solved for the coefficients of the truncated solution

    X_p(t) = x0 (1 - t) + x1 t + sum_{m <= p} 2^{m(1/2-H)} sum_k c[m,k] e_{m,k}(t)

through the fixed-point system ``C = A C + b`` with ``C = (x1, c_1, ..., c_P)``,
``P = 2^{p+1} - 1``. Row 0 is the equation at ``t = 1``; row ``n = 2^m + k``
is its scaled second difference ``2^{mH}[2F(mid) - F(left) - F(right)]``.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

from .dyadic import HolderExpansion, dyadic_grid, expand_samples
from .fraccalc import frac_integral_expansion_grid, tau1_mk, tau2_mk
from .stieltjes import cumulative_integral, cumulative_rs, level_index


class SolverError(RuntimeError):
    """The truncated system could not be solved reliably."""


class ProblemError(ValueError):
    """Problem parameters violate the equation's standing assumptions."""


@dataclass(frozen=True)
class VolterraProblem:
    """``X = x0 + theta I^alpha X + g`` with ``H < alpha < 1``.

    ``hurst`` defaults to the driver's Hurst exponent.
    """

    x0: float
    theta: float
    alpha: float
    g: HolderExpansion
    hurst: float | None = None

    def __post_init__(self) -> None:
        if self.hurst is None:
            object.__setattr__(self, "hurst", self.g.hurst)
        if not 0 < self.hurst < self.alpha < 1:
            raise ProblemError(f"need 0 < H < alpha < 1, got H={self.hurst}, alpha={self.alpha}")

    kind = "volterra"

    def params(self) -> dict:
        return {"x0": self.x0, "theta": self.theta, "alpha": self.alpha, "H": self.hurst}


@dataclass(frozen=True)
class LinearRSProblem:
    """``X = x0 + beta int X ds + gamma int X dg`` with ``g(0) = g(1) = 0`` and ``H > 1/2``.

    ``alpha`` only fixes the fractional representation of the Stieltjes
    integral; the series solution does not depend on it.
    """

    x0: float
    beta: float
    gamma: float
    alpha: float
    g: HolderExpansion

    def __post_init__(self) -> None:
        h = self.g.hurst
        if not 0.5 < h < 1:
            raise ProblemError(f"need 1/2 < H < 1, got {h}")
        if not 1 - h < self.alpha < h:
            raise ProblemError(f"need 1 - H < alpha < H, got alpha={self.alpha}")
        if self.g.f0 != 0 or self.g.f1 != 0:
            raise ProblemError("driver must satisfy g(0) = g(1) = 0")

    kind = "linear"

    @property
    def hurst(self) -> float:
        return self.g.hurst

    def params(self) -> dict:
        return {"x0": self.x0, "beta": self.beta, "gamma": self.gamma, "alpha": self.alpha, "H": self.hurst}


@dataclass(frozen=True, eq=False)
class LinearSystem:
    a: np.ndarray
    b: np.ndarray
    p: int
    kind: str = ""
    params: dict = field(default_factory=dict)

    @property
    def P(self) -> int:
        return (1 << (self.p + 1)) - 1

    def dump(self, stem: str | Path) -> tuple[Path, Path]:
        """Write ``<stem>.csv`` (row, col, value triplets; col -1 holds b) and ``<stem>.json``."""
        stem = Path(stem)
        csv_path, json_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["row", "col", "value"])
            for i in range(self.a.shape[0]):
                for j in range(self.a.shape[1]):
                    w.writerow([i, j, repr(float(self.a[i, j]))])
                w.writerow([i, -1, repr(float(self.b[i]))])
        json_path.write_text(json.dumps({"p": self.p, "P": self.P, "problem-kind": self.kind, "parameters": self.params}))
        return csv_path, json_path


@dataclass(frozen=True, eq=False)
class TruncatedSolution:
    expansion: HolderExpansion
    x1: float
    system_level: int
    coeffs: np.ndarray

    def __call__(self, t):
        return self.expansion(t)


@dataclass(frozen=True)
class ErrorReport:
    sup_error: float
    max_coeff_dev: float
    grid_level: int


def _row_functionals(values: np.ndarray, hurst: float, p_rows: int) -> np.ndarray:
    """Rows ``[F(1), 2^{mH} SD_{m,k} F for m <= p_rows]`` from samples on a dyadic grid."""
    e = expand_samples(values, hurst)
    return np.concatenate([[values[-1]], e.flat(p_rows)])


def _check_driver(g: HolderExpansion, p: int) -> None:
    if g.max_level < p:
        raise ProblemError(f"driver expanded to level {g.max_level}, system needs {p}")


# -- Volterra ---------------------------------------------------------------


def _volterra_tau_table(prob: VolterraProblem, p: int, t: np.ndarray) -> np.ndarray:
    """``2^{n(1-H)} tau^{1+alpha}_{1,n}(t_j)`` for flat ``n = 1 .. P``."""
    m, k = level_index(p)
    return tau1_mk(1 + prob.alpha, m[None, :], k[None, :], t[:, None]) * 2.0 ** (m * (1 - prob.hurst))[None, :]


def assemble_volterra(prob: VolterraProblem, p: int) -> LinearSystem:
    """Matrix ``A_p`` and vector ``b_p`` for the truncated Volterra equation.

    ``a[n, n'] = -theta 2^{mH + n'(1-H)} Delta^{1+alpha}_{n', n}(1)`` is taken
    as the second difference of the ``tau^{1+alpha}`` table over row ``n``'s
    dyadic triple; ``a[n, 0] = 2^{mH} theta tau^{1+alpha}_{2,n}(0, 1)`` and
    ``b[n] = c^g_n + 2^{mH} theta x0 (tau^alpha_{2,n}(0,1) - tau^{1+alpha}_{2,n}(0,1))``.
    """
    _check_driver(prob.g, p)
    H, al, th, x0 = prob.hurst, prob.alpha, prob.theta, prob.x0
    P = (1 << (p + 1)) - 1
    m, k = level_index(p)
    t = dyadic_grid(p + 1)
    tab = _volterra_tau_table(prob, p, t)
    a = np.empty((P + 1, P + 1))
    # column n' >= 1: row 0 is theta 2^{n'(1-H)} tau(1); rows n are -theta 2^{mH} Delta
    for j in range(P):
        a[:, j + 1] = th * _row_functionals(tab[:, j], H, p)
    scale = 2.0 ** (m * H)
    a[0, 0] = th / math.gamma(al + 2)
    a[1:, 0] = scale * th * tau2_mk(1 + al, m, k, 0.0, 1.0)
    b = np.empty(P + 1)
    b[0] = x0 + prob.g.f1 + th * x0 / math.gamma(1 + al) - th * x0 / math.gamma(al + 2)
    b[1:] = prob.g.flat(p) + scale * th * x0 * (tau2_mk(al, m, k, 0.0, 1.0) - tau2_mk(1 + al, m, k, 0.0, 1.0))
    return LinearSystem(a, b, p, prob.kind, prob.params())


def volterra_rhs(prob: VolterraProblem, x1: float, coeffs: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Right-hand side ``x0 + theta I^alpha S_p X + g`` of the truncated equation."""
    sp = HolderExpansion.from_flat(prob.hurst, prob.x0, x1, coeffs)
    return prob.x0 + prob.theta * frac_integral_expansion_grid(sp, prob.alpha, t, sp.max_level) + prob.g(t)


# -- linear RS equation -------------------------------------------------------


def assemble_linear(prob: LinearRSProblem, p: int) -> LinearSystem:
    """Matrix ``A_p`` and vector ``b_p`` for the truncated linear RS equation.

    Entries::

        a[n, n'] = -2^{mH} beta 2^{n'(1-H)} Delta^2_{n', n}(1)
                   + gamma sum_{n2} 2^{(n'+n2)(1-H) + mH} c^g_{n2}
                     (Delta^2_{n',n2}(left_n) - 2 Delta^2_{n',n2}(mid_n) + Delta^2_{n',n2}(right_n))
        a[n, 0]  = -beta 2^{m(H-2)} / 4 + gamma k c^g_{m,k} / 2^m
                   + gamma 2^{mH} sum_{n2} 2^{n2(1/2-H)} c^g_{n2} D_{n2, n}
        a[0, n'] = beta 2^{-n'(H+1)-2} - gamma sum_{n2} 2^{(n'+n2)(1-H)} c^g_{n2} Delta^2_{n',n2}(1)
        a[0, 0]  = beta / 2 - gamma sum_{n2} 2^{-n2(1+H)-2} c^g_{n2}
        b[n]     = -x0 a[n, 0] + gamma x0 c^g_{m,k}
        b[0]     = x0 + beta x0 / 2 + gamma x0 sum_{n2} 2^{-n2(1+H)-2} c^g_{n2}

    All ``Delta^2`` evaluations read one ``tau^2`` table on the level ``p + 1``
    grid, since every clipping point lies on it.
    """
    _check_driver(prob.g, p)
    H, beta, gam, x0 = prob.hurst, prob.beta, prob.gamma, prob.x0
    P = (1 << (p + 1)) - 1
    L = p + 1
    m, k = level_index(p)
    t = dyadic_grid(L)
    cg = prob.g.flat(p)
    w1 = 2.0 ** (m * (1 - H))
    tau2tab = tau1_mk(2.0, m[None, :], k[None, :], t[:, None])  # [grid point, n']

    # grid indices of each basis function's dyadic triple
    span = 1 << (L - m)
    left, mid, right = k * span, k * span + span // 2, (k + 1) * span

    def sd(table: np.ndarray) -> np.ndarray:
        """Second difference ``F(l) - 2F(mid) + F(r)`` over each row index's triple."""
        return table[left] - 2 * table[mid] + table[right]

    # gam_tab[j, n'] = sum_{n2} 2^{n2(1-H)} c^g_{n2} Delta^2_{n',n2}(t_j)
    j = np.arange(len(t))
    gam_tab = np.zeros_like(tau2tab)
    for i2 in np.nonzero(cg)[0]:
        wg = 2.0 ** (m[i2] * (1 - H)) * cg[i2]
        clip = [tau2tab[np.minimum(j, e)] for e in (left[i2], mid[i2], right[i2])]
        gam_tab += wg * (clip[0] - 2 * clip[1] + clip[2])

    a = np.empty((P + 1, P + 1))
    scale = (2.0 ** (m * H))[:, None]
    a[1:, 1:] = -scale * beta * w1[None, :] * sd(tau2tab) + gam * scale * w1[None, :] * sd(gam_tab)
    a[0, 1:] = beta * 2.0 ** (-m * (H + 1) - 2) - gam * w1 * gam_tab[-1]

    # D_{n2, n} = 2^{-m} e_{n2}(mid_n) - 2^{-m} e_{n2}(right_n) + 2^{n2/2} Delta^2_{n2, n}(1)
    etab = _schauder_table(p, t)  # [grid point, n2]
    h = 2.0**-m
    dconst = h[:, None] * (etab[mid] - etab[right]) + (2.0 ** (m / 2))[None, :] * sd(tau2tab)
    wg_half = 2.0 ** (m * (0.5 - H)) * cg
    a[1:, 0] = -beta * 2.0 ** (m * (H - 2)) / 4 + gam * k * cg / 2.0**m + gam * 2.0 ** (m * H) * (dconst @ wg_half)
    a[0, 0] = beta / 2 - gam * np.sum(2.0 ** (-m * (1 + H) - 2) * cg)

    b = np.empty(P + 1)
    b[1:] = -x0 * a[1:, 0] + gam * x0 * cg
    b[0] = x0 + beta * x0 / 2 + gam * x0 * np.sum(2.0 ** (-m * (1 + H) - 2) * cg)
    return LinearSystem(a, b, p, prob.kind, prob.params())


def _schauder_table(p: int, t: np.ndarray) -> np.ndarray:
    m, k = level_index(p)
    u = 2.0 ** m[None, :] * t[:, None] - k[None, :]
    return 2.0 ** (-m / 2)[None, :] * np.maximum(np.minimum(u, 1 - u), 0.0)


def linear_rhs(prob: LinearRSProblem, x1: float, coeffs: np.ndarray, level: int) -> np.ndarray:
    """Right-hand side ``x0 + beta I^1 S_p X + gamma int S_p X d(S_p g)`` on a dyadic grid.

    Both integrands are piecewise linear on level ``p + 1`` cells, so the
    trapezoid sums on any grid of level ``>= p + 1`` are exact.
    """
    p = int(round(math.log2(len(coeffs) + 1))) - 1
    if level < p + 1:
        raise ValueError(f"grid level {level} too coarse for system level {p}")
    t = dyadic_grid(level)
    sp = HolderExpansion.from_flat(prob.hurst, prob.x0, x1, coeffs)
    xv, gv = sp(t), prob.g(t, up_to=p)
    return prob.x0 + prob.beta * cumulative_integral(xv, t) + prob.gamma * cumulative_rs(xv, gv)


# -- generic machinery --------------------------------------------------------


def assemble(prob, p: int) -> LinearSystem:
    if isinstance(prob, VolterraProblem):
        return assemble_volterra(prob, p)
    if isinstance(prob, LinearRSProblem):
        return assemble_linear(prob, p)
    raise TypeError(f"unknown problem type {type(prob).__name__}")


def rhs_on_grid(prob, x1: float, coeffs: np.ndarray, level: int) -> np.ndarray:
    if isinstance(prob, VolterraProblem):
        return volterra_rhs(prob, x1, coeffs, dyadic_grid(level))
    return linear_rhs(prob, x1, coeffs, level)


def assemble_by_response(prob, p: int) -> LinearSystem:
    """Assemble ``A_p``, ``b_p`` by applying the row functionals to the equation's
    right-hand side with one unknown switched on at a time.

    Slower than the closed-form assembly; kept as an independent route.
    """
    P = (1 << (p + 1)) - 1
    zero = np.zeros(P)
    base_x1 = rhs_on_grid(prob, 0.0, zero, p + 1)
    b = _row_functionals(base_x1, prob.hurst, p)
    a = np.empty((P + 1, P + 1))
    a[:, 0] = _row_functionals(rhs_on_grid(prob, 1.0, zero, p + 1) - base_x1, prob.hurst, p)
    for j in range(P):
        e = zero.copy()
        e[j] = 1.0
        a[:, j + 1] = _row_functionals(rhs_on_grid(prob, 0.0, e, p + 1) - base_x1, prob.hurst, p)
    return LinearSystem(a, b, p, prob.kind, prob.params())


def solve_fixed_point(sys: LinearSystem) -> np.ndarray:
    """Solve ``C = A C + b`` by dense LU with partial pivoting."""
    n = sys.a.shape[0]
    m = np.eye(n) - sys.a
    if not np.all(np.isfinite(m)) or not np.all(np.isfinite(sys.b)):
        raise SolverError("system has non-finite entries")
    with warnings.catch_warnings():
        # singularity is judged from the pivots below
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = max(float(np.abs(m).max()), 1.0)
    if pivots.min() < 1e-13 * scale:
        cond = np.linalg.cond(m)
        raise SolverError(f"I - A is numerically singular (min pivot {pivots.min():.3e}, cond {cond:.3e})")
    c = linalg.lu_solve((lu, piv), sys.b, check_finite=False)
    res = np.max(np.abs(c - (sys.a @ c + sys.b)))
    if res > 1e-10 * (1 + np.max(np.abs(sys.b))):
        cond = np.linalg.cond(m)
        raise SolverError(f"fixed-point residual {res:.3e} too large (cond {cond:.3e})")
    return c


def extend_coeffs(prob, solution: np.ndarray, q: int) -> np.ndarray:
    """Flat coefficients through level ``q``: the solved ones up to level ``p``,
    then ``c_n = b_n + x1 a_{n,0} + sum_{n'} a_{n,n'} c_{n'}`` for deeper rows.

    The deeper rows are the row functionals of the right-hand side evaluated
    on the level ``q + 1`` grid, i.e. one application of the fixed-point map.
    """
    x1, coeffs = float(solution[0]), np.asarray(solution[1:])
    P = len(coeffs)
    if (1 << (q + 1)) - 1 <= P:
        return coeffs[: (1 << (q + 1)) - 1].copy()
    rhs = rhs_on_grid(prob, x1, coeffs, q + 1)
    ext = expand_samples(rhs, prob.hurst).flat(q)
    ext[:P] = coeffs
    return ext


def _solve(prob, p: int, ext: int | None) -> TruncatedSolution:
    ext = p if ext is None else ext
    if ext < p:
        raise ValueError(f"extension level {ext} below system level {p}")
    sys = assemble(prob, p)
    c = solve_fixed_point(sys)
    flat = extend_coeffs(prob, c, ext)
    exp = HolderExpansion.from_flat(prob.hurst, prob.x0, float(c[0]), flat)
    return TruncatedSolution(exp, float(c[0]), p, c)


def solve_volterra(prob: VolterraProblem, p: int, ext: int | None = None) -> TruncatedSolution:
    """Solve the truncated Volterra equation at level ``p``; coefficients up to ``ext``."""
    return _solve(prob, p, ext)


def solve_linear_rs(prob: LinearRSProblem, p: int, ext: int | None = None) -> TruncatedSolution:
    """Solve the truncated linear RS equation at level ``p``; coefficients up to ``ext``."""
    return _solve(prob, p, ext)


def error_report(sol: TruncatedSolution, exact, grid_level: int) -> ErrorReport:
    """Sup error of the stored expansion on a dyadic grid and the largest
    deviation from the exact solution's coefficients (levels <= p)."""
    t = dyadic_grid(grid_level)
    sup = float(np.max(np.abs(sol.expansion(t) - exact(t))))
    p = sol.system_level
    exact_c = expand_samples(np.asarray(exact(dyadic_grid(p + 1))), sol.expansion.hurst).flat(p)
    dev = float(np.max(np.abs(exact_c - sol.coeffs[1:])))
    return ErrorReport(sup, dev, grid_level)


__all__ = [
    "ErrorReport",
    "LinearRSProblem",
    "LinearSystem",
    "ProblemError",
    "SolverError",
    "TruncatedSolution",
    "VolterraProblem",
    "assemble",
    "assemble_by_response",
    "assemble_linear",
    "assemble_volterra",
    "error_report",
    "extend_coeffs",
    "linear_rhs",
    "rhs_on_grid",
    "solve_fixed_point",
    "solve_linear_rs",
    "solve_volterra",
    "volterra_rhs",
]
