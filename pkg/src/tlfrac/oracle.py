"""Brute-force references used to validate the closed forms and the solvers.

Everything here works on uniform dyadic grids and avoids the tau / Delta
kernels, so agreement with the series routines is a genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, NamedTuple

import numpy as np

from .dyadic import HolderExpansion, dyadic_grid, expand, expand_samples
from .fraccalc import FracDomainError

if TYPE_CHECKING:
    from .solvers import VolterraProblem


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``f(j / 2^q)``, ``j = 0 .. 2^q``."""

    values: np.ndarray
    level: int

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.shape != ((1 << self.level) + 1,):
            raise ValueError(f"level {self.level} needs {(1 << self.level) + 1} samples, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function has non-finite samples")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, f: Callable, level: int) -> GridFunction:
        return cls(np.asarray(f(dyadic_grid(level)), dtype=float), level)

    @property
    def t(self) -> np.ndarray:
        return dyadic_grid(self.level)

    @property
    def h(self) -> float:
        return 2.0**-self.level

    def index(self, t: float) -> int:
        j = t * (1 << self.level)
        if j != round(j) or not 0 <= j <= (1 << self.level):
            raise ValueError(f"t = {t} is not a level-{self.level} grid point")
        return int(round(j))


def _d2(a: float, x: np.ndarray) -> np.ndarray:
    """``(x+1)^a - 2 x^a + (x-1)^a`` for ``x >= 1``, via ``expm1``/``log1p`` to limit cancellation."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        up = np.expm1(a * np.log1p(1.0 / x))
        dn = np.expm1(a * np.log1p(-1.0 / x))
    return x**a * (up + dn)


def _pl_weights(alpha: float, n: int) -> np.ndarray:
    """Product-integration weights ``w_0 .. w_n`` so that
    ``int_0^{nh} (nh - u)^{alpha-1} f(u) du = h^alpha / alpha(alpha+1) * sum_j w_j f_j``
    exactly for ``f`` linear on each cell. ``w_n`` sits at the singular end."""
    w = np.empty(n + 1)
    if n == 0:
        return np.zeros(1)
    a1 = alpha + 1
    w[n] = 1.0
    if n > 1:
        w[1:n] = _d2(a1, n - np.arange(1, n))
    w[0] = (n - 1.0) ** a1 - (n - a1) * n**alpha
    return w


def rl_integral_pl(f: GridFunction, alpha: float, t: float, side: str = "left", T: float = 1.0) -> float:
    """Riemann-Liouville integral of the piecewise-linear interpolant of ``f``.

    ``side='left'`` gives ``I^alpha_{0+} f(t)``; ``side='right'`` gives
    ``I^alpha_{T-} f(t)``. Exact to roundoff for functions linear between
    grid points.
    """
    if alpha <= 0:
        raise FracDomainError("alpha must be positive")
    i = f.index(t)
    scale = f.h**alpha / math.gamma(alpha + 2)
    if side == "left":
        w = _pl_weights(alpha, i)
        return float(scale * (w @ f.values[: i + 1]))
    if side == "right":
        j = f.index(T)
        if j < i:
            raise FracDomainError("right integral requires t <= T")
        w = _pl_weights(alpha, j - i)[::-1]
        return float(scale * (w @ f.values[i : j + 1]))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def rl_integral_step(cells: np.ndarray, alpha: float, t: float, side: str = "left", T: float = 1.0) -> float:
    """Riemann-Liouville integral of a step function constant on level-``q`` cells.

    ``cells`` holds ``2^q`` values; cell ``j`` is ``(j h, (j+1) h]``.
    """
    if alpha <= 0:
        raise FracDomainError("alpha must be positive")
    cells = np.asarray(cells, dtype=float)
    q = int(round(math.log2(len(cells))))
    h = 2.0**-q
    i = int(round(t / h))
    if abs(i * h - t) > 0 or not 0 <= i <= len(cells):
        raise ValueError(f"t = {t} is not a level-{q} grid point")
    scale = h**alpha / math.gamma(alpha + 1)
    if side == "left":
        d = i - np.arange(i)  # distances of cell left ends to t, in cells
        return float(scale * ((d**alpha - (d - 1.0) ** alpha) @ cells[:i]))
    if side == "right":
        j = int(round(T / h))
        if j < i:
            raise FracDomainError("right integral requires t <= T")
        d = np.arange(1, j - i + 1)
        return float(scale * ((d**alpha - (d - 1.0) ** alpha) @ cells[i:j]))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _gl_weights(alpha: float, n: int) -> np.ndarray:
    w = np.empty(n + 1)
    w[0] = 1.0
    for j in range(1, n + 1):
        w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / j)
    return w


def gl_derivative(f: GridFunction, alpha: float, t: float, side: str = "left", T: float = 1.0) -> float:
    """First-order Grunwald-Letnikov approximation of a Riemann-Liouville derivative.

    The anchor value (``f(0)`` on the left, ``f(T)`` on the right) is removed
    before differencing and its exact power-law derivative added back.
    """
    if not 0 < alpha < 1:
        raise FracDomainError("alpha must lie in (0, 1)")
    i = f.index(t)
    if side == "left":
        anchor = f.values[0]
        if i == 0:
            if anchor != 0:
                raise FracDomainError("left derivative is singular at t = 0")
            return 0.0
        seg = f.values[i::-1] - anchor
        dist = t
    elif side == "right":
        j = f.index(T)
        if j < i:
            raise FracDomainError("right derivative requires t <= T")
        anchor = f.values[j]
        if i == j:
            if anchor != 0:
                raise FracDomainError("right derivative is singular at t = T")
            return 0.0
        seg = f.values[i : j + 1] - anchor
        dist = T - t
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    w = _gl_weights(alpha, len(seg) - 1)
    return float(anchor * dist**-alpha / math.gamma(1 - alpha) + f.h**-alpha * (w @ seg))


def rl_derivative_pl(f: GridFunction, alpha: float, t: float, side: str = "left", T: float = 1.0) -> float:
    """Riemann-Liouville derivative of the piecewise-linear interpolant of ``f``, exactly.

    Uses ``D^alpha_{0+} f = f(0) t^{-alpha} / Gamma(1-alpha) + I^{1-alpha}_{0+} f'`` and
    ``D^alpha_{T-} f = f(T) (T-t)^{-alpha} / Gamma(1-alpha) - I^{1-alpha}_{T-} f'``
    with the slope ``f'`` a step function on the grid.
    """
    if not 0 < alpha < 1:
        raise FracDomainError("alpha must lie in (0, 1)")
    slope = np.diff(f.values) / f.h
    if side == "left":
        if t == 0:
            if f.values[0] != 0:
                raise FracDomainError("left derivative is singular at t = 0")
            return 0.0
        pole = f.values[0] * t**-alpha / math.gamma(1 - alpha)
        return pole + rl_integral_step(slope, 1 - alpha, t)
    if side == "right":
        fT = f.values[f.index(T)]
        if t >= T:
            if fT != 0:
                raise FracDomainError("right derivative is singular at t = T")
            return 0.0
        pole = fT * (T - t) ** -alpha / math.gamma(1 - alpha)
        return pole - rl_integral_step(slope, 1 - alpha, t, "right", T)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


class RSSum(NamedTuple):
    value: float
    extrapolated: float
    error_estimate: float


def rs_sum(f: GridFunction, g: GridFunction, t: float) -> RSSum:
    """Left-point Riemann-Stieltjes sum of ``f dg`` on ``[0, t]``.

    The level ``q - 1`` sum gives a Richardson-type companion
    ``2 S_q - S_{q-1}`` and the error estimate ``|S_q - S_{q-1}|``.
    """
    if f.level != g.level:
        raise ValueError("f and g must share a grid")
    i = f.index(t)
    fv, gv = f.values[: i + 1], g.values[: i + 1]
    fine = float(fv[:-1] @ np.diff(gv))
    if i % 2 == 0 and i > 0:
        coarse = float(fv[:-1:2] @ np.diff(gv[::2]))
    else:
        coarse = fine
    return RSSum(fine, 2 * fine - coarse, abs(fine - coarse))


def _pl_matrix(alpha: float, level: int) -> np.ndarray:
    """Lower-triangular operator ``M`` with ``(M f)_i = I^alpha f(t_i)`` for piecewise-linear ``f``."""
    n = 1 << level
    scale = 2.0 ** (-level * alpha) / math.gamma(alpha + 2)
    m = np.zeros((n + 1, n + 1))
    interior = _d2(alpha + 1, np.arange(1, n + 1))  # weight for distance d >= 1
    for i in range(1, n + 1):
        m[i, 1 : i + 1] = np.concatenate([interior[: i - 1][::-1], [1.0]])
        m[i, 0] = (i - 1.0) ** (alpha + 1) - (i - alpha - 1) * i**alpha
    return scale * m


def volterra_picard(prob: VolterraProblem, p: int, iters: int | None = None, q: int | None = None) -> GridFunction:
    """Picard iteration ``X <- x0 + theta I^alpha S_p X + g`` on the level ``q`` grid.

    ``S_p X`` is the level ``p + 1`` interpolant of the iterate, so the
    product-integration operator applies it exactly.
    """
    q = p + 2 if q is None else q
    if q < p + 1:
        raise ValueError("grid level must be at least p + 1")
    if iters is None:
        iters = 1
        while abs(prob.theta) ** iters / math.gamma(prob.alpha * iters + 1) >= 1e-14:
            iters += 1
    t = dyadic_grid(q)
    op = _pl_matrix(prob.alpha, q)
    base = prob.x0 + prob.g(t)
    x = base.copy()
    step = 1 << (q - p - 1)
    for _ in range(iters):
        sp = np.interp(t, t[::step], x[::step])
        new = base + prob.theta * (op @ sp)
        done = np.max(np.abs(new - x)) <= 1e-15 * (1 + np.max(np.abs(new)))
        x = new
        if done:
            break
    return GridFunction(x, q)


def exact_langevin(h: float, alpha: float, depth: int = 12) -> tuple[HolderExpansion, float, Callable]:
    """Benchmark with solution ``t^h``: ``g = t^h (1 - t^alpha)``, ``theta = Gamma(alpha+h+1)/Gamma(h+1)``."""
    if not 0 < h < alpha < 1:
        raise FracDomainError(f"need 0 < h < alpha < 1, got h={h}, alpha={alpha}")
    g = expand(lambda t: t**h * (1 - t**alpha), h, depth)
    theta = math.gamma(alpha + h + 1) / math.gamma(h + 1)
    return g, theta, lambda t: np.asarray(t, dtype=float) ** h


def exact_linear(x0: float, beta: float, gamma: float, g: Callable) -> Callable:
    """``t -> x0 exp(beta t + gamma g(t))``."""
    return lambda t: x0 * np.exp(beta * np.asarray(t, dtype=float) + gamma * np.asarray(g(t)))


def linear_benchmark_driver(h: float, depth: int = 12) -> HolderExpansion:
    """``g(t) = 0.5^h - |t - 0.5|^h``, expanded to ``depth``."""
    return expand(lambda t: 0.5**h - np.abs(t - 0.5) ** h, h, depth)


def grid_expansion(f: GridFunction, hurst: float) -> HolderExpansion:
    return expand_samples(f.values, hurst)


__all__ = [
    "GridFunction",
    "RSSum",
    "exact_langevin",
    "exact_linear",
    "gl_derivative",
    "grid_expansion",
    "linear_benchmark_driver",
    "rl_derivative_pl",
    "rl_integral_pl",
    "rl_integral_step",
    "rs_sum",
    "volterra_picard",
]
