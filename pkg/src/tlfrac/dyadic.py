"""Haar / Faber-Schauder bases on [0, 1] and weighted Takagi-Landsberg expansions.

A continuous function on [0, 1] is stored as

    f(t) = f0 (1 - t) + f1 t + sum_m 2^{m(1/2 - H)} sum_k c[m][k] e_{m,k}(t)

where ``e_{m,k}`` is the Faber-Schauder tent supported on ``[k/2^m, (k+1)/2^m]``.
Levels are stored as ragged arrays, level ``m`` holding ``2^m`` coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class DyadicError(ValueError):
    """Invalid dyadic index or expansion input."""


@dataclass(frozen=True)
class DyadicIndex:
    """Basis label ``(m, k)`` with flat index ``n = 2^m + k``."""

    m: int
    k: int

    def __post_init__(self) -> None:
        if self.m < 0 or not 0 <= self.k < (1 << self.m):
            raise DyadicError(f"invalid dyadic index (m={self.m}, k={self.k})")

    @property
    def n(self) -> int:
        return (1 << self.m) + self.k

    @classmethod
    def from_flat(cls, n: int) -> DyadicIndex:
        if n < 1:
            raise DyadicError(f"flat index must be >= 1, got {n}")
        m = n.bit_length() - 1
        return cls(m, n - (1 << m))

    @property
    def left(self) -> float:
        return self.k / 2.0**self.m

    @property
    def mid(self) -> float:
        return (self.k + 0.5) / 2.0**self.m

    @property
    def right(self) -> float:
        return (self.k + 1) / 2.0**self.m


def haar_eval(idx: DyadicIndex, t: float) -> float:
    """Haar function ``H_{m,k}`` with left-open, right-closed half supports."""
    a, c, b = idx.left, idx.mid, idx.right
    amp = 2.0 ** (idx.m / 2)
    if a < t <= c:
        return amp
    if c < t <= b:
        return -amp
    return 0.0


def schauder_eval(idx: DyadicIndex, t: float) -> float:
    """Faber-Schauder tent ``e_{m,k}(t) = 2^{-m/2} e_{0,0}(2^m t - k)``."""
    u = 2.0**idx.m * t - idx.k
    return 2.0 ** (-idx.m / 2) * max(min(u, 1.0 - u), 0.0)


def tents(m: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(k, value)`` of the single level-``m`` tent active at each ``t``.

    At a level-``m`` boundary point both neighbouring tents vanish, so picking
    ``k = floor(2^m t)`` (clipped to the last cell at ``t = 1``) loses nothing.
    """
    t = np.asarray(t, dtype=float)
    u = 2.0**m * t
    k = np.clip(np.floor(u), 0, (1 << m) - 1).astype(np.int64)
    v = u - k
    return k, 2.0 ** (-m / 2) * np.maximum(np.minimum(v, 1.0 - v), 0.0)


@dataclass(frozen=True, eq=False)
class HolderExpansion:
    """Takagi-Landsberg representation of a function on [0, 1]."""

    hurst: float
    f0: float
    f1: float
    levels: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.hurst > 0:
            raise DyadicError(f"Hurst exponent must be positive, got {self.hurst}")
        levels = tuple(np.array(c, dtype=float) for c in self.levels)
        for m, c in enumerate(levels):
            if c.shape != (1 << m,):
                raise DyadicError(f"level {m} must hold {1 << m} coefficients, got {c.shape}")
            c.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @property
    def max_level(self) -> int:
        """Deepest stored level; -1 for a purely affine expansion."""
        return len(self.levels) - 1

    @property
    def bound(self) -> float:
        """``L = max |c_{m,k}|`` over stored coefficients."""
        return max((float(np.abs(c).max()) for c in self.levels), default=0.0)

    def flat(self, up_to: int | None = None) -> np.ndarray:
        """Coefficients in flat order ``n = 1, 2, ...`` (entry ``n - 1``)."""
        up_to = self.max_level if up_to is None else up_to
        if up_to < 0:
            return np.zeros(0)
        return np.concatenate(self.levels[: up_to + 1])

    @classmethod
    def from_flat(cls, hurst: float, f0: float, f1: float, coeffs: Sequence[float]) -> HolderExpansion:
        coeffs = np.asarray(coeffs, dtype=float)
        p = int(np.log2(len(coeffs) + 1)) - 1
        if (1 << (p + 1)) - 1 != len(coeffs):
            raise DyadicError(f"{len(coeffs)} coefficients do not fill whole levels")
        return cls(hurst, f0, f1, tuple(coeffs[(1 << m) - 1 : (1 << (m + 1)) - 1] for m in range(p + 1)))

    @classmethod
    def affine(cls, f0: float, f1: float, hurst: float = 0.5) -> HolderExpansion:
        return cls(hurst, f0, f1, ())

    def truncated(self, up_to: int) -> HolderExpansion:
        return HolderExpansion(self.hurst, self.f0, self.f1, self.levels[: up_to + 1])

    def scaled_levels(self, weight_exp: float) -> list[np.ndarray]:
        """``2^{m(weight_exp - H)} c[m]`` per level, the natural basis weights."""
        return [2.0 ** (m * (weight_exp - self.hurst)) * c for m, c in enumerate(self.levels)]

    def __call__(self, t, up_to: int | None = None):
        return eval_expansion(self, t, up_to)

    def to_json(self) -> str:
        return json.dumps(
            {"H": self.hurst, "f0": self.f0, "f1": self.f1, "levels": [c.tolist() for c in self.levels]}
        )

    @classmethod
    def from_json(cls, text: str) -> HolderExpansion:
        d = json.loads(text)
        return cls(float(d["H"]), float(d["f0"]), float(d["f1"]), tuple(d["levels"]))


def dyadic_grid(level: int) -> np.ndarray:
    return np.arange((1 << level) + 1) / 2.0**level


def expand(f: Callable, hurst: float, p: int) -> HolderExpansion:
    """Takagi-Landsberg coefficients of ``f`` up to level ``p``.

    ``f`` must accept a numpy array; it is sampled once on the level ``p + 1``
    dyadic grid, so the result interpolates ``f`` exactly there.
    """
    values = np.asarray(f(dyadic_grid(p + 1)), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DyadicError("non-finite sample of f on the dyadic grid")
    return expand_samples(values, hurst)


def expand_samples(values: np.ndarray, hurst: float) -> HolderExpansion:
    """Same as :func:`expand` from samples on a dyadic grid of length ``2^q + 1``."""
    values = np.asarray(values, dtype=float)
    q = int(round(math.log2(len(values) - 1)))
    if (1 << q) + 1 != len(values):
        raise DyadicError(f"sample count {len(values)} is not 2^q + 1")
    levels = []
    for m in range(q):
        step = 1 << (q - m)
        left = values[:-1:step]
        right = values[step::step]
        mid = values[step // 2 :: step]
        levels.append(2.0 ** (m * hurst) * (2.0 * mid - left - right))
    return HolderExpansion(hurst, float(values[0]), float(values[-1]), tuple(levels))


def eval_expansion(x: HolderExpansion, t, up_to: int | None = None):
    """Evaluate the partial sum ``S_{up_to} x`` at ``t`` (scalar or array)."""
    up_to = x.max_level if up_to is None else up_to
    if up_to > x.max_level:
        raise DyadicError(f"up_to={up_to} exceeds stored depth {x.max_level}")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    out = x.f0 * (1.0 - t) + x.f1 * t
    for m in range(up_to + 1):
        k, e = tents(m, t)
        out = out + 2.0 ** (m * (0.5 - x.hurst)) * x.levels[m][k] * e
    return float(out) if scalar else out


def takagi_landsberg(hurst: float, p: int) -> HolderExpansion:
    """Partial sum of the Takagi-Landsberg function ``x^H`` (all coefficients 1)."""
    if not hurst > 0:
        raise DyadicError(f"Hurst exponent must be positive, got {hurst}")
    return HolderExpansion(hurst, 0.0, 0.0, tuple(np.ones(1 << m) for m in range(p + 1)))


def takagi_max(hurst: float) -> float:
    """Maximum of ``x^H`` over [0, 1]: ``1 / (3 (1 - 2^{-H}))``."""
    return 1.0 / (3.0 * (1.0 - 2.0**-hurst))


def sup_distance(a, b, grid_level: int) -> float:
    """Max of ``|a - b|`` over the level ``grid_level`` dyadic grid.

    Either argument may be an expansion (evaluated at full depth) or any
    vectorised callable.
    """
    t = dyadic_grid(grid_level)
    return float(np.max(np.abs(np.asarray(a(t)) - np.asarray(b(t)))))
