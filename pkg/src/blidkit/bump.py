"""Smooth cutoff functions on the line and on the plane."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = ["BumpFunction", "PlaneBump", "smooth_transition", "smooth_transition_derivative",
           "bump_eval", "bump_sup_hu"]


def _psi(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_transition(u):
    """C^inf step: 0 for u <= 0, 1 for u >= 1, ``psi(u) / (psi(u) + psi(1-u))`` between."""
    u = np.asarray(u, dtype=float)
    a, b = _psi(u), _psi(1.0 - u)
    # a + b > 0 everywhere, since u and 1-u are never both nonpositive
    return a / (a + b)


def smooth_transition_derivative(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = (u > 0) & (u < 1)
    v = u[inside]
    a, b = np.exp(-1.0 / v), np.exp(-1.0 / (1.0 - v))
    da, db = a / v**2, b / (1.0 - v) ** 2
    # d/du [a/(a+b)] with b = psi(1-u), so db/du = -psi'(1-u)
    out[inside] = (da * b + a * db) / (a + b) ** 2
    return out


@dataclass(frozen=True)
class BumpFunction:
    """Radial bump ``h`` on R: 1 on ``|s| <= r_inner``, 0 on ``|s| >= r_outer``.

    ``sup_hu`` is ``a = sup_u h(u) u``, the constant the blid bounds scale with;
    ``sup_dH`` is ``sup_u |d/du (h(u) u)|``, the first-derivative bound of the
    pointwise blid.
    """

    r_inner: float = 1.0 / 3.0
    r_outer: float = 0.5
    sup_hu: float = field(init=False)
    sup_dH: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.r_inner < self.r_outer:
            raise ValueError(f"need 0 < r_inner < r_outer, got {self.r_inner}, {self.r_outer}")
        object.__setattr__(self, "sup_hu", _grid_sup(lambda u: self(u) * u, 0.0, self.r_outer))
        object.__setattr__(self, "sup_dH", _grid_sup(lambda u: np.abs(self.blid_derivative(u)),
                                                     0.0, self.r_outer))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        r = np.abs(s)
        u = (self.r_outer - r) / (self.r_outer - self.r_inner)
        out = smooth_transition(u)
        # literal plateaus, independent of rounding in u
        out = np.where(r <= self.r_inner, 1.0, np.where(r >= self.r_outer, 0.0, out))
        return out if out.ndim else float(out)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        r = np.abs(s)
        width = self.r_outer - self.r_inner
        out = -np.sign(s) * smooth_transition_derivative((self.r_outer - r) / width) / width
        out = np.where((r <= self.r_inner) | (r >= self.r_outer), 0.0, out)
        return out if out.ndim else float(out)

    def damp(self, s):
        """The scalar blid ``s -> h(s) s``."""
        s = np.asarray(s, dtype=float)
        return self(s) * s

    def blid_derivative(self, s):
        """``d/ds [h(s) s] = h'(s) s + h(s)``."""
        s = np.asarray(s, dtype=float)
        return self.derivative(s) * s + self(s)


def _grid_sup(func: Callable, lo: float, hi: float, n: int = 100_001) -> float:
    """Max of ``func`` on [lo, hi]: dense grid, then a bounded local refinement."""
    u = np.linspace(lo, hi, n)
    vals = func(u)
    i = int(np.argmax(vals))
    best = float(vals[i])
    a, b = u[max(i - 1, 0)], u[min(i + 1, n - 1)]
    if b > a:
        res = minimize_scalar(lambda v: -float(func(np.array([v]))[0]), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-14})
        best = max(best, -float(res.fun))
    return best


def bump_eval(h: BumpFunction, s):
    return h(s)


def bump_sup_hu(h: BumpFunction, n: int = 100_001) -> float:
    """``a = sup_u h(u) u`` by grid maximization over [0, r_outer] plus refinement."""
    return _grid_sup(lambda u: h(u) * u, 0.0, h.r_outer, n)


@dataclass(frozen=True)
class PlaneBump:
    """Cutoff on the plane around the band ``{(t, x): lower(t) <= x <= upper(t)}``.

    ``h(t, x) = g((margin - dist) / margin)`` where ``dist`` is the vertical
    distance from ``x`` to the band and ``g`` the C^inf step.  So ``h = 1`` on
    the band, ``h = 0`` at distance ``>= margin``, and ``g`` is flat at both
    ends, which keeps the kink of ``dist`` at the band edge invisible.
    """

    lower: Callable[[np.ndarray], np.ndarray]
    upper: Callable[[np.ndarray], np.ndarray]
    margin: float

    def __post_init__(self):
        if self.margin <= 0:
            raise ValueError("margin must be positive")

    def bounds(self, t):
        lo, hi = np.asarray(self.lower(t), float), np.asarray(self.upper(t), float)
        return np.minimum(lo, hi), np.maximum(lo, hi)

    def distance(self, t, x):
        lo, hi = self.bounds(t)
        x = np.asarray(x, dtype=float)
        return np.maximum(0.0, np.maximum(lo - x, x - hi))

    def __call__(self, t, x):
        d = self.distance(t, x)
        out = smooth_transition((self.margin - d) / self.margin)
        return np.where(d <= 0.0, 1.0, np.where(d >= self.margin, 0.0, out))

    def dx(self, t, x):
        """Partial derivative in ``x``."""
        lo, hi = self.bounds(t)
        x = np.asarray(x, dtype=float)
        d = self.distance(t, x)
        sign = np.where(x > hi, 1.0, np.where(x < lo, -1.0, 0.0))
        return -sign * smooth_transition_derivative((self.margin - d) / self.margin) / self.margin

    @classmethod
    def ball(cls, center: Callable, radius: float, margin: float) -> "PlaneBump":
        return cls(lambda t: center(t) - radius, lambda t: center(t) + radius, margin)

    @classmethod
    def constant_band(cls, low: float, high: float, margin: float) -> "PlaneBump":
        return cls(lambda t: np.full(np.shape(t), float(low)),
                   lambda t: np.full(np.shape(t), float(high)), margin)
