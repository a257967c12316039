"""Numerical checks for bounded and compact (Hadamard) differentiability.

A map ``F`` with candidate derivative ``A`` at ``x`` is probed through the
remainder ``r(t, h) = F(x + t h) - F(x) - t A h``.  The bounded test takes the
max of ``|r| / t`` over a whole direction set before letting ``t`` shrink; the
compact test follows a sequence ``h_n -> h``.  Fréchet differentiability has
no direct discrete analogue, so reports always name the notion tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .function_space import CqElement

__all__ = [
    "DirectionalProbe", "DiffReport", "bounded_diff_test", "compact_diff_test",
    "default_directions", "fornberg_weights", "central_difference", "loglog_slope",
    "size", "quadratic_map", "step_map", "DEFAULT_STEPS", "RATIO_FLOOR",
]

DEFAULT_STEPS = tuple(10.0 ** -e for e in np.arange(1.0, 5.01, 0.5))
RATIO_FLOOR = 1e-9


def size(v) -> float:
    """Sup-type size: all stored derivatives for elements, max-abs for vectors."""
    if isinstance(v, CqElement):
        return v.sup_norm()
    v = np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0


@dataclass
class DirectionalProbe:
    base_point: object
    directions: list
    steps: Sequence[float] = DEFAULT_STEPS
    candidate_derivative: Callable | None = None
    label: str = "x0"

    def __post_init__(self):
        steps = np.asarray(self.steps, dtype=float)
        if steps.ndim != 1 or steps.size < 2 or np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
            raise ValueError("steps must be positive and strictly decreasing")
        self.steps = tuple(float(s) for s in steps)
        normalized = []
        for h in self.directions:
            n = size(h)
            normalized.append(h if n <= 1.0 or n == 0 else h * (1.0 / n))
        self.directions = normalized


@dataclass
class DiffReport:
    notion: str
    base: str
    n_directions: int
    steps: list
    ratios: list
    slope: float
    passed: bool
    per_direction: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        slope = self.slope if math.isfinite(self.slope) else None
        return {"notion": self.notion, "base": self.base, "n_directions": self.n_directions,
                "ratios": self.ratios, "slope": slope, "pass": self.passed}


def loglog_slope(steps, ratios, floor: float = RATIO_FLOOR) -> float:
    """Least-squares slope of log(ratio) against log(t) over ratios above the floor.

    Returns ``inf`` when fewer than two ratios sit above the floor, i.e. the
    remainder has already converged to the rounding floor.
    """
    steps = np.asarray(steps, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    keep = ratios > floor
    if keep.sum() < 2:
        return math.inf
    return float(np.polyfit(np.log(steps[keep]), np.log(ratios[keep]), 1)[0])


def _verdict(steps, ratios, floor, min_slope, tolerance):
    ratios = np.asarray(ratios, dtype=float)
    slope = loglog_slope(steps, ratios, floor)
    if tolerance is None:
        tolerance = 1e-3 * max(1.0, float(ratios[0]))
    shrinking = all(b <= a * (1 + 1e-6) + floor for a, b in zip(ratios[:-1], ratios[1:]))
    ok = bool(np.all(np.isfinite(ratios)) and shrinking and ratios[-1] <= max(tolerance, floor)
              and slope >= min_slope)
    return slope, ok


def bounded_diff_test(F: Callable, probe: DirectionalProbe, norm: Callable = size,
                      floor: float = RATIO_FLOOR, min_slope: float = 0.9,
                      tolerance: float | None = None) -> DiffReport:
    """Uniform remainder test: ``max_h |r(t,h)| / t`` must shrink to zero with ``t``."""
    if probe.candidate_derivative is None:
        raise ValueError("probe needs a candidate derivative")
    x = probe.base_point
    fx = F(x)
    applied = [probe.candidate_derivative(h) for h in probe.directions]
    table = np.empty((len(probe.steps), len(probe.directions)))
    for i, t in enumerate(probe.steps):
        for j, (h, ah) in enumerate(zip(probe.directions, applied)):
            table[i, j] = norm(F(x + h * t) - fx - ah * t) / t
    ratios = table.max(axis=1) if table.size else np.zeros(len(probe.steps))
    slope, ok = _verdict(probe.steps, ratios, floor, min_slope, tolerance)
    per_direction = [_verdict(probe.steps, table[:, j], floor, min_slope, tolerance)[1]
                     for j in range(table.shape[1])]
    return DiffReport("bounded", probe.label, len(probe.directions), list(probe.steps),
                      [float(r) for r in ratios], slope, ok, per_direction)


def compact_diff_test(F: Callable, base, h_sequence: Sequence, t_sequence: Sequence[float],
                      A: Callable, limit_direction, norm: Callable = size,
                      floor: float = RATIO_FLOOR, min_slope: float = 0.9,
                      tolerance: float | None = None, label: str = "x0") -> DiffReport:
    """Hadamard test: ``|F(x + t_n h_n) - F(x) - t_n A h| / t_n -> 0`` along ``h_n -> h``."""
    t_sequence = [float(t) for t in t_sequence]
    if len(t_sequence) != len(h_sequence):
        raise ValueError("h_sequence and t_sequence must have equal length")
    if np.any(np.diff(t_sequence) >= 0):
        raise ValueError("t_sequence must be strictly decreasing")
    fx = F(base)
    ah = A(limit_direction)
    ratios = [norm(F(base + hn * t) - fx - ah * t) / t for hn, t in zip(h_sequence, t_sequence)]
    slope, ok = _verdict(t_sequence, ratios, floor, min_slope, tolerance)
    return DiffReport("compact", label, 1, t_sequence, [float(r) for r in ratios], slope, ok)


def default_directions(template, rng: np.random.Generator, n_smooth: int = 20,
                       n_rough: int = 5) -> list:
    """Normalized direction set: low-order polynomials and sinusoids plus rough noise.

    ``template`` fixes the space: a ``CqElement`` (directions share its q and
    grid) or a numpy vector (random unit vectors in that dimension).
    """
    if not isinstance(template, CqElement):
        d = np.asarray(template).size
        out = []
        for _ in range(n_smooth + n_rough):
            v = rng.normal(size=d)
            out.append(v / np.max(np.abs(v)))
        return out
    dom = template.domain
    s = (dom.points - dom.left) / (dom.right - dom.left)
    q = template.q
    out = []
    for i in range(n_smooth):
        if i % 2 == 0:
            deg = i // 2 % 4
            coef = rng.uniform(-1, 1, size=deg + 1)
            top = np.polyval(coef, s) if q == 0 else np.full_like(s, coef[0])
        else:
            freq = 1 + i // 2 % 5
            top = np.sin(np.pi * freq * s + rng.uniform(0, 2 * np.pi))
        out.append(CqElement(q, dom, rng.uniform(-1, 1, size=q), top))
    for _ in range(n_rough):
        out.append(CqElement(q, dom, rng.uniform(-1, 1, size=q),
                             rng.uniform(-1, 1, size=dom.n_points)))
    return [h * (1.0 / size(h)) for h in out]


def fornberg_weights(offsets: Sequence[float], order: int, center: float = 0.0) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative on ``offsets``.

    Fornberg's recursion (Math. Comp. 51, 1988).
    """
    x = np.asarray(offsets, dtype=float)
    n = x.size
    if order >= n:
        raise ValueError("need more stencil points than the derivative order")
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, x[0] - center
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i] - center
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def central_difference(phi: Callable[[float], object], order: int, step: float | None = None,
                       scale: float = 1.0, richardson: bool = True):
    """``order``-th derivative of ``phi`` at 0 from a symmetric second-order stencil.

    The default step balances truncation against rounding,
    ``eps**(1 / (order + 2)) * scale``; one Richardson step (h, h/2) lifts the
    result to fourth order.
    """
    if order == 0:
        return phi(0.0)
    if step is None:
        step = np.finfo(float).eps ** (1.0 / (order + 2)) * scale
    half = (order + 1) // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    w = fornberg_weights(offsets, order)

    def estimate(hstep):
        total = 0.0
        for wi, oi in zip(w, offsets):
            if wi != 0.0:
                total = total + phi(oi * hstep) * wi
        return total * (1.0 / hstep ** order)

    coarse = estimate(step)
    if not richardson:
        return coarse
    fine = estimate(step / 2.0)
    return fine * (4.0 / 3.0) - coarse * (1.0 / 3.0)


def quadratic_map(d: int = 3):
    """``F(x) = |x|^2`` on R^d and its derivative ``DF(x) h = 2 <x, h>``."""
    def F(x):
        x = np.asarray(x, dtype=float)
        return np.array([x @ x])

    def DF(x):
        x = np.asarray(x, dtype=float)
        return lambda h: np.array([2.0 * (x @ np.asarray(h, dtype=float))])

    return F, DF


def step_map(x):
    """Discontinuous negative control: 1 when the first coordinate is positive."""
    x = np.asarray(x, dtype=float)
    return np.array([1.0 if x.reshape(-1)[0] > 0 else 0.0])
