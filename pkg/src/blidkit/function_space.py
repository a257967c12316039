"""Discretized function spaces C^q(I), C^inf(I) and their seminorms.

An element of C^q on a grid is stored as the jet ``x(left), ..., x^(q-1)(left)``
together with samples of the top derivative ``x^(q)``.  Lower derivatives are
recovered by iterated cumulative quadrature, so every stored element is a
consistent C^q object by construction.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

__all__ = [
    "GridInterval", "CqElement", "SpaceKind", "SeminormFamily", "FrechetMetric",
    "FunctionSpaceError", "OrderOutOfRange", "DomainCoverageError", "ShapeMismatch",
    "cumulative_integral", "reconstruct_derivative", "seminorm", "metric",
    "element_from_function", "element_from_derivatives", "random_element",
    "write_csv", "element_to_json", "element_from_json",
]


class FunctionSpaceError(ValueError):
    pass


class OrderOutOfRange(FunctionSpaceError):
    pass


class DomainCoverageError(FunctionSpaceError):
    pass


class ShapeMismatch(FunctionSpaceError):
    pass


@dataclass(frozen=True)
class GridInterval:
    left: float
    right: float
    n_points: int = 1025

    def __post_init__(self):
        if not self.left < self.right:
            raise ValueError(f"need left < right, got [{self.left}, {self.right}]")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")

    @property
    def spacing(self) -> float:
        return (self.right - self.left) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.left, self.right, self.n_points)

    def index_of(self, t: float) -> int:
        """Index of the grid node equal to ``t``; raises if ``t`` is not a node."""
        i = int(round((t - self.left) / self.spacing))
        if not 0 <= i < self.n_points or abs(self.points[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainCoverageError(f"{t} is not a grid node of {self}")
        return i


def cumulative_integral(samples: np.ndarray, spacing: float) -> np.ndarray:
    """Cumulative integral from the left endpoint (Simpson, fourth order)."""
    samples = np.asarray(samples)
    if samples.shape[-1] < 3:
        # cumulative_simpson needs three nodes; trapezoid is exact for lines
        out = np.zeros_like(samples, dtype=np.result_type(samples, float))
        out[..., 1:] = np.cumsum(0.5 * spacing * (samples[..., 1:] + samples[..., :-1]), axis=-1)
        return out
    return cumulative_simpson(samples, dx=spacing, initial=0.0)


@dataclass(frozen=True, eq=False)
class CqElement:
    """A discretized element of C^q on ``domain``.

    Parameters
    ----------
    q : int
        Smoothness order; the number of stored jet entries.
    domain : GridInterval
    jet_at_left : array of shape (q,)
        ``x^(j)(domain.left)`` for ``j < q``.
    top_samples : array of shape (n_points,)
        Samples of ``x^(q)``.  For ``q = 0`` these are the function values.
    """

    q: int
    domain: GridInterval
    jet_at_left: np.ndarray
    top_samples: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be nonnegative")
        jet = np.array(self.jet_at_left, dtype=float).reshape(-1)
        top = np.array(self.top_samples, dtype=float).reshape(-1)
        if jet.shape != (self.q,):
            raise ShapeMismatch(f"jet must have {self.q} entries, got {jet.shape[0]}")
        if top.shape != (self.domain.n_points,):
            raise ShapeMismatch(f"top_samples must have {self.domain.n_points} entries")
        jet.flags.writeable = False
        top.flags.writeable = False
        object.__setattr__(self, "jet_at_left", jet)
        object.__setattr__(self, "top_samples", top)

    # Linear structure.  Reconstruction is linear in (jet, top), so these act
    # on functions exactly as they act on the stored data.
    def _check_compatible(self, other: "CqElement"):
        if not isinstance(other, CqElement):
            raise TypeError(f"cannot combine CqElement with {type(other).__name__}")
        if other.q != self.q or other.domain != self.domain:
            raise ShapeMismatch("elements differ in q or domain")

    def __add__(self, other):
        self._check_compatible(other)
        return CqElement(self.q, self.domain, self.jet_at_left + other.jet_at_left,
                         self.top_samples + other.top_samples)

    def __sub__(self, other):
        self._check_compatible(other)
        return CqElement(self.q, self.domain, self.jet_at_left - other.jet_at_left,
                         self.top_samples - other.top_samples)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return CqElement(self.q, self.domain, scalar * self.jet_at_left, scalar * self.top_samples)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __neg__(self):
        return self * -1.0

    def zeros_like(self) -> "CqElement":
        return CqElement(self.q, self.domain, np.zeros(self.q), np.zeros(self.domain.n_points))

    def derivative(self, j: int) -> np.ndarray:
        return reconstruct_derivative(self, j)

    @property
    def values(self) -> np.ndarray:
        return reconstruct_derivative(self, 0)

    def sup_norm(self) -> float:
        """``max_{j <= q} max_t |x^(j)(t)|`` over the whole domain."""
        return max(float(np.max(np.abs(self.derivative(j)))) for j in range(self.q + 1))

    def derivatives_at(self, t: float) -> np.ndarray:
        """``x^(j)(t)`` for ``j = 0..q`` at a grid node ``t``."""
        i = self.domain.index_of(t)
        return np.array([self.derivative(j)[i] for j in range(self.q + 1)])


def reconstruct_derivative(x: CqElement, j: int) -> np.ndarray:
    """Samples of ``x^(j)`` on ``x.domain``.

    ``j = q`` returns the stored top samples unchanged; lower orders are
    ``jet_at_left[j]`` plus the cumulative integral of ``x^(j+1)``.
    """
    if not 0 <= j <= x.q:
        raise OrderOutOfRange(f"derivative order {j} outside 0..{x.q}")
    if j == x.q:
        return x.top_samples
    cached = x._cache.get(j)
    if cached is not None:
        return cached
    samples = x.jet_at_left[j] + cumulative_integral(reconstruct_derivative(x, j + 1),
                                                     x.domain.spacing)
    samples.flags.writeable = False
    x._cache[j] = samples
    return samples


def element_from_derivatives(q: int, domain: GridInterval, values_at_anchor: Sequence[float],
                             top_samples, anchor: float | None = None) -> CqElement:
    """Build an element from ``x^(j)(anchor)`` (``j < q``) and top samples.

    The anchor must be a grid node; the jet at the left endpoint is obtained by
    integrating back from it with the same quadrature used for reconstruction.
    """
    top = np.asarray(top_samples, dtype=float)
    values_at_anchor = np.asarray(values_at_anchor, dtype=float).reshape(-1)
    if values_at_anchor.shape != (q,):
        raise ShapeMismatch(f"need {q} anchor values, got {values_at_anchor.shape[0]}")
    if anchor is None or anchor == domain.left:
        return CqElement(q, domain, values_at_anchor, top)
    i0 = domain.index_of(anchor)
    jet = np.zeros(q)
    current = top
    for j in range(q - 1, -1, -1):
        cum = cumulative_integral(current, domain.spacing)
        jet[j] = values_at_anchor[j] - cum[i0]
        current = jet[j] + cum
    return CqElement(q, domain, jet, top)


def element_from_function(func: Callable[[np.ndarray], np.ndarray], domain: GridInterval,
                          q: int = 0, derivatives: Sequence[Callable] | None = None) -> CqElement:
    """Sample a function into C^q.

    ``derivatives`` lists callables for ``x', ..., x^(q)``; the jet is read
    from them at the left endpoint and the last one gives the top samples.
    """
    t = domain.points
    if q == 0:
        return CqElement(0, domain, [], np.broadcast_to(func(t), t.shape))
    if derivatives is None or len(derivatives) < q:
        raise ValueError(f"need {q} derivative callables for q={q}")
    funcs = [func, *derivatives[:q]]
    jet = [float(np.broadcast_to(f(np.array([domain.left])), (1,))[0]) for f in funcs[:q]]
    return CqElement(q, domain, jet, np.broadcast_to(funcs[q](t), t.shape))


def random_element(rng: np.random.Generator, domain: GridInterval, q: int,
                   magnitude: float, rough: bool = True) -> CqElement:
    """Random element with jet and top samples uniform in [-magnitude, magnitude].

    With ``rough=False`` the top derivative is a random trigonometric sum
    instead of i.i.d. samples.
    """
    jet = rng.uniform(-magnitude, magnitude, size=q)
    if rough:
        top = rng.uniform(-magnitude, magnitude, size=domain.n_points)
    else:
        t = (domain.points - domain.left) / (domain.right - domain.left)
        coef = rng.uniform(-1.0, 1.0, size=(4, 2))
        top = sum(a * np.cos(np.pi * (m + 1) * t) + b * np.sin(np.pi * (m + 1) * t)
                  for m, (a, b) in enumerate(coef))
        top = magnitude * top / max(1e-300, float(np.max(np.abs(top))))
    return CqElement(q, domain, jet, top)


class SpaceKind(str, Enum):
    CQ_INTERVAL = "Cq_interval"
    CQ_LINE = "Cq_line"
    CINF_INTERVAL = "Cinf_interval"
    CINF_LINE = "Cinf_line"


@dataclass(frozen=True)
class SeminormFamily:
    """The seminorms ``||x||_k`` of C^q[0,1], C^q(R), C^inf[0,1] or C^inf(R).

    Interval kinds use the whole domain as window; line kinds use ``[-k, k]``.
    C^q kinds take derivatives up to ``q``; C^inf kinds up to ``k``.  An
    element only carries derivatives up to its own order, so C^inf levels above
    ``x.q`` saturate at ``x.q``.
    """

    space_kind: SpaceKind
    q: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "space_kind", SpaceKind(self.space_kind))
        if self.space_kind in (SpaceKind.CQ_INTERVAL, SpaceKind.CQ_LINE):
            if self.q is None or self.q < 0:
                raise ValueError("C^q families need a nonnegative q")

    @property
    def on_line(self) -> bool:
        return self.space_kind in (SpaceKind.CQ_LINE, SpaceKind.CINF_LINE)

    def window(self, k: int, domain: GridInterval) -> tuple[float, float]:
        if self.on_line:
            return (-float(k), float(k))
        return (domain.left, domain.right)

    def order(self, k: int) -> int:
        if self.space_kind in (SpaceKind.CQ_INTERVAL, SpaceKind.CQ_LINE):
            return self.q
        return k


def _window_mask(domain: GridInterval, lo: float, hi: float) -> np.ndarray:
    slack = 1e-9 * domain.spacing
    if lo < domain.left - slack or hi > domain.right + slack:
        raise DomainCoverageError(
            f"seminorm window [{lo}, {hi}] exceeds domain [{domain.left}, {domain.right}]")
    t = domain.points
    return (t >= lo - slack) & (t <= hi + slack)


def seminorm(x: CqElement, k: int, family: SeminormFamily) -> float:
    """``max_{j <= order(k)} max_{t in window(k)} |x^(j)(t)|``."""
    if k < 0:
        raise ValueError("seminorm level must be nonnegative")
    mask = _window_mask(x.domain, *family.window(k, x.domain))
    top_order = family.order(k)
    if family.space_kind in (SpaceKind.CQ_INTERVAL, SpaceKind.CQ_LINE) and top_order > x.q:
        raise OrderOutOfRange(f"family needs {top_order} derivatives, element has {x.q}")
    top_order = min(top_order, x.q)
    return max(float(np.max(np.abs(x.derivative(j)[mask]))) for j in range(top_order + 1))


@dataclass(frozen=True)
class FrechetMetric:
    """``d(x, y) = sum_k 2^-k ||x-y||_k / (1 + ||x-y||_k)`` truncated at ``k_max``.

    Each omitted term is below ``2^-k``, so the truncation error is at most
    ``2^-k_max``.
    """

    seminorms: SeminormFamily
    k_max: int = 40
    tail_tolerance: float = 1e-12

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be positive")
        if self.tail_bound > self.tail_tolerance:
            raise ValueError(
                f"k_max={self.k_max} leaves tail {self.tail_bound:.3g} above "
                f"tolerance {self.tail_tolerance:.3g}")

    @property
    def tail_bound(self) -> float:
        return 2.0 ** (-self.k_max)


def metric(x: CqElement, y: CqElement, m: FrechetMetric) -> float:
    if not isinstance(y, CqElement) or x.q != y.q or x.domain != y.domain:
        raise ShapeMismatch("metric needs elements with the same q and domain")
    diff = x - y
    total = 0.0
    for k in range(m.k_max + 1):
        s = seminorm(diff, k, m.seminorms)
        total += 2.0 ** (-k) * s / (s + 1.0)
    return total


def write_csv(path: str | Path, t: np.ndarray, values: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "value"])
        for ti, vi in zip(t, values):
            writer.writerow([repr(float(ti)), repr(float(vi))])


def element_to_json(x: CqElement) -> dict:
    return {
        "q": x.q,
        "domain": {"left": x.domain.left, "right": x.domain.right, "n": x.domain.n_points},
        "jet": [float(v) for v in x.jet_at_left],
        "top": [float(v) for v in x.top_samples],
    }


def element_from_json(record: dict | str | Path) -> CqElement:
    if isinstance(record, (str, Path)):
        record = json.loads(Path(record).read_text())
    dom = record["domain"]
    domain = GridInterval(float(dom["left"]), float(dom["right"]), int(dom["n"]))
    return CqElement(int(record["q"]), domain, record.get("jet", []), record["top"])

