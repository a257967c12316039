"""Blid cutoff of a nonlinearity and the two smallness conditions it must keep.

For ``F = Lambda + f`` with ``f(0) = 0`` and ``Df(0) = 0`` the cutoff
``f~(x) = f(delta H(x / delta))`` agrees with ``f`` near zero and is globally
bounded.  The checks here sample

1. ``S1 = sup |Df~|`` against ``delta_eta * c1``, given ``sup |Df| <= delta_eta``
   on the ball of radius ``delta c0``;
2. ``S2 = sup |Df~(x)| / |x|^alpha`` against ``M c1 m^alpha`` where ``m`` bounds
   ``|delta H(x / delta)| / |x|``.

Sampled suprema are lower bounds of the true ones: a pass is evidence, a
failure is a counterexample with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .blid import BlidMap, RadialBlid
from .cohomology import LinearAuto

__all__ = [
    "CutoffParams", "NonlinearPart", "CutoffMap", "CutoffError", "SplitReport", "CutoffBoundsReport",
    "cutoff", "verify_cutoff_bounds", "split_bound_check", "jacobian", "MAP_CATALOG", "make_map",
    "shell_samples", "ball_sup", "default_cutoff",
]

AGREEMENT_TOL = 1e-12
SAMPLING_CAVEAT = ("sampled suprema are lower bounds of the true suprema; a pass is evidence, "
                   "a fail is a counterexample")


class CutoffError(ValueError):
    pass


def jacobian(f: Callable, x, step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of ``f: R^d -> R^p``."""
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-6 * max(1e-3, float(np.linalg.norm(x)))
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        cols.append((np.atleast_1d(f(x + e)) - np.atleast_1d(f(x - e))) / (2 * step))
    return np.column_stack(cols)


def op_norm(J: np.ndarray) -> float:
    return float(np.linalg.norm(J, 2)) if J.size else 0.0


@dataclass(frozen=True)
class NonlinearPart:
    """``f = F - Lambda`` for a map ``F`` on R^d with fixed point 0 and ``DF(0) = Lambda``."""

    F: Callable
    Lambda: LinearAuto
    name: str = "F"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.atleast_1d(self.F(x)) - self.Lambda(x)

    def check_fixed_point(self, tol: float = 1e-6) -> tuple[float, float]:
        z = np.zeros(self.Lambda.dimension)
        f0 = float(np.max(np.abs(self(z))))
        df0 = float(np.max(np.abs(jacobian(self, z, step=1e-6))))
        if f0 > tol or df0 > tol:
            raise CutoffError(f"{self.name}: f(0) = {f0:.3g}, |Df(0)| = {df0:.3g}; "
                              "0 must be a fixed point with DF(0) = Lambda")
        return f0, df0


@dataclass
class CutoffParams:
    delta: float
    alpha: float = 1.0
    epsilon: float = 0.5
    delta_eta: float | None = None
    M: float | None = None
    c0: float | None = None
    c1: float | None = None
    m: float | None = None

    def __post_init__(self):
        if self.delta <= 0 or self.epsilon <= 0:
            raise ValueError("delta and epsilon must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")


@dataclass(frozen=True)
class CutoffMap:
    f: NonlinearPart
    H: BlidMap
    delta: float

    @property
    def c0(self) -> float:
        return self.H.image_bound

    @property
    def c1(self) -> float:
        return self.H.derivative_bound

    @property
    def agreement_radius(self) -> float:
        return self.delta * self.H.local_radius

    def inner(self, x):
        return self.H.apply(np.asarray(x, dtype=float) / self.delta) * self.delta

    def __call__(self, x):
        return self.f(self.inner(x))


def cutoff(f: NonlinearPart, H: BlidMap, delta: float) -> CutoffMap:
    if delta <= 0:
        raise ValueError("delta must be positive")
    if getattr(H, "derivative_bound", None) is None or getattr(H, "image_bound", None) is None:
        raise CutoffError("blid needs certified value and first-derivative bounds")
    return CutoffMap(f, H, delta)


def shell_samples(rng: np.random.Generator, d: int, radii, per_shell: int) -> list:
    """Points at each of the given radii in uniformly random directions."""
    out = []
    for r in radii:
        for _ in range(per_shell):
            v = rng.normal(size=d)
            out.append(r * v / np.linalg.norm(v))
    return out


def ball_sup(func: Callable, d: int, radius: float, rng: np.random.Generator,
             n: int = 2001) -> float:
    """Sampled sup of ``func`` over the closed ball; a dense segment when d = 1."""
    if d == 1:
        pts = [np.array([s]) for s in np.linspace(-radius, radius, n)]
    else:
        pts = [np.zeros(d)]
        for r in np.linspace(0, radius, 21)[1:]:
            pts += shell_samples(rng, d, [r], n // 20)
    return max(func(p) for p in pts)


@dataclass
class SplitReport:
    epsilon: float
    c0: float
    c1: float
    small_max: float
    large_max: float
    m: float
    passed: bool
    caveat: str = SAMPLING_CAVEAT

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "c0": self.c0, "c1": self.c1,
                "small_max": self.small_max, "small_bound": self.c1 + 0.1,
                "large_max": self.large_max, "large_bound": self.c0 / self.epsilon,
                "m": self.m, "pass": self.passed, "caveat": self.caveat}


def split_bound_check(H: BlidMap, delta: float, epsilon: float, samples: int = 350,
                      rng: np.random.Generator | None = None, d: int = 1) -> SplitReport:
    """Sample ``|delta H(x/delta)| / |x|`` below and above ``|x/delta| = epsilon``."""
    rng = np.random.default_rng(0) if rng is None else rng
    per = max(samples // 14, 1)
    small_r = epsilon * np.logspace(-3, 0, 7, endpoint=False)
    large_r = epsilon * np.logspace(0, 3, 7)
    c0, c1 = H.image_bound, H.derivative_bound

    def ratio(x):
        return float(np.linalg.norm(H.apply(x / delta) * delta) / np.linalg.norm(x))

    small = max(ratio(x) for x in shell_samples(rng, d, delta * small_r, per))
    large = max(ratio(x) for x in shell_samples(rng, d, delta * large_r, per))
    ok = small <= c1 + 0.1 and large <= c0 / epsilon
    return SplitReport(epsilon, c0, c1, small, large, max(small, large), ok)


@dataclass
class CutoffBoundsReport:
    S1: float
    bound1: float
    premise1: float
    S2: float
    bound2: float
    m: float
    exterior_sup: float
    exterior_bound: float
    agreement_error: float
    witnesses: dict = field(default_factory=dict)
    passed: bool = False
    caveat: str = SAMPLING_CAVEAT

    def to_json(self) -> dict:
        nums = {"S1": self.S1, "bound1": self.bound1, "sup_Df_on_ball": self.premise1,
                "S2": self.S2, "bound2": self.bound2, "m": self.m,
                "exterior_sup": self.exterior_sup, "exterior_bound": self.exterior_bound,
                "agreement_error": self.agreement_error}
        return {**{k: float(v) for k, v in nums.items()},
                "witnesses": {k: [float(c) for c in v] for k, v in self.witnesses.items()},
                "pass": self.passed, "caveat": self.caveat}


def verify_cutoff_bounds(ft: CutoffMap, params: CutoffParams, samples: int = 350,
              rng: np.random.Generator | None = None) -> CutoffBoundsReport:
    """Check both smallness conditions for the cutoff map by sampling.

    Inputs lie on 7 log-spaced shells ``|x| in [0.01 delta, 100 delta]``.
    Unset ``delta_eta`` defaults to the sampled ``sup |Df|`` over the ball of
    radius ``delta c0``; unset ``M`` to the sampled ``sup |Df(y)| / |y|^alpha``
    there; unset ``m`` to the result of :func:`split_bound_check`.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    d = ft.f.Lambda.dimension
    delta, alpha = ft.delta, params.alpha
    c0 = ft.c0 if params.c0 is None else params.c0
    c1 = ft.c1 if params.c1 is None else params.c1
    rho = delta * c0

    def dnorm(func, x):
        return op_norm(jacobian(func, x))

    premise = ball_sup(lambda y: dnorm(ft.f, y), d, rho, rng)
    delta_eta = premise if params.delta_eta is None else params.delta_eta
    if params.M is None:
        M = ball_sup(lambda y: dnorm(ft.f, y) / np.linalg.norm(y) ** alpha
                     if np.linalg.norm(y) > 0 else 0.0, d, rho, rng)
    else:
        M = params.M
    m = params.m
    if m is None:
        m = split_bound_check(ft.H, delta, params.epsilon, samples, rng, d).m

    radii = delta * np.logspace(-2, 2, 7)
    pts = shell_samples(rng, d, radii, max(samples // 7, 1))
    S1 = S2 = 0.0
    w1 = w2 = np.zeros(d)
    for x in pts:
        n = dnorm(ft, x)
        if n > S1:
            S1, w1 = n, x
        q = float(n / np.linalg.norm(x) ** alpha)
        if q > S2:
            S2, w2 = q, x
    bound1 = delta_eta * c1
    bound2 = M * c1 * m ** alpha

    exterior_bound = ball_sup(lambda y: float(np.max(np.abs(ft.f(y)))), d, rho, rng)
    far = shell_samples(rng, d, delta * np.logspace(-2, 3, 11), max(samples // 11, 1))
    exterior = max(float(np.max(np.abs(ft(x)))) for x in far)

    near = shell_samples(rng, d, ft.agreement_radius * np.linspace(0.05, 0.999, 8),
                         max(samples // 8, 1))
    agree = max(float(np.max(np.abs(ft(x) - ft.f(x)))) for x in near)

    ok1 = (premise > delta_eta) or S1 <= bound1
    ok = bool(ok1 and S2 <= bound2 and exterior <= exterior_bound and agree <= AGREEMENT_TOL)
    witnesses = {}
    if S1 > bound1:
        witnesses["S1"] = w1
    if S2 > bound2:
        witnesses["S2"] = w2
    return CutoffBoundsReport(S1, bound1, premise, S2, bound2, m, exterior, exterior_bound, agree,
                    witnesses, ok)


def _quadratic_1d():
    return NonlinearPart(lambda x: 2.0 * x + x ** 2, LinearAuto([[2.0]]), "quadratic")


def _quadratic_2d():
    def F(x):
        return np.array([2.0 * x[0] + x[1] ** 2, 0.5 * x[1] + x[0] * x[1]])
    return NonlinearPart(F, LinearAuto(np.diag([2.0, 0.5])), "quadratic_2d")


def _linear_1d():
    return NonlinearPart(lambda x: 2.0 * x, LinearAuto([[2.0]]), "linear")


MAP_CATALOG = {"quadratic": _quadratic_1d, "quadratic_2d": _quadratic_2d, "linear": _linear_1d}


def make_map(name: str) -> NonlinearPart:
    try:
        return MAP_CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown map {name!r}; choose from {sorted(MAP_CATALOG)}") from None


def default_cutoff(name: str = "quadratic", delta: float = 0.1, bump=None) -> CutoffMap:
    H = RadialBlid() if bump is None else RadialBlid(bump)
    f = make_map(name)
    f.check_fixed_point()
    return cutoff(f, H, delta)
