"""Germs at zero and their global representatives ``F = f o H``."""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .blid import BlidMap, PointwiseBlid
from .differentiability import central_difference
from .function_space import CqElement, GridInterval

__all__ = [
    "Germ", "GlobalMap", "ExtensionImpossible", "AgreementReport", "BoundednessReport",
    "extend", "agreement_check", "boundedness_check", "integral_germ", "composition_germ",
    "constant_germ", "GERM_CATALOG", "make_germ", "sample_ball", "reciprocal_global",
]


class ExtensionImpossible(ValueError):
    pass


@dataclass(frozen=True)
class Germ:
    """A local map defined for ``size(x) < validity_radius``.

    ``local_map`` returns a 1-D array (the target R^m or C^m).
    """

    local_map: Callable
    validity_radius: float
    declared_smoothness: int | float = math.inf
    name: str = "germ"

    def __call__(self, x):
        return np.atleast_1d(self.local_map(x))


@dataclass(frozen=True)
class GlobalMap:
    germ: Germ
    blid: BlidMap
    agreement_radius: float

    def __call__(self, x):
        return self.germ(self.blid.apply(x))


def extend(f: Germ, H: BlidMap) -> GlobalMap:
    """Global representative ``F(x) = f(H(x))``.

    Needs ``H(X)`` inside the germ's domain, i.e. the blid's image bound below
    the validity radius.
    """
    if not H.image_bound < f.validity_radius:
        raise ExtensionImpossible(
            f"blid image bound {H.image_bound:.6g} is not below the germ's radius "
            f"{f.validity_radius:.6g}")
    return GlobalMap(f, H, min(H.local_radius, f.validity_radius))


# Germ catalog -------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def _compile_rational(expr: str) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Compile a rational expression in ``t`` and ``x`` (integer powers only)."""
    tree = ast.parse(expr, mode="eval").body

    def check(node):
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            if isinstance(node.op, ast.Pow) and not (
                    isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ValueError("only integer constant exponents are allowed")
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            check(node.operand)
        elif isinstance(node, ast.Name):
            if node.id not in ("t", "x"):
                raise ValueError(f"unknown variable {node.id!r}; use t and x")
        elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            pass
        else:
            raise ValueError(f"unsupported syntax in integrand: {ast.dump(node)}")

    check(tree)

    def evaluate(node, t, x):
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](evaluate(node.left, t, x), evaluate(node.right, t, x))
        if isinstance(node, ast.UnaryOp):
            v = evaluate(node.operand, t, x)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name):
            return t if node.id == "t" else x
        return float(node.value)

    return lambda t, x: evaluate(tree, t, x)


def _integrate(x: CqElement, samples) -> float:
    return simpson(np.broadcast_to(samples, x.domain.points.shape), dx=x.domain.spacing)


def integral_germ(integrand: str, validity_radius: float, name: str | None = None) -> Germ:
    """Germ ``x -> int g(t, x(t)) dt`` over the element's domain (Simpson)."""
    g = _compile_rational(integrand)

    def local_map(x: CqElement):
        return _integrate(x, g(x.domain.points, x.values))

    return Germ(local_map, validity_radius, math.inf, name or f"int[{integrand}]")


def composition_germ(outer: Callable[[float], float], validity_radius: float,
                     name: str = "composition") -> Germ:
    """Germ ``x -> outer(int x(t) dt)``."""
    return Germ(lambda x: outer(_integrate(x, x.values)), validity_radius, math.inf, name)


def constant_germ(c, name: str = "constant") -> Germ:
    c = np.atleast_1d(np.asarray(c))
    return Germ(lambda x: c.copy(), math.inf, math.inf, name)


GERM_CATALOG: dict[str, Callable[[], Germ]] = {
    # the integral germ at 0 in C[0,1]; the integrand blows up at x = 1
    "reciprocal": lambda: integral_germ("1/(1-x)", 1.0, "reciprocal"),
    "square_integral": lambda: integral_germ("x**2 + t*x", 1.0, "square_integral"),
    "geometric_mean": lambda: composition_germ(lambda s: 1.0 / (1.0 - s), 1.0, "geometric_mean"),
    "phase": lambda: composition_germ(lambda s: np.exp(1j * s), 1.0, "phase"),
    "constant": lambda: constant_germ(1.0),
}


def make_germ(name: str) -> Germ:
    try:
        return GERM_CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown germ {name!r}; choose from {sorted(GERM_CATALOG)}") from None


# Certificates --------------------------------------------------------------------

def sample_ball(rng: np.random.Generator, domain: GridInterval, radius: float) -> CqElement:
    """Random continuous element with sup norm at most ``radius``.

    Alternates rough samples, smooth trigonometric shapes and constants so the
    ball's boundary is hit as well as its interior.
    """
    kind = rng.integers(3)
    t = (domain.points - domain.left) / (domain.right - domain.left)
    if kind == 0:
        v = rng.uniform(-radius, radius, size=domain.n_points)
    elif kind == 1:
        v = np.sin(2 * np.pi * rng.uniform(0.5, 4) * t + rng.uniform(0, 2 * np.pi))
        v = radius * rng.uniform(0, 1) * v / np.max(np.abs(v))
    else:
        v = np.full(domain.n_points, radius * rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.0))
    return CqElement(0, domain, [], v)


@dataclass
class AgreementReport:
    samples: int
    radius: float
    max_deviation: float
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {"samples": self.samples, "radius": self.radius,
                "max_deviation": self.max_deviation, "tolerance": self.tolerance,
                "pass": self.passed}


def agreement_check(F: GlobalMap, samples: int, rng: np.random.Generator | None = None,
                    domain: GridInterval | None = None, radius: float | None = None,
                    tolerance: float = 1e-12) -> AgreementReport:
    """Compare ``F`` with the germ on random inputs inside the agreement ball."""
    rng = np.random.default_rng(0) if rng is None else rng
    domain = GridInterval(0.0, 1.0, 1025) if domain is None else domain
    radius = F.agreement_radius if radius is None else radius
    worst = 0.0
    zero = CqElement(0, domain, [], np.zeros(domain.n_points))
    inputs = [zero] + [sample_ball(rng, domain, radius) for _ in range(max(samples - 1, 0))]
    for x in inputs:
        worst = max(worst, float(np.max(np.abs(F(x) - F.germ(x)))))
    return AgreementReport(len(inputs), radius, worst, tolerance, worst <= tolerance)


@dataclass
class BoundednessReport:
    strata: list
    sup_value: list
    sup_derivatives: dict
    growth_ratio: dict
    value_bound: float | None
    orders_checked: list
    passed: bool
    note: str = ("derivatives are checked to the listed finite orders only; sampled suprema "
                 "are lower bounds of the true suprema")

    def to_json(self) -> dict:
        return {"strata": self.strata, "sup_value": self.sup_value,
                "sup_derivatives": {str(k): v for k, v in self.sup_derivatives.items()},
                "growth_ratio": {str(k): v for k, v in self.growth_ratio.items()},
                "value_bound": self.value_bound, "orders_checked": self.orders_checked,
                "pass": self.passed, "note": self.note}


def boundedness_check(F: Callable, derivative_orders=(1,), samples: int = 200,
                      rng: np.random.Generator | None = None,
                      domain: GridInterval | None = None,
                      strata=(1.0, 10.0, 100.0, 1000.0), value_bound: float | None = None,
                      max_growth: float = 1.1) -> BoundednessReport:
    """Sample ``|F|`` and directional derivatives of ``F`` over growing input sizes.

    Passes when no stratum's derivative supremum exceeds ``max_growth`` times
    the supremum of the first stratum, and ``|F|`` stays under ``value_bound``
    when one is given.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    domain = GridInterval(0.0, 1.0, 1025) if domain is None else domain
    per = max(samples // len(strata), 1)
    sup_value = []
    sup_der = {p: [] for p in derivative_orders}
    for R in strata:
        best_v = 0.0
        best_d = {p: 0.0 for p in derivative_orders}
        for _ in range(per):
            x = CqElement(0, domain, [], rng.uniform(-R, R, size=domain.n_points))
            v = CqElement(0, domain, [], rng.uniform(-1, 1, size=domain.n_points))
            best_v = max(best_v, float(np.max(np.abs(F(x)))))
            for p in derivative_orders:
                d = central_difference(lambda s: F(x + v * s), p, scale=0.1)
                best_d[p] = max(best_d[p], float(np.max(np.abs(d))))
        sup_value.append(best_v)
        for p in derivative_orders:
            sup_der[p].append(best_d[p])
    growth = {}
    for p, vals in sup_der.items():
        ref = vals[0]
        growth[p] = max((v / ref if ref > 0 else (0.0 if v == 0 else math.inf)) for v in vals)
    ok = all(g <= max_growth for g in growth.values())
    if value_bound is not None:
        ok = ok and max(sup_value) <= value_bound
    return BoundednessReport(list(strata), sup_value, sup_der, growth, value_bound,
                             list(derivative_orders), ok)


def reciprocal_global(bump=None) -> GlobalMap:
    """``x -> int dt / (1 - x(t))`` extended with the pointwise blid."""
    H = PointwiseBlid() if bump is None else PointwiseBlid(bump)
    return extend(make_germ("reciprocal"), H)
