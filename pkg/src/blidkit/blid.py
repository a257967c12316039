"""Blid maps: bounded maps equal to the identity near zero.

Every construction acts on :class:`~blidkit.function_space.CqElement` values
(and, where it makes sense, on plain numpy vectors) and knows

* ``local_radius``: inputs whose relevant size is at most this are returned
  unchanged,
* ``image_bound``: the a priori bound on the size of every output,
* ``derivative(x, v)``: the exact directional derivative, used by the
  differentiability checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .bump import BumpFunction, PlaneBump
from .function_space import (CqElement, FrechetMetric, GridInterval, SeminormFamily, SpaceKind,
                             element_from_derivatives, metric, random_element, seminorm)

__all__ = [
    "BlidKind", "BlidError", "WrongSpace", "SubspaceMembershipError", "ConfigurationError",
    "CertificateFailure", "BlidMap", "PointwiseBlid", "RadialBlid", "TaylorIntegralBlid",
    "ScaledBlid", "SegmentBlid", "ProjectedBlid", "Projector", "BoundCertificate",
    "blid_pointwise", "blid_taylor_integral", "blid_scaled", "blid_segment", "blid_projected",
    "blid_bound_certificate", "minimal_scaled_level", "local_identity_check",
    "scaled_containment_check",
]


class BlidError(ValueError):
    pass


class WrongSpace(BlidError):
    pass


class SubspaceMembershipError(BlidError):
    pass


class ConfigurationError(BlidError):
    pass


class CertificateFailure(AssertionError):
    def __init__(self, message, witness=None, certificate=None):
        super().__init__(message)
        self.witness = witness
        self.certificate = certificate


class BlidKind(str, Enum):
    POINTWISE = "pointwise"
    RADIAL = "radial"
    TAYLOR_INTEGRAL = "taylor_integral"
    SCALED = "scaled"
    SEGMENT = "segment"
    PROJECTED = "projected"


class BlidMap:
    kind: BlidKind
    bump: BumpFunction
    local_radius: float
    image_bound: float

    def apply(self, x):
        raise NotImplementedError

    def derivative(self, x, v):
        raise NotImplementedError

    def __call__(self, x):
        return self.apply(x)


def _require_q0(x):
    if isinstance(x, CqElement) and x.q != 0:
        raise WrongSpace(f"pointwise blid acts on C (q=0), got q={x.q}")


@dataclass(frozen=True)
class PointwiseBlid(BlidMap):
    """``H(x)(t) = h(x(t)) x(t)`` on C[0,1], C(M), or R^d with the sup norm."""

    bump: BumpFunction = field(default_factory=BumpFunction)
    kind = BlidKind.POINTWISE

    @property
    def local_radius(self) -> float:
        return self.bump.r_inner

    @property
    def image_bound(self) -> float:
        return self.bump.sup_hu

    @property
    def derivative_bound(self) -> float:
        return self.bump.sup_dH

    def apply(self, x):
        _require_q0(x)
        if isinstance(x, CqElement):
            return CqElement(0, x.domain, [], self.bump.damp(x.top_samples))
        return self.bump.damp(x)

    def derivative(self, x, v):
        _require_q0(x)
        if isinstance(x, CqElement):
            return CqElement(0, x.domain, [],
                             self.bump.blid_derivative(x.top_samples) * v.top_samples)
        return self.bump.blid_derivative(x) * np.asarray(v, dtype=float)


@dataclass(frozen=True)
class RadialBlid(BlidMap):
    """``H(x) = h(|x|) x`` on R^d with the Euclidean norm (bump on the space)."""

    bump: BumpFunction = field(default_factory=BumpFunction)
    kind = BlidKind.RADIAL

    @property
    def local_radius(self) -> float:
        return self.bump.r_inner

    @property
    def image_bound(self) -> float:
        return self.bump.sup_hu

    @property
    def derivative_bound(self) -> float:
        # DH = h I + h'(r) x x^T / r has eigenvalues h(r) and h(r) + r h'(r)
        return self.bump.sup_dH

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        return self.bump(np.linalg.norm(x)) * x

    def derivative(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(x))
        out = self.bump(r) * v
        if r > 0:
            out = out + self.bump.derivative(r) * float(x @ v) / r * x
        return out


@dataclass(frozen=True)
class TaylorIntegralBlid(BlidMap):
    """Level-``k`` blid on C^q / C^inf spaces.

    ``H_k(x)(t) = sum_{j<k} t^j/j! G(x^(j)(0)) + k-fold integral of G(x^(k))``
    with ``G(u) = h(u) u`` and the Taylor data anchored at ``anchor``.  The
    output is an element of order ``k``.  For ``k = 0`` this is the pointwise
    blid.
    """

    k: int
    bump: BumpFunction = field(default_factory=BumpFunction)
    anchor: float = 0.0
    kind = BlidKind.TAYLOR_INTEGRAL

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("level k must be nonnegative")

    @property
    def local_radius(self) -> float:
        return self.bump.r_inner

    @property
    def image_bound(self) -> float:
        """Bound on ``||H_k(x)||_k``."""
        return self.bump.sup_hu * math.e ** self.k

    def _split(self, x: CqElement):
        if not isinstance(x, CqElement):
            raise WrongSpace("Taylor-integral blid acts on CqElement values")
        if self.k > x.q:
            raise WrongSpace(f"level {self.k} needs q >= {self.k}, element has q={x.q}")
        i0 = x.domain.index_of(self.anchor)
        at_anchor = np.array([x.derivative(j)[i0] for j in range(self.k)])
        top = x.derivative(self.k)
        # x viewed as an order-k element: same functions, top = x^(k)
        base = CqElement(self.k, x.domain, x.jet_at_left[:self.k], top)
        return base, at_anchor, top

    def apply(self, x: CqElement) -> CqElement:
        base, at_anchor, top = self._split(x)
        damp = self.bump.damp
        # Build H(x) as x + (H(x) - x) so the plateau returns x bit for bit.
        delta = element_from_derivatives(self.k, x.domain, damp(at_anchor) - at_anchor,
                                         damp(top) - top, self.anchor)
        return base + delta

    def derivative(self, x: CqElement, v: CqElement) -> CqElement:
        _, at_anchor, top = self._split(x)
        _, v_anchor, v_top = self._split(v)
        dG = self.bump.blid_derivative
        return element_from_derivatives(self.k, x.domain, dG(at_anchor) * v_anchor,
                                        dG(top) * v_top, self.anchor)


@dataclass(frozen=True)
class ScaledBlid(BlidMap):
    """``H_c(x) = (c / 4N) H_k((4N / c) x)`` with metric image inside the c-ball."""

    c: float
    inner: TaylorIntegralBlid
    N: float
    kind = BlidKind.SCALED

    @property
    def bump(self) -> BumpFunction:
        return self.inner.bump

    @property
    def k(self) -> int:
        return self.inner.k

    @property
    def scale(self) -> float:
        return 4.0 * self.N / self.c

    @property
    def local_radius(self) -> float:
        return self.inner.local_radius / self.scale

    @property
    def image_bound(self) -> float:
        """Bound on ``d(H_c(x), 0)``."""
        return self.c

    def apply(self, x: CqElement) -> CqElement:
        return self.inner.apply(x * self.scale) / self.scale

    def derivative(self, x: CqElement, v: CqElement) -> CqElement:
        return self.inner.derivative(x * self.scale, v)


def minimal_scaled_level(c: float) -> int:
    """Smallest integer ``k`` with ``k > 1 - ln c / ln 2``."""
    if c <= 0:
        raise ConfigurationError("c must be positive")
    return math.floor(1.0 - math.log2(c)) + 1


@dataclass(frozen=True)
class SegmentBlid(BlidMap):
    """``H_y(x)(t) = y(t) + h(t, x(t)) (x(t) - y(t))``: a blid at the set of
    functions whose graph lies in the band of ``plane``."""

    y: CqElement
    plane: PlaneBump
    bump: BumpFunction = field(default_factory=BumpFunction)
    kind = BlidKind.SEGMENT

    def __post_init__(self):
        _require_q0(self.y)
        t = self.y.domain.points
        if np.any(self.plane.distance(t, self.y.values) > 1e-12):
            raise BlidError("anchor y must have its graph inside the band")

    @property
    def local_radius(self) -> float:
        """Half-width of the largest sup-ball around 0 contained in the band (0 if none)."""
        lo, hi = self.plane.bounds(self.y.domain.points)
        return float(max(0.0, min(np.min(-lo), np.min(hi))))

    @property
    def image_bound(self) -> float:
        """Outputs stay within this vertical distance of the band."""
        return self.plane.margin

    def _check(self, x):
        _require_q0(x)
        if not isinstance(x, CqElement) or x.domain != self.y.domain:
            raise BlidError("segment blid input must live on the anchor's grid")

    def apply(self, x: CqElement) -> CqElement:
        self._check(x)
        t, xv, yv = x.domain.points, x.values, self.y.values
        hv = self.plane(t, xv)
        return CqElement(0, x.domain, [], np.where(hv == 1.0, xv, yv + hv * (xv - yv)))

    def derivative(self, x: CqElement, v: CqElement) -> CqElement:
        self._check(x)
        t, xv, yv = x.domain.points, x.values, self.y.values
        factor = self.plane.dx(t, xv) * (xv - yv) + self.plane(t, xv)
        return CqElement(0, x.domain, [], factor * v.values)


@dataclass(frozen=True)
class Projector:
    """Linear projector on sampled grid functions (q = 0) or vectors."""

    rule: Callable[[np.ndarray], np.ndarray]
    name: str = "projector"
    idempotency_tolerance: float = 1e-10

    def __call__(self, x):
        if isinstance(x, CqElement):
            _require_q0(x)
            return CqElement(0, x.domain, [], self.rule(x.values))
        return self.rule(np.asarray(x, dtype=float))

    @classmethod
    def from_matrix(cls, matrix, name="matrix", tol=1e-10) -> "Projector":
        matrix = np.asarray(matrix, dtype=float)
        if not np.allclose(matrix @ matrix, matrix, atol=tol, rtol=0):
            raise BlidError("matrix is not idempotent")
        return cls(lambda v: matrix @ v, name, tol)

    @classmethod
    def identity(cls) -> "Projector":
        return cls(lambda v: v.copy(), "identity")

    @classmethod
    def zero(cls) -> "Projector":
        return cls(np.zeros_like, "zero")

    @classmethod
    def even_part(cls) -> "Projector":
        """``(pi x)(t) = (x(t) + x(-t)) / 2`` on a grid symmetric about 0."""
        return cls(lambda v: 0.5 * (v + v[::-1]), "even")

    def check_idempotent(self, samples, tol=None) -> float:
        tol = self.idempotency_tolerance if tol is None else tol
        worst = 0.0
        for x in samples:
            px = self(x)
            err = _size(self(px) - px)
            worst = max(worst, err)
        if worst > tol:
            raise BlidError(f"{self.name} fails idempotency: {worst:.3g} > {tol:.3g}")
        return worst


def _size(v) -> float:
    if isinstance(v, CqElement):
        return v.sup_norm()
    v = np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0


@dataclass(frozen=True)
class ProjectedBlid(BlidMap):
    """``pi(H)`` restricted to Im(pi), or ``H - pi(H)`` restricted to Ker(pi)."""

    projector: Projector
    inner: BlidMap
    side: str = "image"
    kind = BlidKind.PROJECTED

    def __post_init__(self):
        if self.side not in ("image", "kernel"):
            raise ValueError("side must be 'image' or 'kernel'")

    @property
    def bump(self) -> BumpFunction:
        return self.inner.bump

    @property
    def local_radius(self) -> float:
        return self.inner.local_radius

    @property
    def image_bound(self) -> float:
        # ||pi|| <= 1 for the shipped projectors; general matrices need their norm
        return 2.0 * self.inner.image_bound if self.side == "kernel" else self.inner.image_bound

    def _check_member(self, x):
        px = self.projector(x)
        scale = max(1.0, _size(x))
        err = _size(px - x) if self.side == "image" else _size(px)
        if err > self.projector.idempotency_tolerance * scale:
            raise SubspaceMembershipError(
                f"input is not in the {self.side} of {self.projector.name} (off by {err:.3g})")

    def _restrict(self, hx):
        phx = self.projector(hx)
        return phx if self.side == "image" else hx - phx

    def apply(self, x):
        self._check_member(x)
        return self._restrict(self.inner.apply(x))

    def derivative(self, x, v):
        return self._restrict(self.inner.derivative(x, v))


# Operation-style constructors -------------------------------------------------

def blid_pointwise(h: BumpFunction, x):
    return PointwiseBlid(h).apply(x)


def blid_taylor_integral(h: BumpFunction, x: CqElement, k: int, anchor: float | None = None):
    if anchor is None:
        anchor = 0.0 if x.domain.left <= 0.0 <= x.domain.right else x.domain.left
    return TaylorIntegralBlid(k, h, anchor).apply(x)


def blid_scaled(c: float, bump: BumpFunction | None = None, anchor: float = 0.0,
                max_level: int = 40) -> ScaledBlid:
    """Blid whose image lies in the metric ball ``d(., 0) < c``.

    The inner level-``k`` blid has the a priori bound ``N = a e^k``.
    """
    bump = BumpFunction() if bump is None else bump
    k = minimal_scaled_level(c)
    if k > max_level:
        raise ConfigurationError(
            f"c={c} needs level {k}, above the representable maximum {max_level}")
    inner = TaylorIntegralBlid(k, bump, anchor)
    return ScaledBlid(c, inner, inner.image_bound)


def blid_segment(y: CqElement, band: PlaneBump, x: CqElement) -> CqElement:
    return SegmentBlid(y, band).apply(x)


def blid_projected(projector: Projector, H: BlidMap, side: str, x):
    return ProjectedBlid(projector, H, side).apply(x)


# Certificates ------------------------------------------------------------------

@dataclass
class BoundCertificate:
    kind: str
    k: int
    bound: float
    observed_max: float
    samples: int
    passed: bool
    witness: object = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "k": self.k, "bound": self.bound,
                "observed_max": self.observed_max, "samples": self.samples, "pass": self.passed}


STRATA = (0.1, 1.0, 10.0, 100.0)


def blid_bound_certificate(H: TaylorIntegralBlid, k: int | None = None, sample_count: int = 1000,
                           rng: np.random.Generator | None = None,
                           domain: GridInterval | None = None,
                           family: SeminormFamily | None = None,
                           raise_on_failure: bool = True) -> BoundCertificate:
    """Sample ``||H_k(x)||_k`` and compare with ``a e^k``.

    Inputs cycle through magnitude strata 0.1, 1, 10, 100 (rough i.i.d. top
    samples) and include the adversarial constant element sitting at the
    maximizer of ``h(u) u`` in every derivative.
    """
    k = H.k if k is None else k
    if k != H.k:
        H = TaylorIntegralBlid(k, H.bump, H.anchor)
    rng = np.random.default_rng(0) if rng is None else rng
    domain = GridInterval(0.0, 1.0, 1025) if domain is None else domain
    family = SeminormFamily(SpaceKind.CINF_INTERVAL) if family is None else family
    bound = H.image_bound

    u = np.linspace(0.0, H.bump.r_outer, 20001)
    u_star = float(u[np.argmax(H.bump.damp(u))])
    inputs = [CqElement(k, domain, np.full(k, u_star), np.full(domain.n_points, u_star))]
    for i in range(sample_count - 1):
        inputs.append(random_element(rng, domain, k, STRATA[i % len(STRATA)]))

    observed, witness = 0.0, None
    for x in inputs:
        s = seminorm(H.apply(x), k, family)
        if s > observed:
            observed, witness = s, x
    cert = BoundCertificate("taylor_integral", k, bound, observed, len(inputs),
                            observed < bound, witness if observed >= bound else None)
    if raise_on_failure and not cert.passed:
        raise CertificateFailure(f"||H_{k}(x)||_{k} = {observed} >= {bound}", witness, cert)
    return cert


def scaled_containment_check(Hc: ScaledBlid, sample_count: int, rng: np.random.Generator,
                             domain: GridInterval | None = None, k_max: int = 40):
    """Max of ``d(H_c(x), 0)`` over random inputs, in the C^inf[0,1] metric.

    Returns ``(worst, witness)``.
    """
    domain = GridInterval(0.0, 1.0, 1025) if domain is None else domain
    fm = FrechetMetric(SeminormFamily(SpaceKind.CINF_INTERVAL), k_max=k_max,
                       tail_tolerance=2.0 ** -k_max)
    # include inputs on and just past the plateau, where H_c is not yet constant-damped
    strata = STRATA + tuple(Hc.local_radius * r for r in (0.5, 1.0, 2.0, 8.0))
    worst, witness = 0.0, None
    for i in range(sample_count):
        x = random_element(rng, domain, Hc.k, strata[i % len(strata)])
        hx = Hc.apply(x)
        d = metric(hx, hx.zeros_like(), fm)
        if d > worst:
            worst, witness = d, x
    return worst, witness


def local_identity_check(H: BlidMap, sample_count: int, rng: np.random.Generator,
                         make_input: Callable[[np.random.Generator, float], object]) -> float:
    """Max grid error of ``H(x) - x`` over inputs of size at most ``H.local_radius``."""
    worst = 0.0
    for _ in range(sample_count):
        x = make_input(rng, H.local_radius)
        worst = max(worst, _size(H.apply(x) - x))
    return worst
