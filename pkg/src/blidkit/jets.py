"""Homogeneous polynomial maps, jet sequences, and their Borel realization.

A jet sequence ``P_0, ..., P_m`` with ``P_j`` homogeneous of degree ``j`` is
realized by the globally bounded map

    f(x) = P_0 + sum_{j >= 1} P_j(H_j(x)) / j!,   H_j(x) = eps_j H(x / eps_j),

where ``H`` is a blid and each ``eps_j`` is the largest power of two that keeps
``sup |P_j(H_j(x))| / j!`` below ``2^-j``.  Near zero every ``H_j`` is the
identity, so ``f`` is the Taylor polynomial there and ``f^(j)(0)(v)^j = P_j(v)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from .blid import BlidMap, PointwiseBlid, RadialBlid
from .differentiability import central_difference
from .function_space import CqElement

__all__ = [
    "multi_indices", "HomPoly", "IntegralPower", "JetSequence", "RealizedJet", "JetReport",
    "hompoly_eval", "borel_realize", "jet_verify", "BorelError", "poly_multiply",
]


class BorelError(ValueError):
    pass


@lru_cache(maxsize=None)
def multi_indices(d: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All ``alpha`` in N^d with ``|alpha| = n``, graded-lex order (``x^n`` first)."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1 and n >= 0")
    if d == 1:
        return ((n,),)
    out = []
    for first in range(n, -1, -1):
        for rest in multi_indices(d - 1, n - first):
            out.append((first, *rest))
    return tuple(out)


def poly_multiply(a: dict, b: dict) -> dict:
    """Product of polynomials stored as ``{exponent tuple: coefficient}``."""
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return out


def _parse_index(key) -> tuple[int, ...]:
    if isinstance(key, (tuple, list)):
        return tuple(int(k) for k in key)
    nums = re.findall(r"-?\d+", str(key))
    if not nums:
        raise ValueError(f"cannot read multi-index from {key!r}")
    return tuple(int(k) for k in nums)


@dataclass(frozen=True, eq=False)
class HomPoly:
    """Homogeneous polynomial ``sum_{|alpha| = n} c_alpha x^alpha`` on R^d.

    ``coefficients`` is aligned with :func:`multi_indices` ``(d, n)``; it may
    be complex.
    """

    dimension: int
    degree: int
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients)
        c = c.astype(complex if np.iscomplexobj(c) else float).reshape(-1)
        if c.shape != (len(self.indices),):
            raise ValueError(f"degree {self.degree} in {self.dimension} variables needs "
                             f"{len(self.indices)} coefficients, got {c.size}")
        object.__setattr__(self, "coefficients", c)

    @property
    def indices(self):
        return multi_indices(self.dimension, self.degree)

    @classmethod
    def from_dict(cls, dimension: int, degree: int, coeffs: dict) -> "HomPoly":
        index = {a: i for i, a in enumerate(multi_indices(dimension, degree))}
        values = [0.0] * len(index)
        for key, c in coeffs.items():
            alpha = _parse_index(key)
            if alpha not in index:
                raise ValueError(f"multi-index {alpha} is not of degree {degree} in "
                                 f"{dimension} variables")
            values[index[alpha]] = c
        return cls(dimension, degree, np.array(values))

    @classmethod
    def zero(cls, dimension: int, degree: int) -> "HomPoly":
        return cls(dimension, degree, np.zeros(len(multi_indices(dimension, degree))))

    def to_dict(self) -> dict:
        return {a: c for a, c in zip(self.indices, self.coefficients) if c != 0}

    def to_json(self) -> dict:
        def enc(c):
            c = complex(c)
            return c.real if c.imag == 0 else [c.real, c.imag]
        return {"degree": self.degree,
                "coefficients": {"(" + ",".join(map(str, a)) + ")": enc(c)
                                 for a, c in zip(self.indices, self.coefficients) if c != 0}}

    def __call__(self, x):
        x = np.asarray(x)
        if x.shape[-1:] != (self.dimension,):
            raise ValueError(f"point dimension {x.shape[-1:]} does not match {self.dimension}")
        exps = np.array(self.indices)
        monomials = np.prod(x[..., None, :] ** exps, axis=-1)
        out = monomials @ self.coefficients
        return out if np.ndim(out) else out.item()

    def __add__(self, other: "HomPoly") -> "HomPoly":
        self._check(other)
        return HomPoly(self.dimension, self.degree, self.coefficients + other.coefficients)

    def __sub__(self, other: "HomPoly") -> "HomPoly":
        self._check(other)
        return HomPoly(self.dimension, self.degree, self.coefficients - other.coefficients)

    def __mul__(self, s) -> "HomPoly":
        return HomPoly(self.dimension, self.degree, s * self.coefficients)

    __rmul__ = __mul__

    def _check(self, other):
        if (self.dimension, self.degree) != (other.dimension, other.degree):
            raise ValueError("polynomials differ in dimension or degree")

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def norm_estimate(self, rng: np.random.Generator | None = None, samples: int = 1000) -> float:
        """``max |P(x)|`` over the Euclidean unit sphere; exact for ``d = 1``."""
        if self.is_zero():
            return 0.0
        if self.dimension == 1:
            return float(abs(self.coefficients[0]))
        rng = np.random.default_rng(0) if rng is None else rng
        pts = rng.normal(size=(samples, self.dimension))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pts = np.vstack([pts, np.eye(self.dimension)])
        return float(np.max(np.abs(self(pts))))

    def compose_linear(self, A) -> "HomPoly":
        """Coefficients of ``x -> P(A x)``."""
        A = np.asarray(A)
        d = self.dimension
        rows = [{tuple(int(i == j) for i in range(d)): A[r, j] for j in range(d)} for r in range(d)]
        acc = {}
        for alpha, c in zip(self.indices, self.coefficients):
            if c == 0:
                continue
            term = {(0,) * d: c}
            for r, power in enumerate(alpha):
                for _ in range(power):
                    term = poly_multiply(term, rows[r])
            for e, v in term.items():
                acc[e] = acc.get(e, 0) + v
        return HomPoly.from_dict(d, self.degree, acc) if acc else HomPoly.zero(d, self.degree)


def hompoly_eval(P: HomPoly, x):
    return P(x)


@dataclass(frozen=True)
class IntegralPower:
    """Scalar polynomial on C[0,1]: ``x -> c (int x(t) dt)^n``.

    Its norm on the sup-norm unit ball is exactly ``|c|``.
    """

    degree: int
    c: float = 1.0
    dimension: str = "C[0,1]"

    def __call__(self, x: CqElement):
        return self.c * simpson(x.values, dx=x.domain.spacing) ** self.degree

    def is_zero(self) -> bool:
        return self.c == 0

    def norm_estimate(self, rng=None, samples=0) -> float:
        return abs(self.c)

    def to_json(self) -> dict:
        return {"degree": self.degree, "integral_power": self.c}


@dataclass(frozen=True)
class JetSequence:
    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("jet sequence needs at least the degree-0 entry")
        dims = {e.dimension for e in entries}
        if len(dims) != 1:
            raise ValueError(f"jet entries disagree on dimension: {dims}")
        for j, e in enumerate(entries):
            if e.degree != j:
                raise ValueError(f"entry {j} has degree {e.degree}")
        object.__setattr__(self, "entries", entries)

    @property
    def order(self) -> int:
        return len(self.entries) - 1

    @property
    def dimension(self):
        return self.entries[0].dimension

    def __getitem__(self, j):
        return self.entries[j]

    def __len__(self):
        return len(self.entries)

    def replace(self, j: int, P) -> "JetSequence":
        entries = list(self.entries)
        entries[j] = P
        return JetSequence(tuple(entries))

    @classmethod
    def from_dicts(cls, dimension: int, coeffs_by_degree: Sequence[dict]) -> "JetSequence":
        return cls(tuple(HomPoly.from_dict(dimension, j, c) for j, c in enumerate(coeffs_by_degree)))

    @classmethod
    def from_json(cls, record: dict | str | Path) -> "JetSequence":
        if isinstance(record, (str, Path)):
            record = json.loads(Path(record).read_text())
        d = int(record["dimension"])
        by_degree = {int(e["degree"]): e.get("coefficients", {}) for e in record["entries"]}
        m = max(by_degree) if by_degree else 0
        entries = []
        for j in range(m + 1):
            coeffs = {}
            for key, c in by_degree.get(j, {}).items():
                coeffs[key] = complex(c[0], c[1]) if isinstance(c, list) else float(c)
            entries.append(HomPoly.from_dict(d, j, coeffs))
        return cls(tuple(entries))

    def to_json(self) -> dict:
        return {"dimension": self.dimension, "entries": [e.to_json() for e in self.entries]}

    def taylor_polynomial(self, x):
        """``sum_j P_j(x) / j!``."""
        return sum(P(x) / math.factorial(j) for j, P in enumerate(self.entries))


SCALE_LADDER = tuple(2.0 ** -i for i in range(61))


@dataclass
class RealizedJet:
    jets: JetSequence
    blid: BlidMap
    epsilons: list
    identity_radius: float
    bound: float

    def damped(self, x, eps: float):
        return self.blid.apply(x * (1.0 / eps)) * eps

    def __call__(self, x):
        total = self.jets[0](x)
        for j in range(1, len(self.jets)):
            P = self.jets[j]
            if P.is_zero():
                continue
            total = total + P(self.damped(x, self.epsilons[j])) / math.factorial(j)
        return total


def borel_realize(jets: JetSequence, blid: BlidMap | None = None,
                  ladder: Sequence[float] = SCALE_LADDER,
                  rng: np.random.Generator | None = None) -> RealizedJet:
    """Bounded map with derivatives ``P_j`` at zero, for ``j`` up to the jet order.

    ``|P_j(y)| <= ||P_j|| |y|^j`` and ``|eps H(x / eps)| <= eps a`` give the
    per-term bound ``||P_j|| (eps a)^j / j!``; ``eps_j`` is the first ladder
    entry bringing it under ``2^-j``.  Ladder entries are powers of two, so
    ``eps H(x / eps)`` is exactly ``x`` on the plateau.
    """
    if blid is None:
        blid = RadialBlid() if isinstance(jets.dimension, int) else PointwiseBlid()
    a = blid.image_bound
    epsilons = [1.0]
    radius = math.inf
    for j in range(1, len(jets)):
        P = jets[j]
        if P.is_zero():
            epsilons.append(1.0)
            continue
        norm = P.norm_estimate(rng)
        target = 2.0 ** -j
        for eps in ladder:
            if norm * (eps * a) ** j / math.factorial(j) <= target:
                break
        else:
            raise BorelError(f"no admissible scale for degree {j} (norm {norm:.3g})")
        epsilons.append(float(eps))
        radius = min(radius, eps * blid.local_radius)
    P0 = jets[0]
    p0 = abs(complex(P0.coefficients[0])) if isinstance(P0, HomPoly) else abs(P0.c)
    bound = p0 + sum(2.0 ** -j for j in range(1, len(jets)) if not jets[j].is_zero())
    return RealizedJet(jets, blid, epsilons, radius, bound)


@dataclass
class JetReport:
    rows: list = field(default_factory=list)
    passed: bool = True
    caveat: str = "derivative orders >= 5 are verified at relative tolerance 1e-2 only"

    def to_json(self) -> dict:
        return {"rows": self.rows, "pass": self.passed, "caveat": self.caveat}


def derivative_tolerance(j: int) -> float:
    return 1e-3 if j <= 4 else 1e-2


def jet_verify(f: Callable, jets: JetSequence, directions: Sequence, scale: float = 1.0) -> JetReport:
    """Compare the ``j``-th derivative of ``t -> f(t v)`` at 0 with ``P_j(v)``.

    Relative error is used where ``|P_j(v)| >= 1``, absolute error otherwise.
    """
    report = JetReport()
    for v in directions:
        vv = v if isinstance(v, CqElement) else np.asarray(v, dtype=float)
        phi = lambda s, vv=vv: f(vv * s)  # noqa: E731
        for j in range(len(jets)):
            expected = jets[j](vv)
            got = central_difference(phi, j, scale=scale)
            err = abs(got - expected) / max(1.0, abs(expected))
            ok = err <= derivative_tolerance(j)
            report.rows.append({"degree": j, "direction": _label(vv), "expected": _num(expected),
                                "observed": _num(got), "error": float(err),
                                "tolerance": derivative_tolerance(j), "pass": bool(ok)})
            report.passed = report.passed and bool(ok)
    return report


def _num(v):
    v = complex(np.asarray(v).reshape(-1)[0]) if np.ndim(v) else complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _label(v):
    if isinstance(v, CqElement):
        return f"element(|v|={v.sup_norm():.3g})"
    return [float(c) for c in np.asarray(v).reshape(-1)]
