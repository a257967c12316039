"""Order-by-order solution of ``g(A x) - g(x) = f(x)`` for linear ``A`` on R^d.

Writing ``f`` and ``g`` as sums of homogeneous components, degree ``n`` gives
the linear system ``(L_n - I) Q_n = P_n`` where ``L_n Q = Q o A`` acts on the
monomial coefficients of degree ``n``.  ``L_n`` has eigenvalues
``lambda^alpha = prod lambda_i^alpha_i``; a multi-index with
``lambda^alpha = 1`` is a resonance and makes the system singular.

The degree-n equation is linear and homogeneous in the pair ``(P_n, Q_n)``, so
the same solver serves whether components are stored plainly or Taylor-normalized
(``P_n = f^(n)(0)(x)^n``); callers only need to be consistent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .jets import HomPoly, JetSequence, multi_indices

__all__ = [
    "LinearAuto", "CompositionOperator", "Unsolvable", "ResidualReport", "build_Ln",
    "solve_order", "solve_truncated", "residual_order_check", "evaluate_components",
    "monomial_eigenvalues",
]

SINGULAR_RTOL = 1e-9
RESONANCE_TOL = 1e-7
UNIT_CIRCLE_TOL = 1e-9


class Unsolvable(ArithmeticError):
    """The degree-n equation has no solution; ``resonances`` lists the offending multi-indices."""

    def __init__(self, degree: int, resonances: list, message: str = ""):
        self.degree = degree
        self.resonances = [tuple(a) for a in resonances]
        super().__init__(message or f"degree {degree} is not solvable; resonant "
                                    f"multi-indices {self.resonances}")


@dataclass(frozen=True, eq=False)
class LinearAuto:
    matrix: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("matrix must be square")
        scale = max(1.0, float(np.max(np.abs(A))))
        if abs(np.linalg.det(A)) <= 1e-12 * scale ** A.shape[0]:
            raise ValueError("matrix is not invertible")
        object.__setattr__(self, "matrix", A)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        """Diagonal entries for triangular matrices (coordinate order), else ``eigvals``."""
        A = self.matrix
        if np.allclose(np.tril(A, -1), 0) or np.allclose(np.triu(A, 1), 0):
            return np.diag(A).astype(complex)
        return np.linalg.eigvals(A)

    @property
    def hyperbolic(self) -> bool:
        return bool(np.all(np.abs(np.abs(self.eigenvalues) - 1.0) > UNIT_CIRCLE_TOL))

    def __call__(self, x):
        return np.asarray(x) @ self.matrix.T


@dataclass(frozen=True, eq=False)
class CompositionOperator:
    degree: int
    matrix: np.ndarray
    dimension: int

    @property
    def indices(self):
        return multi_indices(self.dimension, self.degree)


def build_Ln(A: LinearAuto, n: int) -> CompositionOperator:
    """Matrix of ``Q -> Q o A`` on degree-``n`` monomial coefficients (graded-lex)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    d = A.dimension
    idx = multi_indices(d, n)
    M = np.zeros((len(idx), len(idx)))
    for col in range(len(idx)):
        e = np.zeros(len(idx))
        e[col] = 1.0
        M[:, col] = HomPoly(d, n, e).compose_linear(A.matrix).coefficients.real
    return CompositionOperator(n, M, d)


def monomial_eigenvalues(A: LinearAuto, n: int) -> np.ndarray:
    """``prod_i lambda_i^alpha_i`` for every ``|alpha| = n``."""
    lam = A.eigenvalues
    return np.array([np.prod(lam ** np.array(a)) for a in multi_indices(A.dimension, n)])


def _resonances(A: LinearAuto, n: int) -> list:
    lam_alpha = monomial_eigenvalues(A, n)
    return [a for a, v in zip(multi_indices(A.dimension, n), lam_alpha)
            if abs(v - 1.0) < RESONANCE_TOL]


def solve_order(A: LinearAuto, n: int, P: HomPoly) -> HomPoly:
    """Solve ``(L_n - I) Q = P``.

    When ``L_n - I`` is singular (smallest singular value below ``1e-9`` times
    the largest) the equation is still solved if ``P`` lies in the range;
    otherwise :class:`Unsolvable` lists the resonant multi-indices.
    """
    if P.degree != n or P.dimension != A.dimension:
        raise ValueError("P must be homogeneous of degree n in A's dimension")
    L = build_Ln(A, n).matrix - np.eye(len(P.indices))
    rhs = P.coefficients
    sv = np.linalg.svd(L, compute_uv=False)
    pnorm = float(np.linalg.norm(rhs))
    if sv[-1] >= SINGULAR_RTOL * sv[0]:
        Q = np.linalg.solve(L, rhs)
    else:
        Q, *_ = np.linalg.lstsq(L, rhs, rcond=SINGULAR_RTOL)
        if np.linalg.norm(L @ Q - rhs) > SINGULAR_RTOL * max(pnorm, 1e-300) and pnorm > 0:
            raise Unsolvable(n, _resonances(A, n))
    residual = float(np.linalg.norm(L @ Q - rhs))
    if residual > SINGULAR_RTOL * pnorm:
        raise Unsolvable(n, _resonances(A, n),
                         f"degree {n}: residual {residual:.3g} exceeds tolerance")
    return HomPoly(A.dimension, n, Q)


def solve_truncated(A: LinearAuto, f_jets: JetSequence) -> JetSequence:
    """Solve every degree ``1..m``; the degree-0 entry of ``f`` must vanish."""
    if not A.hyperbolic:
        warnings.warn("A is not hyperbolic; formal solvability is still attempted",
                      RuntimeWarning, stacklevel=2)
    if not f_jets[0].is_zero():
        raise Unsolvable(0, [(0,) * A.dimension], "f(0) must vanish: g(A0) - g(0) = 0")
    out = [HomPoly.zero(A.dimension, 0)]
    for n in range(1, len(f_jets)):
        out.append(solve_order(A, n, f_jets[n]))
    return JetSequence(tuple(out))


def evaluate_components(components, x):
    """``sum_n C_n(x)`` for a list of homogeneous components."""
    return sum(C(x) for C in components)


@dataclass
class ResidualReport:
    order: int
    scales: list
    residuals: list = field(default_factory=list)
    slopes: list = field(default_factory=list)
    slope: float | None = None
    dispersion: float | None = None
    mode: str = "slope"
    passed: bool = False

    def to_json(self) -> dict:
        return {"order": self.order, "scales": self.scales, "residuals": self.residuals,
                "slopes": self.slopes, "slope": self.slope, "dispersion": self.dispersion,
                "mode": self.mode, "pass": self.passed}


def residual_order_check(g: JetSequence, A: LinearAuto, f: JetSequence, m: int,
                         rng: np.random.Generator | None = None, n_directions: int = 10,
                         scales=(1e-1, 10 ** -1.5, 1e-2, 10 ** -2.5, 1e-3, 10 ** -3.5, 1e-4),
                         exact_tol: float = 1e-12) -> ResidualReport:
    """Evaluate ``|g(A x) - g(x) - f(x)|`` along rays ``x = s v``.

    If ``f`` has no terms above degree ``m`` the residual must vanish
    (``<= exact_tol``); otherwise the log-log slope in ``s`` must be at least
    ``m + 0.5``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    d = A.dimension
    dirs = [np.ones(d) / np.sqrt(d)]
    while len(dirs) < n_directions:
        v = rng.normal(size=d)
        dirs.append(v / np.linalg.norm(v))
    if d == 1:
        dirs = [np.array([1.0]), np.array([-1.0])]
    exact = all(f[n].is_zero() for n in range(m + 1, len(f)))
    report = ResidualReport(m, list(scales), mode="exact" if exact else "slope")
    logs = np.log(np.asarray(scales))
    for v in dirs:
        res = []
        for s in scales:
            x = s * v
            r = evaluate_components(g.entries, A(x)) - evaluate_components(g.entries, x) \
                - evaluate_components(f.entries, x)
            res.append(float(abs(r)))
        report.residuals.append(res)
        if not exact:
            report.slopes.append(float(np.polyfit(logs, np.log(np.maximum(res, 1e-300)), 1)[0]))
    if exact:
        report.passed = max(max(r) for r in report.residuals) <= exact_tol
    else:
        report.slope = float(min(report.slopes))
        report.dispersion = float(max(report.slopes) - min(report.slopes))
        report.passed = report.slope >= m + 0.5
    return report
