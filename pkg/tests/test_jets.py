import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blidkit.blid import PointwiseBlid, RadialBlid
from blidkit.function_space import CqElement, GridInterval
from blidkit.jets import (BorelError, HomPoly, IntegralPower, JetSequence, borel_realize,
                          derivative_tolerance, hompoly_eval, jet_verify, multi_indices,
                          poly_multiply)


def factorial_jets(m=5):
    return JetSequence(tuple(HomPoly(1, j, [float(math.factorial(j))]) for j in range(m + 1)))


def test_hompoly_examples():
    assert hompoly_eval(HomPoly(1, 2, [1.0]), np.array([3.0])) == 9.0
    P = HomPoly.from_dict(1, 3, {"(3)": 1.5})
    x = np.array([0.7])
    assert P(2 * x) == pytest.approx(8 * P(x))
    Q = HomPoly.from_dict(2, 2, {"(2,0)": 2.0, "(1,1)": 1.0})
    assert Q(np.array([1.0, 2.0])) == 4.0


def test_multi_indices_order_and_count():
    assert multi_indices(2, 2) == ((2, 0), (1, 1), (0, 2))
    for d in range(1, 4):
        for n in range(5):
            assert len(multi_indices(d, n)) == math.comb(n + d - 1, d - 1)


def test_poly_multiply():
    prod = poly_multiply({(1, 0): 1.0, (0, 1): 1.0}, {(1, 0): 1.0, (0, 1): -1.0})
    assert {a: c for a, c in prod.items() if c != 0} == {(2, 0): 1.0, (0, 2): -1.0}


def test_hompoly_algebra_and_errors():
    P = HomPoly(2, 1, [1.0, 2.0])
    assert (P + P - P * 2.0).is_zero()
    with pytest.raises(ValueError):
        HomPoly(2, 2, [1.0])
    with pytest.raises(ValueError):
        HomPoly.from_dict(2, 2, {"(3,0)": 1.0})
    with pytest.raises(ValueError):
        P(np.array([1.0, 2.0, 3.0]))


def test_compose_linear_matches_evaluation():
    rng = np.random.default_rng(0)
    P = HomPoly(3, 3, rng.normal(size=len(multi_indices(3, 3))))
    A = rng.normal(size=(3, 3))
    x = rng.normal(size=3)
    assert P.compose_linear(A)(x) == pytest.approx(P(A @ x), rel=1e-12)


def test_norm_estimate_of_monomial():
    assert HomPoly(1, 4, [24.0]).norm_estimate() == pytest.approx(24.0)


def test_jet_json_round_trip():
    J = JetSequence.from_dicts(2, [{}, {"(1,0)": 1.0}, {"(1,1)": -0.5, "(0,2)": 2.0}])
    K = JetSequence.from_json(J.to_json())
    assert K.order == 2 and K.dimension == 2
    for a, b in zip(J.entries, K.entries):
        np.testing.assert_array_equal(a.coefficients, b.coefficients)


def test_jet_sequence_validation():
    with pytest.raises(ValueError):
        JetSequence(())
    with pytest.raises(ValueError):
        JetSequence((HomPoly(1, 0, [0.0]), HomPoly(1, 2, [1.0])))


def test_zero_jets_realize_zero():
    J = JetSequence(tuple(HomPoly.zero(1, j) for j in range(4)))
    f = borel_realize(J)
    assert all(f(np.array([s])) == 0.0 for s in (-100.0, 0.0, 0.2, 50.0))


def test_identity_jet():
    J = JetSequence((HomPoly.zero(1, 0), HomPoly(1, 1, [1.0])))
    f = borel_realize(J)
    assert f(np.zeros(1)) == 0.0
    step = 1e-3
    assert (f(np.array([step])) - f(np.array([-step]))) / (2 * step) == pytest.approx(1.0, abs=1e-8)


def test_factorial_jets_derivatives_and_bound():
    J = factorial_jets()
    f = borel_realize(J, rng=np.random.default_rng(0))
    rep = jet_verify(f, J, [np.array([1.0])])
    for row in rep.rows:
        # finite-difference oracle vs j!
        assert row["expected"] == math.factorial(row["degree"])
        assert row["error"] <= derivative_tolerance(row["degree"])
    xs = np.linspace(-100, 100, 4001)
    assert max(abs(f(np.array([s]))) for s in xs) <= 1.0 + sum(2.0 ** -j for j in range(1, 6))


def test_epsilons_are_powers_of_two():
    J = JetSequence((HomPoly.zero(1, 0), HomPoly(1, 1, [1.0]), HomPoly(1, 2, [1e6])))
    f = borel_realize(J)
    assert f.epsilons[2] < 1.0
    assert math.log2(f.epsilons[2]) == int(math.log2(f.epsilons[2]))
    a = RadialBlid().image_bound
    assert 1e6 * (f.epsilons[2] * a) ** 2 / 2 <= 0.25


def test_unreachable_scale_raises():
    J = JetSequence((HomPoly.zero(1, 0), HomPoly(1, 1, [1e300])))
    with pytest.raises(BorelError):
        borel_realize(J, ladder=(1.0, 0.5))


def test_linear_jet_has_vanishing_higher_differences():
    J = JetSequence((HomPoly.zero(1, 0), HomPoly(1, 1, [2.0]), HomPoly.zero(1, 2),
                     HomPoly.zero(1, 3)))
    rep = jet_verify(borel_realize(J), J, [np.array([1.0])])
    assert rep.passed


def test_function_space_jets():
    dom = GridInterval(0.0, 1.0, 257)
    J = JetSequence((IntegralPower(0, 0.0), IntegralPower(1, 1.0), IntegralPower(2, 2.0)))
    f = borel_realize(J, PointwiseBlid())
    v = CqElement(0, dom, [], np.ones(dom.n_points))
    rep = jet_verify(f, J, [v])
    assert rep.passed


def test_two_dimensional_realization():
    J = JetSequence.from_dicts(2, [{"(0,0)": 0.5}, {"(1,0)": 1.0}, {"(1,1)": 2.0}])
    f = borel_realize(J)
    rng = np.random.default_rng(0)
    pts = [rng.normal(size=2) * 1e3 for _ in range(500)]
    assert max(abs(f(p)) for p in pts) <= f.bound
    dirs = [np.array([1.0, 0.0]), np.array([0.6, 0.8])]
    assert jet_verify(f, J, dirs).passed


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=4), st.floats(-3, 3), st.floats(0.1, 3))
def test_hompoly_homogeneity_property(coeffs, x, lam):
    n = len(coeffs) - 1
    P = HomPoly(2, n, coeffs + [0.0] * (len(multi_indices(2, n)) - len(coeffs)))
    pt = np.array([x, 0.5])
    assert P(lam * pt) == pytest.approx(lam ** n * P(pt), rel=1e-9, abs=1e-9)
