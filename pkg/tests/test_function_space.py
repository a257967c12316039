import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blidkit.function_space import (CqElement, DomainCoverageError, FrechetMetric, GridInterval,
                                    OrderOutOfRange, SeminormFamily, ShapeMismatch, SpaceKind,
                                    element_from_derivatives, element_from_function,
                                    element_from_json, element_to_json, metric, random_element,
                                    seminorm, write_csv)

DOM = GridInterval(0.0, 1.0, 1025)
CINF = SeminormFamily(SpaceKind.CINF_INTERVAL)


def test_integral_of_constant_is_linear():
    x = CqElement(1, DOM, [0.0], np.full(DOM.n_points, 2.0))
    np.testing.assert_allclose(x.derivative(0), 2.0 * DOM.points, atol=1e-14)


def test_zero_second_derivative_gives_constant():
    x = CqElement(2, DOM, [1.0, 0.0], np.zeros(DOM.n_points))
    np.testing.assert_array_equal(x.derivative(0), np.ones(DOM.n_points))


def test_cos_integrates_to_sin():
    x = CqElement(1, DOM, [0.0], np.cos(DOM.points))
    assert np.max(np.abs(x.derivative(0) - np.sin(DOM.points))) <= 1e-8


@pytest.mark.parametrize("n", [17, 33, 65])
def test_reconstruction_converges(n):
    # exp is its own antiderivative: compare errors at n and 2n - 1 nodes
    def err(m):
        d = GridInterval(0.0, 1.0, m)
        x = CqElement(2, d, [1.0, 1.0], np.exp(d.points))
        return np.max(np.abs(x.derivative(0) - np.exp(d.points)))
    rate = math.log2(err(n) / err(2 * n - 1))
    assert rate >= 1.8


def test_even_grid_point_count_still_accurate():
    d = GridInterval(0.0, 1.0, 1024)
    x = CqElement(1, d, [0.0], np.cos(d.points))
    assert np.max(np.abs(x.derivative(0) - np.sin(d.points))) <= 1e-8


def test_seminorm_examples():
    x = element_from_function(lambda t: t, DOM)
    assert seminorm(x, 0, CINF) == 1.0
    s = element_from_function(lambda t: np.sin(2 * np.pi * t), DOM, q=1,
                              derivatives=[lambda t: 2 * np.pi * np.cos(2 * np.pi * t)])
    # dense-grid oracle: max |x'| on a grid ten times finer
    fine = np.linspace(0, 1, 10 * 1024 + 1)
    oracle = np.max(np.abs(2 * np.pi * np.cos(2 * np.pi * fine)))
    assert abs(seminorm(s, 1, CINF) - oracle) <= 1e-6


def test_seminorm_window_and_order_errors():
    x = CqElement(1, DOM, [0.0], np.ones(DOM.n_points))
    with pytest.raises(OrderOutOfRange):
        seminorm(x, 0, SeminormFamily(SpaceKind.CQ_INTERVAL, q=3))
    with pytest.raises(DomainCoverageError):
        seminorm(x, 2, SeminormFamily(SpaceKind.CINF_LINE))


def test_line_family_windows():
    d = GridInterval(-3.0, 3.0, 601)
    x = element_from_function(lambda t: t, d)
    fam = SeminormFamily(SpaceKind.CINF_LINE)
    assert seminorm(x, 1, fam) == pytest.approx(1.0)
    assert seminorm(x, 3, fam) == pytest.approx(3.0)


def test_metric_constant_one_vs_zero():
    one = CqElement(0, DOM, [], np.ones(DOM.n_points))
    m = FrechetMetric(CINF, k_max=40)
    # geometric-series oracle: sum_{k<=40} 2^-k * 1/2
    assert abs(metric(one, one.zeros_like(), m) - sum(0.5 * 2.0 ** -k for k in range(41))) < 1e-15
    assert abs(metric(one, one.zeros_like(), m) - 1.0) <= 1e-9


def test_metric_rejects_short_truncation():
    with pytest.raises(ValueError):
        FrechetMetric(CINF, k_max=10, tail_tolerance=1e-12)


def test_metric_shape_mismatch():
    a = CqElement(0, DOM, [], np.zeros(DOM.n_points))
    b = CqElement(1, DOM, [0.0], np.zeros(DOM.n_points))
    with pytest.raises(ShapeMismatch):
        metric(a, b, FrechetMetric(CINF))


def test_anchor_construction_matches_values():
    x = element_from_derivatives(2, DOM, [0.3, -0.2], np.cos(DOM.points), anchor=0.5)
    i = DOM.index_of(0.5)
    assert x.derivative(0)[i] == pytest.approx(0.3, abs=1e-14)
    assert x.derivative(1)[i] == pytest.approx(-0.2, abs=1e-14)


def test_json_round_trip(tmp_path):
    x = random_element(np.random.default_rng(0), DOM, 2, 1.0)
    path = tmp_path / "x.json"
    path.write_text(json.dumps(element_to_json(x)))
    y = element_from_json(path)
    assert y.q == 2 and y.domain == DOM
    np.testing.assert_array_equal(y.top_samples, x.top_samples)


def test_write_csv(tmp_path):
    p = tmp_path / "x.csv"
    write_csv(p, DOM.points[:3], np.array([1.0, 2.0, 3.0]))
    assert p.read_text().splitlines()[0] == "t,value"


def test_elements_are_immutable():
    x = CqElement(0, DOM, [], np.zeros(DOM.n_points))
    with pytest.raises(ValueError):
        x.top_samples[0] = 1.0


elements = st.builds(lambda seed, q, mag: random_element(np.random.default_rng(seed),
                                                         GridInterval(0.0, 1.0, 129), q, mag),
                     st.integers(0, 2 ** 32 - 1), st.integers(0, 3), st.floats(0.01, 100.0))


@settings(max_examples=40, deadline=None)
@given(elements, st.integers(0, 2 ** 32 - 1))
def test_triangle_inequality(x, seed):
    y = random_element(np.random.default_rng(seed), x.domain, x.q, 3.0)
    for k in range(x.q + 1):
        assert seminorm(x + y, k, CINF) <= seminorm(x, k, CINF) + seminorm(y, k, CINF) + 1e-9


@settings(max_examples=40, deadline=None)
@given(elements, st.floats(-50.0, 50.0))
def test_homogeneity(x, c):
    for k in range(x.q + 1):
        assert seminorm(x * c, k, CINF) == pytest.approx(abs(c) * seminorm(x, k, CINF),
                                                         rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(elements)
def test_monotone_in_level(x):
    values = [seminorm(x, k, CINF) for k in range(x.q + 2)]
    assert all(a <= b for a, b in zip(values, values[1:]))


@settings(max_examples=30, deadline=None)
@given(elements, st.integers(0, 2 ** 32 - 1))
def test_metric_axioms(x, seed):
    y = random_element(np.random.default_rng(seed), x.domain, x.q, 1.0)
    m = FrechetMetric(CINF, k_max=40)
    assert metric(x, x, m) == 0.0
    assert metric(x, y, m) == pytest.approx(metric(y, x, m), abs=1e-15)
    assert 0.0 <= metric(x, y, m) < 2.0


@settings(max_examples=30, deadline=None)
@given(elements, st.integers(0, 2 ** 32 - 1))
def test_derivative_is_linear(x, seed):
    y = random_element(np.random.default_rng(seed), x.domain, x.q, 1.0)
    for j in range(x.q + 1):
        np.testing.assert_allclose((x + y * 2.0).derivative(j),
                                   x.derivative(j) + 2.0 * y.derivative(j), atol=1e-9)
