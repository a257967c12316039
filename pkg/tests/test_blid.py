import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blidkit.blid import (BlidError, CertificateFailure, ConfigurationError, PointwiseBlid,
                          ProjectedBlid, Projector, RadialBlid, ScaledBlid, SegmentBlid,
                          SubspaceMembershipError, TaylorIntegralBlid, WrongSpace,
                          blid_bound_certificate, blid_pointwise, blid_projected, blid_scaled,
                          blid_segment, blid_taylor_integral, local_identity_check,
                          minimal_scaled_level, scaled_containment_check)
from blidkit.bump import BumpFunction, PlaneBump
from blidkit.function_space import (CqElement, GridInterval, SeminormFamily, SpaceKind,
                                    random_element, seminorm)

DOM = GridInterval(0.0, 1.0, 1025)
H = BumpFunction()


def const(value, q=0, dom=DOM):
    return CqElement(q, dom, np.full(q, value), np.full(dom.n_points, value))


def test_pointwise_examples():
    assert np.array_equal(blid_pointwise(H, const(0.2)).values, const(0.2).values)
    assert np.all(blid_pointwise(H, const(0.7)).values == 0.0)
    coarse = GridInterval(0.0, 1.0, 11)
    out = blid_pointwise(H, CqElement(0, coarse, [], coarse.points)).values
    assert out[coarse.index_of(0.2)] == coarse.points[coarse.index_of(0.2)]
    assert out[coarse.index_of(0.6)] == 0.0


def test_pointwise_on_vectors_and_wrong_space():
    np.testing.assert_array_equal(PointwiseBlid().apply(np.array([0.1, -0.2])), [0.1, -0.2])
    with pytest.raises(WrongSpace):
        PointwiseBlid().apply(const(0.1, q=1))


def test_taylor_examples():
    x = CqElement(1, DOM, [0.1], np.zeros(DOM.n_points))
    assert np.array_equal(blid_taylor_integral(H, x, 1).derivative(0), x.derivative(0))
    x = CqElement(1, DOM, [0.0], np.full(DOM.n_points, 2.0))
    assert np.all(blid_taylor_integral(H, x, 1).derivative(0) == 0.0)
    x = CqElement(1, DOM, [0.2], np.full(DOM.n_points, 0.1))
    y = blid_taylor_integral(H, x, 1)
    assert np.array_equal(y.derivative(0), x.derivative(0))
    assert np.array_equal(y.derivative(1), x.derivative(1))


def test_taylor_level_zero_is_pointwise():
    x = random_element(np.random.default_rng(3), DOM, 0, 1.0)
    # the level-0 map is built as x + (G(x) - x): equal up to one rounding
    np.testing.assert_allclose(TaylorIntegralBlid(0).apply(x).values,
                               PointwiseBlid().apply(x).values, rtol=0, atol=1e-16)


def test_taylor_needs_enough_derivatives():
    with pytest.raises(WrongSpace):
        TaylorIntegralBlid(2).apply(const(0.1, q=1))
    with pytest.raises(ValueError):
        TaylorIntegralBlid(-1)


def test_taylor_output_oracle():
    # k = 1 with x' constant: H(x)(t) = G(x(0)) + G(x') t in closed form
    x = CqElement(1, DOM, [0.45], np.full(DOM.n_points, 0.7))
    y = TaylorIntegralBlid(1).apply(x)
    np.testing.assert_allclose(y.derivative(0), H.damp(0.45) + H.damp(0.7) * DOM.points,
                               atol=1e-15)


def test_bound_examples():
    zero = const(0.0, q=2)
    assert seminorm(TaylorIntegralBlid(2).apply(zero), 2,
                    SeminormFamily(SpaceKind.CINF_INTERVAL)) == 0.0
    cert = blid_bound_certificate(TaylorIntegralBlid(0), sample_count=200,
                                  rng=np.random.default_rng(0))
    assert cert.bound == H.sup_hu and cert.observed_max < cert.bound
    cert = blid_bound_certificate(TaylorIntegralBlid(3), sample_count=300,
                                  rng=np.random.default_rng(1))
    assert cert.bound == pytest.approx(H.sup_hu * math.e ** 3)
    assert cert.passed and set(cert.to_json()) == {"kind", "k", "bound", "observed_max",
                                                   "samples", "pass"}


def test_bound_failure_raises_with_witness():
    # corrupt the bump constant so the certificate's bound is far too small
    bump = BumpFunction()
    object.__setattr__(bump, "sup_hu", 1e-3)
    with pytest.raises(CertificateFailure) as info:
        blid_bound_certificate(TaylorIntegralBlid(1, bump), sample_count=20,
                               rng=np.random.default_rng(0))
    assert info.value.witness is not None
    assert not info.value.certificate.passed


@pytest.mark.parametrize("c, k", [(0.5, 3), (0.1, 5), (0.01, 8), (1.0, 2), (0.25, 4)])
def test_minimal_level(c, k):
    # arithmetic oracle: smallest integer strictly above 1 - log2(c)
    assert minimal_scaled_level(c) == k
    assert k > 1 - math.log(c) / math.log(2) >= k - 1


def test_minimal_level_invalid():
    with pytest.raises(ConfigurationError):
        minimal_scaled_level(0.0)
    with pytest.raises(ConfigurationError):
        blid_scaled(1e-20, max_level=10)


@pytest.mark.parametrize("c", [0.5, 0.1])
def test_scaled_containment_and_identity(c):
    Hc = blid_scaled(c)
    assert isinstance(Hc, ScaledBlid) and Hc.image_bound == c
    worst, _ = scaled_containment_check(Hc, 60, np.random.default_rng(0))
    assert worst < c
    x = random_element(np.random.default_rng(1), DOM, Hc.k, 0.9 * Hc.local_radius)
    err = (Hc.apply(x) - x).sup_norm()
    assert err <= 1e-12 * max(1.0, x.sup_norm())


def test_segment_examples():
    y = const(0.0)
    band = PlaneBump.constant_band(-0.2, 0.2, 0.1)
    inside = CqElement(0, DOM, [], 0.15 * np.sin(5 * DOM.points))
    assert np.array_equal(blid_segment(y, band, inside).values, inside.values)
    far = const(3.0)
    assert np.array_equal(blid_segment(y, band, far).values, y.values)
    mixed = CqElement(0, DOM, [], 0.6 * np.sin(7 * DOM.points))
    out = blid_segment(y, band, mixed).values
    # pointwise band-membership oracle: every output point within margin of the band
    assert np.all(np.abs(out) <= 0.2 + 0.1 + 1e-15)


def test_segment_rejects_anchor_outside_band():
    with pytest.raises(BlidError):
        SegmentBlid(const(1.0), PlaneBump.constant_band(-0.2, 0.2, 0.1))


def test_projected_examples():
    x = random_element(np.random.default_rng(0), DOM, 0, 2.0)
    base = PointwiseBlid()
    np.testing.assert_array_equal(blid_projected(Projector.identity(), base, "image", x).values,
                                  base.apply(x).values)
    np.testing.assert_array_equal(blid_projected(Projector.zero(), base, "kernel", x).values,
                                  base.apply(x).values)
    sym = GridInterval(-1.0, 1.0, 1025)
    even = CqElement(0, sym, [], 0.3 * np.cos(3 * sym.points))
    out = blid_projected(Projector.even_part(), base, "image", even)
    np.testing.assert_array_equal(out.values, even.values)


def test_projected_membership_and_idempotency():
    sym = GridInterval(-1.0, 1.0, 101)
    odd = CqElement(0, sym, [], 0.1 * sym.points)
    with pytest.raises(SubspaceMembershipError):
        ProjectedBlid(Projector.even_part(), PointwiseBlid(), "image").apply(odd)
    with pytest.raises(BlidError):
        Projector.from_matrix([[1.0, 1.0], [0.0, 0.5]])
    P = Projector.from_matrix([[1.0, 0.0], [0.0, 0.0]])
    assert P.check_idempotent([np.array([1.0, 2.0])]) == 0.0
    with pytest.raises(ValueError):
        ProjectedBlid(P, PointwiseBlid(), "sideways")


def test_radial_blid():
    R = RadialBlid()
    v = np.array([0.1, 0.2, -0.1])
    assert np.array_equal(R.apply(v), v)
    assert np.all(R.apply(np.array([3.0, 0.0, 0.0])) == 0.0)
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.normal(size=3) * rng.uniform(0, 2)
        assert np.linalg.norm(R.apply(x)) <= R.image_bound + 1e-15


def test_local_identity_check_reports_zero():
    rng = np.random.default_rng(0)
    err = local_identity_check(
        PointwiseBlid(), 50, rng,
        lambda g, r: CqElement(0, DOM, [], g.uniform(-r, r, size=DOM.n_points)))
    assert err == 0.0


@pytest.mark.parametrize("blid", [PointwiseBlid(), TaylorIntegralBlid(2)])
def test_derivative_matches_difference_quotient(blid):
    q = 0 if isinstance(blid, PointwiseBlid) else 2
    rng = np.random.default_rng(4)
    x = random_element(rng, DOM, q, 0.45, rough=False)
    v = random_element(rng, DOM, q, 1.0, rough=False)
    s = 1e-6
    fd = (blid.apply(x + v * s) - blid.apply(x - v * s)) * (0.5 / s)
    assert (fd - blid.derivative(x, v)).sup_norm() <= 1e-5


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 0.333))
def test_pointwise_identity_property(seed, r):
    x = CqElement(0, DOM, [], np.random.default_rng(seed).uniform(-r, r, DOM.n_points))
    assert np.array_equal(PointwiseBlid().apply(x).values, x.values)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 3), st.floats(0.1, 1000.0))
def test_taylor_bound_property(seed, k, mag):
    x = random_element(np.random.default_rng(seed), DOM, k, mag)
    H_k = TaylorIntegralBlid(k)
    assert seminorm(H_k.apply(x), k, SeminormFamily(SpaceKind.CINF_INTERVAL)) < H_k.image_bound
