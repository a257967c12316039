"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear inline) or
``pytest -s`` to see them without the verbose test names.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from blidkit.blid import (PointwiseBlid, TaylorIntegralBlid, blid_bound_certificate,
                          blid_scaled, minimal_scaled_level, scaled_containment_check)
from blidkit.bump import BumpFunction
from blidkit.cohomology import (LinearAuto, Unsolvable, build_Ln, residual_order_check,
                                solve_order, solve_truncated)
from blidkit.config import SuiteConfig
from blidkit.extension import agreement_check, reciprocal_global, sample_ball
from blidkit.function_space import CqElement, GridInterval, random_element
from blidkit.jets import HomPoly, JetSequence, borel_realize, jet_verify
from blidkit.linearization import (CutoffParams, default_cutoff, split_bound_check, verify_cutoff_bounds)
from blidkit.suites import Context, group_rng, run_suite, suite_groups

DOMAIN = GridInterval(0.0, 1.0, 1025)


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for a criterion, then assert it."""
    def report(number, title, ok, elapsed, limit, detail):
        ok = bool(ok) and (limit is None or elapsed < limit)
        timing = f"{elapsed:.2f}s" + ("" if limit is None else f" (limit {limit}s)")
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title}; {detail}; {timing}")
        assert ok, f"criterion {number} failed: {detail}, {timing}"
    return report


def bump_constant_oracle():
    """sup h(u) u by dense sampling on the transition region."""
    u = np.linspace(0.0, 0.5, 2_000_001)
    return float(np.max(BumpFunction()(u) * u))


def test_criterion_1_local_identity(verdict):
    start = time.perf_counter()
    H = PointwiseBlid()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(200):
        x = sample_ball(rng, DOMAIN, 1.0 / 3.0)
        assert x.sup_norm() <= 1.0 / 3.0
        worst = max(worst, float(np.max(np.abs(H.apply(x).top_samples - x.top_samples))))
    verdict(1, "pointwise blid is the identity on the 1/3 ball", worst <= 1e-12,
            time.perf_counter() - start, 5, f"max error {worst:.3g} <= 1e-12")


def test_criterion_2_bound(verdict):
    start = time.perf_counter()
    a = bump_constant_oracle()
    rng = np.random.default_rng(2)
    rows, ok = [], True
    for k in range(4):
        cert = blid_bound_certificate(TaylorIntegralBlid(k), sample_count=1000, rng=rng,
                                      domain=DOMAIN, raise_on_failure=False)
        bound = a * math.e ** k
        # the certificate's own bound must be the computed constant
        ok &= abs(cert.bound - bound) <= 1e-9 * bound and cert.samples == 1000
        ok &= cert.observed_max < bound
        rows.append(f"k={k}: {cert.observed_max:.4g} < {bound:.4g}")
    verdict(2, "||H_k(x)||_k < a e^k", ok, time.perf_counter() - start, 60, ", ".join(rows))


def test_criterion_3_scaled(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    rows, ok = [], True
    for c, expected in ((0.5, 3), (0.1, 5), (0.01, 8)):
        k = minimal_scaled_level(c)
        ok &= k == expected and k > 1 - math.log(c) / math.log(2) >= k - 1
        worst, _ = scaled_containment_check(blid_scaled(c), 500, rng, DOMAIN)
        ok &= worst < c
        rows.append(f"c={c}: k={k}, max d={worst:.3g}")
    verdict(3, "scaled blid level and containment", ok, time.perf_counter() - start, 60,
            ", ".join(rows))


def test_criterion_4_reciprocal(verdict):
    start = time.perf_counter()
    F = reciprocal_global()
    t = DOMAIN.points
    agree = agreement_check(F, 200, np.random.default_rng(4), DOMAIN, radius=0.3)
    # direct germ oracle: 1/(1 - x) integrated with composite Simpson weights
    w = np.ones(DOMAIN.n_points)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    x = 0.3 * np.cos(5 * t)
    direct = DOMAIN.spacing / 3.0 * float(w @ (1.0 / (1.0 - x)))
    direct_err = abs(F(CqElement(0, DOMAIN, [], x))[0] - direct)
    two = float(F(CqElement(0, DOMAIN, [], np.full_like(t, 2.0)))[0])
    quarter_err = abs(F(CqElement(0, DOMAIN, [], t / 4))[0] - 4 * math.log(4 / 3))
    a = bump_constant_oracle()
    rng = np.random.default_rng(5)
    sup = 0.0
    for i in range(1000):
        mag = 10.0 ** rng.uniform(-1, 6)
        sup = max(sup, abs(F(random_element(rng, DOMAIN, 0, mag, rough=bool(i % 2)))[0]))
    ok = (agree.max_deviation <= 1e-10 and direct_err <= 1e-10 and two == 1.0
          and quarter_err <= 1e-8 and sup <= 1 / (1 - a) + 1e-9)
    verdict(4, "reciprocal-integral germ extension", ok, time.perf_counter() - start, None,
            f"agreement {agree.max_deviation:.3g}, F(2)={two!r}, t/4 error {quarter_err:.3g}, "
            f"sup |F| {sup:.6f} <= {1 / (1 - a) + 1e-9:.6f}")


def test_criterion_5_borel(verdict):
    start = time.perf_counter()
    J = JetSequence(tuple(HomPoly(1, j, [float(math.factorial(j))]) for j in range(6)))
    f = borel_realize(J, rng=np.random.default_rng(6))
    rep = jet_verify(f, J, [np.array([1.0])])
    ok, errs = True, []
    for row in rep.rows:
        j = row["degree"]
        err = abs(row["observed"] - math.factorial(j)) / math.factorial(j)
        ok &= err <= (1e-3 if j <= 4 else 1e-2)
        errs.append(f"{err:.2g}")
    bound = 1.0 + sum(2.0 ** -j for j in range(1, 6))
    sup = max(abs(f(np.array([s]))) for s in np.linspace(-1000, 1000, 20001))
    ok &= sup <= 1.1 * bound
    verdict(5, "Borel realization of j! x^j", ok, time.perf_counter() - start, 30,
            f"relative errors [{', '.join(errs)}], sup {sup:.4g} <= {1.1 * bound:.4g}")


def brute_eigenvalues(M, n):
    lam = np.linalg.eigvals(M)
    return np.array([np.prod(lam ** np.array(al))
                     for al in itertools.product(range(n + 1), repeat=len(lam)) if sum(al) == n])


def test_criterion_6_cohomology(verdict):
    start = time.perf_counter()
    A = LinearAuto([[2.0]])
    e1 = abs(solve_order(A, 1, HomPoly(1, 1, [1.0])).coefficients[0] - 1.0)
    e2 = abs(solve_order(A, 2, HomPoly(1, 2, [1.0])).coefficients[0] - 1.0 / 3.0)
    try:
        solve_order(LinearAuto(np.diag([2.0, 0.5])), 2, HomPoly.from_dict(2, 2, {"(1,1)": 1.0}))
        resonant = False
    except Unsolvable as exc:
        resonant = exc.resonances == [(1, 1)]
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        d, n = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        M = rng.normal(size=(d, d))
        got = np.linalg.eigvals(build_Ln(LinearAuto(M), n).matrix)
        want = brute_eigenvalues(M, n)
        cost = np.abs(got[:, None] - want[None, :]) / np.maximum(1, np.abs(want))[None, :]
        r, c = linear_sum_assignment(cost)
        worst = max(worst, float(cost[r, c].max()))
    f = JetSequence.from_dicts(1, [{}, {"(1)": 1.0}, {"(2)": 1.0}, {"(3)": 1.0}])
    g = solve_truncated(A, JetSequence(f.entries[:3]))
    rep = residual_order_check(g, A, f, 2)
    # independent residual: g(2s) - g(s) - f(s) from the returned coefficients
    q1, q2 = (float(g[n].coefficients[0].real) for n in (1, 2))
    s = np.logspace(-1, -3, 9)
    resid = np.abs(2 * q1 * s + 4 * q2 * s ** 2 - q1 * s - q2 * s ** 2 - (s + s ** 2 + s ** 3))
    slope = np.polyfit(np.log(s), np.log(resid), 1)[0]
    ok = (e1 <= 1e-12 and e2 <= 1e-12 and resonant and worst <= 1e-6
          and rep.slope >= 2.5 and slope >= 2.5)
    verdict(6, "cohomological equation", ok, time.perf_counter() - start, 60,
            f"coefficient errors {e1:.2g}/{e2:.2g}, resonance (1,1) {resonant}, "
            f"eigenvalue error {worst:.2g}, residual slope {rep.slope:.3f} (oracle {slope:.3f})")


def test_criterion_7_linearization(verdict):
    start = time.perf_counter()
    delta = 0.1
    ft = default_cutoff("quadratic", delta)
    xs = np.linspace(-delta / 3, delta / 3, 2001)[1:-1]
    agree = max(abs(ft(np.array([s]))[0] - s * s) for s in xs)
    rng = np.random.default_rng(8)
    split = split_bound_check(ft.H, delta, 0.5, rng=rng)
    rep = verify_cutoff_bounds(ft, CutoffParams(delta, alpha=1.0, epsilon=0.5, M=2.0, m=split.m), rng=rng)
    c0, c1 = ft.c0, ft.c1
    s2_bound = 2.0 * c1 * split.m
    ext_bound = (delta * c0) ** 2
    ext = max(abs(ft(np.array([s]))[0]) for s in np.linspace(-10, 10, 40001))
    ok = agree <= 1e-12 and rep.S2 <= s2_bound and ext <= ext_bound
    verdict(7, "cutoff of 2x + x^2 at delta 0.1", ok, time.perf_counter() - start, 30,
            f"agreement {agree:.2g}, S2 {rep.S2:.4g} <= {s2_bound:.4g}, "
            f"exterior {ext:.4g} <= {ext_bound:.4g}")


def test_criterion_8_differentiability(verdict):
    start = time.perf_counter()
    cfg = SuiteConfig.from_mapping({"seed": 8})
    cases = []
    for gid, run in suite_groups("verify-blid"):
        if gid.startswith("blid.differentiability."):
            cases.extend(run(Context(cfg, group_rng(cfg.seed, gid))).cases)
    by_id = {c.case_id: c for c in cases}
    base0 = [c for c in cases if c.case_id.endswith(".base0")]
    quad = by_id["blid.differentiability.quadratic_map"]
    step = by_id["blid.differentiability.step_control"]
    ok = (len(base0) == 8 and all(c.observed >= 0.9 for c in base0) and quad.observed >= 0.9
          and step.observed < 0.9)
    verdict(8, "differentiability proxies", ok, time.perf_counter() - start, 30,
            f"quadratic slope {quad.observed:.3f}, {len(base0)} blids at 0 with min slope "
            f"{min(c.observed for c in base0)}, step-map slope {step.observed:.3f} (must fail)")


def test_criterion_9_determinism(verdict):
    start = time.perf_counter()
    cfg = SuiteConfig.from_mapping({"seed": 42})
    first = run_suite(cfg, "all").dumps()
    second = run_suite(cfg, "all").dumps()
    verdict(9, "all suite twice with seed 42", first == second, time.perf_counter() - start,
            None, f"{len(first)} bytes, identical={first == second}")
