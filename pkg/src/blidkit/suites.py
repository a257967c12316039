"""Verification suites: named groups of cases built on the library operations.

Each group gets its own generator seeded from ``(seed, crc32(group_id))``, so
results do not depend on the worker count or on scheduling order.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import __version__
from .blid import (PointwiseBlid, ProjectedBlid, Projector, RadialBlid, SegmentBlid,
                   TaylorIntegralBlid, blid_bound_certificate, blid_scaled,
                   local_identity_check, minimal_scaled_level, scaled_containment_check)
from .bump import BumpFunction, PlaneBump
from .cohomology import (LinearAuto, Unsolvable, build_Ln, residual_order_check, solve_order,
                         solve_truncated)
from .config import SuiteConfig
from .differentiability import (DEFAULT_STEPS, DirectionalProbe, bounded_diff_test,
                                default_directions, quadratic_map, step_map)
from .extension import (agreement_check, boundedness_check, reciprocal_global, extend,
                        make_germ, sample_ball)
from .function_space import CqElement, GridInterval, random_element
from .jets import HomPoly, JetSequence, borel_realize, derivative_tolerance, jet_verify
from .linearization import (CutoffParams, default_cutoff, jacobian, op_norm, split_bound_check,
                            verify_cutoff_bounds)
from .report import FLOAT_FORMAT, Case, Report

__all__ = ["Context", "Outcome", "SUITE_NAMES", "SERIES_COLUMNS", "run_suite", "suite_groups",
           "load_matrix", "load_jets", "fixture_path", "make_blid", "group_rng"]

SUITE_NAMES = ("verify-blid", "extend", "borel", "cohomology", "linearize-cutoff")

SERIES_COLUMNS = {
    "bounds": ("k", "observed", "bound"),
    "remainder_quadratic": ("log_t", "log_max_remainder"),
    "boundedness": ("stratum", "sup_value", "sup_derivative"),
    "derivatives": ("degree", "expected", "observed"),
    "residual": ("log_s", "log_residual"),
    "derivative_profile": ("x", "norm_Df_tilde", "abs_f_tilde"),
}
SUITE_SERIES = {
    "verify-blid": ("bounds", "remainder_quadratic"),
    "extend": ("boundedness",),
    "borel": ("derivatives",),
    "cohomology": ("residual",),
    "linearize-cutoff": ("derivative_profile",),
}


@dataclass
class Context:
    config: SuiteConfig
    rng: np.random.Generator

    @property
    def bump(self) -> BumpFunction:
        return BumpFunction(self.config.bump["r_inner"], self.config.bump["r_outer"])

    @property
    def domain(self) -> GridInterval:
        return GridInterval(0.0, 1.0, self.config.grid_points)

    def tol(self, key: str) -> float:
        return self.config.tolerances[key]

    def n(self, key: str) -> int:
        return self.config.samples[key]


@dataclass
class Outcome:
    cases: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


Group = tuple[str, Callable[[Context], Outcome]]


# Fixtures ------------------------------------------------------------------------

def fixture_path(name: str) -> Path:
    return Path(str(resources.files("blidkit") / "data" / name))


def load_matrix(path: str | Path | None, default: str = "matrix_scalar2.json") -> LinearAuto:
    path = fixture_path(default) if path is None else Path(path)
    record = json.loads(path.read_text())
    if isinstance(record, dict):
        record = record["matrix"]
    return LinearAuto(np.atleast_2d(np.asarray(record, dtype=float)))


def load_jets(path: str | Path | None, default: str) -> JetSequence:
    return JetSequence.from_json(fixture_path(default) if path is None else Path(path))


def make_blid(kind: str, bump: BumpFunction):
    if kind == "pointwise":
        return PointwiseBlid(bump)
    if kind == "taylor_integral":
        return TaylorIntegralBlid(0, bump)
    if kind == "radial":
        return RadialBlid(bump)
    if kind == "scaled":
        return blid_scaled(0.5, bump)
    raise ValueError(f"unknown blid kind {kind!r}")


def _const(domain: GridInterval, q: int, value: float) -> CqElement:
    return CqElement(q, domain, np.full(q, value), np.full(domain.n_points, value))


# verify-blid -----------------------------------------------------------------------

def _blid_zoo(bump: BumpFunction, domain: GridInterval):
    """Every constructed blid with an input sampler, an off-plateau base and a direction fixer.

    Entries: ``name -> (H, sample(rng, radius), base, fix_direction)``.
    """
    sym = GridInterval(-1.0, 1.0, domain.n_points)
    even = Projector.even_part()
    zoo = {
        "pointwise": (PointwiseBlid(bump), lambda rng, r: sample_ball(rng, domain, 0.999 * r),
                      _const(domain, 0, 0.4), None),
        "radial": (RadialBlid(bump), _radial_sample, np.array([0.4, 0.0, 0.0]), None),
        "segment": (SegmentBlid(_const(domain, 0, 0.0), PlaneBump.constant_band(-0.2, 0.2, 0.1),
                                bump),
                    lambda rng, r: sample_ball(rng, domain, 0.999 * r), _const(domain, 0, 0.25),
                    None),
        "projected_even": (ProjectedBlid(even, PointwiseBlid(bump), "image"),
                           lambda rng, r: even(sample_ball(rng, sym, 0.999 * r)),
                           _const(sym, 0, 0.4), even),
    }
    for k in (1, 2, 3):
        zoo[f"taylor_k{k}"] = (TaylorIntegralBlid(k, bump),
                               lambda rng, r, k=k: random_element(rng, domain, k, 0.999 * r),
                               _const(domain, k, 0.4), None)
    Hc = blid_scaled(0.5, bump)
    zoo["scaled_c0.5"] = (Hc, lambda rng, r: random_element(rng, domain, Hc.k, 0.999 * r),
                          _const(domain, Hc.k, 0.4 / Hc.scale), None)
    return zoo


def _radial_sample(rng: np.random.Generator, r: float) -> np.ndarray:
    v = rng.normal(size=3)
    return 0.999 * r * rng.uniform() * v / np.linalg.norm(v)


def _local_identity_group(name: str) -> Group:
    def run(ctx: Context) -> Outcome:
        H, sample, _, _ = _blid_zoo(ctx.bump, ctx.domain)[name]
        err = local_identity_check(H, ctx.n("local_identity"), ctx.rng, sample)
        return Outcome([Case(f"blid.local_identity.{name}", "max |H(x) - x| on the plateau", err,
                             ctx.tol("local_identity"))])
    return f"blid.local_identity.{name}", run


def _bound_group(k: int) -> Group:
    def run(ctx: Context) -> Outcome:
        cert = blid_bound_certificate(TaylorIntegralBlid(k, ctx.bump), sample_count=ctx.n("bound"),
                                      rng=ctx.rng, domain=ctx.domain, raise_on_failure=False)
        case = Case(f"blid.bound.taylor_k{k}", f"max ||H_{k}(x)||_{k} vs a e^{k}",
                    cert.observed_max, cert.bound, "<",
                    witness=None if cert.passed else {"sup_norm": cert.witness.sup_norm()})
        return Outcome([case], {"bounds": [[k, cert.observed_max, cert.bound]]},
                       {f"bound_k{k}": cert.to_json()})
    return f"blid.bound.taylor_k{k}", run


def level_oracle(c: float) -> int:
    """Smallest integer above ``1 - ln c / ln 2``, by counting up."""
    k = 0
    while not k > 1.0 - math.log(c) / math.log(2.0):
        k += 1
    return k


def _scaled_group(c: float) -> Group:
    def run(ctx: Context) -> Outcome:
        Hc = blid_scaled(c, ctx.bump)
        worst, witness = scaled_containment_check(Hc, ctx.n("containment"), ctx.rng, ctx.domain,
                                                  ctx.config.k_max)
        return Outcome([
            Case(f"blid.scaled.level_c{c}", "selected level k", minimal_scaled_level(c),
                 level_oracle(c), "=="),
            Case(f"blid.scaled.containment_c{c}", "max d(H_c(x), 0)", worst, c, "<",
                 witness=None if worst < c else {"sup_norm": witness.sup_norm()}),
        ])
    return f"blid.scaled.c{c}", run


def _diff_case(case_id: str, report, ctx: Context, expect_fail: bool = False) -> Case:
    return Case(case_id, f"{report.notion} remainder log-log slope", report.slope,
                ctx.tol("min_slope"), ">=", expect_fail=expect_fail,
                status="" if expect_fail else ("pass" if report.passed else "fail"),
                detail=None if report.passed or expect_fail
                else f"final ratio {report.ratios[-1]:.3g}")


def _blid_diff_group(name: str) -> Group:
    def run(ctx: Context) -> Outcome:
        H, _, base, fix = _blid_zoo(ctx.bump, ctx.domain)[name]
        zero = base * 0.0
        dirs = default_directions(zero, ctx.rng, 20, 5)
        if fix is not None:
            dirs = [d * (1.0 / d.sup_norm()) for d in (fix(d) for d in dirs) if d.sup_norm() > 0]
        # At 0 the blid is the identity, so the remainder vanishes once t h is on the
        # plateau.  Steps follow the plateau radius, the length scale of the map.
        steps = tuple(s * min(1.0, H.local_radius) for s in DEFAULT_STEPS)
        at_zero = bounded_diff_test(H.apply, DirectionalProbe(zero, dirs, steps, lambda h: h, "0"))
        off_steps = tuple(s * min(1.0, 3.0 * H.local_radius) for s in DEFAULT_STEPS)
        off = bounded_diff_test(H.apply, DirectionalProbe(base, dirs, off_steps,
                                                          lambda h: H.derivative(base, h), "x0"))
        return Outcome([_diff_case(f"blid.differentiability.{name}.base0", at_zero, ctx),
                        _diff_case(f"blid.differentiability.{name}.off_plateau", off, ctx)],
                       details={f"diff_{name}": {"base0": at_zero.to_json(),
                                                 "off_plateau": off.to_json()}})
    return f"blid.differentiability.{name}", run


def _quadratic_group(ctx: Context) -> Outcome:
    F, DF = quadratic_map(3)
    x0 = ctx.rng.normal(size=3)
    dirs = default_directions(x0, ctx.rng, 20, 5)
    rep = bounded_diff_test(F, DirectionalProbe(x0, dirs, DEFAULT_STEPS, DF(x0), "x0"))
    rows = [[math.log(t), math.log(r)] for t, r in zip(rep.steps, rep.ratios) if r > 0]
    return Outcome([_diff_case("blid.differentiability.quadratic_map", rep, ctx)],
                   {"remainder_quadratic": rows}, {"diff_quadratic": rep.to_json()})


def _step_control_group(ctx: Context) -> Outcome:
    dirs = default_directions(np.zeros(1), ctx.rng, 20, 5)
    rep = bounded_diff_test(step_map, DirectionalProbe(np.zeros(1), dirs, DEFAULT_STEPS,
                                                       lambda h: np.zeros(1), "0"))
    return Outcome([_diff_case("blid.differentiability.step_control", rep, ctx, expect_fail=True)],
                   details={"diff_step_control": rep.to_json()})


def _verify_blid_groups() -> list:
    names = ("pointwise", "radial", "segment", "projected_even", "taylor_k1", "taylor_k2",
             "taylor_k3", "scaled_c0.5")
    groups = [_local_identity_group(n) for n in names]
    groups += [_bound_group(k) for k in range(4)]
    groups += [_scaled_group(c) for c in (0.5, 0.1, 0.01)]
    groups += [_blid_diff_group(n) for n in names]
    groups += [("blid.differentiability.quadratic_map", _quadratic_group),
               ("blid.differentiability.step_control", _step_control_group)]
    return groups


# extend ------------------------------------------------------------------------------

def _extend_agreement(ctx: Context) -> Outcome:
    germ = ctx.config.extend["germ"]
    F = extend(make_germ(germ), make_blid(ctx.config.extend["blid"], ctx.bump))
    rep = agreement_check(F, ctx.n("agreement"), ctx.rng, ctx.domain,
                          radius=0.9 * F.agreement_radius, tolerance=ctx.tol("agreement"))
    return Outcome([Case(f"extend.{germ}.agreement", "max |F(x) - f(x)| near 0",
                         rep.max_deviation, rep.tolerance)],
                   details={"agreement": rep.to_json()})


def _extend_reciprocal(ctx: Context) -> Outcome:
    F = reciprocal_global(ctx.bump)
    t = ctx.domain.points
    two = CqElement(0, ctx.domain, [], np.full_like(t, 2.0))
    quarter = CqElement(0, ctx.domain, [], t / 4.0)
    oracle = 4.0 * math.log(4.0 / 3.0)
    return Outcome([
        Case("extend.reciprocal.constant_two", "|F(x = 2) - 1|", abs(float(F(two)[0].real) - 1.0),
             0.0),
        Case("extend.reciprocal.linear_quarter", "|F(t/4) - 4 ln(4/3)|",
             abs(float(F(quarter)[0].real) - oracle), ctx.tol("closed_form")),
    ])


def _extend_boundedness(ctx: Context) -> Outcome:
    germ = ctx.config.extend["germ"]
    blid = make_blid(ctx.config.extend["blid"], ctx.bump)
    F = extend(make_germ(germ), blid)
    value_bound = 1.0 / (1.0 - blid.image_bound) + 1e-9 if germ == "reciprocal" else None
    rep = boundedness_check(F, (1,), ctx.n("boundedness"), ctx.rng, ctx.domain,
                            value_bound=value_bound, max_growth=ctx.tol("growth"))
    cases = [Case(f"extend.{germ}.derivative_growth", "sup |DF| growth across strata",
                  rep.growth_ratio[1], ctx.tol("growth"))]
    if value_bound is not None:
        cases.append(Case(f"extend.{germ}.sup_value", "sup |F| over unbounded inputs",
                          max(rep.sup_value), value_bound))
    rows = [[R, v, d] for R, v, d in zip(rep.strata, rep.sup_value, rep.sup_derivatives[1])]
    return Outcome(cases, {"boundedness": rows}, {"boundedness": rep.to_json()})


def _extend_groups() -> list:
    return [("extend.agreement", _extend_agreement), ("extend.reciprocal", _extend_reciprocal),
            ("extend.boundedness", _extend_boundedness)]


# borel -------------------------------------------------------------------------------

def _borel_directions(d: int, rng: np.random.Generator) -> list:
    if d == 1:
        return [np.array([1.0]), np.array([-1.0]), np.array([0.5])]
    dirs = [np.eye(d)[i] for i in range(d)] + [-np.eye(d)[0]]
    for _ in range(2):
        v = rng.normal(size=d)
        dirs.append(v / np.linalg.norm(v))
    return dirs


def _borel_group(ctx: Context) -> Outcome:
    jets = load_jets(ctx.config.borel["jets"], "jets_factorial.json")
    f = borel_realize(jets, RadialBlid(ctx.bump), rng=ctx.rng)
    d = jets.dimension
    dirs = _borel_directions(d, ctx.rng)
    rep = jet_verify(f, jets, dirs)
    cases, rows = [], []
    for j in range(len(jets)):
        mine = [r for r in rep.rows if r["degree"] == j]
        cases.append(Case(f"borel.derivative.j{j}", f"relative error of derivative {j} at 0",
                          max(r["error"] for r in mine), derivative_tolerance(j)))
        first = mine[0]
        rows.append([j, first["expected"], first["observed"]])

    R = 1000.0
    if d == 1:
        pts = [np.array([s]) for s in np.linspace(-R, R, 20001)]
    else:
        pts = [R * u * v / np.linalg.norm(v) for u, v in
               zip(ctx.rng.uniform(size=4000), ctx.rng.normal(size=(4000, d)))]
    sup = max(float(abs(f(p))) for p in pts)
    bound = f.bound * (1.0 + ctx.tol("borel_margin"))
    cases.append(Case("borel.global_bound", "sup |f| over |x| <= 1000", sup, bound))

    near = [0.99 * f.identity_radius * s * v for v in dirs for s in np.linspace(-1, 1, 21)]
    dev = max(float(abs(f(p) - jets.taylor_polynomial(p))) / max(1.0, float(abs(f(p))))
              for p in near)
    cases.append(Case("borel.taylor_agreement", "relative |f - Taylor polynomial| near 0",
                      dev, 1e-12))
    return Outcome(cases, {"derivatives": rows},
                   {"borel": {"epsilons": f.epsilons, "bound": f.bound,
                              "identity_radius": f.identity_radius, "jet_report": rep.to_json()}})


# cohomology --------------------------------------------------------------------------

def _cohom_exact(ctx: Context) -> Outcome:
    A = LinearAuto([[2.0]])
    cases = []
    for n in (1, 2):
        Q = solve_order(A, n, HomPoly(1, n, [1.0]))
        oracle = 1.0 / (2.0 ** n - 1.0)
        cases.append(Case(f"cohomology.exact.degree{n}", f"|Q_{n} - 1/(2^{n} - 1)|",
                          abs(float(Q.coefficients[0].real) - oracle), ctx.tol("coefficient")))
    return Outcome(cases)


def _cohom_resonance(ctx: Context) -> Outcome:
    A = load_matrix(None, "matrix_resonant.json")
    P = load_jets(None, "jets_resonant.json")[2]
    try:
        solve_order(A, 2, P)
        found, witness = 0, None
    except Unsolvable as exc:
        found = int((1, 1) in exc.resonances)
        witness = {"resonances": [list(a) for a in exc.resonances]}
    return Outcome([Case("cohomology.resonance_detection",
                         "Unsolvable raised with resonance (1,1)", found, 1, "==",
                         witness=witness)])


def _match_error(a: np.ndarray, b: np.ndarray) -> float:
    cost = np.abs(a[:, None] - b[None, :]) / np.maximum(1.0, np.abs(b))[None, :]
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def _cohom_eigen(ctx: Context) -> Outcome:
    worst, witness = 0.0, None
    for _ in range(ctx.n("eigen_trials")):
        d = int(ctx.rng.integers(1, 4))
        n = int(ctx.rng.integers(1, 5))
        M = ctx.rng.normal(size=(d, d))
        lam = np.linalg.eigvals(M)
        brute = []
        for alpha in _all_multi_indices(d, n):
            brute.append(np.prod([lam[i] ** alpha[i] for i in range(d)]))
        got = np.linalg.eigvals(build_Ln(LinearAuto(M), n).matrix)
        err = _match_error(got, np.array(brute))
        if err > worst:
            worst, witness = err, {"d": d, "n": n, "matrix": M.tolist()}
    return Outcome([Case("cohomology.eigenvalue_law", "max |eig(L_n) - lambda^alpha|",
                         worst, ctx.tol("eigenvalue"),
                         witness=witness if worst > ctx.tol("eigenvalue") else None)])


def _all_multi_indices(d: int, n: int):
    """All ``alpha`` with ``|alpha| = n`` by brute enumeration (independent of the library)."""
    return [a for a in itertools.product(range(n + 1), repeat=d) if sum(a) == n]


def _cohom_solve(ctx: Context) -> Outcome:
    cfg = ctx.config.cohomology
    A = load_matrix(cfg["matrix"])
    f = load_jets(cfg["jets"], "jets_cubic.json")
    m = cfg["order"]
    if f.dimension != A.dimension:
        raise ValueError(f"jets have dimension {f.dimension}, matrix {A.dimension}")
    entries = list(f.entries[:m + 1])
    while len(entries) < m + 1:
        entries.append(HomPoly.zero(A.dimension, len(entries)))
    case_id = f"cohomology.solve.order{m}"
    details = {"matrix": A.matrix.tolist(), "order": m}
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            g = solve_truncated(A, JetSequence(tuple(entries)))
    except Unsolvable as exc:
        res = [list(a) for a in exc.resonances]
        details.update({"Q": None, "resonances": res, "residual_report": None})
        return Outcome([Case(case_id, "Unsolvable", math.nan, m + 0.5, ">=", status="fail",
                             detail=str(exc), witness={"degree": exc.degree, "resonances": res})],
                       details={"solution": details})
    rep = residual_order_check(g, A, f, m, ctx.rng)
    details.update({"Q": g.to_json(), "resonances": [], "residual_report": rep.to_json(),
                    "warnings": [str(w.message) for w in caught]})
    if rep.mode == "exact":
        case = Case(case_id, "max residual (f is a polynomial of degree <= m)",
                    max(max(r) for r in rep.residuals), 1e-12)
    else:
        case = Case(case_id, "residual log-log slope", rep.slope, m + 0.5, ">=")
    logs = np.log(rep.scales)
    rows = [[float(s), math.log(r)] for s, r in zip(logs, rep.residuals[0]) if r > 0]
    return Outcome([case], {"residual": rows}, {"solution": details})


def _cohomology_groups() -> list:
    return [("cohomology.exact", _cohom_exact), ("cohomology.resonance", _cohom_resonance),
            ("cohomology.eigenvalue_law", _cohom_eigen), ("cohomology.solve", _cohom_solve)]


# linearize-cutoff --------------------------------------------------------------------

def _linearize_group(ctx: Context) -> Outcome:
    cfg = ctx.config.linearize
    ft = default_cutoff(cfg["map"], cfg["delta"], ctx.bump)
    params = CutoffParams(cfg["delta"], cfg["alpha"], cfg["epsilon"], M=cfg["M"])
    rep = verify_cutoff_bounds(ft, params, ctx.n("linearize"), ctx.rng)
    d = ft.f.Lambda.dimension
    split = split_bound_check(ft.H, cfg["delta"], cfg["epsilon"], ctx.n("linearize"), ctx.rng, d)
    w = rep.witnesses
    cases = [
        Case("linearize.agreement", "max |f~ - f| on |x| < delta r_inner", rep.agreement_error,
             ctx.tol("cutoff_agreement")),
        Case("linearize.S1", "sup |Df~|", rep.S1, rep.bound1,
             witness=w["S1"].tolist() if "S1" in w else None),
        Case("linearize.S2", "sup |Df~(x)| / |x|^alpha", rep.S2, rep.bound2,
             witness=w["S2"].tolist() if "S2" in w else None),
        Case("linearize.exterior", "sup |f~| vs sup of |f| on the delta c0 ball",
             rep.exterior_sup, rep.exterior_bound),
        Case("linearize.split_small", "|delta H(x/delta)| / |x| below epsilon", split.small_max,
             split.c1 + 0.1),
        Case("linearize.split_large", "|delta H(x/delta)| / |x| above epsilon", split.large_max,
             split.c0 / split.epsilon),
    ]
    rows = []
    e = np.zeros(d)
    e[0] = 1.0
    for s in np.linspace(-20 * cfg["delta"], 20 * cfg["delta"], 201):
        x = s * e
        rows.append([float(s), op_norm(jacobian(ft, x)), float(np.max(np.abs(ft(x))))])
    return Outcome(cases, {"derivative_profile": rows},
                   {"cutoff_bounds": rep.to_json(), "split": split.to_json()})


# orchestration ------------------------------------------------------------------------

def suite_groups(suite: str) -> list:
    return {"verify-blid": _verify_blid_groups, "extend": _extend_groups,
            "borel": lambda: [("borel", _borel_group)],
            "cohomology": _cohomology_groups,
            "linearize-cutoff": lambda: [("linearize", _linearize_group)]}[suite]()


def group_rng(seed: int, group_id: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(group_id.encode())]))


def _run_group(config: SuiteConfig, group: Group) -> tuple[str, Outcome]:
    gid, func = group
    try:
        out = func(Context(config, group_rng(config.seed, gid)))
    except Exception as exc:  # a failing case must not stop the suite
        out = Outcome([Case.error(gid, exc)])
    return gid, out


def run_suite(config: SuiteConfig, suite: str | None = None) -> Report:
    """Run every case of ``suite`` (default ``config.suite``) and assemble the report."""
    suite = config.suite if suite is None else suite
    names = SUITE_NAMES if suite == "all" else (suite,)
    groups = [(name, g) for name in names for g in suite_groups(name)]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        results = list(pool.map(lambda ng: (ng[0], _run_group(config, ng[1])), groups))

    cases, details = [], {}
    series = {}
    for name in names:
        for s in SUITE_SERIES[name]:
            key = s if suite != "all" else f"{name}.{s}"
            series[key] = {"columns": list(SERIES_COLUMNS[s]), "rows": []}
    for name, (gid, out) in results:
        cases.extend(out.cases)
        if out.details:
            details[gid] = out.details
        for s, rows in out.series.items():
            key = s if suite != "all" else f"{name}.{s}"
            series[key]["rows"].extend(rows)
    metadata = {"seed": config.seed, "config_hash": config.config_hash(),
                "artifact_version": __version__, "float_format": FLOAT_FORMAT}
    return Report(suite, cases, metadata, series, details)
