"""Verification suites over seeded samples.

Each suite returns a :class:`SuiteResult` with its measured maxima and the
thresholds they were held to. Thresholds scale with one base tolerance
(default ``1e-8``) so a single ``--tol`` tightens or loosens every suite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import flows, gelfand_tsetlin as gt, invariants, lenard, poisson
from .charts import DEFAULT_MARGIN, PointSampler
from .errors import CPnError
from .fields import elementary_field, registry_field

BASE_TOL = 1e-8

# threshold = scale * base tolerance
SCALES = {
    "schouten": 1.0,
    "schouten_fd": 100.0,
    "involution": 10.0,
    "elementary_spread": 0.1,
    "bivector_form": 1.0,
    "gt_residual": 1.0,
    "gt_subleading": 1.0,
    "closedness": 100.0,
    "cosine": 1.0,
    "drift": 100.0,
    "period": 100.0,
}


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "metrics": self.metrics,
               "thresholds": self.thresholds}
        if self.error:
            out["error"] = self.error
        return out


def thresholds(tol: float = BASE_TOL) -> dict[str, float]:
    return {k: v * tol for k, v in SCALES.items()}


def schouten_suite(n, sampler, samples, tol=BASE_TOL) -> SuiteResult:
    th = thresholds(tol)
    pinf, ps = poisson.make_pi_inf(n), poisson.make_pi_s(n)
    m = {"inf_s": 0.0, "inf_s_fd": 0.0, "inf_inf": 0.0, "inf_inf_fd": 0.0, "s_s": 0.0}
    for p in sampler.sample_many(n, samples):
        m["inf_s"] = max(m["inf_s"], poisson.schouten(pinf, ps, p).max_abs())
        m["inf_s_fd"] = max(m["inf_s_fd"], poisson.schouten(pinf, ps, p, analytic=False).max_abs())
        m["inf_inf"] = max(m["inf_inf"], poisson.schouten(pinf, pinf, p).max_abs())
        m["inf_inf_fd"] = max(m["inf_inf_fd"], poisson.schouten(pinf, pinf, p, analytic=False).max_abs())
        m["s_s"] = max(m["s_s"], poisson.schouten(ps, ps, p).max_abs())
    ok = (max(m["inf_s"], m["inf_inf"], m["s_s"]) < th["schouten"]
          and max(m["inf_s_fd"], m["inf_inf_fd"]) < th["schouten_fd"])
    return SuiteResult("schouten", ok, m, {"analytic": th["schouten"], "fd": th["schouten_fd"]})


def involution_suite(n, sampler, samples, tol=BASE_TOL, pencils: int = 3) -> SuiteResult:
    th = thresholds(tol)["involution"]
    pairs = [tuple(float(v) for v in sampler.rng.uniform(-2.0, 2.0, size=2)) for _ in range(pencils)]
    rep = invariants.involution_suite(sampler.sample_many(n, samples), pairs)
    m = {"max_bracket_s": rep.max_bracket_s, "max_bracket_b": rep.max_bracket_b,
         "max_bracket_pencil": rep.max_bracket_pencil, "pencils": [list(p) for p in pairs]}
    ok = max(rep.max_bracket_s, rep.max_bracket_b, rep.max_bracket_pencil) < th
    return SuiteResult("involution", ok, m, {"bracket": th})


def elementary_suite(n, sampler, samples, tol=BASE_TOL) -> SuiteResult:
    th = thresholds(tol)["elementary_spread"]
    rep = invariants.verify_elementary_theorem(sampler.sample_many(n, max(samples, 2)), tol=th,
                                               raise_on_fail=False)
    worst = max(max(rep.spread), max(rep.pairing_spread))
    return SuiteResult("elementary", worst < th, rep.to_dict() | {"max_spread": worst}, {"spread": th})


def bivector_form_suite(n, sampler, samples, tol=BASE_TOL) -> SuiteResult:
    th = thresholds(tol)["bivector_form"]
    pinf = poisson.make_pi_inf(n)
    worst = 0.0
    for p in sampler.sample_many(n, samples):
        worst = max(worst, float(np.max(np.abs(poisson.bruhat_via_q_route(p) - pinf.matrix(p)))))
    return SuiteResult("bivector_form", worst < th, {"max_q_route_deviation": worst}, {"deviation": th})


def parse_convention(text: str):
    if text == "auto":
        return gt.ALL_CONVENTIONS
    if text == "literal":
        return gt.LITERAL_CONVENTIONS
    chain, _, order = text.partition("/")
    if chain not in gt.CHAINS or order not in gt.ORDERS:
        raise ValueError(f"unknown convention {text!r}; use auto, literal or CHAIN/order "
                         f"with CHAIN in {gt.CHAINS} and order in {gt.ORDERS}")
    return ((chain, order),)


def gelfand_tsetlin_suite(n, sampler, samples, tol=BASE_TOL, convention: str = "auto") -> SuiteResult:
    th = thresholds(tol)
    frames = [gt.random_unitary(n + 1, rng=sampler.rng) for _ in range(samples)]
    conventions = parse_convention(convention)
    rep = gt.verify_mu_formula(frames, tol=th["gt_residual"], conventions=conventions, raise_on_fail=False)
    matched_classes = [cls for cls in rep.classes if any(lbl in rep.matched for lbl in cls)]
    literal = gt.verify_mu_formula(frames, tol=th["gt_residual"], conventions=gt.LITERAL_CONVENTIONS,
                                   raise_on_fail=False)
    m = rep.to_dict() | {"literal_conventions_matched": literal.matched}
    ok = (len(matched_classes) == 1 and rep.max_subleading < th["gt_subleading"] and rep.interlacing)
    return SuiteResult("gelfand_tsetlin", ok, m,
                       {"residual": th["gt_residual"], "subleading": th["gt_subleading"]})


def lenard_suite(n, sampler, samples, tol=BASE_TOL) -> SuiteResult:
    th = thresholds(tol)
    pts = sampler.sample_many(n, samples)
    main = lenard.run_chain("e-sum", registry_field("e-sum", n), n, pts)
    degenerate = lenard.run_chain("x-sum", registry_field("x-sum", n), n, pts)
    m = {
        "residuals": main.residuals, "ratios": main.ratios, "rank": main.rank,
        "min_cosine": main.min_cosine, "involution_max": main.involution_max,
        "vf_parallelism": main.vf_parallelism, "degenerate_rank": degenerate.rank,
        "degenerate_min_cosine": degenerate.min_cosine,
    }
    ok = (max(main.residuals, default=0.0) < th["closedness"]
          and main.min_cosine > 1.0 - th["cosine"]
          and main.rank == n and degenerate.rank == 1
          and main.involution_max < thresholds(tol)["involution"])
    return SuiteResult("lenard", ok, m, {"closedness": th["closedness"], "cosine": 1.0 - th["cosine"]})


def flows_suite(n, sampler, samples, tol=BASE_TOL, T: float = 10.0, dt: float = 1e-3) -> SuiteResult:
    th = thresholds(tol)
    start = sampler.sample(n)
    structures = (poisson.make_pi_s(n), poisson.make_pi_inf(n))
    drift = {}
    for j in range(1, n + 1):
        for P in structures:
            traj = flows.integrate(elementary_field(n, j), P, start, T, dt)
            drift[f"e_{j}/{P.name}"] = flows.elementary_drift(traj)
    f1 = flows.integrate(registry_field("f1", n), structures[0], start, T, dt)
    period = flows.torus_period_check(f1)
    values = flows.fixed_point_values(n)
    consecutive = sorted(values) == [float(v) for v in range(n + 1)]
    m = {"drift": drift, "max_drift": max(drift.values()), "periods": period.to_dict(),
         "fixed_point_values": values}
    period_err = max([period.max_period_error] + [r for r in period.return_error if r == r])
    ok = m["max_drift"] < th["drift"] and period_err < th["period"] and period.x_drift == 0.0 and consecutive
    return SuiteResult("flows", ok, m, {"drift": th["drift"], "period": th["period"]})


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "schouten": schouten_suite,
    "involution": involution_suite,
    "elementary": elementary_suite,
    "bivector_form": bivector_form_suite,
    "gelfand_tsetlin": gelfand_tsetlin_suite,
    "lenard": lenard_suite,
    "flows": flows_suite,
}


def run_all(n: int, seed: int = 0, samples: int = 100, tol: float = BASE_TOL,
            margin: float = DEFAULT_MARGIN, convention: str = "auto",
            T: float = 10.0, dt: float = 1e-3) -> list[SuiteResult]:
    """Run every suite in a fixed order from one seeded generator."""
    sampler = PointSampler(seed, margin)
    out = []
    for name, suite in SUITES.items():
        kwargs = {}
        if name == "gelfand_tsetlin":
            kwargs["convention"] = convention
        if name == "flows":
            kwargs.update(T=T, dt=dt)
        try:
            out.append(suite(n, sampler, samples, tol, **kwargs))
        except CPnError as exc:
            out.append(SuiteResult(name, False, error=f"{type(exc).__name__}: {exc}"))
    return out
