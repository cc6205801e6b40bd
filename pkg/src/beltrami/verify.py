"""Verification suites per catalog case and the JSON report they feed.

Every catalog recipe has a suite chosen by its kind.  A handful of extra
cases cover the coordinate hypothesis, the harmonic pairs, the vector
identity for ``grad chi x grad pi``, the characteristics solver and the
spherical pole behaviour.  Cases run in sorted order with per-case seeds,
so a report depends only on its manifest.
"""
from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import asdict, dataclass, replace
from typing import Callable

import numpy as np

from . import __version__
from .calculus import (ROUNDOFF_FLOOR, ResidualReport, StencilConfig, boundary_tangency,
                       case_seed, check_hamiltonian_structure, check_mhd_system,
                       check_prop5_identity, reduce_residuals, residual_beltrami,
                       residual_curl_transport, residual_divergence, residual_force_balance,
                       residual_geometric_conditions, residual_proportionality,
                       residual_rescaled_alignment, residual_speed_transport,
                       residual_transport, singularity_scan)
from .catalog import RECIPES, build_case, euler_cyl_div_corrected
from .characteristics import Grid2D, SeedCurve, solve_characteristics
from .charts import CATALOG_ORDERINGS, CHARTS, check_theorem1_hypothesis
from .fields import Scalar
from .flow import curl_field, invariant_drift, pick_seed, trace_field_line
from .harmonic import pair_catalog, verify_cauchy_riemann

STENCIL_TOL = 1e-6
GC_TOL = 1e-10
HYPOTHESIS_TOL = 1e-8
DRIFT_TOL = 1e-6
CURL_DRIFT_TOL = 1e-4
TANGENCY_TOL = 1e-12
SPEED_TOL = 1e-9
CROSS_TOL = 1e-5
CHAR_TOL = 1e-4
DRIFT_DS = 1e-2
DRIFT_STEPS = 1000

# (tau, eta, phi) box for the toroidal negative control
TOROIDAL_BOX = ((0.05, 0.95), (0.0, 1.0), (-1.0, 1.0))
# native-coordinate boxes for the positive hypothesis checks
HYPOTHESIS_BOXES = {
    "cartesian": ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)),
    "cylindrical": ((0.5, 2.0), (-3.0, 3.0), (-1.0, 1.0)),
    "spherical": ((0.5, 2.0), (0.3, np.pi - 0.3), (-3.0, 3.0)),
}


@dataclass(frozen=True)
class VerifyConfig:
    stencil: StencilConfig = StencilConfig()
    tol: float = STENCIL_TOL
    drift_ds: float = DRIFT_DS
    drift_steps: int = DRIFT_STEPS


def _report(case_id, name, values, tol, h=None, expected_failure=False, order=None,
            detail=None):
    mx, l2 = reduce_residuals(values)
    n = int(np.size(values))
    return ResidualReport(case_id, name, mx, l2, n, h, order, tol, expected_failure,
                          detail=dict(detail or {}))


# recipe suites

def _beltrami_suite(f, vc):
    cfg, tol = vc.stencil, vc.tol
    p = f.parts
    pts = f.sample(cfg.n_points, seed=case_seed(f.case_id, cfg.seed))
    return [
        residual_beltrami(f, cfg=cfg, tol=tol),
        residual_divergence(f, cfg=cfg, tol=tol),
        residual_proportionality(f, cfg=cfg, tol=tol),
        residual_geometric_conditions(p["ell"], p["psi"], p["theta"], p["sigma"], p["dsigma"],
                                      pts, tol=GC_TOL, case_id=f.case_id),
    ]


def _generalized_suite(f, vc):
    cfg, tol = vc.stencil, vc.tol
    return [
        residual_force_balance(f, cfg=cfg, tol=tol),
        residual_speed_transport(f, cfg=cfg, tol=tol),
        residual_divergence(f, cfg=cfg, tol=tol, reference=f.analytic_div),
        residual_rescaled_alignment(f, cfg=cfg, tol=tol),
    ]


def _mhd_suite(f, vc):
    cfg, tol = vc.stencil, vc.tol
    return [
        residual_force_balance(f, cfg=cfg, tol=tol),
        residual_transport(f, f.pressure, cfg=cfg, tol=tol),
        residual_curl_transport(f, f.pressure, cfg=cfg, tol=tol),
        check_mhd_system(f, cfg=cfg, tol=tol),
    ]


def _euler_suite(f, vc):
    cfg, tol = vc.stencil, vc.tol
    out = [residual_force_balance(f, cfg=cfg, tol=tol)]
    if f.case_id == "euler-cyl":
        # the printed closed form is off; the corrected one is checked separately
        out.append(residual_divergence(f, cfg=cfg, tol=tol, reference=f.analytic_div,
                                       expected_failure=True))
        out.append(residual_divergence(f, cfg=cfg, tol=tol, reference=euler_cyl_div_corrected,
                                       check_name="divergence-corrected"))
    else:
        out.append(residual_divergence(f, cfg=cfg, tol=tol, reference=f.analytic_div))
    out.append(check_hamiltonian_structure(f, cfg=cfg, tol=tol))
    return out


_SUITES = {"beltrami": _beltrami_suite, "generalized": _generalized_suite,
           "mhd": _mhd_suite, "euler": _euler_suite}


def drift_reports(f, vc: VerifyConfig, seed: int = 0) -> list[ResidualReport]:
    """Relative invariant drift for each declared invariant, traced inside the box.

    The trace at ``ds/2`` gives the step-halving ratio, stored in ``detail``.
    MHD cases also trace the numerically curled field and check ``P`` there.
    """
    s0 = pick_seed(f, seed=case_seed(f.case_id, seed))
    ds, n = vc.drift_ds, vc.drift_steps
    t1 = trace_field_line(f, s0, ds, n, stay_in_box=True)
    t2 = trace_field_line(f, s0, ds / 2, 2 * n, stay_in_box=True)
    m = min(t1.n_steps, t2.n_steps // 2)
    out = []
    for name, inv in f.invariants.items():
        v = np.asarray(inv(t1.points), dtype=float)
        rel = np.abs(v - v[0]) / max(1.0, abs(float(v[0])))
        d1 = float(np.max(np.abs(v[: m + 1] - v[0])))
        v2 = np.asarray(inv(t2.points[: 2 * m + 1]), dtype=float)
        d2 = float(np.max(np.abs(v2 - v2[0])))
        ratio = d1 / d2 if d2 > ROUNDOFF_FLOOR else None
        out.append(_report(f.case_id, f"drift:{name}", rel, DRIFT_TOL, h=ds, detail={
            "steps": t1.n_steps, "status": t1.status, "ratio": ratio,
            "seed": s0.tolist()}))
    if f.kind == "mhd":
        c = curl_field(f, vc.stencil.h)
        tc = trace_field_line(c, s0, ds, n, stay_in_box=True)
        d = invariant_drift(tc, f.pressure)
        v = np.asarray(f.pressure(tc.points), dtype=float)
        rel = np.abs(v - v[0]) / max(1.0, abs(float(v[0])))
        out.append(_report(f.case_id, "curl-drift:P", rel, CURL_DRIFT_TOL, h=ds,
                           detail={"steps": tc.n_steps, "status": tc.status,
                                   "max_drift": d.max_drift}))
    return out


def recipe_suite(case_id: str, vc: VerifyConfig = VerifyConfig(), drift: bool = True):
    f = build_case(case_id)
    out = _SUITES[f.kind](f, vc)
    if drift:
        out += drift_reports(f, vc, seed=vc.stencil.seed)
    return out


# extra cases

def hypothesis_report(chart_name, ordering, box, expected_failure=False, seed=0,
                      case_id=None, h=1e-4):
    res = check_theorem1_hypothesis(CHARTS[chart_name], ordering, box, n_samples=256,
                                    tol=HYPOTHESIS_TOL, h=h, seed=seed)
    cid = case_id or f"{chart_name}-hypothesis"
    return ResidualReport(cid, "metric-hypothesis", res.max_violation, res.max_violation,
                          res.n_samples, h, None, HYPOTHESIS_TOL, expected_failure,
                          detail={"passes": res.passes})


def _hypothesis_case(chart_name):
    def run(vc):
        return [hypothesis_report(chart_name, CATALOG_ORDERINGS[chart_name],
                                  HYPOTHESIS_BOXES[chart_name],
                                  seed=case_seed(chart_name, vc.stencil.seed))]
    return run


def _toroidal_case(vc):
    return [hypothesis_report("toroidal", ("tau", "eta", "phi"), TOROIDAL_BOX,
                              expected_failure=True,
                              seed=case_seed("toroidal-hypothesis", vc.stencil.seed))]


def _harmonic_case(vc):
    out = []
    for pair in pair_catalog():
        region = ((0.5, 1.5), (-1.0, 1.0)) if pair.name == "poisson-kernel" else ((-1.0, 1.0),) * 2
        seed = case_seed("harmonic-pairs:" + pair.name, vc.stencil.seed)
        r = verify_cauchy_riemann(pair, region, h=vc.stencil.h, n=256, seed=seed)
        r2 = verify_cauchy_riemann(pair, region, h=vc.stencil.h / 2, n=256, seed=seed)
        order = None
        if vc.stencil.richardson and r > ROUNDOFF_FLOOR and r2 > ROUNDOFF_FLOOR:
            order = float(np.log2(r / r2))
        out.append(ResidualReport("harmonic-pairs", f"cauchy-riemann:{pair.name}", r, r, 256,
                                  vc.stencil.h, order, vc.tol))
    return out


def random_polynomial(rng: np.random.Generator, degree: int = 3) -> Scalar:
    """Polynomial in ``x, y, z`` of total degree ``<= degree``, coefficients in [-1, 1]."""
    exps = [e for e in itertools.product(range(degree + 1), repeat=3) if sum(e) <= degree]
    E = np.array(exps)
    c = rng.uniform(-1.0, 1.0, len(exps))

    def f(p):
        p = np.asarray(p, dtype=float)
        return np.prod(p[..., None, :] ** E, axis=-1) @ c

    def g(p):
        p = np.asarray(p, dtype=float)[..., None, :]
        out = []
        for k in range(3):
            Ek = E.copy()
            Ek[:, k] = np.maximum(E[:, k] - 1, 0)
            out.append(np.prod(p ** Ek, axis=-1) @ (c * E[:, k]))
        return np.stack(out, axis=-1)
    return Scalar(f, g, name="poly")


def cross_gradient_reports(vc: VerifyConfig, n_pairs: int = 20, n_points: int = 200):
    rng = np.random.default_rng(case_seed("cross-gradient", vc.stencil.seed))
    cfg = replace(vc.stencil, n_points=n_points)
    box = ((1.0, 2.0),) * 3
    out = []
    for k in range(n_pairs):
        chi, pi = random_polynomial(rng), random_polynomial(rng)
        r = check_prop5_identity(chi, pi, box, cfg, tol=CROSS_TOL, case_id="cross-gradient")
        r.check_name = f"cross-gradient-identity:{k:02d}"
        out.append(r)
    return out


def _xy_pressure():
    return Scalar(lambda q: q[..., 0] * q[..., 1],
                  lambda q: np.stack([q[..., 1], q[..., 0]], axis=-1), "P")


def _exp_pressure():
    return Scalar(lambda q: np.exp(q[..., 0]) * np.sin(q[..., 1]),
                  lambda q: np.exp(q[..., 0])[..., None]
                  * np.stack([np.sin(q[..., 1]), np.cos(q[..., 1])], axis=-1), "P")


def characteristics_problems():
    """``(name, P, seed curve, grid, trace box, grad of the closed-form C)``."""
    xy = ("characteristics-xy", _xy_pressure(),
          SeedCurve(lambda t: np.stack([np.cos(t), np.sin(t)], axis=-1), 0.0, np.pi / 2),
          Grid2D(0.5, 1.0, 0.5, 1.0, 21, 21), (0.05, 1.5, 0.05, 1.5),
          lambda q: np.stack([-q[..., 0], q[..., 1]], axis=-1))
    # seed on the level set P = 1: x = -log(sin y)
    ex = ("characteristics-exp", _exp_pressure(),
          SeedCurve(lambda t: np.stack([-np.log(np.sin(t)), t], axis=-1), 0.15, np.pi / 2),
          Grid2D(0.0, 1.0, 0.2, 1.2, 21, 21), (-1.0, 2.5, 0.1, 1.55),
          lambda q: np.exp(q[..., 0])[..., None]
          * np.stack([np.cos(q[..., 1]), -np.sin(q[..., 1])], axis=-1))
    return [xy, ex]


def characteristics_reports(vc: VerifyConfig):
    out = []
    for name, P, seed, grid, box, gC_closed in characteristics_problems():
        res = solve_characteristics(P, seed, grid, trace_box=box)
        nodes = grid.nodes()[1:-1, 1:-1].reshape(-1, 2)
        gc = res.gradient(nodes, h=vc.stencil.h)
        gp = P.grad(nodes)
        transport = np.abs(np.sum(gc * gp, axis=-1))
        cp = gC_closed(nodes)
        det = np.abs(gc[:, 0] * cp[:, 1] - gc[:, 1] * cp[:, 0])
        det /= np.linalg.norm(gc, axis=-1) * np.linalg.norm(cp, axis=-1)
        out.append(_report(name, "grad-P-dot-grad-C", transport, CHAR_TOL, h=vc.stencil.h))
        out.append(_report(name, "rank-one-jacobian", det, CHAR_TOL, h=vc.stencil.h))
    return out


def _characteristics_case(vc):
    return characteristics_reports(vc)


def spherical_reports(vc: VerifyConfig):
    f = build_case("spherical-fig1")
    cid = "spherical-singularity"
    tang = boundary_tangency(f, 1.0, 1000, seed=case_seed(cid, vc.stencil.seed))
    scan = singularity_scan(f, thetas=np.geomspace(np.pi / 2, 1e-4, 60))
    L = scan[:, 3]
    steps = np.diff(L)
    # rows run toward the pole, so |L_R| must strictly increase
    non_increasing = np.maximum(0.0, -steps) + (steps == 0)
    return [
        ResidualReport(cid, "boundary-tangency", tang, tang, 1000, None, None, TANGENCY_TOL),
        _report(cid, "pole-speed-profile", scan[:, 2] - 1.0, SPEED_TOL),
        _report(cid, "L_R-monotone", non_increasing, 1e-300,
                detail={"difference": float(L[-1] - L[0])}),
    ]


def _negative_gc_case(vc):
    """(ell, 2 psi) breaks the equal-scale condition and must fail."""
    f = build_case("cartesian-linear")
    p = f.parts
    psi2 = Scalar(lambda q: 2 * p["psi"](q), lambda q: 2 * p["psi"].grad(q), "2psi")
    pts = f.sample(vc.stencil.n_points, seed=case_seed("gc-negative-control", vc.stencil.seed))
    return [residual_geometric_conditions(p["ell"], psi2, p["theta"], p["sigma"], p["dsigma"],
                                          pts, tol=GC_TOL, case_id="gc-negative-control",
                                          expected_failure=True)]


EXTRA_CASES: dict[str, Callable] = {
    "cartesian-hypothesis": _hypothesis_case("cartesian"),
    "cylindrical-hypothesis": _hypothesis_case("cylindrical"),
    "spherical-hypothesis": _hypothesis_case("spherical"),
    "toroidal-hypothesis": _toroidal_case,
    "harmonic-pairs": _harmonic_case,
    "cross-gradient": cross_gradient_reports,
    "characteristics": _characteristics_case,
    "spherical-singularity": spherical_reports,
    "gc-negative-control": _negative_gc_case,
}


def all_case_ids() -> list[str]:
    return sorted(list(RECIPES) + list(EXTRA_CASES))


def resolve_cases(selector: str | list[str]) -> list[str]:
    sel = [selector] if isinstance(selector, str) else list(selector)
    if "all" in sel:
        return all_case_ids()
    unknown = [c for c in sel if c not in RECIPES and c not in EXTRA_CASES]
    if unknown:
        raise KeyError(f"unknown case(s): {', '.join(unknown)}")
    return sorted(set(sel))


def run_case(case_id: str, vc: VerifyConfig = VerifyConfig()) -> list[ResidualReport]:
    if case_id in RECIPES:
        return recipe_suite(case_id, vc)
    return EXTRA_CASES[case_id](vc)


def timestamp() -> str:
    """ISO-8601 UTC time from ``SOURCE_DATE_EPOCH``, else the epoch itself."""
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(epoch))


def manifest(command: str, case_ids, vc: VerifyConfig) -> dict:
    return {
        "command": command,
        "case_ids": list(case_ids),
        "cfg": dict(asdict(vc.stencil), tol=vc.tol),
        "seed": vc.stencil.seed,
        "version": __version__,
        "timestamp": timestamp(),
    }


def run_verify(selector="all", vc: VerifyConfig = VerifyConfig(), command: str = "verify"):
    """Run the selected cases; returns ``(report dict, all reports)``."""
    ids = resolve_cases(selector)
    reports = []
    for cid in ids:
        reports += run_case(cid, vc)
    doc = {"manifest": manifest(command, ids, vc),
           "results": [r.to_dict() for r in reports]}
    return doc, reports


def report_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def exit_code(reports) -> int:
    return 0 if all(r.ok for r in reports) else 1


__all__ = ["VerifyConfig", "EXTRA_CASES", "TOROIDAL_BOX", "all_case_ids", "resolve_cases",
           "run_case", "run_verify", "recipe_suite", "drift_reports", "report_json",
           "exit_code", "manifest", "random_polynomial", "characteristics_problems",
           "spherical_reports", "cross_gradient_reports", "hypothesis_report"]
