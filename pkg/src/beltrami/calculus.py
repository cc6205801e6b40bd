"""Central-difference operators and residual suites.

Operators take a scalar or vector evaluator and an array of points with
shape ``(..., 3)``.  If the evaluator carries a ``defined`` predicate
(``VectorFieldEval``, ``Domain``-backed scalars) every stencil point is
checked against it and :class:`StencilEscape` is raised on violation.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .errors import DegeneratePair, StencilEscape

ROUNDOFF_FLOOR = 1e-11
EPS_ALIGN = 1e-30
IRROTATIONAL = 1e-8
_EYE = np.eye(3)


@dataclass(frozen=True)
class StencilConfig:
    h: float = 1e-4
    scheme: str = "central-2nd"
    richardson: bool = False
    n_points: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.scheme != "central-2nd":
            raise ValueError(f"unsupported scheme {self.scheme!r}")

    def halved(self) -> "StencilConfig":
        return replace(self, h=self.h / 2)


DEFAULT = StencilConfig()


@dataclass
class ResidualReport:
    case_id: str
    check_name: str
    max_residual: float
    l2_residual: float
    n_points: int
    h: float | None
    order_estimate: float | None = None
    tolerance: float = 1e-6
    expected_failure: bool = False
    flags: tuple = ()
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual < self.tolerance)

    @property
    def ok(self) -> bool:
        """True when the outcome is the expected one."""
        return self.passed != self.expected_failure

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "check_name": self.check_name,
            "max_residual": float(self.max_residual),
            "l2_residual": float(self.l2_residual),
            "h": None if self.h is None else float(self.h),
            "n_points": int(self.n_points),
            "order_estimate": None if self.order_estimate is None else float(self.order_estimate),
            "pass": self.passed,
            "expected_failure": bool(self.expected_failure),
        }


def case_seed(case_id: str, seed: int = 0) -> int:
    return int(seed) + zlib.crc32(case_id.encode())


def reduce_residuals(values) -> tuple[float, float]:
    """Order-independent max and root-mean-square of residual samples."""
    v = np.sort(np.abs(np.asarray(values, dtype=float)).ravel())
    if v.size == 0:
        return 0.0, 0.0
    return float(v[-1]), float(np.sqrt(np.sum(v * v) / v.size))


def order_estimate(r_h: float, r_half: float, floor: float = ROUNDOFF_FLOOR):
    """``log2(r_h / r_half)`` when both residuals sit above the roundoff floor."""
    if r_h <= floor or r_half <= floor:
        return None
    return float(np.log2(r_h / r_half))


# operators

def _call(f, p):
    return np.asarray(f(p), dtype=float)


def _check(f, pts, h):
    pred = getattr(f, "defined", None)
    if pred is None:
        return
    ok = pred(pts)
    if not np.all(ok):
        bad = np.asarray(pts)[~ok]
        raise StencilEscape(f"stencil point {bad[0].tolist()} (step {h:g}) leaves the "
                            "cleared domain", point=bad[0])


def _stencil(p, h):
    p = np.asarray(p, dtype=float)
    plus = p[..., None, :] + h * _EYE
    minus = p[..., None, :] - h * _EYE
    return plus, minus


def grad(f: Callable, p, cfg: StencilConfig = DEFAULT):
    h = cfg.h
    plus, minus = _stencil(p, h)
    _check(f, plus, h)
    _check(f, minus, h)
    return (_call(f, plus) - _call(f, minus)) / (2 * h)


def jacobian(v: Callable, p, cfg: StencilConfig = DEFAULT):
    """``J[..., i, j] = d v_i / d x_j``."""
    h = cfg.h
    plus, minus = _stencil(p, h)
    _check(v, plus, h)
    _check(v, minus, h)
    d = (_call(v, plus) - _call(v, minus)) / (2 * h)  # (..., j, i)
    return np.swapaxes(d, -1, -2)


def _curl_from_j(J):
    return np.stack([J[..., 2, 1] - J[..., 1, 2],
                     J[..., 0, 2] - J[..., 2, 0],
                     J[..., 1, 0] - J[..., 0, 1]], axis=-1)


def curl(v: Callable, p, cfg: StencilConfig = DEFAULT):
    return _curl_from_j(jacobian(v, p, cfg))


def div(v: Callable, p, cfg: StencilConfig = DEFAULT):
    return np.trace(jacobian(v, p, cfg), axis1=-2, axis2=-1)


def laplacian(f: Callable, p, cfg: StencilConfig = DEFAULT):
    h = cfg.h
    plus, minus = _stencil(p, h)
    _check(f, plus, h)
    _check(f, minus, h)
    f0 = _call(f, np.asarray(p, dtype=float))
    return np.sum(_call(f, plus) + _call(f, minus), axis=-1) / h**2 - 6 * f0 / h**2


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _norm(a):
    return np.linalg.norm(a, axis=-1)


# residual suites

def sample_points(field, cfg: StencilConfig, case_id: str | None = None, pad: float | None = None):
    cid = case_id or getattr(field, "case_id", "adhoc")
    pad = 4 * cfg.h if pad is None else pad
    return field.sample(cfg.n_points, seed=case_seed(cid, cfg.seed), pad=pad)


def _points(field, region, cfg):
    if region is None:
        return sample_points(field, cfg)
    return np.asarray(region, dtype=float)


def _run(case_id, check_name, fn, pts, cfg, tol, expected_failure=False, flags=(), detail=None):
    """Evaluate per-point residuals ``fn(pts, cfg)`` (and at h/2 if requested)."""
    vals = fn(pts, cfg)
    mx, l2 = reduce_residuals(vals)
    order = None
    if cfg.richardson:
        mx2, _ = reduce_residuals(fn(pts, cfg.halved()))
        order = order_estimate(mx, mx2)
        detail = dict(detail or {}, max_residual_half=mx2)
    return ResidualReport(case_id, check_name, mx, l2, len(pts), cfg.h, order, tol,
                          expected_failure, tuple(flags), detail or {})


def alignment_residual(field, pts, cfg: StencilConfig = DEFAULT):
    """Per-point ``|w x curl w| / (|w| |curl w| + eps)`` and the curl norm."""
    w = field(pts)
    c = curl(field, pts, cfg)
    nc = _norm(c)
    r = _norm(np.cross(w, c)) / (_norm(w) * nc + EPS_ALIGN)
    return np.where(nc < IRROTATIONAL, 0.0, r), nc


def residual_beltrami(field, region=None, cfg: StencilConfig = DEFAULT, tol: float = 1e-6,
                      case_id: str | None = None) -> ResidualReport:
    """Normalized alignment residual of the Beltrami condition.

    Points where ``|curl w| < 1e-8`` count as 0 and the report carries the
    ``irrotational`` flag.  The divergence is reported by
    :func:`residual_divergence`.
    """
    pts = _points(field, region, cfg)
    _, nc = alignment_residual(field, pts, cfg)
    flags = ("irrotational",) if np.all(nc < IRROTATIONAL) else ()
    return _run(case_id or field.case_id, "beltrami-alignment",
                lambda q, c: alignment_residual(field, q, c)[0], pts, cfg, tol, flags=flags)


def residual_divergence(field, region=None, cfg: StencilConfig = DEFAULT, tol: float = 1e-6,
                        reference: Callable | None = None, case_id: str | None = None,
                        check_name: str | None = None, expected_failure: bool = False
                        ) -> ResidualReport:
    """``|div w - reference|`` (reference defaults to 0)."""
    pts = _points(field, region, cfg)
    ref = np.zeros(len(pts)) if reference is None else np.asarray(reference(pts), dtype=float)
    name = check_name or ("divergence" if reference is None else "divergence-closed-form")
    return _run(case_id or field.case_id, name, lambda q, c: div(field, q, c) - ref,
                pts, cfg, tol, expected_failure=expected_failure)


def _grad_of(s, pts, cfg):
    if getattr(s, "has_grad", False):
        return s.grad(pts)
    return grad(s, pts, cfg)


def _w2(field):
    def f(p):
        w = field(p)
        return _dot(w, w)
    f.defined = getattr(field, "defined", None)
    if f.defined is None:
        del f.defined
    return f


def residual_force_balance(field, pressure=None, kappa: float | None = None, region=None,
                           cfg: StencilConfig = DEFAULT, tol: float = 1e-6,
                           case_id: str | None = None) -> ResidualReport:
    """``|w x curl w - grad(P + kappa w^2)| / scale`` per point.

    ``scale = max(1, max |grad P|, max |kappa grad w^2|)`` over the samples, so
    the report passes when the absolute residual is below ``tol * scale``.
    ``pressure=None`` means ``P = 0``.
    """
    pressure = field.pressure if pressure is None else pressure
    kappa = field.kappa if kappa is None else kappa
    pts = _points(field, region, cfg)
    w2 = _w2(field)

    def parts(q, c):
        w = field(q)
        lhs = np.cross(w, curl(field, q, c))
        gP = np.zeros_like(lhs) if pressure is None else _grad_of(pressure, q, c)
        gk = kappa * grad(w2, q, c) if kappa else np.zeros_like(lhs)
        return lhs, gP, gk

    _, gP, gk = parts(pts, cfg)
    scale = float(max(1.0, np.max(_norm(gP)), np.max(_norm(gk))))

    def fn(q, c):
        lhs, gp, g = parts(q, c)
        return _norm(lhs - gp - g) / scale

    return _run(case_id or field.case_id, "force-balance", fn, pts, cfg, tol,
                detail={"scale": scale})


def residual_transport(field, scalar, region=None, cfg: StencilConfig = DEFAULT,
                       tol: float = 1e-6, name: str | None = None, case_id: str | None = None,
                       along: Callable | None = None) -> ResidualReport:
    """``|v . grad f|`` with ``v = w`` (or ``along``) and ``f`` a scalar."""
    pts = _points(field, region, cfg)
    vec = field if along is None else along

    def fn(q, c):
        return _dot(vec(q), _grad_of(scalar, q, c))
    nm = name or f"transport-{getattr(scalar, 'name', 'f')}"
    return _run(case_id or field.case_id, nm, fn, pts, cfg, tol)


def residual_curl_transport(field, scalar, region=None, cfg: StencilConfig = DEFAULT,
                            tol: float = 1e-6, name: str | None = None,
                            case_id: str | None = None) -> ResidualReport:
    """``|curl w . grad f|``."""
    pts = _points(field, region, cfg)

    def fn(q, c):
        return _dot(curl(field, q, c), _grad_of(scalar, q, c))
    nm = name or f"curl-transport-{getattr(scalar, 'name', 'f')}"
    return _run(case_id or field.case_id, nm, fn, pts, cfg, tol)


def residual_speed_transport(field, region=None, cfg: StencilConfig = DEFAULT, tol=1e-6,
                             case_id: str | None = None) -> ResidualReport:
    """``|w . grad w^2|``: the speed is constant along the flow."""
    pts = _points(field, region, cfg)
    w2 = _w2(field)
    return _run(case_id or field.case_id, "speed-transport",
                lambda q, c: _dot(field(q), grad(w2, q, c)), pts, cfg, tol)


def residual_rescaled_alignment(field, region=None, cfg: StencilConfig = DEFAULT, tol=1e-6,
                                case_id: str | None = None, floor: float = 1e-3
                                ) -> ResidualReport:
    """Beltrami alignment of ``xi = w / |w|^(2 kappa)`` at points with ``|w| > floor``."""
    kappa = field.kappa

    def xi(p):
        w = field(p)
        n = _norm(w)[..., None]
        return w / np.maximum(n, 1e-300) ** (2 * kappa)
    xi.defined = field.defined
    pts = _points(field, region, cfg)
    pts = pts[_norm(field(pts)) > floor]
    return _run(case_id or field.case_id, "rescaled-alignment",
                lambda q, c: alignment_residual(xi, q, c)[0], pts, cfg, tol)


def geometric_conditions(ell, psi, theta, sigma, dsigma, pts):
    """Both geometric conditions, with theta replaced by sigma(theta).

    Returns per-point ``(a, b)``; ``ell``, ``psi``, ``theta`` need analytic
    gradients.
    """
    ge, gp, gt = ell.grad(pts), psi.grad(pts), theta.grad(pts)
    t = theta(pts)
    s = sigma(t)
    gs = dsigma(t)[..., None] * gt
    cs, sn = np.cos(s), np.sin(s)
    a = cs * sn * (_dot(gp, gp) - _dot(ge, ge)) - _dot(ge, gp) * (cs**2 - sn**2)
    b = sn * _dot(ge, gs) + cs * _dot(gp, gs)
    return a, b


def residual_geometric_conditions(ell, psi, theta, sigma=None, dsigma=None, region=None,
                                  tol: float = 1e-10, case_id: str = "adhoc",
                                  expected_failure: bool = False) -> ResidualReport:
    """Max of ``|a|`` and ``|b|`` from analytic gradients over ``region`` points."""
    sigma = sigma or (lambda t: t)
    dsigma = dsigma or (lambda t: np.ones_like(t))
    pts = np.asarray(region, dtype=float)
    a, b = geometric_conditions(ell, psi, theta, sigma, dsigma, pts)
    mx, l2 = reduce_residuals(np.maximum(np.abs(a), np.abs(b)))
    return ResidualReport(case_id, "geometric-conditions", mx, l2, len(pts), None, None, tol,
                          expected_failure,
                          detail={"max_a": float(np.max(np.abs(a))),
                                  "max_b": float(np.max(np.abs(b)))})


def residual_proportionality(field, region=None, cfg: StencilConfig = DEFAULT, tol=1e-6,
                             case_id: str | None = None) -> ResidualReport:
    """Relative gap between numeric ``(w . curl w)/w^2`` and the closed form.

    The closed form is ``chi sigma'(theta) |grad theta|`` with ``chi`` the
    handedness of ``(ell, psi, theta)``.
    """
    expected = field.parts["hhat"]
    pts = _points(field, region, cfg)

    def fn(q, c):
        w = field(q)
        num = _dot(w, curl(field, q, c)) / _dot(w, w)
        ex = expected(q)
        return np.abs(num - ex) / np.maximum(np.abs(ex), 1e-300)
    return _run(case_id or field.case_id, "proportionality-factor", fn, pts, cfg, tol)


def _nested(cfg):
    return replace(cfg, h=2 * cfg.h)


def cross_gradient_sides(chi: Callable, pi: Callable, pts, cfg: StencilConfig = DEFAULT):
    """Both sides of the ``w = grad chi x grad pi`` force identity, numerically.

    Inner gradients are exact when the scalars carry one, otherwise central
    differences with step ``h``; in that case the outer curl and divergences
    use ``2h``, else ``h``.
    """
    exact = getattr(chi, "has_grad", False) and getattr(pi, "has_grad", False)
    inner, outer = cfg, (cfg if exact else _nested(cfg))

    def gc(p):
        return _grad_of(chi, p, inner)

    def gp(p):
        return _grad_of(pi, p, inner)

    def w(p):
        return np.cross(gc(p), gp(p))

    def a(p):
        g1, g2 = gc(p), gp(p)
        return np.cross(g2, np.cross(g1, g2))

    def b(p):
        g1, g2 = gc(p), gp(p)
        return np.cross(g1, np.cross(g2, g1))

    wv = w(pts)
    lhs = np.cross(wv, curl(w, pts, outer))
    rhs = div(a, pts, outer)[..., None] * gc(pts) + div(b, pts, outer)[..., None] * gp(pts)
    return lhs, rhs, wv


def check_prop5_identity(chi: Callable, pi: Callable, region, cfg: StencilConfig = DEFAULT,
                         tol: float = 1e-5, case_id: str = "cross-gradient", floor: float = 1e-6
                         ) -> ResidualReport:
    """Max ``|lhs - rhs| / scale`` of the identity for ``w = grad chi x grad pi``.

    ``scale = max(1, max |lhs|, max |rhs|)``; cubic pairs on unit boxes reach
    magnitudes near 1e5, where an absolute tolerance would only measure roundoff.

    ``region`` is either an array of points or a Cartesian box
    ``((x0, x1), (y0, y1), (z0, z1))`` sampled with ``cfg.n_points`` points.
    """
    region = np.asarray(region, dtype=float)
    if region.shape == (3, 2):
        lo, hi = region.T
        u = qmc.Halton(d=3, scramble=True, seed=case_seed(case_id, cfg.seed)).random(cfg.n_points)
        pts = lo + u * (hi - lo)
    else:
        pts = region
    lhs, rhs, wv = cross_gradient_sides(chi, pi, pts, cfg)
    if np.min(_norm(wv)) < floor:
        raise DegeneratePair(f"|grad chi x grad pi| < {floor:g} on the region")
    scale = float(max(1.0, np.max(_norm(lhs)), np.max(_norm(rhs))))

    def fn(q, c):
        lhs, rhs, _ = cross_gradient_sides(chi, pi, q, c)
        return _norm(lhs - rhs) / scale
    return _run(case_id, "cross-gradient-identity", fn, pts, cfg, tol, detail={"scale": scale})


def hamiltonian_residuals(field, pts, cfg: StencilConfig = DEFAULT):
    """Per-point residuals of the Hamiltonian system for ``w = grad mu + lambda grad C``.

    The partials of ``Pcal = P + kappa w^2`` in ``(mu, lambda, C)`` come from a
    least-squares solve of ``grad Pcal = Pcal_mu grad mu + Pcal_lambda grad lambda
    + Pcal_C grad C``.
    """
    mu, lam, C = field.parts["mu"], field.parts["lam"], field.parts["C"]
    w = field(pts)
    G = np.stack([_grad_of(mu, pts, cfg), _grad_of(lam, pts, cfg), _grad_of(C, pts, cfg)], axis=-1)
    gP = _grad_of(field.pressure, pts, cfg) + field.kappa * grad(_w2(field), pts, cfg)
    x = np.stack([np.linalg.lstsq(G[i], gP[i], rcond=None)[0] for i in range(len(pts))])
    r1 = _dot(w, G[..., 1]) + x[:, 2]
    r2 = _dot(w, G[..., 2]) - x[:, 1]
    r3 = x[:, 0]
    return np.stack([r1, r2, r3], axis=-1)


def check_hamiltonian_structure(field, region=None, cfg: StencilConfig = DEFAULT,
                                tol: float = 1e-6, case_id: str | None = None) -> ResidualReport:
    """Max Hamiltonian residual divided by ``scale = max(1, max |grad Pcal|)``."""
    pts = _points(field, region, cfg)
    gP = _grad_of(field.pressure, pts, cfg) + field.kappa * grad(_w2(field), pts, cfg)
    scale = float(max(1.0, np.max(_norm(gP))))
    return _run(case_id or field.case_id, "hamiltonian",
                lambda q, c: np.max(np.abs(hamiltonian_residuals(field, q, c)), axis=-1) / scale,
                pts, cfg, tol, detail={"scale": scale})


def mhd_system_residuals(field, pts, cfg: StencilConfig = DEFAULT):
    """Residuals of the MHD coordinate system for ``w = grad sigma(mu) + lambda grad C``.

    ``d lambda / d P`` at fixed ``C`` (and ``mu``) is recovered by solving
    ``grad lambda = a grad P + b grad C + c grad M`` with ``M = sigma(mu)``.
    Returns per-point ``(b_res, c_res)`` for the two scalar equations.
    """
    mu, lam, C, P = field.parts["mu"], field.parts["lam"], field.parts["C"], field.pressure
    sig, dsig = field.parts["sigma"], field.parts["dsigma"]
    gM = dsig(mu(pts))[..., None] * _grad_of(mu, pts, cfg)
    gP, gC = _grad_of(P, pts, cfg), _grad_of(C, pts, cfg)
    gl = grad(lam, pts, cfg)
    G = np.stack([gP, gC, gM], axis=-1)
    coef = np.stack([np.linalg.lstsq(G[i], gl[i], rcond=None)[0] for i in range(len(pts))])
    lP = coef[:, 0]
    lv = lam(pts)
    b_res = lv * lP * _dot(gC, gC) + lP * _dot(gM, gC) - 1.0
    c_res = _dot(gM, gP) + lv * _dot(gC, gP)
    return b_res, c_res


def check_mhd_system(field, region=None, cfg: StencilConfig = DEFAULT, tol: float = 1e-6,
                       case_id: str | None = None) -> ResidualReport:
    pts = _points(field, region, cfg)
    return _run(case_id or field.case_id, "mhd-system",
                lambda q, c: np.maximum(*map(np.abs, mhd_system_residuals(field, q, c))),
                pts, cfg, tol)


def singularity_scan(field=None, R: float = 1.0, phi: float = 0.0, thetas=None):
    """Table ``(vartheta, w^2, w^2 R^2 sin^2 vartheta, |L_R|)`` along ``vartheta -> 0``.

    ``field`` defaults to the ``spherical-fig1`` catalog field.  Rows are
    ordered by decreasing ``vartheta``.
    """
    if field is None:
        from .catalog import build_case
        field = build_case("spherical-fig1")
    if thetas is None:
        thetas = np.geomspace(np.pi / 2, 1e-4, 60)
    th = np.asarray(thetas, dtype=float)
    pts = np.stack([R * np.sin(th) * np.cos(phi), R * np.sin(th) * np.sin(phi),
                    R * np.cos(th)], axis=-1)
    w = field(pts)
    w2 = _dot(w, w)
    L = np.abs(field.invariants["L_R"](pts))
    return np.stack([th, w2, w2 * R**2 * np.sin(th) ** 2, L], axis=-1)


def sphere_points(R0: float, n: int, seed: int = 0, margin: float = 1e-3,
                  phi_max: float = np.pi):
    """Low-discrepancy points on the sphere ``|x| = R0`` away from the poles."""
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    th = np.arccos(1.0 - 2.0 * u[:, 0])
    th = np.clip(th, margin, np.pi - margin)
    ph = -phi_max + 2 * phi_max * u[:, 1]
    return np.stack([R0 * np.sin(th) * np.cos(ph), R0 * np.sin(th) * np.sin(ph),
                     R0 * np.cos(th)], axis=-1)


def boundary_tangency(field, R0: float = 1.0, n: int = 1000, seed: int = 0) -> float:
    """Max ``|w . grad R|`` on the sphere of radius ``R0``, analytic gradients."""
    cut = getattr(getattr(field, "domain", None), "cut_phi", False)
    pts = sphere_points(R0, n, seed, phi_max=np.pi - 1e-2 if cut else np.pi)
    w = field(pts)
    gR = pts / _norm(pts)[..., None]
    return float(np.max(np.abs(_dot(w, gR))))


def report_dicts(reports: Sequence[ResidualReport]) -> list[dict]:
    return [r.to_dict() for r in reports]

