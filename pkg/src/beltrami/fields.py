"""Constructors for Beltrami, generalized Beltrami, MHD and Euler fields.

Each builder turns a :class:`FieldRecipe` into a :class:`VectorFieldEval`, a
pure vectorized map from Cartesian points ``(..., 3)`` to field values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy.stats import qmc

from .charts import CLEARANCE, CoordinateChart, alpha_reparam, check_theorem1_hypothesis
from .errors import (ConstantViolation, DegeneratePressure, HypothesisViolated,
                     NegativeRadicand, NonOrthogonal, ScaleFactorMismatch)
from .harmonic import PAIR_CLEARANCE, ConjugatePair

KINDS = ("beltrami", "generalized", "mhd", "euler")


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


class Scalar:
    """A scalar field with an optional closed-form gradient."""

    def __init__(self, f: Callable, grad: Callable | None = None, name: str = ""):
        self.f = f
        self._grad = grad
        self.name = name

    def __call__(self, p):
        return self.f(np.asarray(p, dtype=float))

    @property
    def has_grad(self) -> bool:
        return self._grad is not None

    def grad(self, p):
        if self._grad is None:
            raise AttributeError(f"scalar {self.name!r} has no analytic gradient")
        return self._grad(np.asarray(p, dtype=float))

    def __repr__(self):
        return f"Scalar({self.name!r})"


def chart_scalar(chart: CoordinateChart, name: str) -> Scalar:
    """A chart coordinate as a Scalar with its closed-form gradient."""
    i = chart.index(name)
    return Scalar(lambda p: chart.forward(p)[..., i],
                  lambda p: chart.gradients(p)[..., i, :], name)


def identity(t):
    return np.asarray(t, dtype=float)


def unit_slope(t):
    return np.ones_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Domain:
    """A coordinate box of a chart plus the validity predicate of a field.

    ``box`` holds ``(lo, hi)`` per native chart coordinate and is used only
    for sampling.  ``defined`` is the set where the field may be evaluated:
    the chart clearance, the phi branch cut for fields that depend on the
    angle value itself, and an optional recipe guard.
    """

    chart: CoordinateChart
    box: tuple
    margin: float = CLEARANCE
    cut_phi: bool = False
    guard: Callable | None = None

    def defined(self, p, pad: float = 0.0):
        p = np.asarray(p, dtype=float)
        ok = self.chart.cleared(p, self.margin + pad)
        if self.cut_phi:
            phi = np.arctan2(p[..., 1], p[..., 0])
            ok &= np.abs(phi) <= np.pi - self.margin - pad
        if self.guard is not None:
            ok &= self.guard(p, pad)
        return ok

    def in_box(self, p, tol: float = 1e-12):
        q = self.chart.forward(p)
        lo, hi = np.asarray(self.box, dtype=float).T
        return np.all((q >= lo - tol) & (q <= hi + tol), axis=-1)

    def contains(self, p):
        return self.defined(p) & self.in_box(p)

    def sample(self, n: int, seed: int = 0, pad: float = 0.0):
        """``n`` deterministic low-discrepancy points of the box inside ``defined``."""
        lo, hi = np.asarray(self.box, dtype=float).T
        gen = qmc.Halton(d=3, scramble=True, seed=seed)
        out, have = [], 0
        for _ in range(64):
            q = lo + gen.random(max(2 * n, 64)) * (hi - lo)
            p = self.chart.inverse(q)
            p = p[self.defined(p, pad)]
            out.append(p)
            have += len(p)
            if have >= n:
                break
        pts = np.concatenate(out)[:n]
        if len(pts) < n:
            raise ValueError("domain box is almost entirely outside the defined set")
        return pts

    def cartesian_bounds(self, n: int = 4096):
        """Axis-aligned Cartesian box enclosing the coordinate box (sampled)."""
        pts = self.sample(n, seed=12345)
        return pts.min(axis=0), pts.max(axis=0)


@dataclass(frozen=True)
class FieldRecipe:
    """Catalog entry: everything needed to build one concrete field.

    Beltrami kind uses ``chart``/``ordering``/``pair``/``sigma``.  Generalized
    kind uses ``coords = (ell, psi, theta)`` with ``amplitude(theta, L)`` and
    ``kappa``.  MHD and Euler kinds use ``coords = (mu, lam, C)`` and
    ``pressure``; MHD also takes ``lam2`` (the radicand of lambda) and applies
    ``sigma`` to ``mu``.
    """

    case_id: str
    kind: str
    domain: Domain
    description: str = ""
    ordering: tuple | None = None
    pair: ConjugatePair | None = None
    orient: bool = True
    sigma: Callable = identity
    dsigma: Callable = unit_slope
    amplitude: Callable | None = None
    kappa: float = 0.0
    coords: tuple | None = None
    pressure: Scalar | None = None
    lam2: Callable | None = None
    euler_c: float | None = None
    analytic_div: Callable | None = None
    invariant_names: tuple | None = None
    extra_invariants: Mapping[str, Scalar] = field(default_factory=dict)
    tags: tuple = ()

    @property
    def chart(self) -> CoordinateChart:
        return self.domain.chart


@dataclass(frozen=True, eq=False)
class VectorFieldEval:
    """Pure evaluator ``p -> w(p)`` with its construction data."""

    case_id: str
    kind: str
    func: Callable
    domain: Domain
    analytic_div: Callable | None = None
    invariants: Mapping[str, Scalar] = field(default_factory=dict)
    pressure: Scalar | None = None
    kappa: float = 0.0
    parts: Mapping[str, Any] = field(default_factory=dict)
    recipe: FieldRecipe | None = None

    def __call__(self, p):
        return self.func(np.asarray(p, dtype=float))

    def defined(self, p, pad: float = 0.0):
        return self.domain.defined(p, pad)

    def sample(self, n: int, seed: int = 0, pad: float = 0.0):
        return self.domain.sample(n, seed, pad)


def vector_field(func: Callable, domain: Domain | None = None, case_id: str = "adhoc",
                 **kw) -> VectorFieldEval:
    """Wrap a plain function as an evaluator (Cartesian, unbounded by default)."""
    from .charts import CHARTS
    if domain is None:
        domain = Domain(CHARTS["cartesian"], ((-1, 1),) * 3)
    return VectorFieldEval(case_id, kw.pop("kind", "adhoc"), func, domain, **kw)


# solenoidal Beltrami

def _orientation_sign(chart: CoordinateChart, ordering, domain: Domain) -> float:
    p = domain.sample(16, seed=7)
    j = chart.jacobian(p, ordering)
    s = np.sign(j)
    if not np.all(s == s[0]):
        raise HypothesisViolated("ordering changes handedness on the domain")
    return float(s[0])


def build_solenoidal_beltrami(recipe: FieldRecipe, check_hypothesis: bool = True) -> VectorFieldEval:
    """``w = cos(sigma(theta)) grad psi + sin(sigma(theta)) grad ell``.

    ``(ell, psi)`` is the pair composed with ``(alpha(zeta), beta)`` and
    ``theta = gamma``.  With ``recipe.orient`` the pair is first brought to
    positive orientation, which makes the proportionality factor
    ``+sigma'(theta) |grad theta|`` on right-handed orderings.
    """
    if recipe.kind != "beltrami":
        raise ValueError(f"recipe {recipe.case_id} is not of beltrami kind")
    chart, ordering, dom = recipe.chart, tuple(recipe.ordering), recipe.domain
    if check_hypothesis:
        hyp = check_theorem1_hypothesis(chart, ordering, dom.box, n_samples=128)
        if not hyp.passes:
            raise HypothesisViolated(
                f"{chart.name} ordering {ordering} violates the metric hypothesis "
                f"(max violation {hyp.max_violation:.3g})")
    rep = alpha_reparam(chart, ordering)
    pair = recipe.pair.oriented() if recipe.orient else recipe.pair
    iz, ib, ig = (chart.index(n) for n in ordering)
    sigma, dsigma = recipe.sigma, recipe.dsigma

    def parts(p):
        q = chart.forward(p)
        G = chart.gradients(p)
        zeta, beta, theta = q[..., iz], q[..., ib], q[..., ig]
        a = rep.alpha_of_zeta(zeta)
        ga = rep.dalpha_dzeta(zeta)[..., None] * G[..., iz, :]
        gb = G[..., ib, :]
        la, lb = pair.dell(a, beta)
        pa, pb = pair.dpsi(a, beta)
        return dict(a=a, beta=beta, theta=theta,
                    ell=pair.ell(a, beta), psi=pair.psi(a, beta),
                    gell=la[..., None] * ga + lb[..., None] * gb,
                    gpsi=pa[..., None] * ga + pb[..., None] * gb,
                    gtheta=G[..., ig, :])

    def w(p):
        d = parts(p)
        s = sigma(d["theta"])[..., None]
        return np.cos(s) * d["gpsi"] + np.sin(s) * d["gell"]

    def L(p):
        d = parts(p)
        s = sigma(d["theta"])
        return d["ell"] * np.cos(s) - d["psi"] * np.sin(s)

    def gL(p):
        d = parts(p)
        s = sigma(d["theta"])
        c, sn = np.cos(s)[..., None], np.sin(s)[..., None]
        k = (dsigma(d["theta"]) * (d["ell"] * np.sin(s) + d["psi"] * np.cos(s)))[..., None]
        return c * d["gell"] - sn * d["gpsi"] - k * d["gtheta"]

    chi = pair.orientation * _orientation_sign(chart, ordering, dom)
    tname = ordering[2]
    names = recipe.invariant_names or (tname, "L_" + tname)
    theta = chart_scalar(chart, tname)

    def hhat(p):
        d = parts(np.asarray(p, dtype=float))
        return chi * dsigma(d["theta"]) * np.linalg.norm(d["gtheta"], axis=-1)

    scalars = dict(
        ell=Scalar(lambda p: parts(p)["ell"], lambda p: parts(p)["gell"], "ell"),
        psi=Scalar(lambda p: parts(p)["psi"], lambda p: parts(p)["gpsi"], "psi"),
        theta=theta,
    )
    inv = {names[0]: theta, names[1]: Scalar(L, gL, names[1])}
    inv.update(recipe.extra_invariants)
    return VectorFieldEval(
        recipe.case_id, "beltrami", w, dom, recipe.analytic_div, inv,
        parts=dict(scalars, sigma=sigma, dsigma=dsigma, chi=chi, hhat=hhat,
                   pair=pair, alpha=rep, ordering=ordering, evaluate=parts),
        recipe=recipe)


def proportionality_factor(field: VectorFieldEval, p, h: float = 1e-4,
                           floor: float = 1e-12):
    """``(w . curl w) / |w|^2`` with a central-difference curl."""
    from .calculus import StencilConfig, curl
    from .errors import DegenerateField
    p = np.asarray(p, dtype=float)
    w = field(p)
    w2 = _dot(w, w)
    if np.any(w2 < floor):
        raise DegenerateField(f"|w|^2 below {floor:g}")
    return _dot(w, curl(field, p, StencilConfig(h=h))) / w2


# generalized Beltrami

def _check_scale_factors(ell: Scalar, psi: Scalar, target: Callable, pts, tol=1e-8):
    ge, gp = ell.grad(pts), psi.grad(pts)
    ne, np_ = np.linalg.norm(ge, axis=-1), np.linalg.norm(gp, axis=-1)
    t = target(pts)
    worst = float(max(np.max(np.abs(ne - t)), np.max(np.abs(np_ - t))))
    if worst > tol:
        raise ScaleFactorMismatch(
            f"|grad ell| = |grad psi| = |alpha|^(1-2 kappa) fails by {worst:.3g}")
    orth = float(max(np.max(np.abs(_dot(ge, gp))), 0.0))
    if orth > tol:
        raise ScaleFactorMismatch(f"grad ell and grad psi are not orthogonal ({orth:.3g})")


def build_generalized_beltrami(recipe: FieldRecipe) -> VectorFieldEval:
    """``w = alpha^(2 kappa) (cos sigma(theta) grad psi + sin sigma(theta) grad ell)``.

    ``alpha = amplitude(theta, L_theta)``.  For ``kappa = 1/2`` the pair must
    have unit gradients and ``w = alpha xi``; for other ``kappa`` the
    gradients must have magnitude ``|alpha|^(1 - 2 kappa)`` and the field is
    ``|alpha|^(2 kappa) xi``.
    """
    if recipe.kind != "generalized":
        raise ValueError(f"recipe {recipe.case_id} is not of generalized kind")
    kappa = float(recipe.kappa)
    if kappa == 0.0:
        raise ValueError("kappa = 0 is the plain Beltrami case")
    ell, psi, theta = recipe.coords
    sigma, dsigma, amp = recipe.sigma, recipe.dsigma, recipe.amplitude
    dom = recipe.domain

    def L(p):
        s = sigma(theta(p))
        return ell(p) * np.cos(s) - psi(p) * np.sin(s)

    def gL(p):
        t = theta(p)
        s = sigma(t)
        c, sn = np.cos(s)[..., None], np.sin(s)[..., None]
        k = (dsigma(t) * (ell(p) * np.sin(s) + psi(p) * np.cos(s)))[..., None]
        return c * ell.grad(p) - sn * psi.grad(p) - k * theta.grad(p)

    def alpha(p):
        return amp(theta(p), L(p))

    pts = dom.sample(256, seed=11)
    _check_scale_factors(ell, psi, lambda q: np.abs(alpha(q)) ** (1.0 - 2.0 * kappa), pts)

    def xi(p):
        s = sigma(theta(p))[..., None]
        return np.cos(s) * psi.grad(p) + np.sin(s) * ell.grad(p)

    if kappa == 0.5:
        def w(p):
            return alpha(p)[..., None] * xi(p)
    else:
        def w(p):
            return (np.abs(alpha(p)) ** (2.0 * kappa))[..., None] * xi(p)

    tn = theta.name
    names = recipe.invariant_names or (tn, "L_" + tn)
    inv = {names[0]: theta, names[1]: Scalar(L, gL, names[1])}
    inv.update(recipe.extra_invariants)
    return VectorFieldEval(
        recipe.case_id, "generalized", w, dom, recipe.analytic_div, inv,
        kappa=kappa,
        parts=dict(ell=ell, psi=psi, theta=theta, sigma=sigma, dsigma=dsigma,
                   amplitude=Scalar(alpha, None, "alpha"), xi=xi),
        recipe=recipe)


# MHD equilibria

def _orthogonality(grads, pts):
    worst = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            gi, gj = grads[i](pts), grads[j](pts)
            nn = np.linalg.norm(gi, axis=-1) * np.linalg.norm(gj, axis=-1)
            # a vanishing gradient is orthogonal to everything
            cos = np.where(nn > 0, _dot(gi, gj) / np.where(nn > 0, nn, 1.0), 0.0)
            worst = max(worst, float(np.max(np.abs(cos))))
    return worst


def build_mhd_equilibrium(recipe: FieldRecipe, h: float = 1e-4) -> VectorFieldEval:
    """``w = grad sigma(mu) + lambda grad C`` with ``lambda = sqrt(lam2)``.

    ``lam2`` is the closed form of ``2 int dP / |grad C|^2``.  The triple
    ``(mu, P, C)`` must be orthogonal with ``|grad C|`` independent of ``mu``.
    """
    if recipe.kind != "mhd":
        raise ValueError(f"recipe {recipe.case_id} is not of mhd kind")
    mu, _, C = recipe.coords
    P = recipe.pressure
    sigma, dsigma, lam2 = recipe.sigma, recipe.dsigma, recipe.lam2
    dom = recipe.domain
    pts = dom.sample(256, seed=13)

    gP = P.grad(pts)
    if np.max(np.linalg.norm(gP, axis=-1)) < 1e-6:
        raise DegeneratePressure("grad P vanishes on the domain")
    worst = _orthogonality([mu.grad, P.grad, C.grad], pts)
    if worst > 1e-8:
        raise NonOrthogonal(f"(mu, P, C) not orthogonal: max |cos| = {worst:.3g}")
    # d|grad C|^2 / d mu along grad mu with P and C held fixed
    gm = mu.grad(pts)
    e = gm / _dot(gm, gm)[..., None]
    c2 = lambda q: _dot(C.grad(q), C.grad(q))
    dmu = (c2(pts + h * e) - c2(pts - h * e)) / (2 * h)
    if np.max(np.abs(dmu) / (1.0 + c2(pts))) > 1e-6:
        raise HypothesisViolated("|grad C| depends on mu")
    if np.min(lam2(pts)) < 0:
        raise NegativeRadicand("lambda^2 < 0 on the domain; shrink it")

    def lam(p):
        return np.sqrt(lam2(p))

    def w(p):
        return (dsigma(mu(p)))[..., None] * mu.grad(p) + lam(p)[..., None] * C.grad(p)

    inv = {"P": P}
    inv.update(recipe.extra_invariants)
    return VectorFieldEval(
        recipe.case_id, "mhd", w, dom, recipe.analytic_div, inv, pressure=P, kappa=0.0,
        parts=dict(mu=mu, lam=Scalar(lam, None, "lambda"), C=C, sigma=sigma, dsigma=dsigma),
        recipe=recipe)


# steady Euler flows

def build_euler_flow(recipe: FieldRecipe, margin: float = 1e-6) -> VectorFieldEval:
    """``w = grad mu + lambda grad C`` with ``|grad mu|^2 / 2 = c - P``."""
    if recipe.kind != "euler":
        raise ValueError(f"recipe {recipe.case_id} is not of euler kind")
    mu, lam, C = recipe.coords
    P, c = recipe.pressure, recipe.euler_c
    dom = recipe.domain
    pts = dom.sample(512, seed=17)
    gap = c - P(pts)
    if np.min(gap) < margin:
        raise ConstantViolation(f"c - P = {np.min(gap):.3g} < {margin:g} on the domain")
    worst = _orthogonality([mu.grad, lam.grad, C.grad], pts)
    if worst > 1e-8:
        raise NonOrthogonal(f"(mu, lambda, C) not orthogonal: max |cos| = {worst:.3g}")

    def w(p):
        return mu.grad(p) + lam(p)[..., None] * C.grad(p)

    inv = {"lambda": lam}
    inv.update(recipe.extra_invariants)
    return VectorFieldEval(
        recipe.case_id, "euler", w, dom, recipe.analytic_div, inv, pressure=P, kappa=0.5,
        parts=dict(mu=mu, lam=lam, C=C, c=c), recipe=recipe)


BUILDERS = {
    "beltrami": build_solenoidal_beltrami,
    "generalized": build_generalized_beltrami,
    "mhd": build_mhd_equilibrium,
    "euler": build_euler_flow,
}


def build(recipe: FieldRecipe) -> VectorFieldEval:
    return BUILDERS[recipe.kind](recipe)


def pair_guard(pair: ConjugatePair, chart: CoordinateChart, ordering,
               margin: float = PAIR_CLEARANCE) -> Callable:
    """Domain guard excluding the pair's 2D singular set."""
    rep = alpha_reparam(chart, ordering)
    iz, ib = chart.index(ordering[0]), chart.index(ordering[1])

    def guard(p, pad=0.0):
        q = chart.forward(p)
        a = rep.alpha_of_zeta(q[..., iz])
        return ~pair.excluded_2d(a, q[..., ib], margin + pad)
    return guard


from .characteristics import solve_characteristics  # noqa: E402,F401
