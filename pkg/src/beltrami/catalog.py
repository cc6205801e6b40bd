"""Recipe catalog addressed by string identifiers."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .charts import CHARTS, CLEARANCE as CLEAR
from .fields import Domain, FieldRecipe, Scalar, VectorFieldEval, build, chart_scalar, pair_guard
from .harmonic import get_pair

CART, CYL, SPH = CHARTS["cartesian"], CHARTS["cylindrical"], CHARTS["spherical"]
SQ2 = np.sqrt(2.0)
PI_CUT = 3.0


def _xyz(p):
    return p[..., 0], p[..., 1], p[..., 2]


def _vec(a, b, c):
    a, b, c = np.broadcast_arrays(a, b, c)
    return np.stack([a, b, c], axis=-1)


def _cyl(p):
    x, y, z = _xyz(p)
    r = np.hypot(x, y)
    return x, y, z, r, np.arctan2(y, x)


def _er(p):
    x, y, _, r, _ = _cyl(p)
    return _vec(x / r, y / r, 0.0 * r)


def _ephi(p):
    x, y, _, r, _ = _cyl(p)
    return _vec(-y / r, x / r, 0.0 * r)


EZ = np.array([0.0, 0.0, 1.0])


def _zeros(p):
    return np.zeros(np.asarray(p).shape[:-1])


X, Y, Z = (chart_scalar(CART, n) for n in "xyz")
R_CYL, PHI, Z_CYL = (chart_scalar(CYL, n) for n in ("r", "phi", "z"))


def _scaled(s: Scalar, k: float, name: str) -> Scalar:
    return Scalar(lambda p: k * s(p), lambda p: k * s.grad(p), name)


# solenoidal Beltrami catalog

_CART_BOX = ((-1.0, 1.0), (-1.0, 1.0), (0.0, 1.0))
_CART_POISSON_BOX = ((1.0, 2.0), (-1.0, 1.0), (0.0, 1.0))
_CYL_BOX = ((0.6, 2.0), (-PI_CUT, PI_CUT), (0.0, 1.0))
_CYL_POISSON_BOX = ((0.6, 2.0), (1.0, 2.6), (0.0, 1.0))
_SPH_BOX = ((0.8, 1.5), (np.pi / 3, 2 * np.pi / 3), (-PI_CUT, PI_CUT))
_SPH_POISSON_BOX = ((0.8, 1.5), (np.pi / 3, 2 * np.pi / 3), (1.0, 2.6))

_SIGMAS = {
    "cartesian": ("z", lambda t: t, lambda t: np.ones_like(t), "sigma(z) = z"),
    "cylindrical": ("z", lambda t: 2.0 * t, lambda t: 2.0 * np.ones_like(t), "sigma(z) = 2z"),
    "spherical": ("R", lambda t: t, lambda t: np.ones_like(t), "sigma(R) = R"),
}

_ORDERINGS = {"cartesian": ("x", "y", "z"), "cylindrical": ("r", "phi", "z"),
              "spherical": ("vartheta", "phi", "R")}

_ALPHA_TEXT = {"cartesian": "alpha = x, beta = y", "cylindrical": "alpha = log r, beta = phi",
               "spherical": "alpha = log tan(vartheta/2), beta = phi"}


def _beltrami(chart, pair_name, box, cut_phi):
    pair = get_pair(pair_name)
    ordering = _ORDERINGS[chart.name]
    _, sig, dsig, stext = _SIGMAS[chart.name]
    short = "poisson" if pair_name == "poisson-kernel" else pair_name
    guard = None
    if pair_name == "poisson-kernel":
        g = pair_guard(pair, chart, ordering)
        guard = g
    return FieldRecipe(
        case_id=f"{chart.name}-{short}", kind="beltrami",
        domain=Domain(chart, box, cut_phi=cut_phi, guard=guard),
        description=f"cos(sigma) grad psi + sin(sigma) grad ell, (ell, psi) = "
                    f"{pair.formula}, {_ALPHA_TEXT[chart.name]}, {stext}",
        ordering=ordering, pair=pair, sigma=sig, dsigma=dsig)


def _beltrami_recipes():
    out = []
    for chart, box, pbox in ((CART, _CART_BOX, _CART_POISSON_BOX),
                             (CYL, _CYL_BOX, _CYL_POISSON_BOX),
                             (SPH, _SPH_BOX, _SPH_POISSON_BOX)):
        for name in ("linear", "exponential", "trig-hyperbolic", "poisson-kernel"):
            b = pbox if name == "poisson-kernel" else box
            # the linear pair uses the angle value itself, so it needs the cut
            cut = name == "linear" and chart.name != "cartesian"
            out.append(_beltrami(chart, name, b, cut))
    out.append(FieldRecipe(
        case_id="spherical-fig1", kind="beltrami",
        domain=Domain(SPH, _SPH_BOX, cut_phi=True),
        description="cos(R) grad alpha(vartheta) + sin(R) grad phi; invariants R and "
                    "L_R = phi cos R - alpha sin R",
        ordering=("vartheta", "phi", "R"), pair=get_pair("linear").swapped(), orient=False,
        tags=("figure",)))
    return out


# generalized Beltrami

def _sin_amp(t, L):
    return np.sin(t + L)


def _generalized_recipes():
    gb_fig2 = FieldRecipe(
        case_id="gb-fig2", kind="generalized",
        domain=Domain(CART, ((-1.5, 1.5), (-1.5, 1.5), (-1.5, 1.5))),
        description="sin(z + L_z) (cos z grad y + sin z grad x), L_z = x cos z - y sin z",
        coords=(X, Y, Z), amplitude=_sin_amp, kappa=0.5,
        analytic_div=_zeros, invariant_names=("z", "L_z"), tags=("figure",))

    def div3(p):
        _, _, z, r, phi = _cyl(p)
        L = r * np.cos(phi) - z * np.sin(phi)
        return np.sin(phi + L) * np.sin(phi) / r

    gb_fig3 = FieldRecipe(
        case_id="gb-fig3", kind="generalized",
        domain=Domain(CYL, ((0.5, 2.0), (-PI_CUT, PI_CUT), (-1.0, 1.0)), cut_phi=True),
        description="sin(phi + L_phi) (cos phi grad z + sin phi grad r), "
                    "L_phi = r cos phi - z sin phi",
        coords=(R_CYL, Z_CYL, PHI), amplitude=_sin_amp, kappa=0.5,
        analytic_div=div3, invariant_names=("phi", "L_phi"), tags=("figure",))

    a, kappa = 2.0, 0.25
    k = a ** (1.0 - 2.0 * kappa)
    gb_kappa = FieldRecipe(
        case_id="gb-kappa", kind="generalized",
        domain=Domain(CART, ((-1.0, 1.0), (-1.0, 1.0), (0.0, 1.0))),
        description="kappa = 1/4, alpha = 2, (ell, psi) = sqrt(2) (x, y), sigma(z) = z",
        coords=(_scaled(X, k, "ell"), _scaled(Y, k, "psi"), Z),
        amplitude=lambda t, L: a + 0.0 * t, kappa=kappa, analytic_div=_zeros,
        invariant_names=("z", "L_z"))
    return [gb_fig2, gb_fig3, gb_kappa]


# MHD equilibria

def _xy_guard(p, pad=0.0):
    # lambda^2 = log((x+y)^2/2) must stay nonnegative
    return p[..., 0] + p[..., 1] >= np.sqrt(2.0) + CLEAR + pad


def _exp_guard(p, pad=0.0):
    # C = exp(x) cos y must stay positive
    return np.abs(p[..., 1]) <= np.pi / 2 - CLEAR - pad


def _mhd_recipes():
    P_xy = Scalar(lambda p: p[..., 0] * p[..., 1],
                  lambda p: _vec(p[..., 1], p[..., 0], 0.0 * p[..., 0]), "P")
    C_xy = Scalar(lambda p: 0.5 * (p[..., 1] ** 2 - p[..., 0] ** 2),
                  lambda p: _vec(-p[..., 0], p[..., 1], 0.0 * p[..., 0]), "C")
    mhd_xy = FieldRecipe(
        case_id="mhd-xy", kind="mhd",
        domain=Domain(CART, ((1.0, 2.0), (1.0, 2.0), (0.0, 1.0)), guard=_xy_guard),
        description="P = xy, C = (y^2 - x^2)/2, w = grad z + sqrt(log(sqrt(C^2+P^2)+P)) grad C",
        coords=(Z, None, C_xy), pressure=P_xy,
        lam2=lambda p: np.log(0.5 * (p[..., 0] + p[..., 1]) ** 2), analytic_div=_zeros)

    def ex(p):
        return np.exp(p[..., 0])
    P_e = Scalar(lambda p: ex(p) * np.sin(p[..., 1]),
                 lambda p: _vec(ex(p) * np.sin(p[..., 1]), ex(p) * np.cos(p[..., 1]), 0.0 * ex(p)),
                 "P")
    C_e = Scalar(lambda p: ex(p) * np.cos(p[..., 1]),
                 lambda p: _vec(ex(p) * np.cos(p[..., 1]), -ex(p) * np.sin(p[..., 1]), 0.0 * ex(p)),
                 "C")
    mhd_exp = FieldRecipe(
        case_id="mhd-exp", kind="mhd",
        domain=Domain(CART, ((0.0, 1.0), (0.2, 1.2), (0.0, 1.0)), guard=_exp_guard),
        description="P = exp(x) sin y, C = exp(x) cos y, w = grad z + sqrt((2/C) arctan(P/C)) grad C",
        coords=(Z, None, C_e), pressure=P_e,
        lam2=lambda p: 2.0 / C_e(p) * np.arctan(P_e(p) / C_e(p)))

    def pc(p):
        _, _, z, r, _ = _cyl(p)
        return np.exp(-r - z)
    P_c = Scalar(pc, lambda p: -pc(p)[..., None] * (_er(p) + EZ), "P")
    C_c = Scalar(lambda p: _cyl(p)[3] - p[..., 2], lambda p: _er(p) - EZ, "C")
    cyl_box = ((0.5, 2.0), (-PI_CUT, PI_CUT), (-1.0, 1.0))
    mhd_cyl = FieldRecipe(
        case_id="mhd-cyl", kind="mhd", domain=Domain(CYL, cyl_box, cut_phi=True),
        description="P = exp(-r-z), C = r - z, w = grad phi + sqrt(exp(-r-z)) grad(r - z)",
        coords=(PHI, None, C_c), pressure=P_c, lam2=pc)

    mhd_px = FieldRecipe(
        case_id="mhd-px", kind="mhd",
        domain=Domain(CART, ((0.5, 1.5), (-1.0, 1.0), (0.0, 1.0))),
        description="profile P = x: w = grad z + sqrt(2x) grad y",
        coords=(Z, None, Y), pressure=X, lam2=lambda p: 2.0 * p[..., 0],
        analytic_div=_zeros, tags=("profile",))
    mhd_pr = FieldRecipe(
        case_id="mhd-pr", kind="mhd", domain=Domain(CYL, cyl_box, cut_phi=True),
        description="profile P = r: w = grad phi + sqrt(2r) grad z",
        coords=(PHI, None, Z_CYL), pressure=R_CYL, lam2=lambda p: 2.0 * _cyl(p)[3],
        analytic_div=_zeros, tags=("profile",))
    return [mhd_xy, mhd_exp, mhd_cyl, mhd_px, mhd_pr]


# steady Euler flows

def euler_cartesian_profile(P_of_x, dP_of_x, mu_of_x, c: float, case_id: str,
                            box=((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)), description=""):
    """Cartesian profile ``P = P(x)``: ``w = sqrt(2)[grad int sqrt(c-P) dx + y grad z]``.

    ``mu_of_x`` is ``sqrt(2) int sqrt(c - P) dx``; its derivative is formed
    from ``P`` directly.  The divergence is ``sqrt(2) d/dx sqrt(c - P)``.
    """
    def g(p):
        return np.sqrt(2.0 * (c - P_of_x(p[..., 0])))
    mu = Scalar(lambda p: mu_of_x(p[..., 0]),
                lambda p: _vec(g(p), 0.0 * g(p), 0.0 * g(p)), "mu")
    P = Scalar(lambda p: P_of_x(p[..., 0]),
               lambda p: _vec(dP_of_x(p[..., 0]), 0.0 * p[..., 0], 0.0 * p[..., 0]), "P")

    def div(p):
        return -dP_of_x(p[..., 0]) / g(p)
    return FieldRecipe(
        case_id=case_id, kind="euler", domain=Domain(CART, box),
        description=description, coords=(mu, Y, _scaled(Z, SQ2, "C")), pressure=P,
        euler_c=c, analytic_div=div)


def _asinh_int(t):
    # int sqrt(1 + t^2) dt
    return 0.5 * (t * np.sqrt(1.0 + t * t) + np.arcsinh(t))


def euler_cyl_div_corrected(p):
    """Divergence of the cylindrical (r, phi) Euler example, derived by hand."""
    _, _, _, r, phi = _cyl(p)
    return np.exp(-r) * np.sin(phi) * (1.0 - 1.0 / r - 1.0 / r**2)


def _euler_recipes():
    px = euler_cartesian_profile(
        lambda x: -x**2, lambda x: -2.0 * x, lambda x: SQ2 * _asinh_int(x), 1.0, "euler-px",
        description="P = -x^2, c = 1: w = sqrt(2)[grad int sqrt(1+x^2) dx + y grad z]")

    def e2(p):
        return np.exp(0.5 * (p[..., 0] + p[..., 1]))
    mu_e = Scalar(lambda p: 2.0 * e2(p), lambda p: _vec(e2(p), e2(p), 0.0 * e2(p)), "mu")
    lam_e = Scalar(lambda p: p[..., 0] - p[..., 1],
                   lambda p: _vec(1.0 + 0 * p[..., 0], -1.0 + 0 * p[..., 0], 0 * p[..., 0]), "lambda")
    P_e = Scalar(lambda p: -e2(p) ** 2,
                 lambda p: _vec(-e2(p) ** 2, -e2(p) ** 2, 0.0 * e2(p)), "P")
    exp_ = FieldRecipe(
        case_id="euler-exp", kind="euler",
        domain=Domain(CART, ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))),
        description="P = -exp(x+y): w = 2 grad exp((x+y)/2) + sqrt(2)(x - y) grad z",
        coords=(mu_e, lam_e, _scaled(Z, SQ2, "C")), pressure=P_e, euler_c=0.0,
        analytic_div=e2)

    cyl_box = ((0.5, 2.0), (-PI_CUT, PI_CUT), (-1.0, 1.0))
    mu_r = Scalar(lambda p: SQ2 * np.log(_cyl(p)[3]),
                  lambda p: (SQ2 / _cyl(p)[3])[..., None] * _er(p), "mu")
    P_r = Scalar(lambda p: 1.0 - 1.0 / _cyl(p)[3] ** 2,
                 lambda p: (2.0 / _cyl(p)[3] ** 3)[..., None] * _er(p), "P")
    pr = FieldRecipe(
        case_id="euler-pr", kind="euler", domain=Domain(CYL, cyl_box, cut_phi=True),
        description="P = 1 - 1/r^2, c = 1: w = sqrt(2)[grad log r + phi grad z]",
        coords=(mu_r, PHI, _scaled(Z_CYL, SQ2, "C")), pressure=P_r, euler_c=1.0,
        analytic_div=_zeros)

    mu_z = Scalar(lambda p: SQ2 * _asinh_int(p[..., 2]),
                  lambda p: (SQ2 * np.sqrt(1.0 + p[..., 2] ** 2))[..., None] * EZ, "mu")
    P_z = Scalar(lambda p: -p[..., 2] ** 2, lambda p: (-2.0 * p[..., 2])[..., None] * EZ, "P")

    def div_z(p):
        _, _, z, r, phi = _cyl(p)
        return SQ2 * z / np.sqrt(1.0 + z * z) + SQ2 * phi / r
    pz = FieldRecipe(
        case_id="euler-pz", kind="euler", domain=Domain(CYL, cyl_box, cut_phi=True),
        description="P = -z^2, c = 1: w = sqrt(2)[grad int sqrt(1+z^2) dz + phi grad r]",
        coords=(mu_z, PHI, _scaled(R_CYL, SQ2, "C")), pressure=P_z, euler_c=1.0,
        analytic_div=div_z)

    def mu5(p):
        _, _, _, r, phi = _cyl(p)
        return np.exp(-r) * np.sin(phi)

    def gmu5(p):
        _, _, _, r, phi = _cyl(p)
        e = np.exp(-r)
        return (-e * np.sin(phi))[..., None] * _er(p) + (e * np.cos(phi) / r)[..., None] * _ephi(p)

    def lam5(p):
        _, _, _, r, phi = _cyl(p)
        return np.exp(1.0 / r) * np.cos(phi)

    def glam5(p):
        _, _, _, r, phi = _cyl(p)
        e = np.exp(1.0 / r)
        return ((-e * np.cos(phi) / r**2)[..., None] * _er(p)
                + (-e * np.sin(phi) / r)[..., None] * _ephi(p))

    def P5(p):
        _, _, _, r, phi = _cyl(p)
        return -0.5 * np.exp(-2 * r) * (1.0 + np.cos(phi) ** 2 * (r**-2 - 1.0))

    def gP5(p):
        _, _, _, r, phi = _cyl(p)
        e = np.exp(-2 * r)
        c2 = np.cos(phi) ** 2
        Pr = e * (1.0 + c2 * (r**-2 - 1.0) + c2 / r**3)
        Pphi = e * np.cos(phi) * np.sin(phi) * (r**-2 - 1.0)
        return Pr[..., None] * _er(p) + (Pphi / r)[..., None] * _ephi(p)

    def div5(p):
        _, _, _, r, phi = _cyl(p)
        return np.exp(-r) / r * (np.sin(phi) - np.cos(phi) / r**2)

    cyl = FieldRecipe(
        case_id="euler-cyl", kind="euler", domain=Domain(CYL, cyl_box),
        description="P = -exp(-2r)[1 + cos^2 phi (r^-2 - 1)]/2: "
                    "w = grad(exp(-r) sin phi) + sqrt(2) exp(1/r) cos phi grad z",
        coords=(Scalar(mu5, gmu5, "mu"), Scalar(lam5, glam5, "lambda"),
                _scaled(Z_CYL, SQ2, "C")),
        pressure=Scalar(P5, gP5, "P"), euler_c=0.0, analytic_div=div5)
    return [px, exp_, pr, pz, cyl]


RECIPES: dict[str, FieldRecipe] = {
    r.case_id: r for r in (_beltrami_recipes() + _generalized_recipes()
                           + _mhd_recipes() + _euler_recipes())
}


def get_recipe(case_id: str) -> FieldRecipe:
    try:
        return RECIPES[case_id]
    except KeyError:
        raise KeyError(f"unknown case {case_id!r}") from None


def list_recipes(kind: str | None = None) -> list[FieldRecipe]:
    return [r for r in RECIPES.values() if kind is None or r.kind == kind]


@lru_cache(maxsize=None)
def build_case(case_id: str) -> VectorFieldEval:
    """Build (and cache) the evaluator for a catalog id."""
    return build(get_recipe(case_id))
