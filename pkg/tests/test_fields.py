from dataclasses import replace

import numpy as np
import pytest

from beltrami.calculus import StencilConfig, div, residual_beltrami
from beltrami.catalog import (RECIPES, build_case, euler_cartesian_profile,
                              euler_cyl_div_corrected, list_recipes)
from beltrami.charts import CHARTS
from beltrami.errors import (ConstantViolation, DegenerateField, DegeneratePressure,
                             HypothesisViolated, NegativeRadicand, ScaleFactorMismatch)
from beltrami.fields import (Domain, FieldRecipe, Scalar, build, chart_scalar,
                             proportionality_factor, vector_field)
from beltrami.harmonic import get_pair

BELTRAMI = [r.case_id for r in list_recipes("beltrami")]
CART = CHARTS["cartesian"]
X, Y, Z = (chart_scalar(CART, n) for n in "xyz")


def zero_sigma(case_id):
    return build(replace(RECIPES[case_id], sigma=lambda t: 0.0 * t,
                         dsigma=lambda t: 0.0 * t))


def test_catalog_counts():
    kinds = [r.kind for r in RECIPES.values()]
    assert kinds.count("beltrami") == 13
    assert kinds.count("generalized") == 3
    assert kinds.count("mhd") == 5
    assert kinds.count("euler") == 5


def test_cartesian_linear_closed_form():
    f = build_case("cartesian-linear")
    assert np.allclose(f([0.3, -0.2, 0.0]), [0.0, 1.0, 0.0], atol=1e-15)
    z = np.linspace(0.0, 1.0, 11)
    p = np.stack([0.1 * z, -0.4 + 0 * z, z], axis=-1)
    assert np.allclose(f(p), np.stack([np.sin(z), np.cos(z), 0 * z], axis=-1), atol=1e-15)


def test_fig1_closed_form():
    # w = cos R grad alpha + sin R grad phi, |grad alpha| = |grad phi| = 1/(R sin t)
    f = build_case("spherical-fig1")
    R, t, ph = 1.2, 1.1, 0.4
    p = np.array([R * np.sin(t) * np.cos(ph), R * np.sin(t) * np.sin(ph), R * np.cos(t)])
    e_t = np.array([np.cos(t) * np.cos(ph), np.cos(t) * np.sin(ph), -np.sin(t)])
    e_p = np.array([-np.sin(ph), np.cos(ph), 0.0])
    expected = (np.cos(R) * e_t + np.sin(R) * e_p) / (R * np.sin(t))
    assert np.allclose(f(p), expected, rtol=1e-13)


@pytest.mark.parametrize("case_id", ["cartesian-linear", "cartesian-exponential",
                                     "cartesian-trig-hyperbolic", "cartesian-poisson"])
def test_proportionality_is_one_for_sigma_z(case_id):
    f = build_case(case_id)
    pts = f.sample(50, seed=3, pad=1e-3)
    assert np.allclose(proportionality_factor(f, pts), 1.0, atol=1e-6)


def test_proportionality_spherical_sigma_R():
    f = build_case("spherical-exponential")
    pts = f.sample(50, seed=3, pad=1e-3)
    assert np.allclose(proportionality_factor(f, pts), 1.0, atol=1e-6)


def test_fig1_has_negative_factor():
    f = build_case("spherical-fig1")
    pts = f.sample(50, seed=3, pad=1e-3)
    assert np.allclose(proportionality_factor(f, pts), -1.0, atol=1e-6)
    assert np.allclose(f.parts["hhat"](pts), -1.0)


@pytest.mark.parametrize("case_id", ["cartesian-exponential", "cylindrical-poisson",
                                     "spherical-trig-hyperbolic"])
def test_zero_sigma_is_irrotational(case_id):
    f = zero_sigma(case_id)
    pts = f.sample(50, seed=5, pad=1e-3)
    assert np.allclose(proportionality_factor(f, pts), 0.0, atol=1e-6)


def test_zero_sigma_alignment_flags_irrotational():
    rep = residual_beltrami(zero_sigma("cartesian-exponential"), cfg=StencilConfig(n_points=200))
    assert rep.max_residual == 0.0 and "irrotational" in rep.flags


def test_degenerate_field():
    with pytest.raises(DegenerateField):
        proportionality_factor(vector_field(lambda p: 0.0 * p), [[0.0, 0.0, 0.5]])


def test_toroidal_recipe_rejected():
    rec = FieldRecipe("torus", "beltrami",
                      Domain(CHARTS["toroidal"], ((0.05, 0.95), (0.0, 1.0), (-1.0, 1.0))),
                      ordering=("tau", "eta", "phi"), pair=get_pair("linear"))
    with pytest.raises(HypothesisViolated):
        build(rec)


def test_invariant_names():
    assert set(build_case("spherical-fig1").invariants) == {"R", "L_R"}
    assert set(build_case("gb-fig2").invariants) == {"z", "L_z"}
    assert set(build_case("gb-fig3").invariants) == {"phi", "L_phi"}
    assert set(build_case("mhd-exp").invariants) == {"P"}
    assert set(build_case("euler-exp").invariants) == {"lambda"}


def test_unit_amplitude_reduces_to_beltrami():
    rec = replace(RECIPES["gb-fig2"], amplitude=lambda t, L: 1.0 + 0.0 * t,
                  domain=RECIPES["cartesian-linear"].domain)
    g = build(rec)
    f = build_case("cartesian-linear")
    pts = f.sample(100, seed=1)
    assert np.allclose(g(pts), f(pts), atol=1e-15)


def test_gb_fig2_closed_form():
    f = build_case("gb-fig2")
    x, y, z = 0.3, -0.7, 0.9
    L = x * np.cos(z) - y * np.sin(z)
    a = np.sin(z + L)
    assert np.allclose(f([x, y, z]), [a * np.sin(z), a * np.cos(z), 0.0], rtol=1e-14)
    assert f.invariants["L_z"]([x, y, z]) == pytest.approx(L)


def test_gb_fig3_divergence_at_reference_point():
    f = build_case("gb-fig3")
    r, phi = 2.0, np.pi / 3
    p = np.array([[r * np.cos(phi), r * np.sin(phi), 0.0]])
    expected = np.sin(phi + r * np.cos(phi)) * np.sin(phi) / r
    assert f.analytic_div(p)[0] == pytest.approx(expected, rel=1e-14)
    assert div(f, p)[0] == pytest.approx(expected, abs=1e-8)


def test_scale_factor_mismatch():
    doubled = Scalar(lambda p: 2 * p[..., 0], lambda p: 2 * X.grad(p), "ell")
    rec = replace(RECIPES["gb-fig2"], coords=(doubled, Y, Z))
    with pytest.raises(ScaleFactorMismatch):
        build(rec)


def test_mhd_xy_lambda_matches_paper_form():
    f = build_case("mhd-xy")
    pts = f.sample(200, seed=2)
    x, y = pts[:, 0], pts[:, 1]
    C, P = 0.5 * (y**2 - x**2), x * y
    assert np.allclose(f.parts["C"](pts), C)
    assert np.allclose(f.parts["lam"](pts) ** 2, np.log(np.sqrt(C**2 + P**2) + P), rtol=1e-13)


def test_mhd_exp_lambda():
    f = build_case("mhd-exp")
    pts = f.sample(200, seed=2)
    C = np.exp(pts[:, 0]) * np.cos(pts[:, 1])
    P = np.exp(pts[:, 0]) * np.sin(pts[:, 1])
    assert np.allclose(f.parts["lam"](pts), np.sqrt(2 / C * np.arctan(P / C)), rtol=1e-13)


def test_negative_radicand():
    rec = replace(RECIPES["mhd-xy"], domain=Domain(CART, ((0.1, 2.0), (0.1, 2.0), (0.0, 1.0))))
    with pytest.raises(NegativeRadicand):
        build(rec)


def test_constant_pressure_rejected():
    const = Scalar(lambda p: 0.0 * p[..., 0] + 2.0, lambda p: 0.0 * p, "P")
    with pytest.raises(DegeneratePressure):
        build(replace(RECIPES["mhd-px"], pressure=const))


def test_constant_violation():
    with pytest.raises(ConstantViolation):
        build(replace(RECIPES["euler-exp"], euler_c=-10.0))


def test_euler_profile_divergence_vanishes_for_constant_pressure():
    k2 = 0.5
    rec = euler_cartesian_profile(lambda x: 1.0 - k2 + 0 * x, lambda x: 0 * x,
                                  lambda x: np.sqrt(2 * k2) * x, 1.0, "flat")
    f = build(rec)
    pts = f.sample(100, seed=4)
    assert np.max(np.abs(div(f, pts))) < 1e-9
    assert np.max(np.abs(f.analytic_div(pts))) == 0.0
    assert np.max(np.abs(build_case("euler-px").analytic_div(pts))) > 0.5


def test_euler_exp_closed_form():
    f = build_case("euler-exp")
    x, y, z = 0.2, -0.5, 0.3
    e = np.exp((x + y) / 2)
    assert np.allclose(f([x, y, z]), [e, e, np.sqrt(2) * (x - y)], rtol=1e-14)


def test_euler_cyl_divergence_forms():
    f = build_case("euler-cyl")
    r, phi = 1.0, np.pi / 2
    p = np.array([[r * np.cos(phi), r * np.sin(phi), 0.0]])
    # printed form gives exp(-1); the field's actual divergence is -exp(-1)
    assert f.analytic_div(p)[0] == pytest.approx(np.exp(-1.0))
    assert euler_cyl_div_corrected(p)[0] == pytest.approx(-np.exp(-1.0))
    assert div(f, p)[0] == pytest.approx(-np.exp(-1.0), abs=1e-7)


@pytest.mark.parametrize("case_id", BELTRAMI)
def test_beltrami_fields_are_finite(case_id):
    f = build_case(case_id)
    pts = f.sample(500, seed=9)
    w = f(pts)
    assert np.all(np.isfinite(w)) and np.min(np.linalg.norm(w, axis=-1)) > 1e-6
