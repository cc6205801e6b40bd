import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from beltrami.calculus import (ROUNDOFF_FLOOR, ResidualReport, StencilConfig,
                               boundary_tangency, check_hamiltonian_structure,
                               check_prop5_identity, curl, div, grad, laplacian, order_estimate,
                               reduce_residuals, residual_beltrami, residual_divergence,
                               residual_force_balance, residual_geometric_conditions,
                               singularity_scan)
from beltrami.catalog import RECIPES, build_case, euler_cyl_div_corrected
from beltrami.errors import DegeneratePair, StencilEscape
from beltrami.fields import Scalar, build, vector_field

x, y, z = sp.symbols("x y z", real=True)
XYZ = (x, y, z)


def sym_curl(F):
    return [sp.diff(F[2], y) - sp.diff(F[1], z), sp.diff(F[0], z) - sp.diff(F[2], x),
            sp.diff(F[1], x) - sp.diff(F[0], y)]


def sym_grad(f):
    return [sp.diff(f, v) for v in XYZ]


def lambdify_vec(F):
    f = sp.lambdify(XYZ, F, "numpy")
    return lambda p: np.stack(np.broadcast_arrays(*f(p[..., 0], p[..., 1], p[..., 2])), axis=-1)


def test_curl_of_rotation():
    v = vector_field(lambda p: np.stack([-p[..., 1], p[..., 0], 0 * p[..., 0]], axis=-1))
    pts = np.random.default_rng(0).uniform(-1, 1, (50, 3))
    assert np.max(np.abs(curl(v, pts) - [0, 0, 2])) < 1e-10


def test_curl_eigenfield():
    def v(p):
        return np.stack([np.sin(p[..., 2]), np.cos(p[..., 2]), 0 * p[..., 0]], axis=-1)
    pts = np.random.default_rng(1).uniform(-1, 1, (50, 3))
    e1 = np.max(np.abs(curl(v, pts, StencilConfig(h=1e-2)) - v(pts)))
    e2 = np.max(np.abs(curl(v, pts, StencilConfig(h=5e-3)) - v(pts)))
    assert e1 < 2e-5
    assert 3.2 < e1 / e2 < 4.8


coeffs = arrays(np.float64, 10, elements=st.floats(-2, 2, allow_nan=False))
points = arrays(np.float64, (5, 3), elements=st.floats(-1, 1, allow_nan=False))


@given(coeffs, points)
def test_operators_exact_on_quadratics(c, p):
    def f(q):
        a, b, d = q[..., 0], q[..., 1], q[..., 2]
        return (c[0] + c[1] * a + c[2] * b + c[3] * d + c[4] * a * a + c[5] * b * b
                + c[6] * d * d + c[7] * a * b + c[8] * b * d + c[9] * a * d)

    def g(q):
        a, b, d = q[..., 0], q[..., 1], q[..., 2]
        return np.stack([c[1] + 2 * c[4] * a + c[7] * b + c[9] * d,
                         c[2] + 2 * c[5] * b + c[7] * a + c[8] * d,
                         c[3] + 2 * c[6] * d + c[8] * b + c[9] * a], axis=-1)

    cfg = StencilConfig(h=1e-3)
    assert np.max(np.abs(grad(f, p, cfg) - g(p))) < 1e-11 * (1 + np.max(np.abs(c)))
    lap = 2 * (c[4] + c[5] + c[6])
    assert np.max(np.abs(laplacian(f, p, cfg) - lap)) < 1e-6 * (1 + np.max(np.abs(c)))
    assert np.max(np.abs(curl(g, p, cfg))) < 1e-11 * (1 + np.max(np.abs(c)))
    assert np.max(np.abs(div(g, p, cfg) - lap)) < 1e-11 * (1 + np.max(np.abs(c)))


def test_stencil_escape_near_axis():
    f = build_case("spherical-fig1")
    p = np.array([[1.05e-3, 0.0, 1.0]])
    with pytest.raises(StencilEscape) as info:
        curl(f, p)
    assert info.value.point is not None


def test_gb_fig3_divergence_converges():
    f = build_case("gb-fig3")
    p = np.array([[1.0, np.sqrt(3.0), 0.0]])
    exact = np.sin(np.pi / 3 + 1.0) * np.sin(np.pi / 3) / 2.0
    e1 = abs(div(f, p, StencilConfig(h=1e-2))[0] - exact)
    e2 = abs(div(f, p, StencilConfig(h=5e-3))[0] - exact)
    assert 3.2 < e1 / e2 < 4.8


class TestResidualSuites:
    def test_cartesian_linear_alignment(self):
        rep = residual_beltrami(build_case("cartesian-linear"))
        assert rep.max_residual < 1e-6 and rep.n_points == 1000 and rep.flags == ()

    def test_fig1_alignment(self):
        assert residual_beltrami(build_case("spherical-fig1")).max_residual < 1e-6

    def test_mhd_xy_force_balance(self):
        assert residual_force_balance(build_case("mhd-xy")).max_residual < 1e-6

    def test_euler_exp(self):
        f = build_case("euler-exp")
        assert residual_force_balance(f).max_residual < 1e-6
        assert residual_divergence(f, reference=f.analytic_div).max_residual < 1e-6

    def test_gb_fig2_force_balance(self):
        f = build_case("gb-fig2")
        assert residual_force_balance(f).max_residual < 1e-6

    def test_richardson_order(self):
        rep = residual_force_balance(build_case("mhd-xy"), cfg=StencilConfig(richardson=True))
        assert 1.6 <= rep.order_estimate <= 2.4
        assert "max_residual_half" in rep.detail

    def test_report_schema(self):
        d = residual_beltrami(build_case("cartesian-linear"),
                              cfg=StencilConfig(n_points=20)).to_dict()
        assert list(d) == ["case_id", "check_name", "max_residual", "l2_residual", "h",
                           "n_points", "order_estimate", "pass", "expected_failure"]


def test_order_estimate_floor():
    assert order_estimate(4e-8, 1e-8) == pytest.approx(2.0)
    assert order_estimate(1e-12, 1e-13) is None
    assert ROUNDOFF_FLOOR == 1e-11


@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(-1e3, 1e3)), st.randoms())
def test_reduction_is_order_independent(v, rnd):
    w = list(v)
    rnd.shuffle(w)
    assert reduce_residuals(v) == reduce_residuals(np.array(w))


def test_expected_failure_semantics():
    r = ResidualReport("c", "n", 2.0, 2.0, 1, 1e-4, tolerance=1.0, expected_failure=True)
    assert not r.passed and r.ok


class TestGeometricConditions:
    def parts(self, case_id):
        f = build_case(case_id)
        return f, f.parts

    def test_cartesian_linear_exact(self):
        f, p = self.parts("cartesian-linear")
        rep = residual_geometric_conditions(p["ell"], p["psi"], p["theta"], p["sigma"],
                                            p["dsigma"], f.sample(1000))
        assert rep.max_residual < 1e-12

    @pytest.mark.parametrize("case_id", ["spherical-fig1", "cylindrical-poisson",
                                         "spherical-trig-hyperbolic"])
    def test_curvilinear(self, case_id):
        f, p = self.parts(case_id)
        rep = residual_geometric_conditions(p["ell"], p["psi"], p["theta"], p["sigma"],
                                            p["dsigma"], f.sample(1000))
        assert rep.max_residual < 1e-10

    def test_negative_control(self):
        f, p = self.parts("cartesian-linear")
        psi2 = Scalar(lambda q: 2 * p["psi"](q), lambda q: 2 * p["psi"].grad(q))
        rep = residual_geometric_conditions(p["ell"], psi2, p["theta"], p["sigma"],
                                            p["dsigma"], f.sample(1000))
        # (a) is 3 cos z sin z, which reaches 1.5 at z = pi/4
        assert rep.max_residual > 0.1
        assert rep.detail["max_a"] == pytest.approx(1.5, abs=1e-3)


class TestCrossGradientIdentity:
    box = ((1.0, 2.0),) * 3

    def test_trivial_pair(self):
        chi = Scalar(lambda p: p[..., 0], lambda p: np.broadcast_to([1.0, 0, 0], p.shape))
        pi = Scalar(lambda p: p[..., 1], lambda p: np.broadcast_to([0, 1.0, 0], p.shape))
        rep = check_prop5_identity(chi, pi, self.box)
        assert rep.max_residual < 1e-12

    def test_xy_z(self):
        rep = check_prop5_identity(lambda p: p[..., 0] * p[..., 1], lambda p: p[..., 2],
                                   self.box)
        assert rep.max_residual < 1e-5

    def test_exp_cos_z(self):
        rep = check_prop5_identity(lambda p: np.exp(p[..., 0]) * np.cos(p[..., 1]),
                                   lambda p: p[..., 2], self.box)
        assert rep.max_residual < 1e-5

    def test_degenerate(self):
        with pytest.raises(DegeneratePair):
            check_prop5_identity(lambda p: p[..., 0], lambda p: 2 * p[..., 0], self.box)


class TestHamiltonian:
    def test_profile_example(self):
        f = build_case("euler-px")
        pts = f.sample(200)
        w = f(pts)
        assert np.max(np.abs(w[:, 1])) == 0.0  # w . grad y
        assert np.allclose(w @ np.array([0, 0, np.sqrt(2)]), 2 * pts[:, 1], rtol=1e-14)
        assert check_hamiltonian_structure(f).max_residual < 1e-6

    def test_euler_exp(self):
        assert check_hamiltonian_structure(build_case("euler-exp")).max_residual < 1e-6

    def test_gradient_field(self):
        from dataclasses import replace
        rec = RECIPES["euler-px"]
        zero = Scalar(lambda p: 0.0 * p[..., 0], lambda p: 0.0 * p, "lambda")
        f = build(replace(rec, coords=(rec.coords[0], zero, rec.coords[2])))
        assert check_hamiltonian_structure(f, cfg=StencilConfig(n_points=100)).max_residual < 1e-6


class TestSphericalSingularity:
    def test_speed_values(self):
        scan = singularity_scan(thetas=[np.pi / 2, 1e-2])
        assert scan[0, 1] == pytest.approx(1.0, rel=1e-14)
        assert scan[1, 1] == pytest.approx(10000.33334000011, rel=1e-12)

    def test_profile_identity(self):
        scan = singularity_scan(thetas=np.geomspace(np.pi / 2, 1e-4, 60))
        assert np.max(np.abs(scan[:, 2] - 1.0)) < 1e-9
        assert np.all(np.diff(scan[:, 3]) > 0)

    def test_L_R_growth(self):
        scan = singularity_scan(thetas=[1e-2, 1e-4])
        # sin(1) (log tan(0.005) - log tan(0.00005)), about sin(1) log 100
        assert scan[1, 3] - scan[0, 3] == pytest.approx(3.87512410320925, abs=1e-10)

    @pytest.mark.parametrize("R0", [1.0, 0.5])
    def test_tangency(self, R0):
        assert boundary_tangency(build_case("spherical-fig1"), R0) < 1e-12

    def test_tangency_negative_control(self):
        assert boundary_tangency(build_case("cartesian-linear"), 1.0) > 0.1


class TestSympyOracles:
    def test_fig1_curl(self):
        rho = sp.sqrt(x**2 + y**2)
        R = sp.sqrt(x**2 + y**2 + z**2)
        alpha = sp.log(rho / (R + z))  # log tan(vartheta/2)
        phi = sp.atan2(y, x)
        W = [sp.cos(R) * a + sp.sin(R) * b for a, b in zip(sym_grad(alpha), sym_grad(phi))]
        wf, cf = lambdify_vec(W), lambdify_vec(sym_curl(W))
        f = build_case("spherical-fig1")
        pts = f.sample(100, seed=2, pad=1e-3)
        assert np.allclose(f(pts), wf(pts), rtol=1e-12)
        assert np.max(np.abs(curl(f, pts) - cf(pts))) < 1e-6
        assert np.allclose(cf(pts), -wf(pts), rtol=1e-10)

    def test_euler_cyl(self):
        r = sp.sqrt(x**2 + y**2)
        s, c = y / r, x / r
        mu = sp.exp(-r) * s
        W = sym_grad(mu)
        W[2] = W[2] + sp.sqrt(2) * sp.exp(1 / r) * c
        P = -sp.exp(-2 * r) * (1 + c**2 * (r**-2 - 1)) / 2
        divW = sum(sp.diff(W[i], XYZ[i]) for i in range(3))
        cw = sym_curl(W)
        w2 = sum(v**2 for v in W)
        cross = [W[1] * cw[2] - W[2] * cw[1], W[2] * cw[0] - W[0] * cw[2],
                 W[0] * cw[1] - W[1] * cw[0]]
        bal = [cross[i] - sp.diff(P + w2 / 2, XYZ[i]) for i in range(3)]
        f = build_case("euler-cyl")
        pts = f.sample(100, seed=3)
        dfun = sp.lambdify(XYZ, divW, "numpy")
        exact = dfun(pts[:, 0], pts[:, 1], pts[:, 2])
        assert np.allclose(f(pts), lambdify_vec(W)(pts), rtol=1e-12)
        assert np.max(np.abs(lambdify_vec(bal)(pts))) < 1e-12
        assert np.allclose(euler_cyl_div_corrected(pts), exact, rtol=1e-12, atol=1e-14)
        assert np.max(np.abs(f.analytic_div(pts) - exact)) > 1.0
        assert np.max(np.abs(div(f, pts) - exact)) < 1e-6

    def test_mhd_exp_force_balance(self):
        C, P = sp.exp(x) * sp.cos(y), sp.exp(x) * sp.sin(y)
        lam = sp.sqrt(2 / C * sp.atan(P / C))
        W = [a + lam * b for a, b in zip([0, 0, 1], sym_grad(C))]
        cw = sym_curl(W)
        cross = [W[1] * cw[2] - W[2] * cw[1], W[2] * cw[0] - W[0] * cw[2],
                 W[0] * cw[1] - W[1] * cw[0]]
        bal = [cross[i] - sp.diff(P, XYZ[i]) for i in range(3)]
        f = build_case("mhd-exp")
        pts = f.sample(100, seed=4)
        assert np.allclose(f(pts), lambdify_vec(W)(pts), rtol=1e-12)
        assert np.max(np.abs(lambdify_vec(bal)(pts))) < 1e-12
