import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beltrami.harmonic import (cr_residual_analytic, get_pair, gradient_magnitude_gap,
                               laplacian_2d, pair_catalog, verify_cauchy_riemann)

finite = st.floats(-1.5, 1.5, allow_nan=False)


def test_catalog_has_four_pairs():
    assert [p.name for p in pair_catalog()] == ["linear", "exponential", "trig-hyperbolic",
                                               "poisson-kernel"]


def test_pair_values():
    assert get_pair("linear")(1.0, 2.0) == (1.0, 2.0)
    ell, psi = get_pair("exponential")(0.0, 0.0)
    assert ell == pytest.approx(0.0) and psi == pytest.approx(1.0)
    assert get_pair("poisson-kernel").excluded_2d(0.0, 0.0)
    assert not get_pair("poisson-kernel").excluded_2d(1.0, 0.0)


def test_unknown_pair():
    with pytest.raises(KeyError):
        get_pair("cubic")


def test_linear_residual_is_roundoff():
    assert verify_cauchy_riemann(get_pair("linear"), ((-1, 1), (-1, 1))) < 1e-12


@pytest.mark.parametrize("name", ["exponential", "trig-hyperbolic"])
def test_numeric_cr_bound(name):
    assert verify_cauchy_riemann(get_pair(name), ((-1, 1), (-1, 1)), h=1e-4) <= 1e-7


def test_poisson_numeric_cr_off_singularity():
    assert verify_cauchy_riemann(get_pair("poisson-kernel"), ((0.5, 1.5), (-1, 1))) < 1e-6


@pytest.mark.parametrize("name", ["exponential", "trig-hyperbolic", "poisson-kernel"])
def test_numeric_cr_is_second_order(name):
    box = ((0.5, 1.5), (-1, 1)) if name == "poisson-kernel" else ((-1, 1), (-1, 1))
    r1 = verify_cauchy_riemann(get_pair(name), box, h=1e-2)
    r2 = verify_cauchy_riemann(get_pair(name), box, h=5e-3)
    assert 4 * 0.8 < r1 / r2 < 4 * 1.2


@given(finite, finite)
def test_analytic_cr_and_equal_gradients(a, b):
    for pair in pair_catalog():
        if pair.excluded_2d(a, b):
            continue
        scale = 1 + sum(abs(v) for v in pair.dell(a, b))
        assert cr_residual_analytic(pair, a, b) < 1e-12 * scale
        assert abs(gradient_magnitude_gap(pair, a, b)) < 1e-12 * scale**2


@given(finite, finite)
def test_pairs_are_harmonic(a, b):
    for pair in pair_catalog():
        if pair.excluded_2d(a, b, 0.3):
            continue
        for f in (pair.ell, pair.psi):
            lap = laplacian_2d(f, a, b, h=1e-4)
            assert abs(lap) < 1e-5 * (1 + abs(f(a, b)))


def test_orientation_and_swap():
    th = get_pair("trig-hyperbolic")
    assert th.orientation == -1
    o = th.oriented()
    assert o.orientation == 1
    assert o.ell(0.3, 0.4) == th.psi(0.3, 0.4)
    assert cr_residual_analytic(o, 0.3, 0.4) < 1e-14
    lin = get_pair("linear")
    assert lin.oriented() is lin
    assert lin.swapped().orientation == -1
