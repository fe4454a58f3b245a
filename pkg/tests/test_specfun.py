import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfide.specfun import beta, build_quadrature, gamma

from conftest import singular_unit_integral


# -- gamma --------------------------------------------------------------------

def test_gamma_factorials():
    assert gamma(1.0) == 1.0
    assert gamma(5.0) == 24.0


def test_gamma_half_is_sqrt_pi():
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


@pytest.mark.parametrize("x", [0.1, 0.5, 1.5, 7.3])
def test_gamma_recurrence(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


def test_gamma_tolerance_against_high_precision():
    mpmath.mp.dps = 40
    xs = np.concatenate([np.linspace(0.01, 2.0, 60), np.linspace(2.0, 50.0, 97)])
    for x in xs:
        exact = float(mpmath.gamma(mpmath.mpf(float(x))))
        assert gamma(float(x)) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, float("nan")])
def test_gamma_domain_error(x):
    with pytest.raises(ValueError):
        gamma(x)


# -- beta ---------------------------------------------------------------------

def test_beta_unit_square():
    assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)


def test_beta_halves_is_pi():
    assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)


def test_beta_factorial_identity():
    assert beta(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-14)


def test_beta_log_space_survives_large_arguments():
    # Gamma(200) alone overflows float64; B(200, 300) is ~1e-142 and must
    # still come out finite and positive.
    with pytest.raises(OverflowError):
        math.gamma(200.0) * math.gamma(300.0)
    val = beta(200.0, 300.0)
    assert np.isfinite(val) and val > 0.0
    mpmath.mp.dps = 60
    exact = float(mpmath.beta(200, 300))
    assert val == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("args", [(0.0, 1.0), (1.0, 0.0), (-2.0, 3.0)])
def test_beta_domain_error(args):
    with pytest.raises(ValueError):
        beta(*args)


# -- quadrature construction ---------------------------------------------------

def test_legendre_special_case():
    rule = build_quadrature(1.0, 0.0, 6)
    assert rule.weights.sum() == pytest.approx(1.0, rel=1e-14)
    # weight 1 on [0,1] is symmetric, so nodes mirror around 1/2
    np.testing.assert_allclose(rule.nodes + rule.nodes[::-1], 1.0, atol=1e-14)


def test_weight_sum_matches_beta_mass():
    rule = build_quadrature(0.6, 0.3, 8)
    assert rule.weights.sum() == pytest.approx(beta(0.6, 0.7), rel=1e-13)


def test_rule_invariants():
    rule = build_quadrature(0.8, 0.25, 8)
    assert rule.n_nodes == 8
    assert np.all(rule.nodes > 0.0) and np.all(rule.nodes < 1.0)
    assert np.all(np.diff(rule.nodes) > 0.0)
    assert np.all(rule.weights > 0.0)


def test_rule_is_immutable():
    rule = build_quadrature(0.8, 0.25, 4)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.5
    with pytest.raises(ValueError):
        rule.weights[0] = 1.0


def test_monomial_cubic_against_beta_and_adaptive_oracle():
    rule = build_quadrature(0.8, 0.25, 8)
    got = float(rule.weights @ rule.nodes**3)
    assert got == pytest.approx(beta(0.8, 3.75), rel=1e-12)
    oracle = singular_unit_integral(0.8, 0.25, lambda u: u**3)
    assert got == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize("alpha_exp,beta_exp", [(0.6, 0.3), (0.8, 0.25), (1.0, 0.49)])
def test_monomial_exactness_up_to_degree(alpha_exp, beta_exp):
    n = 8
    rule = build_quadrature(alpha_exp, beta_exp, n)
    for k in range(2 * n):
        exact = beta(alpha_exp, k + 1.0 - beta_exp)
        got = float(rule.weights @ rule.nodes**k)
        assert got == pytest.approx(exact, rel=1e-10), f"k={k}"


def test_equal_exponents_recurrence_edge():
    # alpha_exp - 1 == -beta_exp makes the naive k=1 off-diagonal formula 0/0
    rule = build_quadrature(0.3, 0.3, 6)
    assert rule.weights.sum() == pytest.approx(beta(0.3, 0.7), rel=1e-13)
    got = float(rule.weights @ rule.nodes**2)
    assert got == pytest.approx(beta(0.3, 3.0 - 0.3), rel=1e-11)


def test_single_node_rule():
    rule = build_quadrature(0.7, 0.2, 1)
    assert rule.n_nodes == 1
    assert rule.weights.sum() == pytest.approx(beta(0.7, 0.8), rel=1e-13)
    # exact for degree <= 1
    assert float(rule.weights @ rule.nodes) == pytest.approx(beta(0.7, 1.8), rel=1e-12)


@pytest.mark.parametrize(
    "args",
    [(0.8, 0.25, 0), (0.0, 0.25, 4), (1.2, 0.25, 4), (0.8, 1.0, 4), (0.8, -0.1, 4)],
)
def test_build_argument_errors(args):
    with pytest.raises(ValueError):
        build_quadrature(*args)


def test_integrate_helper():
    rule = build_quadrature(1.0, 0.0, 10)
    assert rule.integrate(np.exp) == pytest.approx(math.e - 1.0, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    alpha_exp=st.floats(0.05, 1.0),
    beta_exp=st.floats(0.0, 0.49),
    n=st.integers(1, 10),
)
def test_quadrature_invariants_property(alpha_exp, beta_exp, n):
    rule = build_quadrature(alpha_exp, beta_exp, n)
    assert np.all(rule.nodes > 0.0) and np.all(rule.nodes < 1.0)
    assert np.all(np.diff(rule.nodes) > 0.0)
    assert np.all(rule.weights > 0.0)
    for k in (0, 1, 2 * n - 1):
        exact = beta(alpha_exp, k + 1.0 - beta_exp)
        assert float(rule.weights @ rule.nodes**k) == pytest.approx(exact, rel=1e-10)
