import pytest
from scipy.integrate import quad

from sfide import make_context, make_problem


@pytest.fixture(scope="session")
def ex51_ctx():
    return make_context(make_problem("example_5_1", alpha=0.8, beta1=0.5, beta2=0.25))


@pytest.fixture(scope="session")
def ex52_ctx():
    return make_context(make_problem("example_5_2", alpha=0.8, beta1=0.5, beta2=0.25))


@pytest.fixture(scope="session")
def zero_ctx():
    return make_context(make_problem("zero"))


def singular_unit_integral(alpha_exp, beta_exp, f):
    """Adaptive oracle for int_0^1 (1-u)**(alpha_exp-1) u**(-beta_exp) f(u) du.

    Uses the algebraic-endpoint-weight integrator, an entirely different route
    from the Golub-Welsch rules under test.
    """
    val, err = quad(
        f, 0.0, 1.0,
        weight="alg", wvar=(-beta_exp, alpha_exp - 1.0),
        epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    assert err < 1e-9
    return val


def singular_kernel_integral(alpha, beta_i, t, s, f):
    """Adaptive oracle for (1/Gamma(alpha)) int_s^t (t-tau)**(alpha-1)
    (tau-s)**(-beta_i) f(tau) dtau."""
    import math

    val, err = quad(
        f, s, t,
        weight="alg", wvar=(-beta_i, alpha - 1.0),
        epsabs=1e-13, epsrel=1e-13, limit=200,
    )
    assert err < 1e-9
    return val / math.gamma(alpha)
