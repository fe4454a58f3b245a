"""Special functions and Gaussian quadrature for the singular unit-interval weight.

The rules built here integrate against

    w(u) = (1 - u)**(alpha_exp - 1) * u**(-beta_exp),   u in (0, 1),

the weight that remains after mapping the inner convolution of a weakly
singular Volterra kernel onto [0, 1].  Both endpoints may be singular
(alpha_exp < 1 at u = 1, beta_exp > 0 at u = 0), so nodes and weights come
from the three-term recurrence of the orthogonal polynomials of the
corresponding Jacobi weight on [-1, 1] (Golub-Welsch: eigen-decomposition of
the symmetric tridiagonal recurrence matrix), then get mapped to [0, 1].
The weight is never sampled pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = ["gamma", "beta", "QuadratureRule", "build_quadrature"]

# Relative tolerances baked into the QuadratureRule contract.
_WEIGHT_SUM_RTOL = 1e-12


def gamma(x: float) -> float:
    """Gamma function for positive real x."""
    if not (np.isfinite(x) and x > 0):
        raise ValueError(f"gamma requires x > 0, got {x!r}")
    return math.gamma(x)


def beta(a: float, b: float) -> float:
    """Beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), a, b > 0.

    Evaluated in log space so large arguments do not overflow intermediate
    Gamma values.
    """
    if not (np.isfinite(a) and a > 0) or not (np.isfinite(b) and b > 0):
        raise ValueError(f"beta requires positive arguments, got ({a!r}, {b!r})")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


@dataclass(frozen=True)
class QuadratureRule:
    """Gaussian rule for w(u) = (1-u)**(alpha_exp-1) * u**(-beta_exp) on [0, 1].

    Invariants (checked at construction):
      * nodes strictly increasing, all inside the open interval (0, 1);
      * weights all positive;
      * sum(weights) == B(alpha_exp, 1 - beta_exp) to 1e-12 relative.

    An n-node rule integrates u**k exactly against w for all k <= 2n - 1.
    Instances are immutable and safe to share across threads.
    """

    alpha_exp: float
    beta_exp: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.ascontiguousarray(np.asarray(self.nodes, dtype=float))
        weights = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if nodes.size == 0:
            raise ValueError("a quadrature rule needs at least one node")
        if not (np.all(nodes > 0.0) and np.all(nodes < 1.0)):
            raise ArithmeticError("quadrature nodes fell outside (0, 1)")
        if not np.all(np.diff(nodes) > 0.0):
            raise ArithmeticError("quadrature nodes are not strictly increasing")
        if not np.all(weights > 0.0):
            raise ArithmeticError("quadrature produced non-positive weights")
        total = beta(self.alpha_exp, 1.0 - self.beta_exp)
        if abs(float(weights.sum()) - total) > _WEIGHT_SUM_RTOL * total:
            raise ArithmeticError(
                "quadrature weight sum disagrees with the Beta-function mass"
            )
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    def integrate(self, f) -> float:
        """Apply the rule to a callable f(u) (vectorised over u)."""
        return float(self.weights @ np.asarray(f(self.nodes), dtype=float))


def _jacobi_tridiagonal(n: int, a: float, b: float):
    """Diagonal/off-diagonal of the n x n Jacobi matrix for (1-x)**a (1+x)**b."""
    ab = a + b
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2.0)
    if n > 1:
        k = np.arange(1.0, n)
        diag[1:] = (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        # k = 1 needs its own expression: the generic one is 0/0 when a + b = -1.
        off[0] = math.sqrt(4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0)))
    if n > 2:
        k = np.arange(2.0, n)
        num = 4.0 * k * (k + a) * (k + b) * (k + ab)
        den = (2.0 * k + ab) ** 2 * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0)
        off[1:] = np.sqrt(num / den)
    return diag, off


def build_quadrature(alpha_exp: float, beta_exp: float, n_nodes: int) -> QuadratureRule:
    """Build the n-node Gaussian rule for (1-u)**(alpha_exp-1) u**(-beta_exp).

    alpha_exp must lie in (0, 1] and beta_exp in [0, 1).  With
    (alpha_exp, beta_exp) = (1, 0) this reduces to Gauss-Legendre on [0, 1].
    """
    if not (np.isfinite(alpha_exp) and 0.0 < alpha_exp <= 1.0):
        raise ValueError(f"alpha_exp must lie in (0, 1], got {alpha_exp!r}")
    if not (np.isfinite(beta_exp) and 0.0 <= beta_exp < 1.0):
        raise ValueError(f"beta_exp must lie in [0, 1), got {beta_exp!r}")
    n_nodes = int(n_nodes)
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be a positive integer, got {n_nodes}")

    a = alpha_exp - 1.0  # exponent on (1 - x), in (-1, 0]
    b = -beta_exp        # exponent on (1 + x), in (-1, 0]
    diag, off = _jacobi_tridiagonal(n_nodes, a, b)
    try:
        x, vecs = eigh_tridiagonal(diag, off)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("Golub-Welsch eigen-decomposition failed") from exc

    # mu0 = integral of the Jacobi weight over [-1, 1], in log space.
    log_mu0 = (a + b + 1.0) * math.log(2.0) + (
        math.lgamma(a + 1.0) + math.lgamma(b + 1.0) - math.lgamma(a + b + 2.0)
    )
    w = math.exp(log_mu0) * vecs[0, :] ** 2

    # Map x in [-1, 1] to u = (1+x)/2 in [0, 1]; the change of variables
    # scales the total mass by 2**(a+b+1).
    u = 0.5 * (x + 1.0)
    w_unit = w * math.exp(-(a + b + 1.0) * math.log(2.0))
    return QuadratureRule(alpha_exp, beta_exp, u, w_unit)
