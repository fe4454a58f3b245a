"""Kernels of the equivalent stochastic Volterra integral equation.

Applying the fractional integral to the problem and exchanging integration
order turns it into

    y(t) = y0 + int_0^t F0(t,s,y(s)) ds + int_0^t F1(t,s,y(s)) ds
              + int_0^t F2(t,s,y(s)) dW(s)

with

    F0(t,s,y) = (t-s)**(alpha-1) * f0(s,y) / Gamma(alpha)
    Fi(t,s,y) = (t-s)**(alpha-beta_i) / Gamma(alpha)
                * int_0^1 (1-u)**(alpha-1) u**(-beta_i) fi((t-s)u + s, s, y) du

for i = 1, 2.  The inner integral lives on the unit interval independently of
the gap t - s, so one quadrature rule per exponent pair serves every (t, s).
Evaluation never caches across (t, s): fi depends on absolute times, not just
the gap, so memoisation would be unsound.

s = t is rejected rather than defined: (t-s)**(alpha-beta_i) vanishes there
when alpha > beta_i but diverges when alpha < beta_i, so no continuous
extension exists; the time-stepping scheme only ever requests gaps >= h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import ProblemSpec
from .specfun import QuadratureRule, build_quadrature, gamma

__all__ = ["KernelContext", "KernelEvalCounter", "make_context", "eval_F0", "eval_F1", "eval_F2"]

_T_SLACK = 1e-10  # relative slack for t <= T (grids carry one rounding of n*h)


class KernelEvalCounter:
    """Mutable tally of kernel evaluation points (one per (t, s) pair)."""

    def __init__(self):
        self.f0 = 0
        self.f1 = 0
        self.f2 = 0

    def add(self, n0: int, n1: int, n2: int):
        self.f0 += n0
        self.f1 += n1
        self.f2 += n2


@dataclass(frozen=True)
class KernelContext:
    """Immutable bundle of a problem and its two inner-integral rules.

    rule1 integrates against (1-u)**(alpha-1) u**(-beta1), rule2 the same with
    beta2; gamma_alpha caches Gamma(alpha).  Shareable across threads.
    """

    spec: ProblemSpec
    rule1: QuadratureRule
    rule2: QuadratureRule
    gamma_alpha: float

    def __post_init__(self):
        if self.rule1.alpha_exp != self.spec.alpha or self.rule2.alpha_exp != self.spec.alpha:
            raise ValueError("quadrature rules must use the problem's fractional order")
        if self.rule1.beta_exp != self.spec.beta1:
            raise ValueError("rule1 must match the drift-kernel exponent beta1")
        if self.rule2.beta_exp != self.spec.beta2:
            raise ValueError("rule2 must match the diffusion-kernel exponent beta2")
        if not self.gamma_alpha > 0:
            raise ValueError("gamma_alpha must be positive")


def make_context(spec: ProblemSpec, n_quad_nodes: int = 8) -> KernelContext:
    """Build a KernelContext with matched quadrature rules for both kernels."""
    return KernelContext(
        spec=spec,
        rule1=build_quadrature(spec.alpha, spec.beta1, n_quad_nodes),
        rule2=build_quadrature(spec.alpha, spec.beta2, n_quad_nodes),
        gamma_alpha=gamma(spec.alpha),
    )


def _check_times(spec: ProblemSpec, t: float, s: float):
    if not (np.isfinite(t) and np.isfinite(s)):
        raise ValueError(f"times must be finite, got t={t!r}, s={s!r}")
    if not (0.0 <= s < t):
        raise ValueError(f"kernel evaluation requires 0 <= s < t, got s={s!r}, t={t!r}")
    if t > spec.T * (1.0 + _T_SLACK):
        raise ValueError(f"t={t!r} exceeds the horizon T={spec.T!r}")


def _check_state(spec: ProblemSpec, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.d,):
        raise ValueError(f"state must have shape ({spec.d},), got {y.shape}")
    return y


def eval_F0(ctx: KernelContext, t: float, s: float, y) -> np.ndarray:
    """(t-s)**(alpha-1) * f0(s, y) / Gamma(alpha), shape (d,)."""
    spec = ctx.spec
    _check_times(spec, t, s)
    y = _check_state(spec, y)
    vals = np.asarray(spec.f0(s, y), dtype=float).reshape(spec.d)
    return (t - s) ** (spec.alpha - 1.0) * vals / ctx.gamma_alpha


def _inner_nodes_values(spec, rule, fn, t, s, y, tail):
    tau = (t - s) * rule.nodes + s
    if spec.vectorized:
        vals = np.asarray(fn(tau, s, y), dtype=float)
        vals = np.broadcast_to(vals, (rule.n_nodes,) + tail)
    else:
        vals = np.stack([np.asarray(fn(tk, s, y), dtype=float).reshape(tail) for tk in tau])
    return vals


def eval_F1(ctx: KernelContext, t: float, s: float, y) -> np.ndarray:
    """Quadrature of the drift inner integral, scaled by (t-s)**(alpha-beta1)/Gamma(alpha)."""
    spec = ctx.spec
    _check_times(spec, t, s)
    y = _check_state(spec, y)
    vals = _inner_nodes_values(spec, ctx.rule1, spec.f1, t, s, y, (spec.d,))
    inner = np.einsum("q,qd->d", ctx.rule1.weights, vals)
    return (t - s) ** (spec.alpha - spec.beta1) * inner / ctx.gamma_alpha


def eval_F2(ctx: KernelContext, t: float, s: float, y) -> np.ndarray:
    """Entrywise quadrature of the diffusion inner integral, shape (d, r)."""
    spec = ctx.spec
    _check_times(spec, t, s)
    y = _check_state(spec, y)
    vals = _inner_nodes_values(spec, ctx.rule2, spec.f2, t, s, y, (spec.d, spec.r))
    inner = np.einsum("q,qdr->dr", ctx.rule2.weights, vals)
    return (t - s) ** (spec.alpha - spec.beta2) * inner / ctx.gamma_alpha
