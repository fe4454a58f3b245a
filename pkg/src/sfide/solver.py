"""Time stepper for the transformed Volterra dynamics.

The update freezes the second kernel argument and the state at grid points
(left-rectangle in s) and needs only Brownian increments:

    Y_n = y0 + sum_{j<n} F0(t_n, t_j, Y_j) h
             + sum_{j<n} F1(t_n, t_j, Y_j) h
             + sum_{j<n} F2(t_n, t_j, Y_j) dW_j

Every step re-evaluates the kernels over the whole history because F_i
depends on t_n, giving N(N+1)/2 evaluation points per kernel; the O(N^2)
cost is accepted for fidelity (no kernel compression).  The per-step history
is evaluated as one numpy batch, so the floating-point result is a fixed
function of the inputs and independent of worker scheduling.

The gap of the j = n-1 term is exactly h; for alpha < 1 its F0 weight
h**(alpha-1) is large but finite, and no special casing is applied.
Non-finite states abort the path immediately (no clamping: bounded moments
are part of the coefficient contract, and clamping would mask violations).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .kernels import KernelContext, KernelEvalCounter
from .noise import BrownianPaths, generate
from .problem import batch_coefficients

__all__ = [
    "Trajectory",
    "ExplosionError",
    "BatchExplosionError",
    "solve",
    "solve_batch",
    "write_trajectory_csv",
]

_H_RTOL = 1e-12


class ExplosionError(RuntimeError):
    """A state became non-finite at step `step`; last_norm is |Y_{step-1}|."""

    def __init__(self, step: int, last_norm: float, path_index=None):
        self.step = step
        self.last_norm = last_norm
        self.path_index = path_index
        where = "" if path_index is None else f" (path {path_index})"
        super().__init__(
            f"trajectory exploded at step {step}{where}: previous |Y| = {last_norm:.6g}"
        )


class BatchExplosionError(RuntimeError):
    """Some paths of a batch exploded; the rest are still available.

    failures: list of (path_index, message); completed: dict path_index ->
    Trajectory for every path that finished.
    """

    def __init__(self, failures, completed):
        self.failures = list(failures)
        self.completed = dict(completed)
        idx = ", ".join(str(i) for i, _ in self.failures)
        super().__init__(
            f"{len(self.failures)} path(s) exploded (indices {idx}); "
            f"{len(self.completed)} completed"
        )


@dataclass(frozen=True)
class Trajectory:
    """Grid values of one solved path: values[n] approximates y(n*h)."""

    grid: np.ndarray
    values: np.ndarray
    spec_hash: str
    path_meta: tuple

    def __post_init__(self):
        g = np.ascontiguousarray(np.asarray(self.grid, dtype=float))
        v = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def n_steps(self) -> int:
        return self.values.shape[0] - 1


def solve(ctx: KernelContext, paths: BrownianPaths, y0=None,
          counter: KernelEvalCounter | None = None) -> Trajectory:
    """March one trajectory on the grid defined by `paths`.

    y0 overrides the problem's initial value (used by the stability probe).
    Y_n only reads increments with index < n, so perturbing later increments
    leaves earlier states untouched.
    """
    spec = ctx.spec
    N, h = paths.n_steps, paths.h
    if abs(h * N - spec.T) > _H_RTOL * max(abs(spec.T), 1.0):
        raise ValueError(f"paths cover {h * N!r}, problem horizon is {spec.T!r}")
    if paths.r != spec.r:
        raise ValueError(f"paths carry {paths.r} Wiener components, problem needs {spec.r}")

    d, r = spec.d, spec.r
    start = spec.y0 if y0 is None else np.asarray(y0, dtype=float)
    if start.shape != (d,):
        raise ValueError(f"initial value must have shape ({d},), got {start.shape}")

    f0, f1, f2 = batch_coefficients(spec)
    a, b1, b2 = spec.alpha, spec.beta1, spec.beta2
    u1, w1 = ctx.rule1.nodes, ctx.rule1.weights
    u2, w2 = ctx.rule2.nodes, ctx.rule2.weights
    inv_gamma = 1.0 / ctx.gamma_alpha
    dW = paths.increments

    grid = np.arange(N + 1) * h
    # Gap k*h appears for every pair with n - j = k; precompute its powers once.
    gaps = np.arange(1, N + 1) * h
    pow0 = gaps ** (a - 1.0)
    pow1 = gaps ** (a - b1)
    pow2 = gaps ** (a - b2)

    Y = np.empty((N + 1, d))
    Y[0] = start
    for n in range(1, N + 1):
        s = grid[:n]
        hist = Y[:n]
        g = gaps[:n][::-1]  # t_n - t_j for j = 0..n-1
        s_col = s[:, None]

        v0 = np.broadcast_to(np.asarray(f0(s, hist), dtype=float), (n, d))
        sum0 = np.einsum("j,jd->d", pow0[:n][::-1], v0)

        tau1 = g[:, None] * u1 + s_col
        v1 = np.asarray(f1(tau1, s_col, hist[:, None, :]), dtype=float)
        v1 = np.broadcast_to(v1, (n, u1.size, d))
        inner1 = np.einsum("q,nqd->nd", w1, v1)
        sum1 = np.einsum("j,jd->d", pow1[:n][::-1], inner1)

        tau2 = g[:, None] * u2 + s_col
        v2 = np.asarray(f2(tau2, s_col, hist[:, None, :]), dtype=float)
        v2 = np.broadcast_to(v2, (n, u2.size, d, r))
        inner2 = np.einsum("q,nqdr->ndr", w2, v2)
        f2rows = pow2[:n][::-1, None, None] * inner2
        sum2 = np.einsum("jdr,jr->d", f2rows, dW[:n])

        yn = start + sum0 * (h * inv_gamma) + sum1 * (h * inv_gamma) + sum2 * inv_gamma
        if counter is not None:
            counter.add(n, n, n)
        if not np.all(np.isfinite(yn)):
            raise ExplosionError(n, float(np.linalg.norm(Y[n - 1])),
                                 path_index=paths.path_index)
        Y[n] = yn

    return Trajectory(
        grid=grid,
        values=Y,
        spec_hash=spec.spec_hash,
        path_meta=(paths.seed, paths.path_index),
    )


def _solve_one(ctx, seed, index, N, h):
    try:
        return solve(ctx, generate(seed, index, N, ctx.spec.r, h))
    except ExplosionError as exc:
        return ("explosion", index, str(exc))


def solve_batch(ctx: KernelContext, seed: int, path_range, N: int, n_jobs: int = 1):
    """Solve one trajectory per path index; output order follows the indices
    regardless of execution schedule.

    If any path explodes, raises BatchExplosionError carrying both the failed
    indices and every completed Trajectory.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    indices = list(path_range)
    if not indices:
        raise ValueError("path_range must be nonempty")
    h = ctx.spec.T / N
    results = Parallel(n_jobs=n_jobs)(
        delayed(_solve_one)(ctx, seed, i, N, h) for i in indices
    )
    failures = [(res[1], res[2]) for res in results if isinstance(res, tuple) and res and res[0] == "explosion"]
    if failures:
        completed = {
            i: res for i, res in zip(indices, results) if isinstance(res, Trajectory)
        }
        raise BatchExplosionError(failures, completed)
    return results


def write_trajectory_csv(traj: Trajectory, file, metadata: str | None = None) -> None:
    """CSV export: header t,y_1,...,y_d then one row per grid point with 17
    significant digits; an optional trailing metadata comment line."""
    d = traj.values.shape[1]
    close = False
    if isinstance(file, (str, bytes)):
        file = open(file, "w", newline="")
        close = True
    try:
        file.write("t," + ",".join(f"y_{k+1}" for k in range(d)) + "\n")
        for t, row in zip(traj.grid, traj.values):
            file.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")
        if metadata:
            file.write(f"# {metadata}\n")
    finally:
        if close:
            file.close()
