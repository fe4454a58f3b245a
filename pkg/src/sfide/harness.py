"""Monte-Carlo experiments: mean-square error, rate fits, moment and
stability probes.

The error of a step size h is measured against the same paths solved at h/2:

    eps(h) = sqrt( (1/M) sum_i |Y_h(T, w_i) - Y_{h/2}(T, w_i)|^2 )

with the two resolutions coupled exactly (coarse increments are pairwise sums
of fine ones).  The fitted slope of log eps against log h estimates the
strong convergence order, which for this scheme is the fractional order
alpha, with an extra |ln h|**(1/2) factor exactly when alpha - beta2 = 1/2.

Paths are independent work units: each is computed by a pure function of
(seed, path_index), results land in pre-assigned slots and are reduced in
index order, so every statistic here is bit-identical regardless of the
worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .kernels import KernelContext
from .noise import RNG_ID, coarsen, generate
from .solver import ExplosionError, solve

__all__ = [
    "ErrorTable",
    "StabilityReport",
    "HarnessExplosionError",
    "estimate_ms_error",
    "run_convergence_study",
    "moment_probe",
    "run_stability_probe",
    "fit_rate",
    "write_error_table_csv",
    "write_stability_csv",
]

_LOG_CASE_TOL = 1e-12


class HarnessExplosionError(RuntimeError):
    """One or more sample paths exploded; lists every failed index."""

    def __init__(self, failures):
        self.failures = list(failures)
        idx = ", ".join(str(i) for i, _ in self.failures)
        super().__init__(f"{len(self.failures)} path(s) exploded: indices {idx}")


@dataclass(frozen=True)
class ErrorTable:
    """Rows (N, h, eps, M) in decreasing h, plus the fitted log-log slope."""

    rows: tuple
    fitted_rate: float
    theoretical_rate: float
    log_corrected: bool
    seed: int
    spec_hash: str
    rng: str = RNG_ID
    excluded: tuple = ()  # N values whose eps was exactly 0 (log undefined)


@dataclass(frozen=True)
class StabilityReport:
    """Worst grid-point mean-square gap between two initial values."""

    y0: tuple
    z0: tuple
    sup_msd: float
    M: int
    N: int
    seed: int
    spec_hash: str


def fit_rate(h_values, eps_values):
    """Least-squares slope of log(eps) vs log(h); rows with eps = 0 are
    excluded (their N values are returned alongside the slope)."""
    h = np.asarray(h_values, dtype=float)
    eps = np.asarray(eps_values, dtype=float)
    mask = eps > 0.0
    if mask.sum() < 2:
        return float("nan"), [i for i, keep in enumerate(mask) if not keep]
    slope = float(np.polyfit(np.log(h[mask]), np.log(eps[mask]), 1)[0])
    return slope, [i for i, keep in enumerate(mask) if not keep]


def _coupled_sq_gap(ctx, N, seed, index):
    """|Y_h(T) - Y_{h/2}(T)|^2 for one path, both levels on the same noise."""
    fine = generate(seed, index, 2 * N, ctx.spec.r, ctx.spec.T / (2 * N))
    try:
        y_fine = solve(ctx, fine).values[-1]
        y_coarse = solve(ctx, coarsen(fine)).values[-1]
    except ExplosionError as exc:
        return ("explosion", index, str(exc))
    return float(np.sum((y_coarse - y_fine) ** 2))


def _collect(results):
    failures = [
        (res[1], res[2])
        for res in results
        if isinstance(res, tuple) and res and res[0] == "explosion"
    ]
    if failures:
        raise HarnessExplosionError(failures)
    return results


def estimate_ms_error(ctx: KernelContext, N: int, M: int, seed: int, n_jobs: int = 1):
    """Return (h, eps) for step h = T/N using M coupled sample paths.

    Deterministic in (spec, N, M, seed); path explosions raise with every
    failed index listed, nothing is dropped silently.
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    sq = _collect(
        Parallel(n_jobs=n_jobs)(
            delayed(_coupled_sq_gap)(ctx, N, seed, i) for i in range(M)
        )
    )
    eps = math.sqrt(float(np.mean(np.asarray(sq, dtype=float))))
    return ctx.spec.T / N, eps


def run_convergence_study(ctx: KernelContext, N_values, M: int, seed: int,
                          n_jobs: int = 1) -> ErrorTable:
    """One estimate_ms_error row per N (same seed base), plus the rate fit."""
    N_values = [int(N) for N in N_values]
    if len(N_values) < 3:
        raise ValueError("need at least 3 grid sizes")
    if any(b <= a for a, b in zip(N_values, N_values[1:])):
        raise ValueError("N_values must be strictly increasing")
    rows = []
    for N in N_values:
        h, eps = estimate_ms_error(ctx, N, M, seed, n_jobs=n_jobs)
        rows.append((N, h, eps, M))
    fitted, excluded_idx = fit_rate([r[1] for r in rows], [r[2] for r in rows])
    alpha, beta2 = ctx.spec.alpha, ctx.spec.beta2
    return ErrorTable(
        rows=tuple(rows),
        fitted_rate=fitted,
        theoretical_rate=float(alpha),
        log_corrected=bool(abs(alpha - beta2 - 0.5) <= _LOG_CASE_TOL),
        seed=int(seed),
        spec_hash=ctx.spec.spec_hash,
        excluded=tuple(rows[i][0] for i in excluded_idx),
    )


def _moment_path(ctx, N, p, seed, index):
    paths = generate(seed, index, N, ctx.spec.r, ctx.spec.T / N)
    try:
        traj = solve(ctx, paths)
    except ExplosionError as exc:
        return ("explosion", index, str(exc))
    sq = np.sum(traj.values**2, axis=1)
    return sq ** (p / 2.0)


def moment_probe(ctx: KernelContext, N: int, M: int, p: int, seed: int,
                 n_jobs: int = 1) -> float:
    """Max over grid points of the sample mean of |Y_n|**p across M paths."""
    if p < 2 or p % 2 != 0:
        raise ValueError(f"p must be an even integer >= 2, got {p}")
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    per_path = _collect(
        Parallel(n_jobs=n_jobs)(
            delayed(_moment_path)(ctx, N, p, seed, i) for i in range(M)
        )
    )
    mean_over_paths = np.sum(np.stack(per_path, axis=0), axis=0) / M
    return float(mean_over_paths.max())


def _stability_path(ctx, N, y0, z0, seed, index):
    paths = generate(seed, index, N, ctx.spec.r, ctx.spec.T / N)
    try:
        ya = solve(ctx, paths, y0=y0)
        yb = solve(ctx, paths, y0=z0)
    except ExplosionError as exc:
        return ("explosion", index, str(exc))
    return np.sum((ya.values - yb.values) ** 2, axis=1)


def run_stability_probe(ctx: KernelContext, y0, z0, N: int, M: int, seed: int,
                        n_jobs: int = 1) -> StabilityReport:
    """Solve each path twice with identical increments from y0 and z0; report
    the max over the grid of the sample-mean squared gap."""
    y0 = np.asarray(y0, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    d = ctx.spec.d
    if y0.shape != (d,) or z0.shape != (d,):
        raise ValueError(f"y0 and z0 must have shape ({d},)")
    per_path = _collect(
        Parallel(n_jobs=n_jobs)(
            delayed(_stability_path)(ctx, N, y0, z0, seed, i) for i in range(M)
        )
    )
    msd = np.sum(np.stack(per_path, axis=0), axis=0) / M
    return StabilityReport(
        y0=tuple(float(v) for v in y0),
        z0=tuple(float(v) for v in z0),
        sup_msd=float(msd.max()),
        M=int(M),
        N=int(N),
        seed=int(seed),
        spec_hash=ctx.spec.spec_hash,
    )


def _metadata(pairs) -> str:
    return ", ".join(f"{k}={v}" for k, v in pairs)


def write_error_table_csv(table: ErrorTable, file, version: str = "") -> None:
    """Header N,h,eps,M,seed; rows in decreasing h; one metadata comment."""
    close = False
    if isinstance(file, (str, bytes)):
        file = open(file, "w", newline="")
        close = True
    try:
        file.write("N,h,eps,M,seed\n")
        for N, h, eps, M in table.rows:
            file.write(f"{N},{h:.17g},{eps:.17g},{M},{table.seed}\n")
        meta = _metadata(
            [
                ("fitted_rate", f"{table.fitted_rate:.17g}"),
                ("theoretical_rate", f"{table.theoretical_rate:.17g}"),
                ("log_corrected", table.log_corrected),
                ("rng", table.rng),
                ("spec_hash", table.spec_hash),
                ("seed", table.seed),
                ("excluded", ";".join(str(n) for n in table.excluded) or "none"),
                ("version", version),
            ]
        )
        file.write(f"# {meta}\n")
    finally:
        if close:
            file.close()


def write_stability_csv(report: StabilityReport, file, version: str = "") -> None:
    close = False
    if isinstance(file, (str, bytes)):
        file = open(file, "w", newline="")
        close = True
    try:
        file.write("N,M,y0,z0,sup_msd,seed\n")
        y0 = ";".join(f"{v:.17g}" for v in report.y0)
        z0 = ";".join(f"{v:.17g}" for v in report.z0)
        file.write(
            f"{report.N},{report.M},{y0},{z0},{report.sup_msd:.17g},{report.seed}\n"
        )
        meta = _metadata(
            [
                ("rng", RNG_ID),
                ("spec_hash", report.spec_hash),
                ("seed", report.seed),
                ("version", version),
            ]
        )
        file.write(f"# {meta}\n")
    finally:
        if close:
            file.close()
