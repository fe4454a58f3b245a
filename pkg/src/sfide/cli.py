"""Command-line front end.

One command per process; all randomness derives from the configured seed, and
identical configurations produce byte-identical CSV artifacts regardless of
the worker count.  Exit codes: 0 success, 2 configuration error, 3 numerical
explosion, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .analysis import check_lemma_order, write_lemma_csv
from .config import COMMANDS, ConfigError, ExperimentConfig, parse_config
from .harness import (
    HarnessExplosionError,
    moment_probe,
    run_convergence_study,
    run_stability_probe,
    write_error_table_csv,
    write_stability_csv,
)
from .kernels import make_context
from .noise import RNG_ID, generate
from .problem import ProblemValidationError, probe_assumptions, validate
from .solver import BatchExplosionError, ExplosionError, solve, write_trajectory_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

_DEFAULT_LEMMA_GRIDS = [16, 32, 64, 128, 256, 512, 1024]
_DEFAULT_CONVERGE_GRIDS = [8, 16, 32, 64, 128]


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sfide",
        description="Experiments for singular-kernel stochastic fractional "
        "integro-differential equations.",
    )
    p.add_argument("--config", help="path to a flat key = value config file")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--problem")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--T", type=float, dest="T")
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--N-values", dest="N_values",
                   type=lambda s: [int(v) for v in s.split(",") if v])
    p.add_argument("--M", type=int, dest="M")
    p.add_argument("--p", type=int, dest="p")
    p.add_argument("--seed", type=int)
    p.add_argument("--quad-nodes", type=int, dest="quad_nodes")
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--y0", type=lambda s: [float(v) for v in s.split(",") if v])
    p.add_argument("--z0", type=lambda s: [float(v) for v in s.split(",") if v])
    p.add_argument("--c", type=float, dest="c")
    p.add_argument("--which", choices=["L1", "L2", "both"])
    p.add_argument("--n-samples", type=int, dest="n_samples")
    p.add_argument("--max-radius", type=float, dest="max_radius")
    p.add_argument("--version", action="version", version=f"sfide {__version__}")
    return p


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    text = ""
    if args.config:
        with open(args.config, "r") as fh:
            text = fh.read()
    overrides = {
        k: getattr(args, k)
        for k in (
            "command", "problem", "alpha", "beta1", "beta2", "T", "y0", "z0", "c",
            "N", "N_values", "M", "p", "seed", "out", "quad_nodes", "threads",
            "which", "n_samples", "max_radius",
        )
    }
    return parse_config(text, overrides)


def _meta(cfg: ExperimentConfig, spec_hash: str) -> str:
    return (
        f"spec_hash={spec_hash}, seed={cfg.seed}, rng={RNG_ID}, version={__version__}"
    )


def _cmd_simulate(cfg: ExperimentConfig) -> str:
    spec = cfg.build_problem()
    validate(spec)
    ctx = make_context(spec, cfg.quad_nodes)
    paths = generate(cfg.seed, 0, cfg.N, spec.r, spec.T / cfg.N)
    traj = solve(ctx, paths)
    out = cfg.output_path()
    write_trajectory_csv(traj, out, metadata=_meta(cfg, spec.spec_hash) + ", path_index=0")
    final = float(np.linalg.norm(traj.values[-1]))
    return f"simulate: N={cfg.N} |Y_N|={final:.6g} -> {out}"


def _cmd_converge(cfg: ExperimentConfig) -> str:
    spec = cfg.build_problem()
    validate(spec)
    ctx = make_context(spec, cfg.quad_nodes)
    grids = cfg.N_values if cfg.N_values is not None else _DEFAULT_CONVERGE_GRIDS
    table = run_convergence_study(ctx, grids, cfg.M, cfg.seed, n_jobs=cfg.threads)
    out = cfg.output_path()
    write_error_table_csv(table, out, version=__version__)
    return (
        f"converge: fitted_rate={table.fitted_rate:.4f} "
        f"theoretical_rate={table.theoretical_rate:.4f} "
        f"log_corrected={table.log_corrected} -> {out}"
    )


def _cmd_stability(cfg: ExperimentConfig) -> str:
    spec = cfg.build_problem()
    validate(spec)
    ctx = make_context(spec, cfg.quad_nodes)
    y0 = np.asarray(spec.y0, dtype=float)
    if cfg.z0 is not None:
        z0 = np.asarray(cfg.z0, dtype=float)
    else:
        z0 = y0 + 0.1 / np.sqrt(spec.d)  # default perturbation of size 0.1
    report = run_stability_probe(ctx, y0, z0, cfg.N, cfg.M, cfg.seed, n_jobs=cfg.threads)
    out = cfg.output_path()
    write_stability_csv(report, out, version=__version__)
    return f"stability: sup_msd={report.sup_msd:.6g} -> {out}"


def _cmd_moments(cfg: ExperimentConfig) -> str:
    spec = cfg.build_problem()
    validate(spec)
    ctx = make_context(spec, cfg.quad_nodes)
    value = moment_probe(ctx, cfg.N, cfg.M, cfg.p, cfg.seed, n_jobs=cfg.threads)
    out = cfg.output_path()
    with open(out, "w", newline="") as fh:
        fh.write("N,M,p,moment,seed\n")
        fh.write(f"{cfg.N},{cfg.M},{cfg.p},{value:.17g},{cfg.seed}\n")
        fh.write(f"# {_meta(cfg, spec.spec_hash)}\n")
    return f"moments: max_n E|Y_n|^{cfg.p}={value:.6g} -> {out}"


def _cmd_lemma_check(cfg: ExperimentConfig) -> str:
    grids = cfg.N_values if cfg.N_values is not None else _DEFAULT_LEMMA_GRIDS
    domains = {"L1": -1.0 < cfg.c < 1.0, "L2": -0.5 < cfg.c <= 1.0}
    if cfg.which == "both":
        which = [w for w in ("L1", "L2") if domains[w]]
        if not which:
            raise ConfigError(f"c = {cfg.c:g} is outside both integrals' exponent ranges")
        for w in ("L1", "L2"):
            if not domains[w]:
                print(f"sfide: skipping {w}: c = {cfg.c:g} outside its exponent range",
                      file=sys.stderr)
    else:
        if not domains[cfg.which]:
            raise ConfigError(
                f"c = {cfg.c:g} is outside the exponent range of {cfg.which}"
            )
        which = [cfg.which]
    results = [check_lemma_order(w, cfg.c, grids) for w in which]
    out = cfg.output_path()
    # deterministic integrals: no problem instance and no randomness involved
    write_lemma_csv(
        results, out,
        metadata=f"spec_hash=none, seed=none, rng=none, version={__version__}",
    )
    summary = "; ".join(
        f"{res.which}: fitted={res.fitted_order:.3f} predicted={res.predicted_order:.3f}"
        + (" (log factor)" if res.log_corrected else "")
        for res in results
    )
    return f"lemma-check c={cfg.c:g}: {summary} -> {out}"


def _cmd_probe_assumptions(cfg: ExperimentConfig) -> str:
    spec = cfg.build_problem()
    validate(spec)
    report = probe_assumptions(spec, cfg.n_samples, cfg.max_radius, cfg.seed)
    out = cfg.output_path()
    with open(out, "w", newline="") as fh:
        fh.write("quantity,radius,value\n")
        fh.write(f"est_L1,,{report.est_L1:.17g}\n")
        fh.write(f"est_L2,,{report.est_L2:.17g}\n")
        fh.write(f"est_L,,{report.est_L:.17g}\n")
        for m in sorted(report.est_Km):
            fh.write(f"est_Km,{m:g},{report.est_Km[m]:.17g}\n")
        fh.write(f"# {report.to_lines()[0]}, {_meta(cfg, spec.spec_hash)}\n")
    return (
        f"probe-assumptions: est_L1>={report.est_L1:.4g} est_L2>={report.est_L2:.4g} "
        f"est_L>={report.est_L:.4g} est_K[{cfg.max_radius:g}]>="
        f"{report.est_Km[max(report.est_Km)]:.4g} -> {out}"
    )


_DISPATCH = {
    "simulate": _cmd_simulate,
    "converge": _cmd_converge,
    "stability": _cmd_stability,
    "moments": _cmd_moments,
    "lemma-check": _cmd_lemma_check,
    "probe-assumptions": _cmd_probe_assumptions,
}


def run(cfg: ExperimentConfig) -> int:
    """Dispatch a validated configuration; returns a process exit code."""
    try:
        summary = _DISPATCH[cfg.command](cfg)
    except (ConfigError, ProblemValidationError) as exc:
        print(f"sfide: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExplosionError, BatchExplosionError, HarnessExplosionError, ArithmeticError) as exc:
        print(f"sfide: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"sfide: i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO
    print(summary)
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"sfide: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"sfide: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
