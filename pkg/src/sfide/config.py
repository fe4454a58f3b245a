"""Flat key = value experiment configuration.

Line-oriented files: one ``key = value`` per line, ``#`` starts a comment,
blank lines are ignored.  Unknown keys, malformed values and range violations
are reported with their line number.  Command-line flags override file
values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .problem import ProblemSpec
from .problems import PROBLEM_NAMES, make_problem

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "spec_to_config", "COMMANDS"]

COMMANDS = ("simulate", "converge", "stability", "moments", "lemma-check", "probe-assumptions")

_PROBLEM_COMMANDS = {"simulate", "converge", "stability", "moments", "probe-assumptions"}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _parse_float(text: str):
    return float(text)


def _parse_int(text: str):
    v = int(text)
    return v


def _parse_floats(text: str):
    return [float(p) for p in text.replace(" ", "").split(",") if p]


def _parse_ints(text: str):
    return [int(p) for p in text.replace(" ", "").split(",") if p]


def _parse_str(text: str):
    return text


_KEYS = {
    "command": _parse_str,
    "problem": _parse_str,
    "alpha": _parse_float,
    "beta1": _parse_float,
    "beta2": _parse_float,
    "T": _parse_float,
    "y0": _parse_floats,
    "z0": _parse_floats,
    "c": _parse_float,
    "N": _parse_int,
    "N_values": _parse_ints,
    "M": _parse_int,
    "p": _parse_int,
    "seed": _parse_int,
    "out": _parse_str,
    "quad_nodes": _parse_int,
    "threads": _parse_int,
    "which": _parse_str,
    "n_samples": _parse_int,
    "max_radius": _parse_float,
}


@dataclass
class ExperimentConfig:
    command: str
    problem: str | None = None
    alpha: float = 0.8
    beta1: float = 0.5
    beta2: float = 0.25
    T: float = 1.0
    y0: list | None = None
    z0: list | None = None
    c: float | None = None
    N: int = 64
    N_values: list | None = None  # per-command default applied at dispatch
    M: int = 5000
    p: int = 2
    seed: int = 42
    out: str | None = None
    quad_nodes: int = 8
    threads: int = 1
    which: str = "both"
    n_samples: int = 256
    max_radius: float = 4.0

    def build_problem(self) -> ProblemSpec:
        if self.problem is None:
            raise ConfigError(f"missing required key: problem (command {self.command})")
        kwargs = dict(alpha=self.alpha, beta1=self.beta1, beta2=self.beta2, T=self.T)
        if self.y0 is not None:
            kwargs["y0"] = self.y0
        if self.problem == "constant_drift":
            kwargs["c"] = 1.0 if self.c is None else self.c
        return make_problem(self.problem, **kwargs)

    def output_path(self) -> str:
        return self.out if self.out else f"{self.command.replace('-', '_')}.csv"


def _range_checks(cfg: ExperimentConfig, lines: dict):
    def fail(key, message):
        raise ConfigError(f"{key} {message}", lines.get(key))

    if cfg.command not in COMMANDS:
        fail("command", f"= {cfg.command!r} is not one of {', '.join(COMMANDS)}")
    if cfg.problem is not None and cfg.problem not in PROBLEM_NAMES:
        fail("problem", f"= {cfg.problem!r} is not one of {', '.join(PROBLEM_NAMES)}")
    if not 0.0 < cfg.alpha <= 1.0:
        fail("alpha", f"= {cfg.alpha} out of range: Caputo order must lie in (0, 1]")
    if not 0.0 < cfg.beta1 < 1.0:
        fail("beta1", f"= {cfg.beta1} out of range: must lie in (0, 1)")
    if not 0.0 < cfg.beta2 < 0.5:
        fail(
            "beta2",
            f"= {cfg.beta2} out of range: must lie in (0, 0.5); the diffusion "
            "kernel is not square-integrable for beta2 >= 0.5",
        )
    if not cfg.T > 0:
        fail("T", f"= {cfg.T} out of range: horizon must be positive")
    if cfg.N < 1:
        fail("N", f"= {cfg.N}: must be >= 1")
    if cfg.N_values is not None and (
        not cfg.N_values or any(b <= a for a, b in zip(cfg.N_values, cfg.N_values[1:]))
    ):
        fail("N_values", f"= {cfg.N_values}: must be nonempty and strictly increasing")
    if cfg.M < 1:
        fail("M", f"= {cfg.M}: must be >= 1")
    if cfg.p < 2 or cfg.p % 2 != 0:
        fail("p", f"= {cfg.p}: must be an even integer >= 2")
    if cfg.quad_nodes < 1:
        fail("quad_nodes", f"= {cfg.quad_nodes}: must be >= 1")
    if cfg.threads < 1:
        fail("threads", f"= {cfg.threads}: must be >= 1")
    if cfg.which not in ("L1", "L2", "both"):
        fail("which", f"= {cfg.which!r}: must be L1, L2 or both")
    if cfg.n_samples < 2:
        fail("n_samples", f"= {cfg.n_samples}: must be >= 2")
    if not cfg.max_radius > 0:
        fail("max_radius", f"= {cfg.max_radius}: must be positive")
    if cfg.command in _PROBLEM_COMMANDS and cfg.problem is None:
        raise ConfigError("missing required key: problem", None)
    if cfg.command == "lemma-check" and cfg.c is None:
        raise ConfigError("missing required key: c (exponent for lemma-check)", None)


def spec_to_config(spec: ProblemSpec) -> str:
    """Render a problem's parameter block (not the callables) as config lines.

    The result parses back into the same parameters, so parameter blocks round
    trip through the flat file format.
    """
    block = spec.param_block()
    lines = [
        f"problem = {block['problem']}",
        f"alpha = {block['alpha']:.17g}",
        f"beta1 = {block['beta1']:.17g}",
        f"beta2 = {block['beta2']:.17g}",
        f"T = {block['T']:.17g}",
        "y0 = " + ",".join(f"{v:.17g}" for v in block["y0"]),
    ]
    return "\n".join(lines) + "\n"


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse a config file body, apply overrides, validate everything.

    overrides maps key -> already-typed value (how the CLI passes flags);
    they win over file values and are validated identically.
    """
    values: dict = {}
    lines: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        try:
            values[key] = _KEYS[key](value)
        except ValueError:
            raise ConfigError(f"malformed value for {key}: {value!r}", lineno) from None
        lines[key] = lineno
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = val
        lines.pop(key, None)  # flag overrides lose their file line attribution
    if "command" not in values:
        raise ConfigError("missing required key: command")
    cfg = ExperimentConfig(**values)
    _range_checks(cfg, lines)
    return cfg
