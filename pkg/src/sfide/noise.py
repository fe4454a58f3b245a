"""Reproducible Brownian increments with exact dyadic coupling.

Each path is an independent counter-based stream: a Philox generator keyed by
(seed, path_index), so paths can be produced in any order, on any worker, and
still come out bit-identical.  Gaussians are drawn by inverse CDF from 53-bit
uniforms, which keeps the stream stable against changes in the sampling
algorithm of the underlying library.

Coupling between resolutions is by summation: the step-h increments of a path
are the pairwise sums of its step-h/2 increments, exact in distribution and
exact bitwise (no interpolation, no bridge).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
import scipy
from scipy.special import ndtri

__all__ = ["BrownianPaths", "generate", "coarsen", "dump_increments", "load_increments", "RNG_ID"]

_MASK64 = (1 << 64) - 1
_MAGIC = b"BWI1"
_HEADER = struct.Struct("<4sIIdQI")  # magic, N, r, h, seed, path_index (32 bytes)

RNG_ID = (
    f"philox4x64(key=seed,path_index);normal=inverse-cdf-53bit;"
    f"numpy={np.__version__};scipy={scipy.__version__}"
)


@dataclass(frozen=True)
class BrownianPaths:
    """Increments of one Wiener path on a uniform grid.

    increments[j] holds W(t_{j+1}) - W(t_j) for the r components; each entry
    is Normal(0, h).  coarsened counts how many dyadic coarsening steps
    produced this object from a generated one.
    """

    seed: int
    path_index: int
    n_steps: int
    h: float
    increments: np.ndarray
    coarsened: int = 0

    def __post_init__(self):
        inc = np.ascontiguousarray(np.asarray(self.increments, dtype=float))
        if inc.ndim != 2 or inc.shape[0] != self.n_steps:
            raise ValueError(
                f"increments must have shape ({self.n_steps}, r), got {inc.shape}"
            )
        inc.setflags(write=False)
        object.__setattr__(self, "increments", inc)

    @property
    def r(self) -> int:
        return self.increments.shape[1]


def generate(seed: int, path_index: int, n_steps: int, r: int, h: float) -> BrownianPaths:
    """Draw the increments of path `path_index` under master seed `seed`.

    Distinct path_index values give independent streams regardless of the
    order in which they are generated; identical arguments reproduce the
    increments bit for bit.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if not (np.isfinite(h) and h > 0):
        raise ValueError(f"h must be positive, got {h!r}")
    if path_index < 0:
        raise ValueError(f"path_index must be >= 0, got {path_index}")
    key = np.array([int(seed) & _MASK64, int(path_index) & _MASK64], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    raw = gen.integers(0, 1 << 53, size=(n_steps, r), dtype=np.int64)
    u = (raw.astype(np.float64) + 0.5) * 2.0**-53  # strictly inside (0, 1)
    inc = ndtri(u) * math.sqrt(h)
    return BrownianPaths(seed=int(seed), path_index=int(path_index),
                         n_steps=int(n_steps), h=float(h), increments=inc)


def coarsen(fine: BrownianPaths) -> BrownianPaths:
    """Pairwise-sum the increments: step h/2 -> step h on the same path."""
    if fine.n_steps % 2 != 0:
        raise ValueError(f"coarsen needs an even number of steps, got {fine.n_steps}")
    inc = fine.increments[0::2] + fine.increments[1::2]
    return BrownianPaths(
        seed=fine.seed,
        path_index=fine.path_index,
        n_steps=fine.n_steps // 2,
        h=fine.h * 2.0,
        increments=inc,
        coarsened=fine.coarsened + 1,
    )


def dump_increments(paths: BrownianPaths, file) -> None:
    """Debug dump: 32-byte header then row-major little-endian float64."""
    header = _HEADER.pack(
        _MAGIC,
        paths.n_steps,
        paths.r,
        paths.h,
        paths.seed & _MASK64,
        paths.path_index,
    )
    close = False
    if isinstance(file, (str, bytes)):
        file = open(file, "wb")
        close = True
    try:
        file.write(header)
        file.write(paths.increments.astype("<f8").tobytes(order="C"))
    finally:
        if close:
            file.close()


def load_increments(file) -> BrownianPaths:
    """Inverse of dump_increments (the coarsening marker is not persisted)."""
    close = False
    if isinstance(file, (str, bytes)):
        file = open(file, "rb")
        close = True
    try:
        magic, n, r, h, seed, path_index = _HEADER.unpack(file.read(_HEADER.size))
        if magic != _MAGIC:
            raise ValueError(f"not an increment dump (bad magic {magic!r})")
        data = np.frombuffer(file.read(8 * n * r), dtype="<f8").reshape(n, r)
    finally:
        if close:
            file.close()
    if seed >= 1 << 63:  # undo two's-complement masking of negative seeds
        seed -= 1 << 64
    return BrownianPaths(seed=seed, path_index=path_index, n_steps=n, h=h,
                         increments=data.astype(np.float64))
