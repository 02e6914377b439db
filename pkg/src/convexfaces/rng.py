"""Counter-based deterministic random numbers.

Every random quantity in this package is a pure function of ``(seed,
counter)``, so streams can be sliced across workers or regenerated in any
order without changing the results.  The generator is splitmix64 applied to
a mixed seed/counter word; the exact recipe is documented in the README so
it can be reproduced in other languages bit for bit.
"""

from __future__ import annotations

import numpy as np

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

def _wrapping():
    # uint64 arithmetic below wraps modulo 2**64 on purpose
    return np.errstate(over="ignore")


def _mix(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on an array of uint64 words."""
    z = (z + _GAMMA) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK
    return z ^ (z >> np.uint64(31))


def random_u64(seed: int, counters) -> np.ndarray:
    """Raw 64-bit words for the given seed at the given counter indices."""
    with _wrapping():
        c = np.asarray(counters, dtype=np.uint64)
        s = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        return _mix(s ^ ((c * _GAMMA) & _MASK))


def derive_seed(seed: int, tag: int) -> int:
    """Independent sub-seed for a tagged stream (e.g. one per instance)."""
    with _wrapping():
        s = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
        t = _mix(np.uint64(tag & 0xFFFFFFFFFFFFFFFF) * _MIX1 & _MASK)
        return int(_mix(s ^ t))


def uniform(seed: int, counters) -> np.ndarray:
    """Uniform doubles in [0, 1), one per counter."""
    return (random_u64(seed, counters) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussians(seed: int, start: int, n: int) -> np.ndarray:
    """n standard normals; value i is a pure function of (seed, start + i).

    Box-Muller on the uniform pair at counters (2k, 2k+1) where
    k = start + i.  Only the cosine branch is used so each normal consumes
    exactly one counter pair.
    """
    idx = np.arange(start, start + n, dtype=np.uint64)
    with _wrapping():
        u1 = (random_u64(seed, idx * np.uint64(2)) >> np.uint64(11)).astype(np.float64)
        u2 = (random_u64(seed, idx * np.uint64(2) + np.uint64(1)) >> np.uint64(11)).astype(np.float64)
    u1 = (u1 + 1.0) * 2.0**-53  # (0, 1], keeps log finite
    u2 = u2 * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def sphere_points(seed: int, start: int, n: int, dim: int) -> np.ndarray:
    """n points uniform on the unit sphere in R^dim, indexed from start.

    Point i uses gaussian counters [i*dim, (i+1)*dim), so any contiguous or
    scattered slice of indices reproduces the same points.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = gaussians(seed, start * dim, n * dim).reshape(n, dim)
    norms = np.linalg.norm(g, axis=1)
    bad = norms < 1e-12
    if np.any(bad):  # essentially impossible, but keep the output well defined
        g[bad] = 0.0
        g[bad, 0] = 1.0
        norms[bad] = 1.0
    return g / norms[:, None]


def uniform_ints(seed: int, start: int, n: int, bound: int) -> np.ndarray:
    """n integers uniform in [0, bound); index i uses counter start + i."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    u = uniform(seed, np.arange(start, start + n, dtype=np.uint64))
    return np.minimum((u * bound).astype(np.int64), bound - 1)
