"""Exact facial dimension patterns with numeric witness verification.

``face_pattern`` computes the set of face dimensions of a body by
structural recursion (backed by the exact lattice oracle for polytopes)
and returns, for every dimension, a chain of directions whose iterated
exposed faces reach a face of that dimension.  The chains are checked
numerically before being returned, and ``sample_probe`` adds an
independent randomized cross-check: the dimension of the exposed face
along any direction must land inside the computed pattern.

Faces of the bodies in this algebra are reachable by iterated exposure
(polytopes directly via the oracle; balls and spectrahedra have exposed
faces only; sums inherit the property from their parts), so the
structural recursion sees every face, not just the exposed ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle, rng
from .bodies import (
    AffineImage,
    Ball,
    ConvexBody,
    Embed,
    Spectrahedron,
    Sum,
    TAU_RANK,
    UnsupportedComposition,
    VPolytope,
    _face,
    _span_dirs,
    ambient_dim,
    body_dim,
    contains,
    exposed_face,
    is_polytopal,
    sample_points,
    sym_to_vec,
    vec_to_sym,
    vertex_array,
)
from .jacobi import top_eigenspace


@dataclass(frozen=True)
class FacePattern:
    """Sorted set of face dimensions present in a body (0 and the body's own)."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.dims))) != self.dims:
            raise ValueError("dims must be sorted and unique")
        if 0 not in self.dims:
            raise ValueError("every compact convex body has zero-dimensional faces")

    def positive(self) -> tuple[int, ...]:
        return tuple(d for d in self.dims if d > 0)


@dataclass(frozen=True)
class WitnessChain:
    """Directions whose iterated exposed faces certify a face dimension."""

    directions: tuple
    claimed_dim: int

    def __post_init__(self):
        object.__setattr__(
            self, "directions", tuple(np.asarray(u, dtype=float) for u in self.directions)
        )


def _axis(n: int, i: int) -> np.ndarray:
    e = np.zeros(n)
    e[i] = 1.0
    return e


def _complement_direction(x: ConvexBody) -> np.ndarray:
    """A unit direction orthogonal to the affine span of x (last axis if it fits)."""
    n = ambient_dim(x)
    dirs = _span_dirs(x)
    last = _axis(n, n - 1)
    if dirs.size == 0 or np.max(np.abs(dirs @ last)) <= TAU_RANK * max(
        1.0, float(np.abs(dirs).max())
    ):
        return last
    u, s, vt = np.linalg.svd(dirs)
    rank = int(np.sum(s > TAU_RANK * max(1.0, s[0])))
    if rank >= n:
        raise ValueError("body spans the whole space; no complement direction")
    return vt[rank]


def _polytope_chains(verts: np.ndarray) -> dict[int, list[np.ndarray]]:
    lat = oracle.face_lattice(verts)
    chains: dict[int, list[np.ndarray]] = {}
    for k in lat.dims_present():
        face = lat.faces_of_dim(k)[0]
        u = lat.exposing_direction(face)
        chains[k] = [] if u is None else [u]
    return chains


def _pattern_chains(body: ConvexBody) -> dict[int, list[np.ndarray]]:
    """dim -> a chain of directions reaching a face of that dimension."""
    n = ambient_dim(body)
    if isinstance(body, Ball):
        if body.radius == 0.0:
            return {0: []}
        return {0: [_axis(n, 0)], body.dim: []}
    if isinstance(body, VPolytope):
        return _polytope_chains(body.vertices)
    if isinstance(body, Embed):
        inner = _pattern_chains(body.inner)
        k = ambient_dim(body.inner)
        return {
            d: [np.concatenate([u, np.zeros(n - k)]) for u in chain]
            for d, chain in inner.items()
        }
    if isinstance(body, Spectrahedron):
        chains: dict[int, list[np.ndarray]] = {}
        for k in range(1, body.n + 1):
            dim = k * (k + 1) // 2 - 1
            if k == body.n:
                chains[dim] = []
            else:
                diag = np.zeros(body.n)
                diag[:k] = 1.0
                chains[dim] = [sym_to_vec(np.diag(diag))]
        return chains
    if isinstance(body, AffineImage):
        inner = _pattern_chains(body.inner)
        return {
            d: [body.matrix @ u for u in chain] for d, chain in inner.items()
        }
    if isinstance(body, Sum):
        return _sum_pattern_chains(body)
    raise TypeError(f"not a convex body: {body!r}")


def _sum_pattern_chains(body: Sum) -> dict[int, list[np.ndarray]]:
    n = ambient_dim(body)
    left, right = body.left, body.right
    for ball, other in ((left, right), (right, left)):
        if isinstance(ball, Ball) and ball.radius > 0.0:
            inner = _pattern_chains(other)
            other_dim = body_dim(other)
            if other_dim == n:
                chains = {k: c for k, c in inner.items() if k < n}
            else:
                u_perp = _complement_direction(other)
                chains = {k: [u_perp] + c for k, c in inner.items()}
            chains[n] = []
            return chains
    for point, other in ((left, right), (right, left)):
        if isinstance(point, Ball) and point.radius == 0.0:
            return _pattern_chains(other)
    if is_polytopal(left) and is_polytopal(right):
        summed = oracle.minkowski_sum(
            VPolytope(vertex_array(left)), VPolytope(vertex_array(right))
        )
        return _polytope_chains(summed.vertices)
    raise UnsupportedComposition(
        "exact patterns for sums require a ball summand or two polytopal summands"
    )


def face_pattern(body: ConvexBody) -> tuple[FacePattern, list[WitnessChain]]:
    """The exact set of face dimensions, each certified by a witness chain.

    Every returned chain has already been folded through ``exposed_face``
    and its terminal dimension checked; a mismatch raises RuntimeError
    since it would mean the structural rules and the numeric face
    calculus disagree.
    """
    chains_by_dim = _pattern_chains(body)
    dims = sorted(chains_by_dim)
    top = body_dim(body)
    if 0 not in dims or top not in dims:
        raise RuntimeError(f"pattern {dims} is missing 0 or the body dimension {top}")
    witnesses = []
    for k in dims:
        chain = WitnessChain(tuple(chains_by_dim[k]), k)
        cur: ConvexBody = body
        for u in chain.directions:
            cur = exposed_face(cur, u)
        got = body_dim(cur)
        if got != k:
            raise RuntimeError(f"witness chain for dim {k} reached a face of dim {got}")
        witnesses.append(chain)
    return FacePattern(tuple(dims)), witnesses


def verify_chain(
    body: ConvexBody, chain: WitnessChain, samples: int = 8, tol: float = 1e-7
) -> bool:
    """Fold the chain through exposed faces and check dimension and membership."""
    cur: ConvexBody = body
    for u in chain.directions:
        if np.asarray(u).shape != (ambient_dim(body),):
            raise ValueError("chain direction dimension mismatch")
        cur = exposed_face(cur, u)
    if body_dim(cur) != chain.claimed_dim:
        return False
    return all(contains(body, p, tol) for p in sample_points(cur, samples, seed=0))


# ---------------------------------------------------------------------------
# randomized cross-check

def _face_key(body: ConvexBody, u: np.ndarray):
    """Hashable identity of the exposed face's span, or None if not keyable."""
    if isinstance(body, Ball):
        if np.any(u):
            return ("pt",)
        return ("ballfull", body.dim) if body.radius > 0 else ("pt",)
    if isinstance(body, VPolytope):
        scores = body.vertices @ u
        smax = float(scores.max())
        thr = smax - 1e-9 * max(1.0, abs(smax))
        return ("vp", int(np.packbits(scores >= thr).tobytes().hex(), 16))
    if isinstance(body, Embed):
        k = _face_key(body.inner, u[: ambient_dim(body.inner)])
        return None if k is None else ("em", body.dim, k)
    if isinstance(body, Sum):
        kl = _face_key(body.left, u)
        kr = _face_key(body.right, u)
        return None if kl is None or kr is None else ("sum", kl, kr)
    return None


def sample_probe(body: ConvexBody, n_samples: int, seed: int) -> dict[int, int]:
    """Histogram of exposed-face dimensions over random unit directions.

    Directions are uniform on the sphere, generated by the counter-based
    stream, so results are identical for any partitioning of the sample
    indices across workers.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    n = ambient_dim(body)
    dirs = rng.sphere_points(seed, 0, n_samples, n)
    hist: dict[int, int] = {}
    memo: dict[tuple, int] = {}
    is_spec = isinstance(body, Spectrahedron)
    for u in dirs:
        if is_spec:
            _, basis = top_eigenspace(vec_to_sym(u))
            k = basis.shape[1]
            dim = k * (k + 1) // 2 - 1
        else:
            key = _face_key(body, u)
            if key is not None and key in memo:
                dim = memo[key]
            else:
                dim = body_dim(_face(body, u))
                if key is not None:
                    memo[key] = dim
        hist[dim] = hist.get(dim, 0) + 1
    return dict(sorted(hist.items()))
