"""The closed algebra of compact convex body representations.

A body is a tree built from five public node types:

* ``Ball``          -- Euclidean ball (radius 0 allowed: a point),
* ``VPolytope``     -- convex hull of an explicit vertex list,
* ``Embed``         -- zero-padding embedding into a larger ambient space,
* ``Sum``           -- Minkowski sum of two bodies in the same space,
* ``Spectrahedron`` -- unit-trace positive semidefinite symmetric matrices,
                       flattened isometrically into R^{n(n+1)/2}.

plus one private node, ``AffineImage``, which only ever appears as the
result of slicing a face off a ``Spectrahedron``.

All operations are pure functions of immutable values; support values and
exposed faces may be evaluated concurrently without coordination.
Directions are normalized on use, so ``support_value(B, 2*u) ==
support_value(B, u)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .jacobi import TAU_EIG, top_eigenspace

# Fixed numeric tolerances; all fixtures use small-integer data, so the
# conditioning is benign and these never need per-call adjustment.
TAU_FACE = 1e-9    # relative argmax membership
TAU_RANK = 1e-8    # singular-value cutoff for affine ranks
TAU_PT = 1e-10     # vertex dedupe distance
N_MEM = 512        # probe directions for non-polytopal membership tests
_MEM_SEED = 0x6D656D  # fixed stream for the membership direction grid


class UnsupportedComposition(ValueError):
    """A Sum shape for which no exact pattern rule exists."""


def _as_floats(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ball:
    dim: int
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("ambient dimension must be positive")
        center = _as_floats(self.center, "center").reshape(-1)
        if center.shape != (self.dim,):
            raise ValueError("center length must equal the ambient dimension")
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True, eq=False)
class VPolytope:
    vertices: np.ndarray

    def __post_init__(self):
        verts = np.atleast_2d(_as_floats(self.vertices, "vertices"))
        if verts.size == 0 or verts.ndim != 2:
            raise ValueError("vertices must be a nonempty list of vectors")
        object.__setattr__(self, "vertices", dedupe_points(verts))

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]


@dataclass(frozen=True, eq=False)
class Embed:
    inner: "ConvexBody"
    dim: int

    def __post_init__(self):
        if self.dim < ambient_dim(self.inner):
            raise ValueError("embedding dimension must be >= inner dimension")


@dataclass(frozen=True, eq=False)
class Sum:
    left: "ConvexBody"
    right: "ConvexBody"

    def __post_init__(self):
        if ambient_dim(self.left) != ambient_dim(self.right):
            raise ValueError("Minkowski sum requires equal ambient dimensions")


@dataclass(frozen=True, eq=False)
class Spectrahedron:
    """Real symmetric n x n PSD matrices of unit trace, svec-flattened."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix order must be positive")

    @property
    def dim(self) -> int:
        return self.n * (self.n + 1) // 2


@dataclass(frozen=True, eq=False)
class AffineImage:
    """x -> matrix @ x + offset applied to the inner body.

    Internal node: it is only produced for spectrahedron faces, where
    ``matrix`` is an isometry onto the top eigenspace coordinates.
    """

    inner: "ConvexBody"
    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        m = _as_floats(self.matrix, "matrix")
        b = _as_floats(self.offset, "offset").reshape(-1)
        if m.ndim != 2 or m.shape[1] != ambient_dim(self.inner):
            raise ValueError("matrix columns must match inner ambient dimension")
        if b.shape != (m.shape[0],):
            raise ValueError("offset length must match matrix rows")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", b)


ConvexBody = Ball | VPolytope | Embed | Sum | Spectrahedron | AffineImage


def dedupe_points(points: np.ndarray, tol: float = TAU_PT) -> np.ndarray:
    """Drop later duplicates of earlier points (distance <= tol)."""
    points = np.asarray(points, dtype=float)
    keep: list[int] = []
    for i, p in enumerate(points):
        if all(np.linalg.norm(p - points[j]) > tol for j in keep):
            keep.append(i)
    out = points[keep].copy()
    out.setflags(write=False)
    return out


def ambient_dim(body: ConvexBody) -> int:
    if isinstance(body, (Ball, Embed)):
        return body.dim
    if isinstance(body, VPolytope):
        return body.vertices.shape[1]
    if isinstance(body, Sum):
        return ambient_dim(body.left)
    if isinstance(body, Spectrahedron):
        return body.dim
    if isinstance(body, AffineImage):
        return body.matrix.shape[0]
    raise TypeError(f"not a convex body: {body!r}")


# ---------------------------------------------------------------------------
# symmetric-matrix flattening (isometric svec)

def sym_to_vec(matrix: np.ndarray) -> np.ndarray:
    """Flatten a symmetric matrix so the flattening preserves inner products.

    Upper-triangle entries in row-major order; off-diagonal entries are
    scaled by sqrt(2), making <A, B>_F equal to the dot product of the
    flattened vectors.
    """
    m = np.asarray(matrix, dtype=float)
    n = m.shape[0]
    vec = np.empty(n * (n + 1) // 2)
    k = 0
    for i in range(n):
        vec[k] = m[i, i]
        k += 1
        for j in range(i + 1, n):
            vec[k] = np.sqrt(2.0) * m[i, j]
            k += 1
    return vec


def vec_to_sym(vec: np.ndarray) -> np.ndarray:
    """Inverse of :func:`sym_to_vec`."""
    v = np.asarray(vec, dtype=float).reshape(-1)
    n = int(round((np.sqrt(8 * v.size + 1) - 1) / 2))
    if n * (n + 1) // 2 != v.size:
        raise ValueError("vector length is not a triangular number")
    m = np.zeros((n, n))
    k = 0
    for i in range(n):
        m[i, i] = v[k]
        k += 1
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = v[k] / np.sqrt(2.0)
            k += 1
    return m


def _spectrahedron_face(body: Spectrahedron, u: np.ndarray) -> ConvexBody:
    lam, basis = top_eigenspace(vec_to_sym(u))
    k = basis.shape[1]
    if k == body.n:
        return body
    # isometry mapping svec_k coordinates onto svec_n of V Y V^T
    cols = []
    for a in range(k):
        for bcol in range(a, k):
            s = np.zeros((k, k))
            if a == bcol:
                s[a, a] = 1.0
            else:
                s[a, bcol] = s[bcol, a] = 1.0 / np.sqrt(2.0)
            cols.append(sym_to_vec(basis @ s @ basis.T))
    matrix = np.column_stack(cols)
    return AffineImage(Spectrahedron(k), matrix, np.zeros(body.dim))


# ---------------------------------------------------------------------------
# support function and exposed faces

def _check_direction(body: ConvexBody, u) -> np.ndarray:
    vec = np.asarray(u, dtype=float).reshape(-1)
    if vec.shape != (ambient_dim(body),):
        raise ValueError(
            f"direction has length {vec.shape[0]}, body lives in R^{ambient_dim(body)}"
        )
    norm = np.linalg.norm(vec)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("direction must be nonzero and finite")
    return vec / norm


def _support(body: ConvexBody, u: np.ndarray) -> float:
    """Support under an arbitrary (possibly zero) functional."""
    if isinstance(body, Ball):
        return float(body.center @ u + body.radius * np.linalg.norm(u))
    if isinstance(body, VPolytope):
        return float(np.max(body.vertices @ u))
    if isinstance(body, Embed):
        return _support(body.inner, u[: ambient_dim(body.inner)])
    if isinstance(body, Sum):
        return _support(body.left, u) + _support(body.right, u)
    if isinstance(body, Spectrahedron):
        if not np.any(u):
            return 0.0
        lam, _ = top_eigenspace(vec_to_sym(u), mult_tol=TAU_EIG)
        return lam
    if isinstance(body, AffineImage):
        return float(body.offset @ u) + _support(body.inner, body.matrix.T @ u)
    raise TypeError(f"not a convex body: {body!r}")


def _face(body: ConvexBody, u: np.ndarray) -> ConvexBody:
    """Argmax set under u; the whole body when u is the zero functional."""
    if isinstance(body, Ball):
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return body
        if body.radius == 0.0:
            return VPolytope(body.center[None, :])
        return VPolytope((body.center + body.radius * u / norm)[None, :])
    if isinstance(body, VPolytope):
        scores = body.vertices @ u
        smax = float(np.max(scores))
        thr = smax - TAU_FACE * max(1.0, abs(smax))
        return VPolytope(body.vertices[scores >= thr])
    if isinstance(body, Embed):
        return Embed(_face(body.inner, u[: ambient_dim(body.inner)]), body.dim)
    if isinstance(body, Sum):
        return Sum(_face(body.left, u), _face(body.right, u))
    if isinstance(body, Spectrahedron):
        if not np.any(u):
            return body
        return _spectrahedron_face(body, u)
    if isinstance(body, AffineImage):
        inner_face = _face(body.inner, body.matrix.T @ u)
        return AffineImage(inner_face, body.matrix, body.offset)
    raise TypeError(f"not a convex body: {body!r}")


def support_value(body: ConvexBody, u) -> float:
    """Maximum of <u/|u|, x> over the body."""
    return _support(body, _check_direction(body, u))


def exposed_face(body: ConvexBody, u) -> ConvexBody:
    """The face of the body sliced off by the supporting hyperplane normal to u."""
    return _face(body, _check_direction(body, u))


def support_point(body: ConvexBody, u) -> np.ndarray:
    """One point of the body attaining the support value along u."""
    return _rep_point(_face(body, _check_direction(body, u)))


def _rep_point(body: ConvexBody) -> np.ndarray:
    if isinstance(body, Ball):
        return body.center.copy()
    if isinstance(body, VPolytope):
        return body.vertices.mean(axis=0)
    if isinstance(body, Embed):
        p = np.zeros(body.dim)
        p[: ambient_dim(body.inner)] = _rep_point(body.inner)
        return p
    if isinstance(body, Sum):
        return _rep_point(body.left) + _rep_point(body.right)
    if isinstance(body, Spectrahedron):
        return sym_to_vec(np.eye(body.n) / body.n)
    if isinstance(body, AffineImage):
        return body.matrix @ _rep_point(body.inner) + body.offset
    raise TypeError(f"not a convex body: {body!r}")


# ---------------------------------------------------------------------------
# dimension

def _span_dirs(body: ConvexBody) -> np.ndarray:
    """Vectors spanning the direction space of the body's affine hull."""
    n = ambient_dim(body)
    if isinstance(body, Ball):
        return np.eye(n) if body.radius > 0 else np.zeros((0, n))
    if isinstance(body, VPolytope):
        return body.vertices[1:] - body.vertices[0]
    if isinstance(body, Embed):
        inner = _span_dirs(body.inner)
        out = np.zeros((inner.shape[0], n))
        out[:, : inner.shape[1]] = inner
        return out
    if isinstance(body, Sum):
        return np.vstack([_span_dirs(body.left), _span_dirs(body.right)])
    if isinstance(body, Spectrahedron):
        k = body.n
        dirs = []
        for i in range(k - 1):  # traceless diagonal differences
            m = np.zeros((k, k))
            m[i, i], m[i + 1, i + 1] = 1.0, -1.0
            dirs.append(sym_to_vec(m))
        for i in range(k):
            for j in range(i + 1, k):
                m = np.zeros((k, k))
                m[i, j] = m[j, i] = 1.0
                dirs.append(sym_to_vec(m))
        return np.array(dirs) if dirs else np.zeros((0, n))
    if isinstance(body, AffineImage):
        return _span_dirs(body.inner) @ body.matrix.T
    raise TypeError(f"not a convex body: {body!r}")


def affine_rank(dirs: np.ndarray, tol: float = TAU_RANK) -> int:
    """Numeric rank of a stack of direction vectors."""
    if dirs.size == 0:
        return 0
    s = np.linalg.svd(dirs, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def body_dim(body: ConvexBody) -> int:
    """Dimension of the affine hull."""
    if isinstance(body, Ball):
        return body.dim if body.radius > 0 else 0
    if isinstance(body, VPolytope):
        return affine_rank(_span_dirs(body))
    if isinstance(body, Embed):
        return body_dim(body.inner)
    if isinstance(body, Spectrahedron):
        return body.dim - 1
    if isinstance(body, (Sum, AffineImage)):
        return affine_rank(_span_dirs(body))
    raise TypeError(f"not a convex body: {body!r}")


# ---------------------------------------------------------------------------
# membership

def is_polytopal(body: ConvexBody) -> bool:
    """True when the body is an explicit polytope under the hood."""
    if isinstance(body, Ball):
        return body.radius == 0.0
    if isinstance(body, VPolytope):
        return True
    if isinstance(body, Embed):
        return is_polytopal(body.inner)
    if isinstance(body, Sum):
        return is_polytopal(body.left) and is_polytopal(body.right)
    return False


def vertex_array(body: ConvexBody) -> np.ndarray:
    """Vertex cloud of a polytopal body (may include non-extreme points)."""
    if isinstance(body, Ball) and body.radius == 0.0:
        return body.center[None, :].copy()
    if isinstance(body, VPolytope):
        return body.vertices.copy()
    if isinstance(body, Embed):
        inner = vertex_array(body.inner)
        out = np.zeros((inner.shape[0], body.dim))
        out[:, : inner.shape[1]] = inner
        return out
    if isinstance(body, Sum):
        lv, rv = vertex_array(body.left), vertex_array(body.right)
        return dedupe_points((lv[:, None, :] + rv[None, :, :]).reshape(-1, lv.shape[1]))
    raise ValueError("body is not polytopal")


def _membership_grid(n: int) -> np.ndarray:
    from . import rng

    return rng.sphere_points(_MEM_SEED, 0, N_MEM, n)


def contains(body: ConvexBody, x, tol: float = 1e-9) -> bool:
    """Support-based membership test.

    Exact (up to tol) for polytopal bodies, where the probe set is the
    polytope's facet normals plus affine-hull constraints; for all other
    bodies this checks <u, x> <= support(u) + tol over a fixed grid of
    N_MEM directions, which is a necessary condition only.
    """
    point = np.asarray(x, dtype=float).reshape(-1)
    n = ambient_dim(body)
    if point.shape != (n,):
        raise ValueError("point dimension mismatch")
    if is_polytopal(body):
        from .oracle import polytope_contains

        return polytope_contains(vertex_array(body), point, tol)
    for u in _membership_grid(n):
        if point @ u > _support(body, u) + tol:
            return False
    return True


# ---------------------------------------------------------------------------
# interior sampling (used to certify faces live inside their parent body)

def sample_points(body: ConvexBody, count: int, seed: int) -> np.ndarray:
    """Deterministic points of the body (not uniform; coverage only)."""
    from . import rng

    n = ambient_dim(body)
    if isinstance(body, Ball):
        if body.radius == 0.0:
            return np.repeat(body.center[None, :], count, axis=0)
        dirs = rng.sphere_points(seed, 0, count, n)
        radii = rng.uniform(seed, np.arange(count)) ** (1.0 / n) * body.radius
        return body.center + dirs * radii[:, None]
    if isinstance(body, VPolytope):
        k = body.vertices.shape[0]
        w = rng.uniform(seed, np.arange(count * k)).reshape(count, k)
        w = -np.log(1.0 - w)  # Dirichlet via exponentials
        w /= w.sum(axis=1, keepdims=True)
        return w @ body.vertices
    if isinstance(body, Embed):
        inner = sample_points(body.inner, count, seed)
        out = np.zeros((count, n))
        out[:, : inner.shape[1]] = inner
        return out
    if isinstance(body, Sum):
        return sample_points(body.left, count, rng.derive_seed(seed, 1)) + sample_points(
            body.right, count, rng.derive_seed(seed, 2)
        )
    if isinstance(body, Spectrahedron):
        k = body.n
        g = rng.gaussians(seed, 0, count * k * k).reshape(count, k, k)
        out = np.empty((count, body.dim))
        for i in range(count):
            m = g[i] @ g[i].T
            m /= np.trace(m)
            out[i] = sym_to_vec(m)
        return out
    if isinstance(body, AffineImage):
        inner = sample_points(body.inner, count, seed)
        return inner @ body.matrix.T + body.offset
    raise TypeError(f"not a convex body: {body!r}")


# ---------------------------------------------------------------------------
# structural comparison and JSON round trip

def structurally_equal(a: ConvexBody, b: ConvexBody, tol: float = TAU_FACE) -> bool:
    """Same tree shape with matching numeric data (vertex sets up to order)."""
    if isinstance(a, Ball) and isinstance(b, Ball):
        return (
            a.dim == b.dim
            and abs(a.radius - b.radius) <= tol
            and np.linalg.norm(a.center - b.center) <= tol
        )
    if isinstance(a, VPolytope) and isinstance(b, VPolytope):
        if a.vertices.shape != b.vertices.shape:
            return False
        used: set[int] = set()
        for v in a.vertices:
            match = None
            for j, w in enumerate(b.vertices):
                if j not in used and np.linalg.norm(v - w) <= tol:
                    match = j
                    break
            if match is None:
                return False
            used.add(match)
        return True
    if isinstance(a, Embed) and isinstance(b, Embed):
        return a.dim == b.dim and structurally_equal(a.inner, b.inner, tol)
    if isinstance(a, Sum) and isinstance(b, Sum):
        return structurally_equal(a.left, b.left, tol) and structurally_equal(
            a.right, b.right, tol
        )
    if isinstance(a, Spectrahedron) and isinstance(b, Spectrahedron):
        return a.n == b.n
    if isinstance(a, AffineImage) and isinstance(b, AffineImage):
        return (
            np.allclose(a.matrix, b.matrix, atol=tol)
            and np.allclose(a.offset, b.offset, atol=tol)
            and structurally_equal(a.inner, b.inner, tol)
        )
    return False


def to_dict(body: ConvexBody) -> dict:
    if isinstance(body, Ball):
        return {
            "type": "ball",
            "dim": body.dim,
            "center": body.center.tolist(),
            "radius": body.radius,
        }
    if isinstance(body, VPolytope):
        return {"type": "vpolytope", "vertices": body.vertices.tolist()}
    if isinstance(body, Embed):
        return {"type": "embed", "dim": body.dim, "inner": to_dict(body.inner)}
    if isinstance(body, Sum):
        return {"type": "sum", "left": to_dict(body.left), "right": to_dict(body.right)}
    if isinstance(body, Spectrahedron):
        return {"type": "spectrahedron", "n": body.n}
    if isinstance(body, AffineImage):
        return {
            "type": "affine_image",
            "inner": to_dict(body.inner),
            "matrix": body.matrix.tolist(),
            "offset": body.offset.tolist(),
        }
    raise TypeError(f"not a convex body: {body!r}")


def from_dict(doc: dict) -> ConvexBody:
    kind = doc.get("type")
    if kind == "ball":
        return Ball(int(doc["dim"]), doc["center"], float(doc["radius"]))
    if kind == "vpolytope":
        return VPolytope(doc["vertices"])
    if kind == "embed":
        return Embed(from_dict(doc["inner"]), int(doc["dim"]))
    if kind == "sum":
        return Sum(from_dict(doc["left"]), from_dict(doc["right"]))
    if kind == "spectrahedron":
        return Spectrahedron(int(doc["n"]))
    if kind == "affine_image":
        return AffineImage(from_dict(doc["inner"]), doc["matrix"], doc["offset"])
    raise ValueError(f"unknown body type: {kind!r}")


def to_json(body: ConvexBody) -> str:
    return json.dumps(to_dict(body), sort_keys=True)


def from_json(text: str) -> ConvexBody:
    return from_dict(json.loads(text))
