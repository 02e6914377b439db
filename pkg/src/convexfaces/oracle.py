"""Exact brute-force face lattices for small V-polytopes.

The enumeration is deliberately naive so it can serve as a trusted oracle:
every hyperplane through an affinely independent d-subset of the points is
tested for one-sidedness, the touching sets are collected as exposed
faces, and the full lattice is their closure under intersection.  No
general convex-hull algorithm is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import rng
from .bodies import TAU_FACE, TAU_PT, TAU_RANK, VPolytope, affine_rank, dedupe_points

MAX_LATTICE_DIM = 5
MAX_LATTICE_VERTICES = 24
MAX_SUM_CLOUD = 256  # guard on |P| * |Q| for Minkowski sums

_DEGENERATE_REL = 1e-10


class LatticeSizeError(ValueError):
    """Input exceeds the desk-scale enumeration guard."""


class DecompositionError(RuntimeError):
    """A sum face failed to split into summand faces (implementation bug)."""


@dataclass(frozen=True)
class FaceLattice:
    """All faces of a V-polytope as vertex-index sets graded by dimension."""

    vertices: np.ndarray
    dims: dict[frozenset, int]
    facet_planes: dict[frozenset, tuple[np.ndarray, float]]
    rank: int

    @property
    def faces(self) -> set[frozenset]:
        return set(self.dims)

    def dims_present(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.dims.values())))

    def faces_of_dim(self, k: int) -> list[frozenset]:
        return sorted((f for f, d in self.dims.items() if d == k), key=sorted)

    def extreme_indices(self) -> list[int]:
        return sorted(next(iter(f)) for f in self.faces_of_dim(0) if len(f) == 1)

    def is_face(self, index_set) -> bool:
        return frozenset(index_set) in self.dims

    def exposing_direction(self, face: frozenset) -> np.ndarray | None:
        """A direction whose argmax over the polytope is exactly this face.

        Sum of the supporting normals of all facets containing the face;
        None for the improper (whole) face.
        """
        if self.dims[face] == self.rank:
            return None
        total = np.zeros(self.vertices.shape[1])
        for facet, (normal, _) in self.facet_planes.items():
            if face <= facet:
                total += normal
        return total


def _candidate_planes(
    verts: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Hyperplanes through all affinely independent d-subsets of the points.

    Returns (normals, offsets, dots, subsets) with unit normals,
    dots[i, j] = <normal_i, vert_j>, and the defining index subsets;
    degenerate (affinely dependent) subsets are dropped.
    """
    n, d = verts.shape
    subsets = np.array(list(combinations(range(n), d)), dtype=int)
    base = verts[subsets[:, 0]]
    if d == 1:
        normals = np.ones((len(subsets), 1))
    else:
        diffs = verts[subsets[:, 1:]] - base[:, None, :]
        scale = np.maximum(np.linalg.norm(diffs, axis=2).max(axis=1), 1e-30)
        diffs = diffs / scale[:, None, None]
        normals = np.empty((len(subsets), d))
        sign = 1.0
        for j in range(d):
            cols = [c for c in range(d) if c != j]
            normals[:, j] = sign * np.linalg.det(diffs[:, :, cols])
            sign = -sign
    norms = np.linalg.norm(normals, axis=1)
    keep = norms > _DEGENERATE_REL
    normals = normals[keep] / norms[keep, None]
    offsets = np.einsum("ij,ij->i", normals, base[keep])
    dots = normals @ verts.T
    return normals, offsets, dots, subsets[keep]


def hyperplane_margin(verts: np.ndarray, incident_eps: float = 1e-12) -> float:
    """Smallest distance from any vertex to a candidate plane it is not on.

    Distances below ``incident_eps`` (times the coordinate scale) count as
    exact incidences -- Minkowski sum clouds contain genuinely coplanar
    tuples, e.g. parallelogram sums -- and are skipped.  The randomized
    suites redraw any instance whose margin falls below 10 * TAU_FACE.
    """
    verts = np.asarray(verts, dtype=float)
    n, d = verts.shape
    if n <= d:
        return np.inf
    _, offsets, dots, subsets = _candidate_planes(verts)
    dist = np.abs(dots - offsets[:, None])
    for row, sub in enumerate(subsets):
        dist[row, sub] = np.inf
    scale = max(1.0, float(np.abs(dots).max(initial=0.0)))
    dist[dist <= incident_eps * scale] = np.inf
    return float(dist.min()) if dist.size else np.inf


def _lattice_full_dim(verts: np.ndarray, tol: float) -> tuple[dict, dict]:
    """Faces and facet planes of a full-dimensional vertex cloud."""
    n, d = verts.shape
    normals, offsets, dots, _ = _candidate_planes(verts)
    scale = np.maximum(1.0, np.abs(dots).max(axis=1))
    atol = tol * scale
    upper = np.all(dots <= (offsets + atol)[:, None], axis=1)
    lower = np.all(dots >= (offsets - atol)[:, None], axis=1)
    exposed: dict[frozenset, tuple[np.ndarray, float]] = {}
    for row in np.nonzero(upper | lower)[0]:
        if upper[row]:
            h, c = normals[row], offsets[row]
            members = frozenset(np.nonzero(dots[row] >= offsets[row] - atol[row])[0])
        else:
            h, c = -normals[row], -offsets[row]
            members = frozenset(np.nonzero(dots[row] <= offsets[row] + atol[row])[0])
        if members not in exposed:
            exposed[members] = (h, float(c))

    # closure under intersection gives every face; add the improper face
    all_faces: set[frozenset] = set(exposed)
    work = list(exposed)
    while work:
        f = work.pop()
        for g in list(all_faces):
            h = f & g
            if h and h not in all_faces:
                all_faces.add(h)
                work.append(h)
    all_faces.add(frozenset(range(n)))

    dims = {f: affine_rank(verts[sorted(f)][1:] - verts[sorted(f)][0]) for f in all_faces}
    facet_planes = {
        f: exposed[f] for f in exposed if dims[f] == d - 1
    }
    return dims, facet_planes


def face_lattice(
    polytope: VPolytope | np.ndarray,
    max_vertices: int = MAX_LATTICE_VERTICES,
    tol: float = TAU_FACE,
) -> FaceLattice:
    """Enumerate every face of the convex hull of the given points.

    Faces are reported as index sets into the (deduplicated) input points;
    the sets include non-extreme input points lying on the face, and the
    singleton faces identify exactly the extreme points.
    """
    verts = polytope.vertices if isinstance(polytope, VPolytope) else dedupe_points(polytope)
    verts = np.asarray(verts, dtype=float)
    n, d = verts.shape
    if d > MAX_LATTICE_DIM:
        raise LatticeSizeError(f"ambient dimension {d} exceeds guard {MAX_LATTICE_DIM}")
    if n > max_vertices:
        raise LatticeSizeError(f"{n} vertices exceed guard {max_vertices}")

    centered = verts - verts[0]
    rank = affine_rank(centered[1:]) if n > 1 else 0
    if rank == 0:
        full = frozenset(range(n))
        return FaceLattice(verts, {full: 0}, {}, 0)

    if rank < d:
        # work inside the affine hull, then lift the facet normals back
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        basis = vt[:rank].T
        reduced = centered @ basis
        dims, planes_r = _lattice_full_dim(reduced, tol)
        planes = {}
        for f, (h, c) in planes_r.items():
            lifted = basis @ h
            planes[f] = (lifted, float(lifted @ verts[min(f)]))
        return FaceLattice(verts, dims, planes, rank)

    dims, planes = _lattice_full_dim(verts, tol)
    return FaceLattice(verts, dims, planes, rank)


# ---------------------------------------------------------------------------
# membership backed by the same plane enumeration

_HULL_CACHE: dict[bytes, tuple] = {}


def _hull_constraints(verts: np.ndarray):
    key = verts.tobytes() + bytes(str(verts.shape), "ascii")
    hit = _HULL_CACHE.get(key)
    if hit is not None:
        return hit
    centered = verts - verts[0]
    rank = affine_rank(centered[1:]) if verts.shape[0] > 1 else 0
    if rank == 0:
        data = (verts[0], None, None, None)
    else:
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        basis = vt[:rank].T
        reduced = centered @ basis
        normals, offsets, dots, _ = _candidate_planes(reduced)
        scale = np.maximum(1.0, np.abs(dots).max(axis=1))
        upper = np.all(dots <= (offsets + TAU_FACE * scale)[:, None], axis=1)
        lower = np.all(dots >= (offsets - TAU_FACE * scale)[:, None], axis=1)
        hs = np.vstack([normals[upper], -normals[lower]])
        cs = np.concatenate([offsets[upper], -offsets[lower]])
        data = (verts[0], basis, hs, cs)
    if len(_HULL_CACHE) > 64:
        _HULL_CACHE.clear()
    _HULL_CACHE[key] = data
    return data


def polytope_contains(verts: np.ndarray, point: np.ndarray, tol: float) -> bool:
    """Exact membership in conv(verts) up to tol, via one-sided planes."""
    verts = np.asarray(verts, dtype=float)
    origin, basis, hs, cs = _hull_constraints(verts)
    rel = point - origin
    if basis is None:
        return bool(np.linalg.norm(rel) <= tol)
    coords = rel @ basis
    if np.linalg.norm(rel - basis @ coords) > tol:
        return False
    return bool(np.all(hs @ coords <= cs + tol))


# ---------------------------------------------------------------------------
# Minkowski sums and the face-decomposition check

def _sum_cloud(p: VPolytope, q: VPolytope) -> tuple[np.ndarray, dict[tuple[int, int], int]]:
    """Deduplicated pairwise vertex sums and the (i, j) -> cloud index map."""
    pv, qv = p.vertices, q.vertices
    if pv.shape[1] != qv.shape[1]:
        raise ValueError("Minkowski sum requires equal ambient dimensions")
    if pv.shape[0] * qv.shape[0] > MAX_SUM_CLOUD:
        raise LatticeSizeError(
            f"sum cloud {pv.shape[0]}x{qv.shape[0]} exceeds guard {MAX_SUM_CLOUD}"
        )
    raw = (pv[:, None, :] + qv[None, :, :]).reshape(-1, pv.shape[1])
    cloud = dedupe_points(raw)
    pair_to_cloud: dict[tuple[int, int], int] = {}
    for i in range(pv.shape[0]):
        for j in range(qv.shape[0]):
            s = pv[i] + qv[j]
            dists = np.linalg.norm(cloud - s, axis=1)
            pair_to_cloud[(i, j)] = int(np.argmin(dists))
    return cloud, pair_to_cloud


def minkowski_sum(p: VPolytope, q: VPolytope) -> VPolytope:
    """Vertex representation of P + Q with non-extreme sum points removed."""
    cloud, _ = _sum_cloud(p, q)
    lattice = face_lattice(cloud, max_vertices=cloud.shape[0])
    extreme = lattice.extreme_indices()
    return VPolytope(cloud[extreme])


@dataclass(frozen=True)
class Decomposition:
    """A face of P + Q written as a sum of a face of P and a face of Q."""

    face: frozenset
    face_dim: int
    part_left: frozenset
    part_right: frozenset
    residual: float


def check_sum_face_decomposition(p: VPolytope, q: VPolytope) -> list[Decomposition]:
    """Split every face of P + Q into summand faces and verify hull equality.

    A vertex of P belongs to the left part of a face F iff some pairwise
    sum through it lands in F, and symmetrically on the right.  Raises
    DecompositionError if any face fails, since a genuine counterexample
    is impossible and indicates a bug.
    """
    lp = face_lattice(p)
    lq = face_lattice(q)
    cloud, pair_to_cloud = _sum_cloud(p, q)
    lc = face_lattice(cloud, max_vertices=cloud.shape[0])

    out: list[Decomposition] = []
    for face, fdim in sorted(lc.dims.items(), key=lambda kv: (kv[1], sorted(kv[0]))):
        fp = frozenset(i for (i, j), s in pair_to_cloud.items() if s in face)
        fq = frozenset(j for (i, j), s in pair_to_cloud.items() if s in face)
        if not lp.is_face(fp):
            raise DecompositionError(f"left part {sorted(fp)} is not a face of P")
        if not lq.is_face(fq):
            raise DecompositionError(f"right part {sorted(fq)} is not a face of Q")
        spanned = {pair_to_cloud[(i, j)] for i in fp for j in fq}
        if spanned != set(face):
            raise DecompositionError(
                f"part sums span {sorted(spanned)} but the face is {sorted(face)}"
            )
        residual = max(
            float(np.linalg.norm(p.vertices[i] + q.vertices[j] - cloud[pair_to_cloud[(i, j)]]))
            for i in fp
            for j in fq
        )
        out.append(Decomposition(face, fdim, fp, fq, residual))
    return out


# ---------------------------------------------------------------------------
# random instances for the verification suites

def random_vpolytope(dim: int, n_vertices: int, seed: int) -> VPolytope:
    """Gaussian vertex cloud; deterministic in (dim, n_vertices, seed)."""
    g = rng.gaussians(seed, 0, dim * n_vertices).reshape(n_vertices, dim)
    return VPolytope(g)


def random_sum_instance(
    dim: int, max_vertices: int, seed: int
) -> tuple[VPolytope, VPolytope]:
    """A generic random pair (P, Q) suitable for the decomposition check.

    Instances where any vertex of P, Q, or the sum cloud sits within
    10 * TAU_FACE of a candidate hyperplane it does not define are redrawn
    with a derived seed, so the float lattice enumeration stays exact.
    """
    margin = 10 * TAU_FACE
    for attempt in range(64):
        s = rng.derive_seed(seed, attempt)
        lo = dim + 1
        np_, nq_ = (int(x) + lo for x in rng.uniform_ints(s, 0, 2, max_vertices - lo + 1))
        p = random_vpolytope(dim, np_, rng.derive_seed(s, 1))
        q = random_vpolytope(dim, nq_, rng.derive_seed(s, 2))
        if p.vertices.shape[0] != np_ or q.vertices.shape[0] != nq_:
            continue
        cloud, _ = _sum_cloud(p, q)
        if (
            hyperplane_margin(p.vertices) >= margin
            and hyperplane_margin(q.vertices) >= margin
            and hyperplane_margin(cloud) >= margin
        ):
            return p, q
    raise RuntimeError(f"could not draw a generic instance for seed {seed}")
