from itertools import combinations

import numpy as np
import pytest

from convexfaces import rng
from convexfaces.bodies import VPolytope
from convexfaces.oracle import (
    DecompositionError,
    LatticeSizeError,
    check_sum_face_decomposition,
    face_lattice,
    hyperplane_margin,
    minkowski_sum,
    polytope_contains,
    random_sum_instance,
    random_vpolytope,
)

SQUARE = VPolytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
TETRA = VPolytope([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def _counts_by_dim(lattice):
    counts = {}
    for _, d in lattice.dims.items():
        counts[d] = counts.get(d, 0) + 1
    return counts


def test_square_lattice():
    lat = face_lattice(SQUARE)
    assert _counts_by_dim(lat) == {0: 4, 1: 4, 2: 1}
    assert lat.dims_present() == (0, 1, 2)


def test_tetrahedron_lattice_counts_and_euler():
    lat = face_lattice(TETRA)
    counts = _counts_by_dim(lat)
    assert counts == {0: 4, 1: 6, 2: 4, 3: 1}
    assert counts[0] - counts[1] + counts[2] == 2


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_simplex_face_counts_are_binomial(d):
    verts = np.vstack([np.zeros(d), np.eye(d)])
    lat = face_lattice(VPolytope(verts))
    counts = _counts_by_dim(lat)
    from math import comb

    for j in range(d + 1):
        assert counts[j] == comb(d + 1, j + 1)


def test_lattice_closed_under_intersection():
    for poly in [SQUARE, TETRA, random_vpolytope(3, 8, 3)]:
        lat = face_lattice(poly)
        for f, g in combinations(lat.faces, 2):
            h = f & g
            assert not h or lat.is_face(h)


def test_lattice_of_point_and_segment():
    point = face_lattice(VPolytope([[2.0, 3.0]]))
    assert point.dims_present() == (0,)
    seg = face_lattice(VPolytope([[0.0], [1.0]]))
    assert _counts_by_dim(seg) == {0: 2, 1: 1}


def test_degenerate_polytope_recurses_in_hull():
    flat = VPolytope([[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
    lat = face_lattice(flat)
    assert lat.rank == 2
    assert _counts_by_dim(lat) == {0: 3, 1: 3, 2: 1}
    # lifted facet normals expose the edges in ambient coordinates
    for face, (h, c) in lat.facet_planes.items():
        scores = lat.vertices @ h
        assert np.max(scores) == pytest.approx(c, abs=1e-9)
        assert set(np.nonzero(scores >= c - 1e-9)[0]) == set(face)


def test_non_extreme_point_is_not_a_singleton_face():
    with_mid = VPolytope([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]])
    lat = face_lattice(with_mid)
    assert lat.extreme_indices() == [0, 1, 2, 3]
    # the bottom edge face includes the listed midpoint on it
    assert lat.is_face(frozenset({0, 1, 5}))


def test_random_sphere_points_all_extreme_and_simplicial():
    pts = rng.sphere_points(0, 0, 20, 3)
    lat = face_lattice(VPolytope(pts))
    assert lat.extreme_indices() == list(range(20))
    for face in lat.faces_of_dim(2):
        assert len(face) == 3


def test_exposing_directions_reexpose_each_face():
    lat = face_lattice(TETRA)
    for face in lat.faces:
        u = lat.exposing_direction(face)
        if u is None:
            continue
        scores = lat.vertices @ u
        exposed = set(np.nonzero(scores >= scores.max() - 1e-9)[0])
        assert exposed == set(face)


def test_size_guards():
    with pytest.raises(LatticeSizeError):
        face_lattice(VPolytope(np.random.default_rng(0).normal(size=(30, 2))))
    with pytest.raises(LatticeSizeError):
        face_lattice(VPolytope(np.random.default_rng(0).normal(size=(4, 6))))


# ---------------------------------------------------------------------------
# Minkowski sums


def test_orthogonal_segments_sum_to_square():
    sx = VPolytope([[0.0, 0.0], [1.0, 0.0]])
    sy = VPolytope([[0.0, 0.0], [0.0, 1.0]])
    s = minkowski_sum(sx, sy)
    assert sorted(map(tuple, s.vertices)) == [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]


def test_triangle_plus_reflection_is_hexagon():
    tri = VPolytope([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    neg = VPolytope(-tri.vertices)
    s = minkowski_sum(tri, neg)
    assert s.vertices.shape[0] == 6


def test_sum_with_point_translates():
    shift = VPolytope([[5.0, -1.0, 2.0]])
    s = minkowski_sum(TETRA, shift)
    assert sorted(map(tuple, s.vertices)) == sorted(
        map(tuple, TETRA.vertices + shift.vertices[0])
    )


def test_square_decomposes_edge_by_edge():
    sx = VPolytope([[0.0, 0.0], [1.0, 0.0]])
    sy = VPolytope([[0.0, 0.0], [0.0, 1.0]])
    decs = check_sum_face_decomposition(sx, sy)
    assert len(decs) == 9  # 4 vertices, 4 edges, 1 whole face
    for dec in decs:
        assert dec.residual <= 1e-9
        if dec.face_dim == 1:
            assert {len(dec.part_left), len(dec.part_right)} == {1, 2}


def test_whole_face_decomposes_as_p_plus_q():
    tri = VPolytope([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    decs = check_sum_face_decomposition(tri, SQUARE)
    whole = max(decs, key=lambda d: d.face_dim)
    assert whole.part_left == frozenset(range(3))
    assert whole.part_right == frozenset(range(4))


def test_random_pairs_decompose_in_r3():
    for seed in range(8):
        p, q = random_sum_instance(3, 8, seed)
        decs = check_sum_face_decomposition(p, q)
        assert decs
        assert max(d.residual for d in decs) <= 1e-9


def test_random_pairs_decompose_in_r4():
    for seed in range(2):
        p, q = random_sum_instance(4, 6, seed)
        decs = check_sum_face_decomposition(p, q)
        assert max(d.residual for d in decs) <= 1e-9


# ---------------------------------------------------------------------------
# helpers


def test_hyperplane_margin_flags_near_degenerate():
    good = VPolytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert hyperplane_margin(good.vertices) > 0.5
    nearly_flat = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 1e-10], [0.0, 1.0]])
    assert hyperplane_margin(nearly_flat) < 1e-8
    # exactly collinear triples read as incident, not near-degenerate
    with_midpoint = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert hyperplane_margin(with_midpoint) > 0.1


def test_polytope_contains():
    assert polytope_contains(SQUARE.vertices, np.array([0.5, 0.5]), 1e-9)
    assert polytope_contains(SQUARE.vertices, np.array([1.0, 1.0]), 1e-9)
    assert not polytope_contains(SQUARE.vertices, np.array([1.00001, 0.5]), 1e-9)
