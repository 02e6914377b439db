import numpy as np

from convexfaces import rng


def _splitmix64_ref(z):
    mask = (1 << 64) - 1
    z = (z + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


def _u64_ref(seed, counter):
    mask = (1 << 64) - 1
    s = _splitmix64_ref(seed & mask)
    return _splitmix64_ref(s ^ ((counter * 0x9E3779B97F4A7C15) & mask))


def test_matches_pure_python_reference():
    got = rng.random_u64(12345, np.arange(100))
    want = [_u64_ref(12345, c) for c in range(100)]
    assert [int(x) for x in got] == want


def test_counter_slicing_is_transparent():
    whole = rng.gaussians(7, 0, 50)
    parts = np.concatenate([rng.gaussians(7, 0, 20), rng.gaussians(7, 20, 30)])
    assert np.array_equal(whole, parts)


def test_seeds_decorrelate_streams():
    a = rng.random_u64(0, np.arange(1000))
    b = rng.random_u64(1, np.arange(1000))
    assert not np.any(a == b)


def test_uniform_range_and_mean():
    u = rng.uniform(3, np.arange(20000))
    assert np.all((u >= 0) & (u < 1))
    assert abs(u.mean() - 0.5) < 0.01


def test_gaussian_moments():
    g = rng.gaussians(11, 0, 200000)
    assert abs(g.mean()) < 0.01
    assert abs(g.std() - 1.0) < 0.01


def test_sphere_points_unit_norm_and_isotropy():
    pts = rng.sphere_points(5, 0, 20000, 3)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    assert np.all(np.abs(pts.mean(axis=0)) < 0.02)


def test_sphere_points_indexed_slicing():
    all_pts = rng.sphere_points(9, 0, 10, 4)
    tail = rng.sphere_points(9, 6, 4, 4)
    assert np.array_equal(all_pts[6:], tail)


def test_uniform_ints_bounds():
    vals = rng.uniform_ints(2, 0, 5000, 7)
    assert vals.min() >= 0 and vals.max() <= 6
    assert len(np.unique(vals)) == 7


def test_derive_seed_changes_stream():
    assert rng.derive_seed(0, 1) != rng.derive_seed(0, 2) != rng.derive_seed(1, 1)
