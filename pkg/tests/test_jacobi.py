import numpy as np
import pytest

from convexfaces import rng
from convexfaces.jacobi import symmetric_eig, top_eigenspace


def _random_symmetric(n, seed):
    g = rng.gaussians(seed, 0, n * n).reshape(n, n)
    return 0.5 * (g + g.T)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 8])
def test_eigenvalues_match_lapack(n):
    for seed in range(5):
        a = _random_symmetric(n, seed * 10 + n)
        vals, vecs = symmetric_eig(a)
        ref = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(vals, ref, atol=1e-9)
        assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-9)
        assert np.allclose(a @ vecs, vecs @ np.diag(vals), atol=1e-8)


def test_descending_order():
    vals, _ = symmetric_eig(np.diag([1.0, 5.0, -2.0]))
    assert np.allclose(vals, [5.0, 1.0, -2.0])


def test_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        symmetric_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_top_eigenspace_multiplicity():
    lam, basis = top_eigenspace(np.diag([1.0, 1.0, 0.0]))
    assert lam == pytest.approx(1.0, abs=1e-12)
    assert basis.shape == (3, 2)
    # basis spans the first two coordinates
    proj = basis @ basis.T
    assert np.allclose(proj, np.diag([1.0, 1.0, 0.0]), atol=1e-9)


def test_top_eigenspace_simple():
    a = _random_symmetric(5, 99)
    lam, basis = top_eigenspace(a)
    assert basis.shape == (5, 1)
    assert np.allclose(a @ basis, lam * basis, atol=1e-8)
