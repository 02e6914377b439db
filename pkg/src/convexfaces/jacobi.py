"""Cyclic Jacobi eigensolver for small dense symmetric matrices.

The matrices that arise here are tiny (n <= ~10), so a classic cyclic
Jacobi sweep is plenty fast, fully deterministic, and easy to audit.
"""

from __future__ import annotations

import numpy as np

TAU_EIG = 1e-10  # off-diagonal residual target, relative to the matrix norm

_MAX_SWEEPS = 60


def _off_norm(a: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0))


def symmetric_eig(matrix: np.ndarray, tol: float = TAU_EIG) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns).

    Rotations are applied in a fixed row-major (p, q) sweep order until the
    off-diagonal Frobenius norm drops below ``tol * max(1, ||A||_F)``.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, float(np.abs(a).max(initial=0.0)))):
        raise ValueError("matrix must be symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v

    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(_MAX_SWEEPS):
        if _off_norm(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot

    order = np.argsort(-a.diagonal(), kind="stable")
    return a.diagonal()[order].copy(), v[:, order]


def top_eigenspace(matrix: np.ndarray, mult_tol: float = 1e-8) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and an orthonormal basis of its eigenspace.

    Eigenvalues within ``mult_tol * max(1, |lambda_max|)`` of the maximum
    count as part of the top cluster.
    """
    vals, vecs = symmetric_eig(matrix)
    lam = float(vals[0])
    cut = mult_tol * max(1.0, abs(lam))
    k = int(np.sum(vals >= lam - cut))
    return lam, vecs[:, :k]
