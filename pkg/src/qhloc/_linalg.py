"""Small dense linear-algebra helpers used across the package."""

from __future__ import annotations

import numpy as np

# Relative singular-value cutoff used for every kernel/rank decision.
RANK_RTOL = 1e-10


def as_matrix(x, *, square: bool = True) -> np.ndarray:
    """Return ``x`` as a 2-D complex array (accepts wrappers exposing ``__array__``)."""
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_defect(a: np.ndarray) -> float:
    """Relative Frobenius distance of ``a`` from its adjoint."""
    scale = max(np.linalg.norm(a), 1.0)
    return float(np.linalg.norm(a - dag(a)) / scale)


def antidiagonal(n: int) -> np.ndarray:
    """The parity permutation ``J`` with ``J[i, n-1-i] = 1``."""
    return np.eye(n)[::-1].copy()


def rank_cutoff(s: np.ndarray, shape: tuple[int, int], rtol: float = RANK_RTOL) -> float:
    """Threshold below which singular values ``s`` count as zero."""
    if s.size == 0:
        return 0.0
    return rtol * float(s[0]) * max(shape)


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rank_cutoff(s, a.shape, rtol)))


def null_space(a: np.ndarray, rtol: float = RANK_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal kernel basis of ``a`` (as columns) and the full singular spectrum.

    The kernel columns are ordered from the smallest singular value upward, so
    column 0 is the most robust kernel direction.
    """
    rows, cols = a.shape
    if rows == 0 or a.size == 0:
        return np.eye(cols, dtype=a.dtype), np.zeros(0)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    if s[0] == 0:
        return np.eye(cols, dtype=a.dtype), s
    r = int(np.count_nonzero(s > rank_cutoff(s, a.shape, rtol)))
    kernel = vh[r:].conj().T
    # vh rows beyond len(s) have no singular value and are exact kernel directions;
    # put those first, then the smallest nonzero-but-cut singular values.
    kernel = kernel[:, ::-1]
    return kernel, s


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive."""
    k = int(np.argmax(np.abs(v)))
    if v[k] == 0:
        return v
    return v * (abs(v[k]) / v[k])


def sort_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Sort complex values by (real, imag) ascending."""
    order = np.lexsort((w.imag, w.real))
    return w[order]


def cluster_values(w: np.ndarray, tol: float) -> list[list[int]]:
    """Group indices of ``w`` whose members lie within ``tol`` of the cluster mean.

    Greedy single pass in (real, imag) order; deterministic for a given input.
    """
    order = np.lexsort((w.imag, w.real))
    clusters: list[list[int]] = []
    centers: list[complex] = []
    for idx in order:
        x = w[idx]
        for c, center in enumerate(centers):
            if abs(center - x) <= tol:
                clusters[c].append(int(idx))
                centers[c] = complex(np.mean(w[clusters[c]]))
                break
        else:
            clusters.append([int(idx)])
            centers.append(complex(x))
    return clusters


def hermitian_sqrt(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Principal square root of a Hermitian positive-definite matrix and its inverse."""
    w, v = np.linalg.eigh(m)
    if w.min() <= 0:
        raise ValueError("matrix is not positive definite")
    root = (v * np.sqrt(w)) @ dag(v)
    inv_root = (v / np.sqrt(w)) @ dag(v)
    return root, inv_root
