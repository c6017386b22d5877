"""Small numeric helpers shared by the geometry layers.

Everything here works on grade-1 coordinate arrays (over the internal
orthonormal generators) or on whole coefficient arrays; SVD-based rank and
kernel computations use relative cutoffs against the largest singular value.
"""

from __future__ import annotations

import numpy as np

from .algebra import ConformalAlgebra, Multivector

__all__ = [
    "minkowski_gram",
    "numerical_rank",
    "kernel_basis",
    "blade_span",
    "span_union_rank",
    "span_intersection",
]

RANK_RTOL = 1e-9


def minkowski_gram(alg: ConformalAlgebra, columns: np.ndarray) -> np.ndarray:
    """Gram matrix of vector coordinate columns under the Minkowski product."""
    return columns.T @ (alg.vector_metric[:, None] * columns)


def numerical_rank(matrix: np.ndarray, rtol: float = RANK_RTOL) -> int:
    sv = np.linalg.svd(matrix, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def kernel_basis(matrix: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the right null space of ``matrix``."""
    _, sv, vt = np.linalg.svd(matrix, full_matrices=True)
    cutoff = rtol * sv[0] if sv.size and sv[0] > 0.0 else 0.0
    rank = int(np.sum(sv > cutoff))
    return vt[rank:].T


def blade_span(blade: Multivector, rtol: float = RANK_RTOL) -> np.ndarray:
    """Coordinate columns spanning {v : v ^ B = 0}, the support of a blade.

    For a pure k-blade this is the k-dimensional space of its factors.
    """
    alg = blade.algebra
    cols = np.stack(
        [alg.exterior(alg.basis_blade(1 << b).coeffs, blade.coeffs) for b in range(alg.dimension)],
        axis=1,
    )
    return kernel_basis(cols, rtol)


def span_union_rank(*spans: np.ndarray, rtol: float = RANK_RTOL) -> int:
    return numerical_rank(np.hstack(spans), rtol)


def span_intersection(u: np.ndarray, v: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal columns spanning the intersection of two column spans."""
    combined = np.hstack([u, -v])
    null = kernel_basis(combined, rtol)
    if null.shape[1] == 0:
        return np.zeros((u.shape[0], 0))
    vectors = u @ null[: u.shape[1]]
    # re-orthonormalize; the kernel parametrization need not be orthogonal here
    q, r = np.linalg.qr(vectors)
    keep = np.abs(np.diag(r)) > rtol * max(np.abs(np.diag(r)).max(), 1e-300)
    return q[:, keep]
