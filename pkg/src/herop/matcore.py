"""Dense complex linear algebra primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. A basis is an
``(n, k)`` array whose columns are orthonormal.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import DimensionError, SingularBasis

INVERTIBILITY_TOL = 1e-10


def as_matrix(data, name="matrix"):
    """Coerce ``data`` to a finite 2-D complex array."""
    m = np.array(data, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def as_square(data, name="matrix"):
    m = as_matrix(data, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def fro(m):
    return float(np.linalg.norm(m))


def adjoint(m):
    return m.conj().T


def null_space(m, tol=1e-10, dim=None):
    """Orthonormal basis of the numerical kernel of ``m``.

    Uses a QR factorization with column pivoting of ``m^H``; the kernel is the
    orthogonal complement of the leading pivoted columns. The rank is the
    smallest ``r`` whose trailing block of ``R`` has Frobenius norm at most
    ``tol * max(1, ||m||_F)``, which bounds ``||m v||`` for every returned
    ``v``. Passing ``dim`` forces the kernel dimension instead.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    m = as_matrix(m)
    ncols = m.shape[1]
    q, r, _ = scipy.linalg.qr(adjoint(m), pivoting=True, mode="full")
    if dim is None:
        bound = tol * max(1.0, fro(m))
        # tail[k] = ||R[k:, :]||_F
        row_sq = np.sum(np.abs(r) ** 2, axis=1)
        tail = np.sqrt(np.concatenate([np.cumsum(row_sq[::-1])[::-1], [0.0]]))
        rank = int(np.argmax(tail <= bound))
    else:
        if not 0 <= dim <= ncols:
            raise DimensionError(f"kernel dimension {dim} out of range for {ncols} columns")
        rank = ncols - dim
    return np.ascontiguousarray(q[:, rank:])


def orthonormal_complement(basis, n=None):
    """Orthonormal basis of the orthogonal complement of span(basis)."""
    basis = np.asarray(basis, dtype=np.complex128)
    if n is None:
        n = basis.shape[0]
    if basis.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    if basis.shape[1] == n:
        return np.zeros((n, 0), dtype=np.complex128)
    return null_space(adjoint(basis), dim=n - basis.shape[1])


def spectrum(m):
    """All eigenvalues of a square matrix, with algebraic multiplicity."""
    m = as_square(m)
    return np.linalg.eigvals(m)


@dataclass(frozen=True)
class Cluster:
    indices: tuple
    representative: np.ndarray

    @property
    def size(self):
        return len(self.indices)


def _lex_key(point):
    return tuple(v for z in np.atleast_1d(point) for v in (z.real, z.imag))


def cluster_points(points, tol):
    """Partition points (complex scalars or complex d-vectors) by chain linkage.

    Two points share a cluster iff a chain of steps, each of Euclidean length
    at most ``tol``, joins them. Clusters are ordered lexicographically by
    their mean (real part, then imaginary part, coordinate by coordinate).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    pts = np.asarray(points, dtype=np.complex128)
    if pts.size == 0:
        return []
    scalar = pts.ndim == 1
    if scalar:
        pts = pts[:, None]
    embedded = np.concatenate([pts.real, pts.imag], axis=1)
    labels = _kernels.linkage_labels(embedded, tol)
    clusters = []
    for lab in range(int(labels.max()) + 1):
        idx = np.flatnonzero(labels == lab)
        rep = pts[idx].mean(axis=0)
        clusters.append(Cluster(tuple(int(i) for i in idx), rep[0] if scalar else rep))
    clusters.sort(key=lambda c: _lex_key(c.representative))
    return clusters


def coordinates_in_basis(b, target):
    """Solve ``b @ x = target`` for a square, well-conditioned basis matrix ``b``."""
    b = as_square(b, "basis")
    target = np.asarray(target, dtype=np.complex128)
    if target.shape[0] != b.shape[0]:
        raise DimensionError(f"target has {target.shape[0]} rows, basis has {b.shape[0]}")
    sv = np.linalg.svd(b, compute_uv=False)
    if not sv[-1] > INVERTIBILITY_TOL * sv[0]:
        raise SingularBasis(
            f"basis is singular at tolerance {INVERTIBILITY_TOL:g} "
            f"(singular values {sv[0]:.3e} .. {sv[-1]:.3e})"
        )
    return np.linalg.solve(b, target)


def matrix_power(m, k):
    return np.linalg.matrix_power(m, k)


def haar_unitary(n, rng):
    """Haar-distributed unitary from QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases
