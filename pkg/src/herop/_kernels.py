"""Hot numeric kernels.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy version
with identical semantics. The public name is bound to the jitted version
unless numba is missing or ``HEROP_DISABLE_NUMBA`` is set; both variants stay
importable so benchmarks and tests can compare them side by side.
"""
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._config import numba_disabled

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not numba_disabled()


def _njit(func):
    if numba is None:
        return func
    return numba.njit(cache=True, nogil=True)(func)


# ---------------------------------------------------------------------------
# hereditary accumulation:  sum_i XH[i] @ A @ (sum_j C[i, j] YP[j])
# ---------------------------------------------------------------------------

def hereditary_accumulate_numpy(xh, a, yp, coef):
    """Sum of ``xh[i] @ a @ yp[j] * coef[i, j]`` over all index pairs.

    ``xh`` holds the adjoint powers (k1, n, n), ``yp`` the right powers
    (k2, n, n) and ``coef`` the (k1, k2) coefficient table.
    """
    n = a.shape[0]
    if xh.shape[0] == 0 or yp.shape[0] == 0:
        return np.zeros((n, n), dtype=np.complex128)
    right = np.tensordot(coef, yp, axes=(1, 0))
    return np.matmul(xh, np.matmul(a, right)).sum(axis=0)


def _hereditary_accumulate_py(xh, a, yp, coef):
    k1 = xh.shape[0]
    k2 = yp.shape[0]
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    right = np.empty((n, n), dtype=np.complex128)
    for i in range(k1):
        used = False
        right[:, :] = 0.0
        for j in range(k2):
            c = coef[i, j]
            if c != 0.0:
                used = True
                for r in range(n):
                    for s in range(n):
                        right[r, s] += c * yp[j, r, s]
        if used:
            out += xh[i] @ (a @ right)
    return out


hereditary_accumulate_jit = _njit(_hereditary_accumulate_py)


def hereditary_accumulate(xh, a, yp, coef):
    xh = np.ascontiguousarray(xh, dtype=np.complex128)
    a = np.ascontiguousarray(a, dtype=np.complex128)
    yp = np.ascontiguousarray(yp, dtype=np.complex128)
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    if USE_NUMBA and xh.shape[0] and yp.shape[0]:
        return hereditary_accumulate_jit(xh, a, yp, coef)
    return hereditary_accumulate_numpy(xh, a, yp, coef)


# ---------------------------------------------------------------------------
# single-linkage labels: points joined by a chain of steps <= tol
# ---------------------------------------------------------------------------

def linkage_labels_numpy(points, tol):
    p = points.shape[0]
    if p == 0:
        return np.zeros(0, dtype=np.int64)
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    _, raw = connected_components(csr_matrix(dist <= tol), directed=False)
    return _canonical_labels(raw.astype(np.int64))


def _canonical_labels(raw):
    # relabel so cluster ids appear in order of first occurrence
    out = np.empty_like(raw)
    seen = {}
    for i, r in enumerate(raw):
        out[i] = seen.setdefault(int(r), len(seen))
    return out


def _linkage_labels_py(points, tol):
    p = points.shape[0]
    m = points.shape[1]
    parent = np.arange(p)
    tol2 = tol * tol
    for i in range(p):
        for j in range(i + 1, p):
            acc = 0.0
            for k in range(m):
                t = points[i, k] - points[j, k]
                acc += t * t
            if acc <= tol2:
                ri = i
                while parent[ri] != ri:
                    ri = parent[ri]
                rj = j
                while parent[rj] != rj:
                    rj = parent[rj]
                if ri != rj:
                    if ri < rj:
                        parent[rj] = ri
                    else:
                        parent[ri] = rj
    labels = np.empty(p, dtype=np.int64)
    root_label = np.full(p, -1, dtype=np.int64)
    count = 0
    for i in range(p):
        r = i
        while parent[r] != r:
            r = parent[r]
        if root_label[r] < 0:
            root_label[r] = count
            count += 1
        labels[i] = root_label[r]
    return labels


linkage_labels_jit = _njit(_linkage_labels_py)


def linkage_labels(points, tol):
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if USE_NUMBA and points.shape[0]:
        return linkage_labels_jit(points, float(tol))
    return linkage_labels_numpy(points, float(tol))
