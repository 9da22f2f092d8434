"""Seeded generators for the example families.

Every generator is a pure function of its parameters and a seed in
``[0, 2**64)``: the same inputs give bit-identical matrices.
"""
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed
from .matcore import haar_unitary
from .tuples import CommutingTuple, direct_sum

MAX_ATTEMPTS = 32


def _rng(seed):
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.default_rng(seed)


def _cgauss(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sphere_points(rng, count, d):
    """``count`` points uniform on the unit sphere of ``C^d``."""
    z = _cgauss(rng, count, d)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def gen_spherical_unitary(d, n, seed):
    """Commuting normal tuple with joint eigenvalues uniform on the sphere."""
    rng = _rng(seed)
    pts = sphere_points(rng, n, d)
    q = haar_unitary(n, rng)
    return CommutingTuple([q @ np.diag(pts[:, j]) @ q.conj().T for j in range(d)])


def project_block_constraint(alpha, V):
    """Orthogonal projection of ``(V_1..V_d)`` onto ``sum conj(alpha_j) V_j = 0``.

    For unit ``alpha`` the map ``V_j -> V_j - alpha_j sum_l conj(alpha_l) V_l``
    is exactly that projection.
    """
    alpha = np.asarray(alpha, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    mix = np.tensordot(alpha.conj(), V, axes=(0, 0))
    return V - alpha[:, None, None] * mix[None]


def block_tuple(alpha, V):
    """``W_j = [[alpha_j I_p, V_j], [0, alpha_j I_q]]`` for ``V`` of shape (d, p, q)."""
    alpha = np.asarray(alpha, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    d, p, q = V.shape
    ops = np.zeros((d, p + q, p + q), dtype=np.complex128)
    for j in range(d):
        ops[j] = alpha[j] * np.eye(p + q)
        ops[j, :p, p:] = V[j]
    return CommutingTuple(ops)


def gen_block_example(alpha, n, m, seed, V=None):
    """Block 2-isometry with an ``n``-dim kernel part and ``m``-dim co-part.

    ``V`` (shape (d, n, m)) may be given explicitly; otherwise it is drawn
    Gaussian and projected onto the constraint. With ``d = 1`` the only
    admissible ``V`` is zero.
    """
    alpha = np.asarray(alpha, dtype=np.complex128).ravel()
    if abs(np.vdot(alpha, alpha).real - 1.0) > 1e-12:
        raise ValueError("alpha must lie on the unit sphere")
    d = len(alpha)
    if V is None:
        V = np.zeros((d, n, m)) if d == 1 else project_block_constraint(alpha, _cgauss(_rng(seed), d, n, m))
    else:
        V = np.asarray(V, dtype=np.complex128)
        if V.shape != (d, n, m):
            raise ValueError(f"V must have shape {(d, n, m)}, got {V.shape}")
        if np.linalg.norm(np.tensordot(alpha.conj(), V, axes=(0, 0))) > 1e-12:
            if d == 1:
                raise GenerationFailed("with d = 1 the constraint forces V = 0")
            raise ValueError("V violates sum conj(alpha_j) V_j = 0")
    return block_tuple(alpha, V)


def gen_two_isometry_sum(d, unitary_dim, block_shapes, seed, conjugate=True):
    """Direct sum of a spherical unitary and block 2-isometries.

    Returns ``(T, parts)``: the (optionally Haar-conjugated) tuple and the list
    of its summands before conjugation.
    """
    rng = _rng(seed)
    parts = []
    if unitary_dim:
        pts = sphere_points(rng, unitary_dim, d)
        parts.append(CommutingTuple([np.diag(pts[:, j]) for j in range(d)]))
    alphas = sphere_points(rng, len(block_shapes), d)
    for alpha, (p, q) in zip(alphas, block_shapes):
        V = project_block_constraint(alpha, _cgauss(rng, d, p, q)) if d > 1 else np.zeros((1, p, q))
        parts.append(block_tuple(alpha, V))
    T = direct_sum(*parts)
    if conjugate:
        q = haar_unitary(T.n, rng)
        T = CommutingTuple([q @ t @ q.conj().T for t in T.operators])
    return T, parts


def gen_jordan_isometry(orders, seed):
    """Single operator ``⊕ lambda_i (I + J_{s_i})`` conjugated by a Haar unitary.

    ``orders`` lists ``(lambda, size)`` with ``|lambda| = 1``; the result is a
    strict ``(2 max s - 1)``-isometry.
    """
    rng = _rng(seed)
    sizes = [int(s) for _, s in orders]
    n = sum(sizes)
    t = np.zeros((n, n), dtype=np.complex128)
    pos = 0
    for lam, s in orders:
        if abs(abs(lam) - 1.0) > 1e-12:
            raise ValueError(f"|lambda| must be 1, got {abs(lam)}")
        t[pos:pos + s, pos:pos + s] = lam * (np.eye(s) + np.eye(s, k=1))
        pos += s
    q = haar_unitary(n, rng)
    return CommutingTuple([q @ t @ q.conj().T])


@dataclass(frozen=True)
class A2Instance:
    T: CommutingTuple
    A: np.ndarray
    S: CommutingTuple
    N: CommutingTuple
    rank: int


def _random_similarity(rng, n):
    q1, q2 = haar_unitary(n, rng), haar_unitary(n, rng)
    return q1 @ np.diag(rng.uniform(0.5, 2.0, n)) @ q2


def _partition(rng, n):
    sizes = []
    while sum(sizes) < n:
        sizes.append(int(min(rng.integers(1, 4), n - sum(sizes))))
    return sizes


def gen_A2_construction(d, n_S, seed, nilpotent=True):
    """(A,2)-isometry ``T = S + N`` with ``A`` positive of rank ``n`` or ``n - 1``.

    In hidden coordinates ``S`` is block scalar with distinct joint points,
    ``A`` is block diagonal, and on blocks of size >= 2 the nilpotent part is
    ``[[0, V_j], [0, 0]]`` with ``V`` the least-norm correction of a Gaussian
    draw satisfying ``sum conj(lambda_j) A V_j = 0``. When ``A`` loses rank,
    its kernel either carries a 1-dim block whose joint point is off the
    sphere or sits inside the kernel part of a block (the only way to get
    ``N != 0`` for ``d = 1``). Everything is then moved by a random
    similarity ``G``: ``T -> G^-1 T G``, ``A -> G^* A G``.
    """
    rng = _rng(seed)
    n = int(n_S)
    if n < 1 or d < 1:
        raise ValueError("d and n_S must be positive")
    for _ in range(MAX_ATTEMPTS):
        rank = int(rng.integers(n - 1, n + 1)) if n > 1 else 1
        sizes = _partition(rng, n)
        pts = sphere_points(rng, len(sizes), d)
        deficient = rank < n
        kernel_mode = None
        if deficient:
            singles = [i for i, s in enumerate(sizes) if s == 1]
            multis = [i for i, s in enumerate(sizes) if s >= 2]
            options = (["off_sphere"] if singles else []) + (["in_block"] if multis else [])
            if d == 1 and nilpotent and multis:
                options = ["in_block"]
            kernel_mode = options[rng.integers(len(options))]
            target = (singles if kernel_mode == "off_sphere" else multis)
            kernel_block = target[rng.integers(len(target))]
            if kernel_mode == "off_sphere":
                pts[kernel_block] *= rng.uniform(0.3, 0.8) if rng.random() < 0.5 else rng.uniform(1.3, 2.0)
        s_ops = np.zeros((d, n, n), dtype=np.complex128)
        n_ops = np.zeros((d, n, n), dtype=np.complex128)
        a0 = np.zeros((n, n), dtype=np.complex128)
        pos = 0
        for b, size in enumerate(sizes):
            sl = slice(pos, pos + size)
            lam = pts[b]
            for j in range(d):
                s_ops[j, sl, sl] = lam[j] * np.eye(size)
            if deficient and b == kernel_block and kernel_mode == "off_sphere":
                pos += size
                continue  # A vanishes here
            p = int(rng.integers(1, size)) if size >= 2 else size
            P = _cgauss(rng, size, size)
            w = None
            if deficient and b == kernel_block:
                w = _cgauss(rng, p)
                w /= np.linalg.norm(w)
                wfull = np.concatenate([w, np.zeros(size - p)])
                P = P - np.outer(P @ wfull, wfull.conj())
            a0[sl, sl] = P.conj().T @ P
            if size >= 2:
                q = size - p
                V = _cgauss(rng, d, p, q)
                mix = np.tensordot(lam.conj(), V, axes=(0, 0))
                keep = np.outer(w, w.conj()) @ mix if w is not None else np.zeros_like(mix)
                # least-norm change making sum conj(lam_j) V_j lie in ker A|_M
                V = V - lam[:, None, None] * (mix - keep)[None]
                for j in range(d):
                    n_ops[j, pos:pos + p, pos + p:pos + size] = V[j]
            pos += size
        if nilpotent and not np.any(np.abs(n_ops) > 1e-12):
            continue
        if not nilpotent:
            n_ops[:] = 0.0
        g = _random_similarity(rng, n)
        ginv = np.linalg.inv(g)
        A = g.conj().T @ a0 @ g
        A = (A + A.conj().T) / 2
        S = CommutingTuple([ginv @ s @ g for s in s_ops], commutation_tol=1e-9)
        N = CommutingTuple([ginv @ x @ g for x in n_ops], commutation_tol=1e-9)
        T = CommutingTuple([ginv @ (s + x) @ g for s, x in zip(s_ops, n_ops)], commutation_tol=1e-9)
        return A2Instance(T, A, S, N, rank)
    raise GenerationFailed(
        f"no nonzero (A,2)-nilpotent part found for d={d}, n={n} in {MAX_ATTEMPTS} attempts"
    )
