"""Structure of 2-isometric and (A,2)-isometric tuples.

A 2-isometric tuple on a finite-dimensional space is a spherical unitary
plus an orthogonal sum of blocks unitarily equivalent to::

    W_j = [[alpha_j I_p, V_j],
           [0,           alpha_j I_q]],   alpha on the unit sphere,
                                           sum_j conj(alpha_j) V_j = 0.

:func:`classify_2_isometric` extracts that data and :func:`reconstruct`
inverts it.
"""
from dataclasses import dataclass, field

import numpy as np

from ._config import resolve_tol
from .errors import ANotPositive, NotA2Isometric, NotTwoIsometric, StructureViolation
from .matcore import fro, null_space, orthonormal_complement
from .spectral import joint_decomposition, split_SN
from .tuples import (
    CheckReport,
    CommutingTuple,
    check_A_m_isometric,
    check_A_n_nilpotent,
    check_spherical_A_isometry,
    commutation_residual,
)


@dataclass(frozen=True)
class TwoIsometryBlock:
    alpha: np.ndarray  # (d,), on the unit sphere
    M_basis: np.ndarray  # (n, p), common kernel of the N_l
    Mperp_basis: np.ndarray  # (n, q)
    V: np.ndarray  # (d, p, q), maps M^perp -> M

    @property
    def shape(self):
        return self.M_basis.shape[1], self.Mperp_basis.shape[1]

    def constraint_residual(self):
        """``||sum_j conj(alpha_j) V_j||_F``."""
        return fro(np.tensordot(self.alpha.conj(), self.V, axes=(0, 0)))

    def canonical_tuple(self):
        """The tuple ``W`` in block coordinates ``M ⊕ M^perp``."""
        p, q = self.shape
        ops = np.zeros((len(self.alpha), p + q, p + q), dtype=np.complex128)
        for j, a in enumerate(self.alpha):
            ops[j] = a * np.eye(p + q)
            ops[j, :p, p:] = self.V[j]
        return ops


@dataclass(frozen=True)
class TwoIsometryStructure:
    d: int
    n: int
    unitary_basis: np.ndarray  # (n, u)
    unitary_tuple: CommutingTuple  # restriction to the unitary summand, None if u == 0
    blocks: tuple
    change_of_basis: np.ndarray  # unitary (n, n): block coordinates -> original
    unitary_points: np.ndarray = field(default=None)  # joint points of the unitary part

    def canonical_operators(self):
        """Operators in block coordinates: unitary part first, then each block."""
        ops = np.zeros((self.d, self.n, self.n), dtype=np.complex128)
        pos = 0
        if self.unitary_tuple is not None:
            u = self.unitary_tuple.n
            ops[:, :u, :u] = self.unitary_tuple.operators
            pos = u
        for blk in self.blocks:
            w = blk.canonical_tuple()
            k = w.shape[1]
            ops[:, pos:pos + k, pos:pos + k] = w
            pos += k
        return ops


def classify_2_isometric(T, tol=None, cluster_tol=None):
    """Split a 2-isometric tuple into its spherical-unitary part and blocks."""
    tol = resolve_tol(tol)
    pre = check_A_m_isometric(T, None, 2, tol)
    if not pre.passed:
        raise NotTwoIsometric(f"2-isometry residual {pre.residual:.3e} > {tol:.3e}")
    scale = T.scale
    dec = joint_decomposition(T, cluster_tol)

    for lam in dec.points:
        off = abs(np.vdot(lam, lam).real - 1.0)
        if off > tol * scale:
            raise StructureViolation(f"joint eigenvalue {lam} is off the unit sphere by {off:.3e}")
    bases = dec.blocks
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            overlap = fro(bases[i].conj().T @ bases[j])
            if overlap > tol * scale:
                raise StructureViolation(
                    f"generalized eigenspaces {i} and {j} are not orthogonal ({overlap:.3e})"
                )

    unitary_cols, unitary_pts, raw_blocks = [], [], []
    for lam, b in zip(dec.points, bases):
        k = b.shape[1]
        nil = np.array([b.conj().T @ t @ b - lam[j] * np.eye(k) for j, t in enumerate(T.operators)])
        if fro(nil) <= tol * scale:
            unitary_cols.append(b)
            unitary_pts.extend([lam] * k)
            continue
        m_loc = null_space(np.vstack(list(nil)), tol)
        mperp_loc = orthonormal_complement(m_loc, k)
        if m_loc.shape[1] == 0 or mperp_loc.shape[1] == 0:
            raise StructureViolation(f"block at {lam} has no proper common kernel")
        V = np.array([m_loc.conj().T @ x @ mperp_loc for x in nil])
        leak = max(fro(x - m_loc @ v @ mperp_loc.conj().T) for x, v in zip(nil, V))
        if leak > tol * scale:
            raise StructureViolation(f"block at {lam} is not of the form [[0, V], [0, 0]] ({leak:.3e})")
        raw_blocks.append((lam, b @ m_loc, b @ mperp_loc, V))

    cols = unitary_cols + [c for _, mb, mp, _ in raw_blocks for c in (mb, mp)]
    assembled = np.hstack(cols)
    # nearest unitary; moves columns only by the (tiny) loss of orthogonality
    u_, _, vh = np.linalg.svd(assembled)
    change = u_ @ vh

    u_dim = sum(c.shape[1] for c in unitary_cols)
    ubasis = change[:, :u_dim]
    utuple = None
    if u_dim:
        utuple = CommutingTuple(
            [ubasis.conj().T @ t @ ubasis for t in T.operators], commutation_tol=np.inf
        )
    blocks = []
    pos = u_dim
    for lam, mb, mp, V in raw_blocks:
        p, q = mb.shape[1], mp.shape[1]
        mb_u = change[:, pos:pos + p]
        mp_u = change[:, pos + p:pos + p + q]
        pos += p + q
        V_u = np.array([mb_u.conj().T @ t @ mp_u for t in T.operators])
        blk = TwoIsometryBlock(np.asarray(lam), mb_u, mp_u, V_u)
        if blk.constraint_residual() > tol * scale:
            raise StructureViolation(
                f"block at {lam} violates sum conj(alpha_j) V_j = 0 ({blk.constraint_residual():.3e})"
            )
        blocks.append(blk)
    return TwoIsometryStructure(
        d=T.d,
        n=T.n,
        unitary_basis=ubasis,
        unitary_tuple=utuple,
        blocks=tuple(blocks),
        change_of_basis=change,
        unitary_points=np.array(unitary_pts).reshape(-1, T.d),
    )


def reconstruct(structure):
    """Reassemble the original tuple from its structure."""
    c = structure.change_of_basis
    if fro(c.conj().T @ c - np.eye(structure.n)) > 1e-9 * structure.n:
        raise StructureViolation("change of basis is not unitary")
    ops = structure.canonical_operators()
    return CommutingTuple([c @ w @ c.conj().T for w in ops], commutation_tol=np.inf)


@dataclass(frozen=True)
class A2Structure:
    S: CommutingTuple
    N: CommutingTuple
    reports: dict
    passed: bool


def _check_positive(A, tol=1e-10):
    A = np.asarray(A, dtype=np.complex128)
    scale = max(np.linalg.norm(A, 2), 1e-300)
    if fro(A - A.conj().T) > tol * max(fro(A), 1.0):
        raise ANotPositive("A is not Hermitian")
    lo = np.linalg.eigvalsh((A + A.conj().T) / 2).min()
    if lo < -tol * scale:
        raise ANotPositive(f"A has a negative eigenvalue {lo:.3e}")
    return A


def classify_A2(T, A, tol=None, cluster_tol=None):
    """``T = S + N`` with ``S`` spherical A-isometric and ``N`` (A,2)-nilpotent."""
    tol = resolve_tol(tol)
    A = _check_positive(A)
    pre = check_A_m_isometric(T, A, 2, tol)
    if not pre.passed:
        raise NotA2Isometric(f"(A,2)-isometry residual {pre.residual:.3e} > {tol:.3e}")
    sn = split_SN(T, cluster_tol)
    S, N = sn.S, sn.N
    denom = 1.0 + fro(A)
    scale = T.scale
    cross = sum(s.conj().T @ A @ m for s, m in zip(S.operators, N.operators))
    nn = max(fro(A @ a @ b) for a in N.operators for b in N.operators)
    reports = {
        "precondition": pre,
        "spherical_S": check_spherical_A_isometry(S, A, tol),
        "cross_term": CheckReport.from_residual(
            fro(cross) / denom / scale, tol, "||sum S_l^* A N_l||_F / ((1 + ||A||_F) scale)"
        ),
        "A_NN": CheckReport.from_residual(
            nn / denom / scale ** 2, tol, "max ||A N_j N_l||_F / ((1 + ||A||_F) scale^2)"
        ),
        "A2_nilpotent": check_A_n_nilpotent(N, A, 2, tol * scale ** 2),
        "commutation_SN": CheckReport.from_residual(
            commutation_residual(S, N) / scale, tol, "max ||S_j N_k - N_k S_j||_F / scale"
        ),
        "reconstruction": CheckReport.from_residual(
            sn.diagnostics["reconstruction"] / scale, tol, "||S + N - T||_F / scale"
        ),
    }
    return A2Structure(S, N, reports, all(r.passed for r in reports.values()))
