"""Commuting operator tuples and the definitional checkers.

Every checker returns a :class:`CheckReport` whose residual is normalized by
``1 + ||A||_F`` so that pass/fail is scale-free; ``A = 0`` passes everything.
"""
from dataclasses import dataclass, field

import numpy as np

from ._config import COMMUTATION_TOL, resolve_tol
from .errors import DimensionError, NonCommutingError
from .hereditary import (
    _PowerCache,
    evaluate,
    isosymmetry_polynomial,
    m_isometry_polynomial,
    multi_indices,
    toral_polynomials,
)
from .matcore import as_square, fro

M_MAX_CAP = 25


class CommutingTuple:
    """Ordered tuple of ``d`` pairwise commuting ``n x n`` complex matrices.

    Commutation is verified on construction: for every pair,
    ``||T_j T_k - T_k T_j||_F <= tol (1 + ||T_j||_F)(1 + ||T_k||_F)``.
    """

    __slots__ = ("_ops",)

    def __init__(self, operators, commutation_tol=COMMUTATION_TOL):
        mats = [as_square(t, f"operator {j}") for j, t in enumerate(operators)]
        if not mats:
            raise DimensionError("a tuple needs at least one operator")
        if len({t.shape for t in mats}) != 1:
            raise DimensionError(
                "operators must share one size, got " + ", ".join(f"{t.shape[0]}x{t.shape[1]}" for t in mats)
            )
        ops = np.ascontiguousarray(np.array(mats), dtype=np.complex128)
        norms = [fro(t) for t in ops]
        for j in range(len(ops)):
            for k in range(j + 1, len(ops)):
                c = fro(ops[j] @ ops[k] - ops[k] @ ops[j])
                bound = commutation_tol * (1 + norms[j]) * (1 + norms[k])
                if c > bound:
                    raise NonCommutingError(
                        f"operators {j} and {k} do not commute: residual {c:.3e} > {bound:.3e}"
                    )
        ops.setflags(write=False)
        self._ops = ops

    @property
    def operators(self):
        return self._ops

    @property
    def d(self):
        return self._ops.shape[0]

    @property
    def n(self):
        return self._ops.shape[1]

    def __len__(self):
        return self.d

    def __getitem__(self, j):
        return self._ops[j]

    def __iter__(self):
        return iter(self._ops)

    def __repr__(self):
        return f"CommutingTuple(d={self.d}, n={self.n})"

    @property
    def scale(self):
        """``1 + max_j ||T_j||_F``; the reference magnitude for tolerances."""
        return 1.0 + max(fro(t) for t in self._ops)

    def adjoint(self):
        return CommutingTuple([t.conj().T for t in self._ops], commutation_tol=np.inf)

    def conjugate_by(self, q):
        """``q^* T_j q`` for every ``j`` (a unitary change of coordinates)."""
        q = np.asarray(q, dtype=np.complex128)
        return CommutingTuple([q.conj().T @ t @ q for t in self._ops], commutation_tol=np.inf)

    def similar(self, g):
        """``g^{-1} T_j g`` for every ``j``."""
        g = np.asarray(g, dtype=np.complex128)
        return CommutingTuple([np.linalg.solve(g, t @ g) for t in self._ops],
                              commutation_tol=np.inf)

    def permuted(self, order):
        return CommutingTuple([self._ops[j] for j in order], commutation_tol=np.inf)

    @classmethod
    def identity(cls, d, n):
        return cls([np.eye(n)] * d)

    @classmethod
    def zeros(cls, d, n):
        return cls([np.zeros((n, n))] * d)


def direct_sum(*tuples):
    """Block-diagonal tuple ``T ⊕ T' ⊕ ...``."""
    d = tuples[0].d
    if any(t.d != d for t in tuples):
        raise DimensionError("direct sum needs tuples of equal length")
    n = sum(t.n for t in tuples)
    ops = np.zeros((d, n, n), dtype=np.complex128)
    pos = 0
    for t in tuples:
        ops[:, pos:pos + t.n, pos:pos + t.n] = t.operators
        pos += t.n
    return CommutingTuple(ops, commutation_tol=np.inf)


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    residual: float
    tolerance_used: float
    detail: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_residual(cls, residual, tol, detail="", **extra):
        residual = float(residual)
        return cls(residual <= tol, residual, float(tol), detail, extra)

    def to_dict(self, name=None):
        out = {} if name is None else {"name": name}
        out.update(
            passed=bool(self.passed),
            residual=self.residual,
            tolerance=self.tolerance_used,
            detail=self.detail,
        )
        return out


def _check_A(A, T):
    n = T.n
    if A is None:
        return np.eye(n, dtype=np.complex128)
    A = as_square(A, "A")
    if A.shape[0] != n:
        raise DimensionError(f"A is {A.shape[0]}x{A.shape[0]} but operators are {n}x{n}")
    return A


def isometry_defect(T, A, m):
    """Unnormalized ``p_m(A; T, T)``."""
    A = _check_A(A, T)
    return evaluate(m_isometry_polynomial(T.d, m), A, T, T)


def check_A_m_isometric(T, A=None, m=1, tol=None):
    """Is ``T`` an (A,m)-isometry? ``A=None`` means the identity."""
    tol = resolve_tol(tol)
    if m < 1:
        raise ValueError("m must be positive")
    A = _check_A(A, T)
    res = fro(isometry_defect(T, A, m)) / (1.0 + fro(A))
    return CheckReport.from_residual(res, tol, f"(A,{m})-isometry residual")


def check_spherical_A_isometry(T, A=None, tol=None):
    tol = resolve_tol(tol)
    A = _check_A(A, T)
    gram = sum(t.conj().T @ A @ t for t in T.operators)
    res = fro(gram - A) / (1.0 + fro(A))
    return CheckReport.from_residual(res, tol, "||sum T_j^* A T_j - A||_F / (1 + ||A||_F)")


def check_A_n_nilpotent(N, A=None, n=1, tol=None):
    """``A N^alpha = 0`` for every multi-index with ``|alpha| = n``."""
    tol = resolve_tol(tol)
    if n < 1:
        raise ValueError("n must be positive")
    A = _check_A(A, N)
    powers = _PowerCache(N.operators)
    worst = 0.0
    worst_alpha = None
    for alpha in multi_indices(N.d, n):
        r = fro(A @ powers(alpha))
        if r > worst or worst_alpha is None:
            worst, worst_alpha = r, alpha
    res = worst / (1.0 + fro(A))
    return CheckReport.from_residual(res, tol, f"max |alpha|={n} of ||A N^alpha||_F, worst at {worst_alpha}")


def isometry_order(T, A=None, m_max=10, tol=None):
    """Least ``m <= m_max`` with ``T`` (A,m)-isometric, or ``None``.

    Membership is monotone in ``m``, so the scan stops at the first pass.
    """
    if not 1 <= m_max <= M_MAX_CAP:
        raise ValueError(f"m_max must lie in [1, {M_MAX_CAP}]")
    for m in range(1, m_max + 1):
        if check_A_m_isometric(T, A, m, tol).passed:
            return m
    return None


def check_toral(T, A=None, m=1, tol=None):
    tol = resolve_tol(tol)
    A = _check_A(A, T)
    denom = 1.0 + fro(A)
    res = max(fro(evaluate(p, A, T, T)) for p in toral_polynomials(T.d, m)) / denom
    return CheckReport.from_residual(res, tol, f"toral ({m}) residual, max over compositions")


def check_isosymmetric(T, m, n, tol=None):
    tol = resolve_tol(tol)
    if T.d != 1:
        raise DimensionError("isosymmetry is defined for single operators (d = 1)")
    A = np.eye(T.n, dtype=np.complex128)
    res = fro(evaluate(isosymmetry_polynomial(m, n), A, T, T)) / (1.0 + fro(A))
    return CheckReport.from_residual(res, tol, f"({m},{n})-isosymmetry residual")


def commutation_residual(S, N):
    """``max_{j,k} ||S_j N_k - N_k S_j||_F``."""
    return max(
        fro(s @ m - m @ s) for s in S.operators for m in N.operators
    )


def nilpotency_index(N, rel_tol=1e-8, max_order=None):
    """Least ``k`` with every ``N^alpha``, ``|alpha| = k``, numerically zero.

    Zero means ``||N^alpha||_F <= rel_tol * (1 + max ||N_j||_F)^k``. Returns
    ``None`` when no ``k <= max_order`` (default ``n``) qualifies.
    """
    max_order = N.n if max_order is None else max_order
    scale = N.scale
    level = {(0,) * N.d: np.eye(N.n, dtype=np.complex128)}
    for k in range(1, max_order + 1):
        nxt = {}
        for alpha, p in level.items():
            last = max((i for i, a in enumerate(alpha) if a), default=0)
            for j in range(last, N.d):
                beta = alpha[:j] + (alpha[j] + 1,) + alpha[j + 1:]
                nxt[beta] = p @ N.operators[j]
        if max(fro(p) for p in nxt.values()) <= rel_tol * scale ** k:
            return k
        level = nxt
    return None
