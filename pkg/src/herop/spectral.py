"""Joint generalized eigenspaces of commuting tuples and the split T = S + N.

The ambient space is cut along the spectrum of ``T_1``, each piece along the
spectrum of ``T_2`` restricted to it, and so on. Leaves are the joint
generalized eigenspaces ``H_lambda``; the canonical (generally oblique)
projections ``E_lambda`` come from inverting the assembled direct-sum basis
once. ``S = sum_lambda lambda E_lambda`` and ``N = T - S``.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.cluster.hierarchy import linkage, to_tree

from ._config import resolve_tol
from .errors import (
    IllConditionedDecomposition,
    InputNotAmIsometry,
    PreconditionFailed,
    SingularBasis,
)
from .hereditary import evaluate
from .matcore import (
    _lex_key,
    cluster_points,
    coordinates_in_basis,
    fro,
    matrix_power,
    spectrum,
)
from .tuples import (
    CheckReport,
    CommutingTuple,
    check_A_m_isometric,
    check_spherical_A_isometry,
    commutation_residual,
    nilpotency_index,
)

CLUSTER_REL_TOL = 1e-8
# perturbing a size-s Jordan block by eps moves its eigenvalues ~ eps^(1/s);
# clusters up to scale * DEFECT_BASE^(1/s) wide may be merged if nilpotent
DEFECT_BASE = 1e-11
DEFECT_NIL_TOL = 1e-9


def default_cluster_tol(T):
    return CLUSTER_REL_TOL * T.scale


def invariant_subspace(M, ev, members):
    """Orthonormal basis of the invariant subspace of ``M`` belonging to the
    eigenvalues ``ev[members]``, via an ordered complex Schur form.

    Returns ``(Z, K)`` where ``K = Z^* M Z`` is upper triangular.
    """
    members = np.asarray(members)
    s = len(members)
    k = M.shape[0]
    if s == k:
        t, z = scipy.linalg.schur(M, output="complex")
        return z, t
    inside = np.zeros(k, dtype=bool)
    inside[members] = True
    a = ev[inside].mean()
    r_in = np.abs(ev[inside] - a).max()
    r_out = np.abs(ev[~inside] - a).min()
    radius = 0.5 * (r_in + r_out)
    t, z, sdim = scipy.linalg.schur(M, output="complex", sort=lambda x: abs(x - a) <= radius)
    if sdim != s:
        raise IllConditionedDecomposition(
            f"ordered Schur form selected {sdim} eigenvalues, expected {s}"
        )
    return np.ascontiguousarray(z[:, :s]), t[:s, :s]


def _is_single_defective_eigenvalue(M, ev, members):
    """Is ``M - mean`` numerically nilpotent on the invariant subspace of
    ``ev[members]``?"""
    _, block = invariant_subspace(M, ev, members)
    s = block.shape[0]
    k = block - ev[members].mean() * np.eye(s)
    knorm = np.linalg.norm(k, 2)
    if knorm == 0.0:
        return True
    return np.linalg.norm(matrix_power(k, s), 2) <= DEFECT_NIL_TOL * knorm ** s


def spectral_groups(M, cluster_tol, scale):
    """Group the eigenvalues of ``M`` into numerically distinct eigenvalues.

    Groups are the chain-linkage clusters at ``cluster_tol``, united further
    when a wider single-linkage node is small enough to be the smeared
    spectrum of one defective eigenvalue and passes a nilpotency test.
    Returns ``(eigenvalues, [member index arrays])`` with groups in
    lexicographic order of their means.
    """
    ev = spectrum(M)
    if len(ev) == 1:
        return ev, [np.array([0])]
    base = cluster_points(ev, cluster_tol)
    if len(base) == 1:
        return ev, [np.arange(len(ev))]
    emb = np.column_stack([ev.real, ev.imag])
    root = to_tree(linkage(emb, method="single"))

    groups = []

    def visit(node):
        ids = np.array(sorted(node.pre_order()))
        s = len(ids)
        ok = (
            s == 1
            or node.dist <= cluster_tol
            or (
                node.dist <= scale * DEFECT_BASE ** (1.0 / s)
                and _is_single_defective_eigenvalue(M, ev, ids)
            )
        )
        if ok:
            groups.append(ids)
        else:
            visit(node.get_left())
            visit(node.get_right())

    visit(root)
    groups.sort(key=lambda g: _lex_key(ev[g].mean()))
    return ev, groups


@dataclass(frozen=True)
class JointSpectralDecomposition:
    d: int
    n: int
    points: np.ndarray  # (r, d) joint points lambda
    blocks: tuple  # orthonormal (n, k_i) bases of H_lambda
    projections: tuple  # E_lambda, (n, n) each

    @property
    def dims(self):
        return tuple(b.shape[1] for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def invariant_residuals(self, T):
        """Residuals of the resolution-of-identity and nilpotency invariants."""
        eye = np.eye(self.n)
        E = self.projections
        cross = max(
            (fro(E[i] @ E[j]) for i in range(len(E)) for j in range(len(E)) if i != j),
            default=0.0,
        )
        nil = 0.0
        for lam, b in zip(self.points, self.blocks):
            k = b.shape[1]
            for j in range(self.d):
                r = b.conj().T @ T.operators[j] @ b - lam[j] * np.eye(k)
                nil = max(nil, fro(matrix_power(r, k)))
        return {
            "sum_identity": fro(sum(E) - eye),
            "idempotent": max(fro(e @ e - e) for e in E),
            "cross": cross,
            "nilpotent": nil,
        }


def joint_decomposition(T, cluster_tol=None):
    """Split ``C^n`` into joint generalized eigenspaces of the tuple ``T``."""
    scale = T.scale
    cluster_tol = default_cluster_tol(T) if cluster_tol is None else float(cluster_tol)
    ops = T.operators
    leaves = []

    def recurse(basis, level):
        k = basis.shape[1]
        if level == T.d:
            lam = np.array([np.trace(basis.conj().T @ t @ basis) / k for t in ops])
            leaves.append((lam, basis))
            return
        r = basis.conj().T @ ops[level] @ basis
        ev, groups = spectral_groups(r, cluster_tol, scale)
        if len(groups) == 1:
            recurse(basis, level + 1)
            return
        eye = np.eye(k)
        pieces = [invariant_subspace(r, ev, g)[0] for g in groups]
        try:
            coordinates_in_basis(np.hstack(pieces), eye)
        except SingularBasis as exc:
            raise IllConditionedDecomposition(
                f"generalized eigenspaces of operator {level} are not independent "
                f"(cluster_tol={cluster_tol:.3e}): {exc}"
            ) from exc
        for z in pieces:
            recurse(basis @ z, level + 1)

    recurse(np.eye(T.n, dtype=np.complex128), 0)
    leaves.sort(key=lambda leaf: _lex_key(leaf[0]))
    full = np.hstack([b for _, b in leaves])
    try:
        inv = coordinates_in_basis(full, np.eye(T.n))
    except SingularBasis as exc:
        raise IllConditionedDecomposition(
            f"assembled direct-sum basis is singular (cluster_tol={cluster_tol:.3e}): {exc}"
        ) from exc
    projections = []
    pos = 0
    for _, b in leaves:
        k = b.shape[1]
        projections.append(b @ inv[pos:pos + k])
        pos += k
    return JointSpectralDecomposition(
        d=T.d,
        n=T.n,
        points=np.array([lam for lam, _ in leaves]),
        blocks=tuple(b for _, b in leaves),
        projections=tuple(projections),
    )


@dataclass(frozen=True)
class SNDecomposition:
    S: CommutingTuple
    N: CommutingTuple
    decomposition: JointSpectralDecomposition
    diagnostics: dict = field(default_factory=dict)


def split_SN(T, cluster_tol=None):
    """``T = S + N`` with ``S = sum lambda E_lambda`` and ``N`` nilpotent."""
    dec = joint_decomposition(T, cluster_tol)
    s_ops = np.array([
        sum(lam[j] * e for lam, e in zip(dec.points, dec.projections)) for j in range(T.d)
    ])
    n_ops = T.operators - s_ops
    # S, N commute only to rounding; their residuals are reported, not enforced
    S = CommutingTuple(s_ops, commutation_tol=np.inf)
    N = CommutingTuple(n_ops, commutation_tol=np.inf)
    diag = {
        "reconstruction": fro(np.asarray(S.operators) + N.operators - T.operators),
        "commutation_SN": commutation_residual(S, N),
        "nilpotency_index": nilpotency_index(N),
        "scale": T.scale,
        "dims": list(dec.dims),
    }
    diag.update(dec.invariant_residuals(T))
    return SNDecomposition(S, N, dec, diag)


@dataclass(frozen=True)
class TheoremReport:
    passed: bool
    checks: dict
    split: SNDecomposition = None

    def residuals(self):
        return {k: v.residual for k, v in self.checks.items()}


def verify_decomposition_theorem(T, A=None, m=1, tol=None, cluster_tol=None):
    """Split an (A,m)-isometry and certify ``S`` is a spherical A-isometry,
    ``N`` is nilpotent and the two commute."""
    tol = resolve_tol(tol)
    pre = check_A_m_isometric(T, A, m, tol)
    if not pre.passed:
        raise InputNotAmIsometry(
            f"input is not ({'A' if A is not None else 'I'},{m})-isometric: "
            f"residual {pre.residual:.3e} > {tol:.3e}"
        )
    sn = split_SN(T, cluster_tol)
    scale = T.scale
    nil = sn.diagnostics["nilpotency_index"]
    checks = {
        "precondition": pre,
        "spherical_S": check_spherical_A_isometry(sn.S, A, tol),
        "nilpotent_N": CheckReport(
            nil is not None, 0.0 if nil is not None else np.inf, tol,
            f"nilpotency index {nil}",
        ),
        "commutation_SN": CheckReport.from_residual(
            sn.diagnostics["commutation_SN"] / scale, tol, "max ||S_j N_k - N_k S_j||_F / scale"
        ),
        "reconstruction": CheckReport.from_residual(
            sn.diagnostics["reconstruction"] / scale, tol, "||S + N - T||_F / scale"
        ),
    }
    return TheoremReport(all(c.passed for c in checks.values()), checks, sn)


def _normalized(f, A, X, Y):
    return fro(evaluate(f, A, X, Y)) / (1.0 + fro(A))


def verify_radical_inclusion(f, A, T, power=1, tol=None, cluster_tol=None):
    """If ``f^power`` annihilates ``(A; T, T)``, then ``f`` annihilates
    ``(A; S, S)`` for the semisimple part ``S`` of ``T``."""
    tol = resolve_tol(tol)
    A = np.eye(T.n) if A is None else np.asarray(A, dtype=np.complex128)
    pre = _normalized(f ** power, A, T, T)
    if pre > tol:
        raise PreconditionFailed(f"f^{power} does not annihilate T: residual {pre:.3e}")
    sn = split_SN(T, cluster_tol)
    res = _normalized(f, A, sn.S, sn.S) / T.scale
    return CheckReport.from_residual(
        res, tol, f"||f(A; S, S)||_F / ((1 + ||A||_F) scale), f^{power} residual {pre:.3e}",
        precondition=pre,
    )


def verify_pairing_vanishing(f, A, X, Y=None, trials=50, tol=None, power=1, seed=0,
                             cluster_tol=None):
    """Sample generalized eigenvectors ``u`` of ``X`` at ``lambda`` and ``v``
    of ``Y`` at ``omega``; each ``f(conj(lambda), omega) <Av, u>`` must vanish.

    Each sample passes when ``|f(conj lambda, omega) <Av, u>| <= tol ||A||_F
    ||u|| ||v|| (1 + |f(conj lambda, omega)|)``.
    """
    tol = resolve_tol(tol)
    Y = X if Y is None else Y
    A = np.eye(X.n) if A is None else np.asarray(A, dtype=np.complex128)
    pre = _normalized(f ** power, A, X, Y)
    if pre > tol:
        raise PreconditionFailed(f"f^{power} does not annihilate (A; X, Y): residual {pre:.3e}")
    dx = joint_decomposition(X, cluster_tol)
    dy = dx if Y is X else joint_decomposition(Y, cluster_tol)
    rng = np.random.default_rng(seed)
    a_norm = fro(A)
    worst = 0.0
    for _ in range(trials):
        i = rng.integers(len(dx))
        j = rng.integers(len(dy))
        bu, bv = dx.blocks[i], dy.blocks[j]
        u = bu @ (rng.standard_normal(bu.shape[1]) + 1j * rng.standard_normal(bu.shape[1]))
        v = bv @ (rng.standard_normal(bv.shape[1]) + 1j * rng.standard_normal(bv.shape[1]))
        fval = f(np.conj(dx.points[i]), dy.points[j])
        pairing = np.vdot(u, A @ v)  # <Av, u>
        bound = a_norm * np.linalg.norm(u) * np.linalg.norm(v) * (1 + abs(fval))
        if bound == 0.0:
            continue
        worst = max(worst, abs(fval * pairing) / bound)
    return CheckReport.from_residual(
        worst, tol, f"max normalized |f(conj lambda, omega) <Av,u>| over {trials} pairs"
    )
