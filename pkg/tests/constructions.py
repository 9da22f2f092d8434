"""Seeded instances for the ideal and positivity properties of the calculus."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from herop.gen import gen_block_example, gen_jordan_isometry, sphere_points
from herop.hereditary import HereditaryPolynomial as HP, evaluate, m_isometry_polynomial, one_sided, tuple_power
from herop.tuples import CommutingTuple


def _cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _similarity(rng, n):
    # singular values in [0.5, 2] keep the conjugated tuple well conditioned
    u, _ = np.linalg.qr(_cgauss(rng, n, n))
    v, _ = np.linalg.qr(_cgauss(rng, n, n))
    return u @ np.diag(rng.uniform(0.5, 2.0, n)) @ v


@dataclass
class IdealInstance:
    f: HP
    A: np.ndarray
    X: CommutingTuple
    Y: CommutingTuple
    alpha: tuple
    beta: tuple

    @property
    def scale(self):
        return max(self.X.scale, self.Y.scale)


def ideal_instance(seed):
    """A pair (f, A, X, Y) plus a monomial multiplier x^alpha y^beta.

    Even seeds give a hereditary root (f annihilates), odd seeds a random
    polynomial on random commuting tuples, so both small and large residuals
    are exercised.
    """
    rng = np.random.default_rng(seed)
    if seed % 2 == 0:
        if seed % 4 == 0:
            d = int(rng.integers(2, 4))
            T = gen_block_example(sphere_points(rng, 1, d)[0], int(rng.integers(1, 3)),
                                  int(rng.integers(1, 3)), seed)
            f = m_isometry_polynomial(d, 2)
        else:
            d = 1
            k = int(rng.integers(1, 4))
            T = gen_jordan_isometry([(np.exp(2j * np.pi * rng.random()), k)], seed)
            f = m_isometry_polynomial(1, 2 * k - 1)
        X = Y = T
        A = np.eye(T.n)
    else:
        d, n = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        base = np.triu(_cgauss(rng, n, n)) / np.sqrt(n)
        G = _similarity(rng, n)
        Gi = np.linalg.inv(G)
        ops = [G @ (c * np.eye(n) + base) @ Gi / 2 for c in rng.uniform(-1, 1, d)]
        X = Y = CommutingTuple(ops, commutation_tol=1e-9)
        f = HP(d, {(tuple(int(v) for v in rng.integers(0, 3, d)), tuple(int(v) for v in rng.integers(0, 3, d))):
                   complex(*rng.standard_normal(2)) for _ in range(4)})
        A = _cgauss(rng, n, n)
    alpha = tuple(int(v) for v in rng.integers(0, 3, X.d))
    beta = tuple(int(v) for v in rng.integers(0, 3, X.d))
    return IdealInstance(f, A, X, Y, alpha, beta)


def ideal_residuals(inst):
    """(lhs, bound) with lhs = ||(g f)(A;X,Y)||_F for g = x^alpha y^beta."""
    eps = np.linalg.norm(evaluate(inst.f, inst.A, inst.X, inst.Y))
    g = HP.monomial(inst.alpha, inst.beta)
    lhs = np.linalg.norm(evaluate(g * inst.f, inst.A, inst.X, inst.Y))
    xa = np.linalg.norm(tuple_power(inst.X, inst.alpha), 2)
    yb = np.linalg.norm(tuple_power(inst.Y, inst.beta), 2)
    return lhs, xa * eps * yb + 1e-9 * inst.scale


@dataclass
class PositivityInstance:
    Y: CommutingTuple
    A: np.ndarray
    polys: list


def positivity_instance(seed):
    """Y = G diag(J_1, ..., J_k) G^{-1} and A = P^* P with P f_j(Y) = 0.

    P reads off the coordinates of a chosen set of Jordan blocks, and every
    f_j carries the minimal polynomial of those blocks as a factor, so
    P f_j(Y) = 0 while f_j(Y) itself is far from zero.
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 5))
    sizes = [int(s) for s in rng.integers(1, 4, k)]
    points = np.exp(2j * np.pi * (np.arange(k) + rng.uniform(0.1, 0.9, k)) / k) * rng.uniform(0.5, 1, k)
    blocks = [p * np.eye(s) + np.eye(s, k=1) for p, s in zip(points, sizes)]
    n = sum(sizes)
    G = _similarity(rng, n)
    Gi = np.linalg.inv(G)
    Y1 = G @ block_diag(*blocks) @ Gi
    d = int(rng.integers(1, 3))
    ops = [Y1] if d == 1 else [Y1, Y1 @ Y1 / 2 - 0.3 * Y1]
    Y = CommutingTuple(ops, commutation_tol=1e-9)

    chosen = sorted(rng.choice(k, int(rng.integers(1, k)), replace=False))  # leave one block free
    starts = np.cumsum([0] + sizes)
    rows = np.concatenate([np.arange(starts[i], starts[i + 1]) for i in chosen])
    R = _cgauss(rng, int(rng.integers(1, len(rows) + 1)), len(rows))
    P = R @ Gi[rows, :]
    A = P.conj().T @ P

    y = HP.y(d, 0)
    kill = HP.constant(d)
    for i in chosen:
        kill = kill * (y - points[i]) ** sizes[i]
    polys = []
    for _ in range(int(rng.integers(1, 4))):
        extra = HP(d, {((0,) * d, tuple(int(v) for v in rng.integers(0, 2, d))): complex(*rng.standard_normal(2))
                       for _ in range(2)})
        polys.append(kill * (extra if not extra.is_zero() else HP.constant(d)))
    return PositivityInstance(Y, A, polys)


def positivity_residuals(inst):
    """(sum residual relative to its terms, max_j ||A f_j(Y)||_F / scale)."""
    total = HP(inst.Y.d)
    for f in inst.polys:
        total = total + f.adjoint() * f
    values = [one_sided(f, inst.Y) for f in inst.polys]
    terms = np.linalg.norm(inst.A, 2) * sum(np.linalg.norm(v, 2) ** 2 for v in values)
    summed = np.linalg.norm(evaluate(total, inst.A, inst.Y, inst.Y)) / terms
    killed = max(np.linalg.norm(inst.A @ v) for v in values) / inst.Y.scale
    return summed, killed
