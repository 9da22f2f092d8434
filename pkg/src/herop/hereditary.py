"""Polynomials in two groups of commuting variables and the hereditary calculus.

A :class:`HereditaryPolynomial` in ``d`` variable pairs stores the finitely
many nonzero coefficients ``c[alpha, beta]`` of ``x^alpha y^beta``. Evaluating
it at an operator ``A`` and commuting tuples ``X``, ``Y`` places every
adjoint on the left::

    f(A; X, Y) = sum c[alpha, beta] (X^alpha)^* A Y^beta
"""
import itertools
import math
import re

import numpy as np

from . import _kernels
from ._config import PRUNE_TOL
from .errors import DimensionError
from .matcore import as_square


def multi_indices(d, k):
    """All multi-indices of length ``d`` and total degree ``k``, lexicographic."""
    if d == 1:
        return [(k,)]
    out = []
    for first in range(k, -1, -1):
        out.extend((first,) + rest for rest in multi_indices(d - 1, k - first))
    return sorted(out)


def multinomial(alpha):
    """``|alpha|! / alpha!``."""
    out = math.factorial(sum(alpha))
    for a in alpha:
        out //= math.factorial(a)
    return out


def _add_index(a, b):
    return tuple(i + j for i, j in zip(a, b))


class HereditaryPolynomial:
    """Sparse polynomial in ``x = (x_1..x_d)`` and ``y = (y_1..y_d)``.

    Coefficients of modulus at most ``1e-14`` are dropped on construction.
    Terms are kept in lexicographic order of ``(alpha, beta)``.
    """

    __slots__ = ("dim", "_terms")

    def __init__(self, dim, terms=None):
        if dim < 1:
            raise DimensionError("dim must be positive")
        self.dim = int(dim)
        clean = {}
        for (alpha, beta), c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            beta = tuple(int(b) for b in beta)
            if len(alpha) != dim or len(beta) != dim:
                raise DimensionError(f"multi-index length must be {dim}: {alpha}, {beta}")
            if min(alpha + beta) < 0:
                raise ValueError(f"negative exponent in {alpha}, {beta}")
            c = complex(c)
            if abs(c) > PRUNE_TOL:
                clean[(alpha, beta)] = c
        self._terms = dict(sorted(clean.items()))

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, dim, c=1.0):
        zero = (0,) * dim
        return cls(dim, {(zero, zero): c})

    @classmethod
    def monomial(cls, alpha, beta, c=1.0):
        return cls(len(alpha), {(tuple(alpha), tuple(beta)): c})

    @classmethod
    def x(cls, dim, j):
        e = tuple(int(i == j) for i in range(dim))
        return cls(dim, {(e, (0,) * dim): 1.0})

    @classmethod
    def y(cls, dim, j):
        e = tuple(int(i == j) for i in range(dim))
        return cls(dim, {((0,) * dim, e): 1.0})

    # -- structure --------------------------------------------------------
    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    @property
    def degree(self):
        return max((sum(a) + sum(b) for a, b in self._terms), default=-1)

    def depends_only_on_x(self):
        return all(not any(b) for _, b in self._terms)

    def depends_only_on_y(self):
        return all(not any(a) for a, _ in self._terms)

    def adjoint(self):
        """Swap the variable groups and conjugate coefficients.

        On a polynomial in ``y`` alone this yields ``f-bar(x)``, the polynomial
        whose hereditary evaluation at ``X`` is ``f(X)^*``.
        """
        return HereditaryPolynomial(
            self.dim, {(b, a): c.conjugate() for (a, b), c in self._terms.items()}
        )

    def __call__(self, x, y):
        """Scalar value at points ``x, y`` in ``C^d``."""
        x = np.atleast_1d(np.asarray(x, dtype=np.complex128))
        y = np.atleast_1d(np.asarray(y, dtype=np.complex128))
        total = 0j
        for (a, b), c in self._terms.items():
            total += c * np.prod(x ** np.array(a)) * np.prod(y ** np.array(b))
        return complex(total)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, HereditaryPolynomial):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return HereditaryPolynomial.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0j) + c
        return HereditaryPolynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return HereditaryPolynomial(self.dim, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return HereditaryPolynomial(self.dim, {k: c * other for k, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = HereditaryPolynomial.constant(self.dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, HereditaryPolynomial):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, tuple(self._terms.items())))

    def allclose(self, other, atol=1e-12):
        keys = set(self._terms) | set(other._terms)
        return self.dim == other.dim and all(
            abs(self._terms.get(k, 0j) - other._terms.get(k, 0j)) <= atol for k in keys
        )

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"HereditaryPolynomial({self.dim}, {format_polynomial(self)!r})"


def poly_mul(f, g):
    """Product by coefficient convolution."""
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    out = {}
    for (a1, b1), c1 in f.items():
        for (a2, b2), c2 in g.items():
            key = (_add_index(a1, a2), _add_index(b1, b2))
            out[key] = out.get(key, 0j) + c1 * c2
    return HereditaryPolynomial(f.dim, out)


def m_isometry_polynomial(d, m):
    """``(x_1 y_1 + ... + x_d y_d - 1)^m``, expanded."""
    if d < 1 or m < 1:
        raise ValueError("d and m must be positive")
    base = sum(
        (HereditaryPolynomial.x(d, j) * HereditaryPolynomial.y(d, j) for j in range(d)),
        HereditaryPolynomial.constant(d, -1.0),
    )
    return base ** m


def compositions(total, parts):
    """Tuples of ``parts`` non-negative integers summing to ``total``,
    in descending lexicographic order."""
    return sorted(
        (c for c in itertools.product(range(total + 1), repeat=parts) if sum(c) == total),
        reverse=True,
    )


def toral_polynomials(d, m):
    """``prod_j (1 - x_j y_j)^{m_j}`` for every composition ``m_1 + .. + m_d = m``."""
    if d < 1 or m < 1:
        raise ValueError("d and m must be positive")
    factors = [
        1.0 - HereditaryPolynomial.x(d, j) * HereditaryPolynomial.y(d, j) for j in range(d)
    ]
    out = []
    for comp in compositions(m, d):
        p = HereditaryPolynomial.constant(d)
        for fac, e in zip(factors, comp):
            p = p * fac ** e
        out.append(p)
    return out


def isosymmetry_polynomial(m, n):
    """``(xy - 1)^m (x - y)^n`` in one variable pair."""
    if m < 0 or n < 0 or m + n < 1:
        raise ValueError("need m, n >= 0 and m + n >= 1")
    x = HereditaryPolynomial.x(1, 0)
    y = HereditaryPolynomial.y(1, 0)
    return (x * y - 1.0) ** m * (x - y) ** n


# -- operator side ----------------------------------------------------------

def _operators(X):
    # accept a CommutingTuple or a raw (d, n, n) stack
    ops = getattr(X, "operators", X)
    return np.asarray(ops, dtype=np.complex128)


class _PowerCache:
    """Memoized ``X^alpha`` built from predecessors ``X^(alpha - e_j) X_j``."""

    def __init__(self, ops):
        self.ops = ops
        n = ops.shape[1]
        self.cache = {(0,) * ops.shape[0]: np.eye(n, dtype=np.complex128)}

    def __call__(self, alpha):
        alpha = tuple(alpha)
        hit = self.cache.get(alpha)
        if hit is not None:
            return hit
        j = max(i for i, a in enumerate(alpha) if a)
        prev = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
        val = self(prev) @ self.ops[j]
        self.cache[alpha] = val
        return val


def tuple_power(X, alpha):
    """``X_1^alpha_1 ... X_d^alpha_d``; the empty power is the identity."""
    ops = _operators(X)
    if len(alpha) != ops.shape[0]:
        raise DimensionError(f"multi-index length {len(alpha)} != tuple length {ops.shape[0]}")
    if min(alpha, default=0) < 0:
        raise ValueError("negative exponent")
    out = np.eye(ops.shape[1], dtype=np.complex128)
    for j, a in enumerate(alpha):
        for _ in range(a):
            out = out @ ops[j]
    return out


def evaluate(f, A, X, Y=None):
    """Hereditary evaluation ``f(A; X, Y)``; ``Y`` defaults to ``X``."""
    xo = _operators(X)
    yo = xo if Y is None else _operators(Y)
    if xo.ndim != 3 or yo.ndim != 3:
        raise DimensionError("tuples must be stacks of square matrices")
    if f.dim != xo.shape[0] or f.dim != yo.shape[0]:
        raise DimensionError(
            f"polynomial has {f.dim} variable pairs, tuples have {xo.shape[0]} and {yo.shape[0]}"
        )
    n = xo.shape[1]
    if yo.shape[1] != n:
        raise DimensionError("X and Y act on different spaces")
    A = as_square(A, "A")
    if A.shape[0] != n:
        raise DimensionError(f"A is {A.shape[0]}x{A.shape[0]}, operators are {n}x{n}")
    if f.is_zero():
        return np.zeros((n, n), dtype=np.complex128)

    alphas = sorted({a for a, _ in f.terms})
    betas = sorted({b for _, b in f.terms})
    a_pos = {a: i for i, a in enumerate(alphas)}
    b_pos = {b: i for i, b in enumerate(betas)}
    coef = np.zeros((len(alphas), len(betas)), dtype=np.complex128)
    for (a, b), c in f.items():
        coef[a_pos[a], b_pos[b]] = c

    xpow = _PowerCache(xo)
    ypow = xpow if Y is None else _PowerCache(yo)
    xh = np.stack([xpow(a).conj().T for a in alphas])
    yp = np.stack([ypow(b) for b in betas])
    return _kernels.hereditary_accumulate(xh, A, yp, coef)


def one_sided(f, X, adjoint_side=False):
    """Plain polynomial evaluation ``f(X)`` for ``f`` in one variable group.

    With ``adjoint_side`` the x-variables are replaced by ``X_j^*``, giving
    ``g(X^*)`` for a polynomial ``g`` in ``x`` alone.
    """
    ops = _operators(X)
    n = ops.shape[1]
    cache = _PowerCache(ops)
    out = np.zeros((n, n), dtype=np.complex128)
    for (a, b), c in f.items():
        if adjoint_side:
            if any(b):
                raise ValueError("polynomial depends on y")
            out += c * cache(a).conj().T
        else:
            if any(a):
                raise ValueError("polynomial depends on x")
            out += c * cache(b)
    return out


# -- text form ----------------------------------------------------------------

def _fmt_real(v):
    return repr(float(v))


def _fmt_complex(c):
    re_part = _fmt_real(c.real)
    im = c.imag
    if math.copysign(1.0, im) < 0:
        return f"({re_part}-{_fmt_real(-im)}i)"
    return f"({re_part}+{_fmt_real(im)}i)"


def _fmt_index(a):
    return "[" + ",".join(str(i) for i in a) + "]"


def format_polynomial(f):
    """Text form ``(a+bi) x^[alpha] y^[beta] + ...``; ``0`` for the zero polynomial.

    Floats are written with ``repr`` so :func:`parse_polynomial` recovers
    every coefficient exactly.
    """
    if f.is_zero():
        return "0"
    return " + ".join(
        f"{_fmt_complex(c)} x^{_fmt_index(a)} y^{_fmt_index(b)}" for (a, b), c in f.items()
    )


_NUM = r"[-+]?(?:\d+\.?\d*(?:[eE][-+]?\d+)?|inf|nan)"
_TERM = re.compile(
    rf"\(\s*(?P<re>{_NUM})\s*(?P<sign>[-+])\s*(?P<im>{_NUM})i\s*\)"
    r"\s*x\^\[(?P<a>[\d,\s]*)\]\s*y\^\[(?P<b>[\d,\s]*)\]"
)


def parse_polynomial(text, dim=None):
    """Inverse of :func:`format_polynomial`."""
    body = text.strip()
    if body == "0":
        if dim is None:
            raise ValueError("dimension of the zero polynomial is ambiguous; pass dim")
        return HereditaryPolynomial(dim)
    terms = {}
    found_dim = dim
    for k, piece in enumerate(body.split(" + ")):
        m = _TERM.fullmatch(piece.strip())
        if m is None:
            raise ValueError(f"cannot parse term {k}: {piece!r}")
        a = tuple(int(t) for t in m["a"].split(",") if t.strip())
        b = tuple(int(t) for t in m["b"].split(",") if t.strip())
        if found_dim is None:
            found_dim = len(a)
        im = float(m["im"])
        if m["sign"] == "-":
            im = -im
        c = complex(float(m["re"]), im)
        if (a, b) in terms:
            raise ValueError(f"duplicate term {a}, {b}")
        terms[(a, b)] = c
    return HereditaryPolynomial(found_dim, terms)
