import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from herop.errors import DimensionError
from herop.hereditary import (
    HereditaryPolynomial as HP,
    evaluate,
    format_polynomial,
    isosymmetry_polynomial,
    m_isometry_polynomial,
    multi_indices,
    multinomial,
    one_sided,
    parse_polynomial,
    poly_mul,
    toral_polynomials,
    tuple_power,
)
from herop.matcore import haar_unitary
from herop.tuples import CommutingTuple

from constructions import ideal_instance, ideal_residuals, positivity_instance, positivity_residuals
from oracles import horner, word_expansion_defect

x = HP.x(1, 0)
y = HP.y(1, 0)


def P(dim, mapping):
    return HP(dim, mapping)


def commuting_tuple(rng, d, n, scale=1.0):
    """Random commuting tuple: simultaneously triangularized in one basis."""
    q = haar_unitary(n, rng)
    base = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    ops = []
    for _ in range(d):
        # polynomials in one matrix commute with each other
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        t = c[0] * np.eye(n) + c[1] * base + c[2] * base @ base
        ops.append(scale * q @ t @ q.conj().T / (1 + np.linalg.norm(t, 2)))
    return CommutingTuple(ops, commutation_tol=1e-9)


def random_poly(rng, d, max_deg=2, terms=4):
    out = {}
    for _ in range(terms):
        a = tuple(int(v) for v in rng.integers(0, max_deg + 1, d))
        b = tuple(int(v) for v in rng.integers(0, max_deg + 1, d))
        out[(a, b)] = complex(rng.standard_normal(), rng.standard_normal())
    return HP(d, out)


class TestMultiIndex:
    def test_enumeration_is_sorted_and_complete(self):
        idx = multi_indices(3, 2)
        assert idx == sorted(idx) and len(idx) == 6
        assert all(sum(a) == 2 for a in idx)

    def test_multinomial_exact_at_degree_20(self):
        assert multinomial((20,)) == 1
        assert multinomial((10, 10)) == 184756
        assert multinomial((5, 5, 5, 5)) == 11732745024


class TestPolyMul:
    def test_binomial_square(self):
        f = x * y - 1
        assert poly_mul(f, f) == P(1, {((2,), (2,)): 1, ((1,), (1,)): -2, ((0,), (0,)): 1})

    def test_identity(self):
        f = P(2, {((1, 0), (0, 2)): 2 - 1j, ((0, 0), (1, 1)): 3})
        assert poly_mul(f, HP.constant(2)) == f

    def test_hand_expansion(self):
        expected = P(1, {((2,), (1,)): 1, ((1,), (0,)): -1, ((1,), (2,)): -1, ((0,), (1,)): 1})
        assert poly_mul(x - y, x * y - 1) == expected

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            poly_mul(HP.constant(1), HP.constant(2))


class TestNamedFamilies:
    def test_m_isometry_d1_m1(self):
        assert m_isometry_polynomial(1, 1) == x * y - 1

    def test_m_isometry_d2_m1(self):
        expected = P(2, {((1, 0), (1, 0)): 1, ((0, 1), (0, 1)): 1, ((0, 0), (0, 0)): -1})
        assert m_isometry_polynomial(2, 1) == expected

    def test_m_isometry_d1_m2(self):
        expected = P(1, {((2,), (2,)): 1, ((1,), (1,)): -2, ((0,), (0,)): 1})
        assert m_isometry_polynomial(1, 2) == expected

    @pytest.mark.parametrize("d,m", [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)])
    def test_m_isometry_matches_word_expansion(self, d, m):
        rng = np.random.default_rng(d * 10 + m)
        T = commuting_tuple(rng, d, 4)
        A = rng.standard_normal((4, 4)) + 0j
        got = evaluate(m_isometry_polynomial(d, m), A, T, T)
        assert np.linalg.norm(got - word_expansion_defect(T.operators, A, m)) < 1e-12

    def test_multinomial_weights_appear(self):
        # the coefficient of x^alpha y^alpha in p_k (no constant) is k!/alpha!
        f = m_isometry_polynomial(3, 4)
        for alpha in multi_indices(3, 4):
            assert f.terms[(alpha, alpha)] == pytest.approx(multinomial(alpha))

    def test_toral_d1_m2(self):
        assert toral_polynomials(1, 2) == [(1 - x * y) ** 2]

    def test_toral_d2_m1(self):
        f1 = 1 - HP.x(2, 0) * HP.y(2, 0)
        f2 = 1 - HP.x(2, 1) * HP.y(2, 1)
        assert toral_polynomials(2, 1) == [f1, f2]

    def test_toral_d2_m2(self):
        f1 = 1 - HP.x(2, 0) * HP.y(2, 0)
        f2 = 1 - HP.x(2, 1) * HP.y(2, 1)
        assert toral_polynomials(2, 2) == [f1 ** 2, f1 * f2, f2 ** 2]

    def test_isosymmetry(self):
        assert isosymmetry_polynomial(1, 0) == x * y - 1
        assert isosymmetry_polynomial(0, 1) == x - y
        assert isosymmetry_polynomial(1, 1) == P(
            1, {((2,), (1,)): 1, ((1,), (0,)): -1, ((1,), (2,)): -1, ((0,), (1,)): 1}
        )

    def test_isosymmetry_rejects_empty(self):
        with pytest.raises(ValueError):
            isosymmetry_polynomial(0, 0)


class TestPolynomialBasics:
    def test_pruning(self):
        f = P(1, {((1,), (0,)): 1e-15, ((0,), (1,)): 1})
        assert len(f) == 1
        assert (x - x).is_zero()

    def test_terms_sorted(self):
        f = P(2, {((1, 0), (0, 0)): 1, ((0, 0), (0, 1)): 1, ((0, 1), (0, 0)): 1})
        keys = list(f.terms)
        assert keys == sorted(keys)

    def test_adjoint_is_conjugate_swap(self):
        f = P(1, {((0,), (2,)): 1 + 2j, ((0,), (0,)): 3})
        assert f.adjoint() == P(1, {((2,), (0,)): 1 - 2j, ((0,), (0,)): 3})

    def test_scalar_evaluation(self):
        f = m_isometry_polynomial(2, 2)
        lam, om = np.array([0.6, 0.8j]), np.array([0.6, 0.8j])
        assert abs(f(np.conj(lam), om)) < 1e-15
        assert f([2, 0], [1, 0]) == pytest.approx(1.0)

    def test_power_matches_repeated_product(self):
        f = x * y - 2 * x + 1j * y
        assert (f ** 3).allclose(f * f * f)
        assert f ** 0 == HP.constant(1)

    def test_bad_exponent_length(self):
        with pytest.raises(DimensionError):
            P(2, {((1,), (0, 0)): 1})


class TestTextForm:
    def test_known_rendering(self):
        assert format_polynomial(x * y - 1) == "(-1.0+0.0i) x^[0] y^[0] + (1.0+0.0i) x^[1] y^[1]"

    def test_zero(self):
        assert format_polynomial(HP(2)) == "0"
        assert parse_polynomial("0", dim=2) == HP(2)

    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3))
    def test_exact_round_trip(self, seed, d):
        f = random_poly(np.random.default_rng(seed), d, terms=5)
        assert parse_polynomial(format_polynomial(f)) == f


class TestTuplePower:
    def test_zero_index_is_identity(self):
        T = CommutingTuple([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
        assert np.array_equal(tuple_power(T, (0, 0)), np.eye(2))

    def test_nilpotent_square(self):
        T = CommutingTuple([np.array([[0, 1], [0, 0]])])
        assert np.array_equal(tuple_power(T, (2,)), np.zeros((2, 2)))

    def test_product_of_diagonals(self):
        T = CommutingTuple([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
        assert np.allclose(tuple_power(T, (1, 1)), np.diag([3, 8]))

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            tuple_power(CommutingTuple([np.eye(2)]), (1, 1))


class TestEvaluate:
    def test_isometry_identity(self):
        assert np.array_equal(evaluate(x * y - 1, np.eye(1), CommutingTuple([np.eye(1)])), np.zeros((1, 1)))

    def test_two_isometric_block(self):
        W = CommutingTuple([np.eye(2), np.array([[0, 1], [0, 0]])])
        assert np.linalg.norm(evaluate(m_isometry_polynomial(2, 2), np.eye(2), W, W)) == 0.0

    def test_weighted_isometry(self):
        T = CommutingTuple([np.diag([1.0, 5.0])])
        assert np.linalg.norm(evaluate(x * y - 1, np.diag([1.0, 0.0]), T, T)) == 0.0

    def test_dimension_errors(self):
        T = CommutingTuple([np.eye(2)])
        with pytest.raises(DimensionError):
            evaluate(m_isometry_polynomial(2, 1), np.eye(2), T, T)
        with pytest.raises(DimensionError):
            evaluate(x * y, np.eye(3), T, T)
        with pytest.raises(DimensionError):
            evaluate(x * y, np.eye(2), T, CommutingTuple([np.eye(3)]))

    def test_brute_force_definition(self):
        rng = np.random.default_rng(5)
        X, Y = commuting_tuple(rng, 2, 3), commuting_tuple(rng, 2, 3)
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        f = random_poly(rng, 2, terms=6)
        expected = sum(
            c * tuple_power(X, a).conj().T @ A @ tuple_power(Y, b) for (a, b), c in f.items()
        )
        assert np.linalg.norm(evaluate(f, A, X, Y) - expected) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3), n=st.integers(1, 6))
    def test_multiplicative_property(self, seed, d, n):
        rng = np.random.default_rng(seed)
        X, Y = commuting_tuple(rng, d, n, 1.2), commuting_tuple(rng, d, n, 1.2)
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        f = random_poly(rng, d)
        g = HP(d, {(a, (0,) * d): c for (a, _), c in random_poly(rng, d).items()})
        h = HP(d, {((0,) * d, b): c for (_, b), c in random_poly(rng, d).items()})
        assume(not g.is_zero() and not h.is_zero())
        lhs = evaluate(g * f * h, A, X, Y)
        rhs = one_sided(g, X, adjoint_side=True) @ evaluate(f, A, X, Y) @ one_sided(h, Y)
        scale = 1 + max(np.linalg.norm(t) for t in np.concatenate([X.operators, Y.operators]))
        assert np.linalg.norm(lhs - rhs) <= 1e-9 * scale

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 3), n=st.integers(1, 6))
    def test_linearity(self, seed, d, n):
        rng = np.random.default_rng(seed)
        X = commuting_tuple(rng, d, n)
        A = rng.standard_normal((n, n)) + 0j
        f, g = random_poly(rng, d), random_poly(rng, d)
        c = complex(rng.standard_normal(), rng.standard_normal())
        lhs = evaluate(c * f + g, A, X, X)
        rhs = c * evaluate(f, A, X, X) + evaluate(g, A, X, X)
        assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1 + np.linalg.norm(rhs))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 8), deg=st.integers(0, 6))
    def test_y_only_matches_horner(self, seed, n, deg):
        rng = np.random.default_rng(seed)
        T = commuting_tuple(rng, 1, n, 1.5)
        coeffs = list(rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1))
        f = HP(1, {((0,), (k,)): c for k, c in enumerate(coeffs)})
        got = evaluate(f, np.eye(n), T, T)
        assert np.linalg.norm(got - horner(coeffs, T.operators[0])) <= 1e-10 * T.scale


class TestIdealProperty:
    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_monomial_multiple_stays_small(self, seed):
        lhs, bound = ideal_residuals(ideal_instance(seed))
        assert lhs <= bound

    def test_root_stays_a_root(self):
        inst = ideal_instance(0)
        assert np.linalg.norm(evaluate(inst.f, inst.A, inst.X, inst.Y)) <= 1e-9 * inst.scale
        lhs, bound = ideal_residuals(inst)
        assert lhs <= 2e-9 * inst.scale


class TestPositivityProperty:
    @settings(max_examples=80, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_each_square_summand_is_annihilated(self, seed):
        summed, killed = positivity_residuals(positivity_instance(seed))
        assert summed <= 1e-10
        assert killed <= 1e-8

    def test_factors_are_not_trivially_zero(self):
        inst = positivity_instance(3)
        assert min(np.linalg.norm(one_sided(f, inst.Y)) for f in inst.polys) > 1e-3
