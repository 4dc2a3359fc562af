from fractions import Fraction

from hypothesis import given, strategies as st

from fconn.exactalg import (
    Matrix, Poly, RatFunc, charpoly, factor_over_rationals, jordan_data_rational, matrix_power, rank,
)

small = st.integers(-4, 4)


def test_laurent_of_simple_rational_function():
    q = RatFunc.gen("q")
    s = (1 / (q * (q - 1))).laurent(0, 2)
    assert s.valuation == -1
    assert [s.coefficient(k) for k in (-1, 0, 1)] == [-1, -1, -1]
    assert s.order == 2


def test_laurent_of_polynomial():
    s = RatFunc.gen("q").laurent(0, 3)
    assert s.valuation == 1 and s.coefficient(1) == 1 and s.coefficient(2) == 0 and s.order == 3


def test_laurent_at_nonzero_center():
    t = RatFunc.gen("t")
    s = (2 / (t * t - 4)).laurent(2, 1)
    assert s.valuation == -1
    assert s.coefficient(-1) == Fraction(1, 2)
    assert s.coefficient(0) == Fraction(-1, 8)


def test_factor_difference_of_squares():
    out = factor_over_rationals(Poly([-4, 0, 1]))
    assert sorted((tuple(f.coeffs), m) for f, m in out) == [((-2, 1), 1), ((2, 1), 1)]


def test_factor_cubic_surface_charpoly():
    p = charpoly(Matrix.rational([[0, 108, 252], [1, 9, 36], [0, 3, 0]]))
    out = {tuple(f.coeffs): m for f, m in factor_over_rationals(p)}
    assert out == {(6, 1): 2, (-21, 1): 1}


def test_factor_irreducible_quadratic():
    out = factor_over_rationals(Poly([1, 0, 1]))
    assert [(tuple(f.coeffs), m) for f, m in out] == [((1, 0, 1), 1)]


def test_jordan_examples():
    jd = jordan_data_rational(Matrix.rational([[0, 1], [0, 0]]))
    assert jd.sizes(0) == (2,)
    jd = jordan_data_rational(Matrix.identity(3))
    assert sorted(jd.sizes(1)) == [1, 1, 1]
    jd = jordan_data_rational(Matrix.rational([[Fraction(5, 3), Fraction(-40, 729)], [0, Fraction(1, 3)]]))
    assert jd.sizes(Fraction(5, 3)) == (1,) and jd.sizes(Fraction(1, 3)) == (1,)


@given(st.lists(small, min_size=1, max_size=5), st.integers(0, 2), small)
def test_factorization_remultiplies(coeffs, extra, root):
    p = Poly(coeffs + [1]) * Poly([-root, 1]) ** extra
    prod = Poly([1])
    for f, m in factor_over_rationals(p):
        prod = prod * f ** m
    assert prod == p.monic()


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_jordan_data_consistent_with_ranks(rows):
    m = Matrix.rational(rows)
    jd = jordan_data_rational(m)
    assert jd.dimension() == 3
    for lam in jd.eigenvalues():
        shifted = m - Matrix.identity(3) * lam
        for k in range(1, 4):
            assert jd.rank_of_power(lam, k) == rank(matrix_power(shifted, k))


@given(st.lists(small, min_size=1, max_size=4), st.lists(small, min_size=1, max_size=3),
       st.integers(-2, 2), st.integers(1, 6))
def test_expansion_back_multiplies(num, den, center, order):
    x = RatFunc.gen("x")
    n, d = Poly(num), Poly(den + [1])
    if d(Fraction(center)) == 0 and n.is_zero():
        return
    f = RatFunc(n, d)
    if f.is_zero():
        return
    s = f.laurent(center, order)
    xs = (x - center) if center else x
    back = RatFunc(f.num) - RatFunc(f.den) * _as_ratfunc(s, xs)
    assert back.is_zero() or back.valuation_at(center) >= s.order


def _as_ratfunc(s, xs):
    total = RatFunc.const(0, "x")
    for k, c in s.terms():
        total = total + (xs ** k) * c
    return total
