import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fconn.errors import NotQuadraticPole, OddDegree
from fconn.exactalg import Matrix, RatFunc, charpoly, series_coefficient_matrix
from fconn.formalconn import (
    GaugeSeries, GradingVector, RationalConnection, apply_gauge, block_diagonal_to_order, change_chart,
    dualize, grading_gauge, regularized_monodromy_eigenvalues, split_blocks, split_exponential_type,
)

from helpers import cubic, mono, p1_q_chart, p1_split_chart, random_gauge

F = Fraction


def test_identity_gauge_is_trivial():
    conn = cubic()
    g = GaugeSeries.identity(3, 8, "Q")
    out = apply_gauge(conn, g, 6)
    assert out == conn.expand(6)


def test_log_gauge_of_zero_connection():
    from fconn.exactalg import TruncSeries
    z = TruncSeries.zero(6, "q")
    g = GaugeSeries(Matrix([[TruncSeries([1], 1, 6, "q"), z], [z, TruncSeries([1], 0, 6, "q")]]))
    out = apply_gauge(RationalConnection.zero("q", 2), g, 4)
    assert out[0, 0].valuation == -1 and out[0, 0].coefficient(-1) == 1
    assert out[0, 1].is_zero() and out[1, 0].is_zero() and out[1, 1].is_zero()


def test_change_chart_p1():
    out = change_chart(p1_q_chart(), "Q")
    assert out.matrix == Matrix([[RatFunc.const(0, "Q"), mono(-2, -3, "Q")], [mono(-2, -1, "Q"), 0]])
    assert change_chart(out, "q") == p1_q_chart()


def test_change_chart_zero():
    assert change_chart(RationalConnection.zero("q", 2), "Q") == RationalConnection.zero("Q", 2)


def test_change_chart_of_local_model_t_side():
    t = RatFunc.gen("t")
    sig = F(3)
    conn = RationalConnection("t", Matrix([[1 / (t - sig)]]))
    s = RatFunc.gen("s")
    assert change_chart(conn, "s").matrix[0, 0] == -(1 / s) / (1 - sig * s)


def test_grading_gauge_p1():
    out = change_chart(grading_gauge(p1_q_chart(), GradingVector((0, 2))), "Q")
    expected = [[0, mono(-2, -2, "Q")], [mono(-2, -2, "Q"), mono(1, -1, "Q")]]
    assert out.matrix == Matrix(expected).map(lambda x: x if isinstance(x, RatFunc) else RatFunc.const(x, "Q"))


def test_grading_gauge_trivial_and_diagonal():
    conn = cubic()
    assert grading_gauge(conn, GradingVector((0, 0, 0))) == conn
    diag = RationalConnection.from_rows("q", [[mono(3, -2, "q"), 0], [0, mono(5, 0, "q")]])
    out = grading_gauge(diag, GradingVector((2, 2)))
    assert out.matrix[0, 0] == mono(3, -2, "q") - mono(1, -1, "q")
    assert out.matrix[1, 1] == mono(5, 0, "q") - mono(1, -1, "q")


def test_odd_grading_rejected():
    with pytest.raises(OddDegree):
        GradingVector((0, 1))


def test_split_p1():
    rep, _ = split_exponential_type(p1_split_chart(), 10)
    assert sorted(lam for lam, _ in rep.lambdas) == [-2, 2]
    for b in rep.blocks:
        assert list(b.exponents) == [F(1, 2)]
    per, _ = regularized_monodromy_eigenvalues(rep)
    assert all(exps == (F(1, 2),) for _, exps in per)


def test_split_cubic():
    rep, _ = split_exponential_type(cubic(), 10)
    per = dict(regularized_monodromy_eigenvalues(rep)[0])
    assert per == {F(-6): (F(1, 3), F(2, 3)), F(21): (F(0),)}
    polys = {b.lam: tuple(b.residue_charpoly.coeffs) for b in rep.blocks}
    assert polys[F(-6)] == (F(5, 9), F(-2), F(1))
    assert polys[F(21)] == (F(-1), F(1))


def test_split_already_normal():
    c = Matrix.rational([[1, 2], [0, 3]])
    rows = [[mono(-5 if i == j else 0, -2, "q") + mono(c[i, j], -1, "q") for j in range(2)] for i in range(2)]
    rep, g = split_exponential_type(RationalConnection.from_rows("q", rows), 8)
    assert rep.lambdas == [(F(5), 2)]  # eigenvalues of -A_{-2}
    assert rep.blocks[0].residue == c
    assert series_coefficient_matrix(g.matrix, 0) == Matrix.identity(2)


def test_nilpotent_residue_gives_unipotent_monodromy():
    conn = RationalConnection.from_rows("q", [[0, 0], [mono(1, -1, "q"), 0]])
    rep, _ = split_exponential_type(conn, 6)
    per, biggest = regularized_monodromy_eigenvalues(rep)
    assert per == [(F(0), (F(0), F(0)))] and biggest == 2


def test_cubic_pole_rejected():
    conn = RationalConnection.from_rows("q", [[mono(1, -3, "q")]])
    with pytest.raises(NotQuadraticPole):
        split_exponential_type(conn)


def test_dualize_examples():
    d = dualize(p1_q_chart())
    assert d.matrix == Matrix([[RatFunc.const(0, "q"), mono(-2, -1, "q")], [mono(-2, 1, "q"), 0]])
    assert dualize(d) == p1_q_chart()


@pytest.mark.parametrize("conn", [p1_split_chart(), cubic()], ids=["p1", "cubic"])
def test_dual_spectra(conn):
    rep, _ = split_exponential_type(conn, 8)
    drep, _ = split_exponential_type(dualize(conn), 8)
    expected = sorted((-b.lam, tuple(sorted((-a) % 1 for a in b.exponents))) for b in rep.blocks)
    assert sorted((b.lam, tuple(sorted(b.exponents))) for b in drep.blocks) == expected


@pytest.mark.parametrize("conn", [p1_split_chart(), cubic()], ids=["p1", "cubic"])
def test_split_gauge_block_diagonalizes(conn):
    rep, g = split_exponential_type(conn, 8)
    out = apply_gauge(conn, g, 6)
    assert block_diagonal_to_order(out, split_blocks(rep))


@pytest.mark.parametrize("conn", [p1_split_chart(), cubic()], ids=["p1", "cubic"])
def test_residue_block_formula(conn):
    rep, g = split_exponential_type(conn, 8)
    res = series_coefficient_matrix(apply_gauge(conn, g, 6), -1)
    for b, idx in zip(rep.blocks, split_blocks(rep)):
        block = res.submatrix(idx, idx)
        assert charpoly(block).coeffs == b.split_residue_charpoly.coeffs


@given(st.integers(0, 10 ** 6))
def test_gauge_invariance(seed):
    rng = random.Random(seed)
    for conn in (p1_split_chart(), cubic()):
        base, _ = split_exponential_type(conn, 8)
        moved = apply_gauge(conn, random_gauge(rng, conn.rank, conn.var), 8)
        rep, _ = split_exponential_type(moved, 6)
        assert rep.invariants() == base.invariants()


@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2),
       st.integers(-2, 1))
def test_chart_and_dual_involutions(rows, k):
    conn = RationalConnection.from_rows("q", [[mono(c, k, "q") for c in r] for r in rows])
    assert change_chart(change_chart(conn, "Q"), "q") == conn
    assert dualize(dualize(conn)) == conn
