import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fconn.cychom import (
    TEST_DGAS, Bounds, FiniteDGA, OutOfBounds, add, apply_differential, basis_chain, check_ncft_diagrams,
    cochain_act, cochain_differential, constant_cochain, d_eps_cochain, dga_dual_numbers, dga_ground_field,
    eps_e_cochain, ggm_connection, growth_within, make_complexes, multiply_q, multiply_t, scale, shuffle_sh,
    u_dq, u_dt, w_cochain,
)
from fconn.errors import InvalidAlgebra

F = Fraction


def terms(chain):
    names = chain.complex.tables.names
    return {(tuple(names[i] for i in w), q, u, t): c for (w, q, u, t), c in chain.terms.items()}


@pytest.fixture(scope="module")
def dual():
    d = dga_dual_numbers()
    cxs, at = make_complexes(d)
    return d, cxs, at


def test_ground_field_differential_vanishes():
    cxs, _ = make_complexes(dga_ground_field())
    assert apply_differential(basis_chain(cxs["C(A)"], (0,))).is_zero()


def test_curvature_insertion(dual):
    _, cxs, _ = dual
    assert terms(apply_differential(basis_chain(cxs["C(A_q)"], (1,)))) == {(("x", "x"), 1, 0, 0): -1}
    assert apply_differential(basis_chain(cxs["C(A_q)"], (1, 1))).is_zero()


def test_connes_term(dual):
    _, cxs, _ = dual
    assert terms(apply_differential(basis_chain(cxs["CC(A)"], (1,)))) == {(("e", "x"), 0, 1, 0): -1}


def test_contraction_with_nilpotent(dual):
    d, cxs, _ = dual
    assert cochain_act(w_cochain(d.tables), basis_chain(cxs["CC(A_q)"], (1, 1)), "iota").is_zero()


def test_lie_derivative_single_insertion(dual):
    d, cxs, _ = dual
    w = w_cochain(d.tables)
    assert terms(cochain_act(w, basis_chain(cxs["CC(A_q)"], (1,)), "L")) == {(("x", "x"), 0, 0, 0): -1}
    assert cochain_act(w, basis_chain(cxs["CC(A_q)"], (1, 1)), "L").is_zero()


def test_big_iota_u_term(dual):
    d, cxs, _ = dual
    w = w_cochain(d.tables)
    ch = basis_chain(cxs["CC(A_q)"], (1, 1))
    diff = add(cochain_act(w, ch, "I"), cochain_act(w, ch, "iota"), -1)
    assert terms(diff) == {(("e", "x", "x", "x"), 0, 1, 0): -1}


def test_ggm_q_on_dual_numbers(dual):
    d, cxs, _ = dual
    out = ggm_connection(basis_chain(cxs["CC(A_q)"], (1,), q=1), "nabla_q", w_cochain(d.tables))
    assert terms(out) == {(("x",), 0, 1, 0): 1, (("e", "x", "x"), 1, 1, 0): -1}


def test_ggm_q_trivial_for_zero_potential():
    tb = dga_ground_field()
    cxs, _ = make_complexes(tb)
    out = ggm_connection(basis_chain(cxs["CC(A_q)"], (0,)), "nabla_q", w_cochain(tb.tables))
    assert out.is_zero()


def test_sh_on_ground_field_inserts_eps():
    cxs, at = make_complexes(dga_ground_field())
    eps = at.eps_unit
    for k in range(4):
        out = shuffle_sh(basis_chain(cxs["CQ(A_t)"], (0,), q=-k), cxs["C(A_t)"], at)
        assert out.terms == {((0,) + (eps,) * k, 0, 0, 0): F((-1) ** k)}


def test_sh_without_q_is_inclusion(dual):
    _, cxs, at = dual
    ch = basis_chain(cxs["CQ(A_t)"], (1, 1), t=1)
    assert shuffle_sh(ch, cxs["C(A_t)"], at).terms == ch.terms


def test_out_of_bounds_is_reported(dual):
    _, cxs, _ = dual
    ch = basis_chain(cxs["C(A_q)"], (1, 1, 1, 1, 1), bounds=Bounds(L=4))
    with pytest.raises(OutOfBounds):
        apply_differential(ch)


def test_invalid_algebra_rejected():
    with pytest.raises(InvalidAlgebra):
        # W = a does not commute with b
        FiniteDGA(["e", "a", "b"], [0, 0, 0], 0,
                  {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1}, (1, 2): {2: 1}},
                  {}, {1: 1})


def test_dga_json_round_trip():
    for mk in TEST_DGAS.values():
        d = mk()
        again = FiniteDGA.from_json(d.to_json())
        assert again.to_json() == d.to_json()


@pytest.mark.parametrize("name", sorted(TEST_DGAS))
def test_all_identities_hold(name):
    rep = check_ncft_diagrams(TEST_DGAS[name](), Bounds(4, 3, 3, 3))
    assert rep.passed, rep.failures()
    assert all(r.checked > 0 for r in rep.results)


def _random_chain(rng, cx, bounds, max_len=2, qs=(0,), ts=(0,)):
    tb = cx.tables
    out = {}
    for _ in range(3):
        word = (rng.randrange(tb.dim),) + tuple(rng.choice([i for i in range(tb.dim) if i != tb.unit] or [0])
                                                for _ in range(rng.randint(0, max_len)))
        if tb.dim == 1:
            word = word[:1]
        out[(word, rng.choice(qs), rng.randint(0, 1), rng.choice(ts))] = F(rng.randint(1, 3))
    from fconn.cychom import TruncatedChain
    return TruncatedChain(cx, out, bounds)


@given(st.integers(0, 10 ** 6), st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=50)
def test_cartan_for_random_central_cocycles(seed, a, b):
    rng = random.Random(seed)
    d = dga_dual_numbers()
    cxs, _ = make_complexes(d)
    phi = constant_cochain("phi", {(0, 0): a, (1, 0): b})
    ch = _random_chain(rng, cxs["q^-1 CC(A_q)"], Bounds(6, 3, 3, 3), qs=(-1, -2))
    dphi = cochain_differential(d.tables, phi)
    lhs = add(apply_differential(cochain_act(phi, ch, "I")), cochain_act(phi, apply_differential(ch), "I"), -1)
    lhs = add(lhs, cochain_act(dphi, ch, "I"), -1)
    rhs = cochain_act(phi, ch, "L")
    rhs_u = {(w, q, u + 1, t): c for (w, q, u, t), c in rhs.terms.items()}
    assert lhs.terms == rhs_u


@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(TEST_DGAS)))
@settings(max_examples=40)
def test_recorded_growth_bounds(seed, name):
    rng = random.Random(seed)
    cxs, at = make_complexes(TEST_DGAS[name]())
    b = Bounds(8, 6, 6, 6)
    ch = _random_chain(rng, cxs["CC(A_t)"], b, ts=(0, 1))
    chq = _random_chain(rng, cxs["CC(A_q)"], b, qs=(1, 2))
    w, deps = w_cochain(at.tables), d_eps_cochain(at)
    assert growth_within("d", ch, apply_differential(ch))
    assert growth_within("d", chq, apply_differential(chq))
    for phi in (w, deps, eps_e_cochain(at)):
        assert growth_within("iota", ch, cochain_act(phi, ch, "iota"))
        assert growth_within("L", ch, cochain_act(phi, ch, "L"))
        assert growth_within("I", ch, cochain_act(phi, ch, "I"))
    assert growth_within("q", chq, multiply_q(chq))
    assert growth_within("t", ch, multiply_t(ch))
    assert growth_within("u_dq", chq, u_dq(chq))
    assert growth_within("u_dt", ch, u_dt(ch))


def test_scale_and_add_cancel(dual):
    _, cxs, _ = dual
    ch = basis_chain(cxs["C(A)"], (1, 1))
    assert add(ch, scale(ch, 2), 1).terms == scale(ch, 3).terms
    assert add(ch, ch, -1).is_zero()
