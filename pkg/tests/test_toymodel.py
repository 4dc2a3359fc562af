import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fconn.exactalg import Matrix, RatFunc
from fconn.quantumex import PipelineOptions, analyze_pipeline
from fconn.toymodel import (
    TOY_INPUTS, HquElement, ToyInput, commutator_defect, cup_with_divisor_matrix, empty_divisor, hqu_connection,
    hqu_q_action, projective_line_point, projective_plane_line, q_power_into_m, toy_dmodule_check,
    toy_q_inverted_connection,
)

F = Fraction
P1 = projective_line_point()
P2 = projective_plane_line()


def test_q_action_examples():
    # H*(P^1) basis: 0 -> 1, 1 -> h
    assert hqu_q_action(P1, HquElement.d_class(0, 1)) == HquElement.m_class(1)
    assert hqu_q_action(P1, HquElement.d_class(0, 2)) == HquElement.d_class(0, 1, k=1, c=-1)
    assert hqu_q_action(P1, HquElement.m_class(0, 3)) == HquElement.m_class(0, 4)


def test_connection_examples():
    assert hqu_connection(P1, HquElement.m_class(0)) == HquElement.d_class(0, 1)
    # nabla(q mu) = u mu + iota_* iota^* mu
    assert hqu_connection(P1, HquElement.m_class(0, 1)) == HquElement.m_class(0, 0, 1) + HquElement.m_class(1)
    assert hqu_connection(P1, HquElement.m_class(1, 1)) == HquElement.m_class(1, 0, 1)
    assert hqu_connection(P1, HquElement.d_class(0, 1)) == HquElement.d_class(0, 2)


def test_p2_line_composites():
    # iota^* iota_* on H*(P^1) sends 1 to the point class
    assert hqu_q_action(P2, HquElement.d_class(0, 2)) == HquElement.d_class(1, 1) - HquElement.d_class(0, 1, k=1)
    assert cup_with_divisor_matrix(P2) == [[0, 0, 0], [1, 0, 0], [0, 1, 0]]


@pytest.mark.parametrize("inp", [P1, P2], ids=["p1_point", "p2_line"])
def test_dmodule_relations(inp):
    rep = toy_dmodule_check(inp, 0)
    assert rep.passed and all(r["checked"] for r in rep.relations[:2])


def test_empty_divisor_degenerates():
    rep = toy_dmodule_check(empty_divisor(), 0)
    assert rep.passed and rep.basis_size["t_generators"] == 0
    assert hqu_connection(empty_divisor(), HquElement.m_class(0)).is_zero()


def test_q_inverted_connection_p1():
    conn = toy_q_inverted_connection(P1)
    q = RatFunc.gen("q")
    assert conn.matrix == Matrix([[RatFunc.const(0, "q"), RatFunc.const(0, "q")], [1 / q, RatFunc.const(0, "q")]])


@pytest.mark.parametrize("inp", [P1, P2], ids=["p1_point", "p2_line"])
def test_q_inverted_monodromy(inp):
    rep = analyze_pipeline(toy_q_inverted_connection(inp), PipelineOptions(dim=inp.complex_dimension))
    assert [(lam, set(exps)) for lam, exps in rep.monodromy] == [(0, {0})]
    assert rep.max_jordan_block == inp.complex_dimension + 1 and rep.jordan_bound["holds"]
    assert rep.newton["q"].slope_set() == [0]


def test_empty_divisor_trivial_connection():
    conn = toy_q_inverted_connection(empty_divisor())
    assert all(f.is_zero() for f in conn.matrix.entries())


def test_input_validation():
    with pytest.raises(ValueError):
        ToyInput({0: 1}, {0: 1}, {0: [[1, 2]]}, {}, 1)
    with pytest.raises(ValueError):
        HquElement({("D", 0, 0, 0): 1})


def test_toy_json_round_trip():
    for mk in TOY_INPUTS.values():
        inp = mk()
        assert ToyInput.from_json(inp.to_json()) == inp


def _random_element(rng, inp):
    terms = {}
    for _ in range(4):
        if inp.d_rank and rng.random() < 0.5:
            terms[("D", rng.randint(1, 4), rng.randint(0, 2), rng.randrange(inp.d_rank))] = rng.randint(-3, 3)
        else:
            terms[("M", rng.randint(0, 4), rng.randint(0, 2), rng.randrange(inp.m_rank))] = rng.randint(-3, 3)
    return HquElement(terms)


@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(TOY_INPUTS)))
@settings(max_examples=100)
def test_weyl_relation(seed, name):
    rng = random.Random(seed)
    inp = TOY_INPUTS[name]()
    assert commutator_defect(inp, _random_element(rng, inp)).is_zero()


@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(TOY_INPUTS)))
@settings(max_examples=50)
def test_high_q_power_reaches_m_part(seed, name):
    rng = random.Random(seed)
    inp = TOY_INPUTS[name]()
    elem = _random_element(rng, inp)
    n, image = q_power_into_m(inp, elem)
    assert n <= elem.max_d_exponent()
    assert all(p == "M" for p, _, _, _ in image.terms)
