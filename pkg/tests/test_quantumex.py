import json
from fractions import Fraction

import pytest

from fconn.exactalg import RatFunc
from fconn.quantumex import EXAMPLE_IDS, analyze_example, build_example

F = Fraction


def _blocks(rep):
    return {b.lam: (b.multiplicity, tuple(sorted(b.exponents))) for b in rep.exp_type.blocks}


def test_p1_pipeline():
    rep = analyze_example("p1")
    assert _blocks(rep) == {F(-2): (1, (F(1, 2),)), F(2): (1, (F(1, 2),))}
    assert rep.newton["q"].slope_set() == [0] and rep.newton["Q"].slope_set() == [1]
    assert rep.duality["passed"] and rep.jordan_bound["holds"]


def test_cubic_pipeline():
    rep = analyze_example("cubic_surface_block")
    assert _blocks(rep) == {F(-6): (2, (F(1, 3), F(2, 3))), F(21): (1, (F(0),))}
    assert rep.duality["passed"]
    assert rep.jordan_bound["holds"] and rep.max_jordan_block <= 3


def test_cubic_h2_summand():
    rep = analyze_example("cubic_surface_h2")
    assert _blocks(rep) == {F(-6): (6, (F(0),) * 6)}


@pytest.mark.parametrize("eid,slopes,unram", [("kkp_slope_half", [F(1, 2)], False), ("kkp_slope_one", [1], True)])
def test_kkp_pipeline(eid, slopes, unram):
    rep = analyze_example(eid)
    np_ = rep.newton["q"]
    assert np_.slope_set() == slopes and np_.unramified_necessary is unram
    assert "split_exponential_type" in rep.errors


def test_kkp_half_matrix():
    m = build_example("kkp_slope_half").connection.matrix
    q = RatFunc.gen("q")
    assert m[0, 0].is_zero() and m[0, 1] == -1 / (q * q)
    assert m[1, 0] == -1 / q and m[1, 1] == F(-1, 2) / q


@pytest.mark.parametrize("eid", EXAMPLE_IDS)
def test_reports_are_deterministic(eid):
    a = json.dumps(analyze_example(eid).to_json())
    b = json.dumps(analyze_example(eid).to_json())
    assert a == b


def test_unknown_example():
    with pytest.raises(ValueError):
        build_example("nope")
