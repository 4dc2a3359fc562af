"""Acceptance suite: one PASS/FAIL line per criterion, with wall-clock limits.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import cubic, mono, p1_split_chart, random_gauge, random_models  # noqa: E402

from fconn.cychom import TEST_DGAS, Bounds, check_ncft_diagrams  # noqa: E402
from fconn.exactalg import RatFunc  # noqa: E402
from fconn.formalconn import (  # noqa: E402
    apply_gauge, change_chart, dualize, regularized_monodromy_eigenvalues, split_exponential_type,
)
from fconn.gaussmanin import LaurentPoly, singularity_report  # noqa: E402
from fconn.newton import cyclic_operator, newton_polygon, resubstitution_residual  # noqa: E402
from fconn.quantumex import analyze_example, build_example  # noqa: E402
from fconn.toymodel import (  # noqa: E402
    HquElement, commutator_defect, hqu_connection, hqu_q_action, projective_line_point, projective_plane_line,
    toy_dmodule_check, toy_q_inverted_connection,
)

F = Fraction
RESULTS = {}


def _blocks(rep):
    return sorted((b.lam, b.multiplicity, tuple(sorted(b.exponents))) for b in rep.blocks)


def c1():
    rep = analyze_example("p1")
    ok = _blocks(rep.exp_type) == [(F(-2), 1, (F(1, 2),)), (F(2), 1, (F(1, 2),))]
    eig = {e for b in rep.exp_type.blocks for e in b.to_json()["monodromy_eigenvalues"]}
    return ok and eig == {"-1"}, "lambda {-2, 2}, exponents 1/2 and 1/2, monodromy -1"


def c2():
    rep = analyze_example("cubic_surface_block")
    ok = _blocks(rep.exp_type) == [(F(-6), 2, (F(1, 3), F(2, 3))), (F(21), 1, (F(0),))]
    polys = {b.lam: tuple(b.residue_charpoly.coeffs) for b in rep.exp_type.blocks}
    ok = ok and polys == {F(-6): (F(5, 9), F(-2), F(1)), F(21): (F(-1), F(1))}
    return ok, "lambda {-6 (x2), 21}, residue polys (x-5/3)(x-1/3) and (x-1), exponents {1/3, 2/3} and {0}"


def c3():
    half = newton_polygon(cyclic_operator(build_example("kkp_slope_half").connection)[1])
    one = newton_polygon(cyclic_operator(build_example("kkp_slope_one").connection)[1])
    ok = (set(half.slope_multiset()) == {F(1, 2)} and not half.unramified_necessary
          and set(one.slope_multiset()) == {1} and one.unramified_necessary)
    return ok, "slopes {1/2} (not unramified) and {1} (unramified possible)"


def c4():
    conn = build_example("p1").connection
    ok = True
    expected = {"q": (mono(-4, 0, "q"), mono(1, -1, "q"), RatFunc.const(1, "q")),
                "Q": (mono(-4, -4, "Q"), mono(1, -1, "Q"), RatFunc.const(1, "Q"))}
    slopes = {}
    for chart in ("q", "Q"):
        c = conn if chart == "q" else change_chart(conn, "Q")
        v, op = cyclic_operator(c)
        ok = ok and op.coefficients == expected[chart] and resubstitution_residual(c, v, op)
        slopes[chart] = newton_polygon(op).slope_set()
    ok = ok and slopes == {"q": [0], "Q": [1]}
    return ok, "operators re-substitute exactly; slopes {0} at q = 0 and {1} at q = infinity"


def c5():
    rep = singularity_report(LaurentPoly.from_dict({1: 1, -1: 1}))
    ok = sorted(s.point for s in rep.singularities) == [-2, 2]
    ok = ok and all(s.pole_order == 1 and sorted(s.monodromy_eigenvalues(), key=str) == ["-1", "1"]
                    for s in rep.singularities)
    quantum = {e for b in analyze_example("p1").exp_type.blocks for e in b.to_json()["monodromy_eigenvalues"]}
    mirror = {e for s in rep.singularities for e in s.monodromy_eigenvalues()} - {"1"}
    return ok and mirror == quantum == {"-1"}, "critical values {-2, 2}, simple poles, eigenvalues {1, -1}"


def c6():
    results = random_models(50, 0)
    ok = all(r["nonzero_match"] and r["zero_defect"] <= 1 for _, r in results)
    rational = [r["exponents"] for _, r in results if r["exponents"] is not None]
    ok = ok and bool(rational) and all(e["Q_matches_UV"] and e["t_matches_VU"] for e in rational)
    return ok, f"50 models, {len(rational)} with rational spectrum"


def c7():
    rng = random.Random(2024)
    ok = True
    for conn in (p1_split_chart(), cubic()):
        base = split_exponential_type(conn, 8)[0].invariants()
        for _ in range(100):
            moved = apply_gauge(conn, random_gauge(rng, conn.rank, conn.var), 8)
            ok = ok and split_exponential_type(moved, 6)[0].invariants() == base
    return ok, "100 random gauges on each input"


def c8():
    ok = True
    for conn in (p1_split_chart(), cubic()):
        rep = split_exponential_type(conn, 8)[0]
        dual = split_exponential_type(dualize(conn), 8)[0]
        expected = sorted((-lam, m, tuple(sorted((-a) % 1 for a in exps))) for lam, m, exps in _blocks(rep))
        ok = ok and _blocks(dual) == expected
    cub = {tuple(sorted(b.exponents)) for b in split_exponential_type(cubic(), 8)[0].blocks if b.lam == -6}
    closed = all(tuple(sorted((-a) % 1 for a in e)) == e for e in cub)
    return ok and closed, "dual data are mod-1 negations under lambda -> -lambda"


NEEDED = ("d^2 = 0", "sh is a chain map", "SH is a chain map", "sh q = -iota", "Cartan formula for W",
          "Cartan formula for d_eps", "SH q = -nabla", "SH nabla")


def c9():
    ok, checked = True, 0
    for name in ("ground_field", "dual_numbers", "upper_triangular"):
        rep = check_ncft_diagrams(TEST_DGAS[name](), Bounds(4, 3, 3, 3))
        ok = ok and rep.passed and all(any(r.name.startswith(n) and r.checked for r in rep.results) for n in NEEDED)
        if name == "ground_field":
            ok = ok and any(r.name.startswith("sh is a bijection") and r.passed for r in rep.results)
        checked += sum(r.checked for r in rep.results)
    return ok, f"{checked} basis checks, no failures"


def c10():
    ok = True
    rng = random.Random(7)
    p1 = projective_line_point()
    ok = ok and hqu_q_action(p1, HquElement.d_class(0, 1)) == HquElement.m_class(1)
    ok = ok and hqu_q_action(p1, HquElement.d_class(0, 2)) == HquElement.d_class(0, 1, k=1, c=-1)
    ok = ok and hqu_connection(p1, HquElement.m_class(0)) == HquElement.d_class(0, 1)
    for inp in (p1, projective_plane_line()):
        for _ in range(50):
            terms = {("M", rng.randint(0, 3), rng.randint(0, 2), rng.randrange(inp.m_rank)): rng.randint(-3, 3),
                     ("D", rng.randint(1, 3), rng.randint(0, 2), rng.randrange(inp.d_rank)): rng.randint(-3, 3)}
            ok = ok and commutator_defect(inp, HquElement(terms)).is_zero()
        ok = ok and toy_dmodule_check(inp, 0).passed
        rep = split_exponential_type(toy_q_inverted_connection(inp), 6)[0]
        ok = ok and all(set(b.exponents) == {0} for b in rep.blocks)
        ok = ok and regularized_monodromy_eigenvalues(rep)[1] <= inp.complex_dimension + 1
    return ok, "[nabla, q] = u, both relations, unipotent monodromy within the block bound"


CRITERIA = {
    1: (c1, 1.0, "P1 quantum connection"),
    2: (c2, 1.0, "cubic surface block"),
    3: (c3, None, "slope examples"),
    4: (c4, None, "P1 two-chart Newton polygons"),
    5: (c5, 1.0, "mirror of P1"),
    6: (c6, 10.0, "Fourier-Laplace local models"),
    7: (c7, 30.0, "gauge invariance"),
    8: (c8, None, "duality"),
    9: (c9, 60.0, "cyclic homology identities"),
    10: (c10, 5.0, "toy model"),
}


def evaluate(n):
    fn, limit, title = CRITERIA[n]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported with its type
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        ok, detail = False, f"{detail}; took {elapsed:.2f}s > {limit}s"
    line = f"{'PASS' if ok else 'FAIL'} criterion {n} ({title}): {detail} [{elapsed:.2f}s]"
    RESULTS[n] = line
    return ok, line


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, line = evaluate(n)
    print(line)
    assert ok, line


if __name__ == "__main__":
    bad = 0
    for n in sorted(CRITERIA):
        ok, line = evaluate(n)
        print(line)
        bad += not ok
    sys.exit(1 if bad else 0)
