"""Shared builders for the test suite."""

import random
from fractions import Fraction

from fconn.exactalg import Matrix, RatFunc, TruncSeries
from fconn.formalconn import GaugeSeries, change_chart, grading_gauge
from fconn.quantumex import build_example


def p1_q_chart():
    return build_example("p1").connection


def p1_split_chart():
    ex = build_example("p1")
    return change_chart(grading_gauge(ex.connection, ex.grading), "Q")


def cubic():
    return build_example("cubic_surface_block").connection


def random_gauge(rng, n, var, order=8, lo=-2, hi=2):
    """I + x Mat(Z[[x]]) with small integer coefficients, truncated at x^order."""
    rows = [[TruncSeries(([1] if i == j else [0]) + [rng.randint(lo, hi) for _ in range(order - 1)], 0, order, var)
             for j in range(n)] for i in range(n)]
    return GaugeSeries(Matrix(rows))


def random_invertible(rng, n, lo=-3, hi=3):
    from fconn.exactalg import det
    while True:
        m = Matrix.rational([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if det(m) != 0:
            return m


def mono(c, k, var):
    return RatFunc.monomial(k, Fraction(c), var)


def seeded(seed):
    return random.Random(seed)


def random_models(count, seed):
    from fconn.weylfl import compare_local_model, random_local_model
    rng = random.Random(seed)
    return [(m, compare_local_model(m)) for m in (random_local_model(rng) for _ in range(count))]
