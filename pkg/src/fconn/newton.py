"""Scalar differential operators, cyclic vectors and Newton polygons."""

import random
from dataclasses import dataclass
from fractions import Fraction

from .exactalg import (
    Matrix,
    RatFunc,
    det,
    frac_str,
    ratfunc_from_json,
    ratfunc_to_json,
    solve,
)
from .formalconn import RationalConnection


@dataclass(frozen=True)
class ScalarOperator:
    """d^r + a_{r-1} d^{r-1} + ... + a_0; ``coefficients`` lists a_0..a_r with a_r = 1."""

    var: str
    coefficients: tuple

    def __post_init__(self):
        cs = tuple(c if isinstance(c, RatFunc) else RatFunc.const(c, self.var) for c in self.coefficients)
        if len(cs) < 2:
            raise ValueError("operator order must be at least one")
        if cs[-1] != 1:
            raise ValueError("leading coefficient must be 1")
        object.__setattr__(self, "coefficients", cs)

    @property
    def order(self):
        return len(self.coefficients) - 1

    def apply(self, f):
        """Apply the operator to a rational function."""
        total = RatFunc.const(0, self.var)
        d = f
        for a in self.coefficients:
            total = total + a * d
            d = d.derivative()
        return total

    def to_json(self):
        return {"var": self.var, "coeffs": [ratfunc_to_json(a) for a in self.coefficients[:-1]]}

    @classmethod
    def from_json(cls, data):
        var = data.get("var", "q")
        return cls(var, tuple(ratfunc_from_json(a, var) for a in data["coeffs"]) + (RatFunc.const(1, var),))

    def __str__(self):
        parts = []
        for i in range(self.order, -1, -1):
            a = self.coefficients[i]
            if a.is_zero():
                continue
            d = "" if i == 0 else ("d" if i == 1 else f"d^{i}")
            if i == self.order:
                parts.append(d)
            elif d:
                parts.append(f"({a})*{d}")
            else:
                parts.append(f"({a})")
        return " + ".join(parts)


def _nabla(conn, v):
    """nabla applied to a column vector (list of RatFunc)."""
    a = conn.matrix
    return [v[i].derivative() + sum((a[i, j] * v[j] for j in range(conn.rank)), RatFunc.const(0, conn.var))
            for i in range(conn.rank)]


def _candidates(conn):
    n, var = conn.rank, conn.var
    x = RatFunc.gen(var)
    for k in range(1, n + 1):
        yield [x ** i if i < k else RatFunc.const(0, var) for i in range(n)]
    rng = random.Random(0)
    while True:
        yield [RatFunc(_rand_poly(rng, var), var=var) for _ in range(n)]


def _rand_poly(rng, var):
    from .exactalg import Poly
    return Poly([rng.randint(-3, 3) for _ in range(3)], var)


def cyclic_operator(conn, max_tries=200):
    """Cyclic vector v and the monic operator P with sum a_i nabla^i v = 0.

    Candidates are e1, e1 + x e2, e1 + x e2 + x^2 e3, ... followed by seeded
    pseudo-random polynomial vectors.
    """
    n, var = conn.rank, conn.var
    for tries, v in enumerate(_candidates(conn)):
        if tries >= max_tries:
            raise RuntimeError("no cyclic vector found")
        derivs = [v]
        for _ in range(n):
            derivs.append(_nabla(conn, derivs[-1]))
        basis = Matrix([[derivs[j][i] for j in range(n)] for i in range(n)])
        if det(basis).is_zero():
            continue
        rhs = Matrix([[-derivs[n][i]] for i in range(n)])
        sol = solve(basis, rhs)
        coeffs = tuple(sol[i, 0] for i in range(n)) + (RatFunc.const(1, var),)
        op = ScalarOperator(var, coeffs)
        if not resubstitution_residual(conn, v, op):
            raise ArithmeticError("cyclic operator failed re-substitution")
        return v, op


def resubstitution_residual(conn, v, op):
    """True when sum a_i nabla^i v vanishes identically."""
    acc = [RatFunc.const(0, conn.var)] * conn.rank
    d = v
    for a in op.coefficients:
        acc = [s + a * x for s, x in zip(acc, d)]
        d = _nabla(conn, d)
    return all(s.is_zero() for s in acc)


@dataclass(frozen=True)
class NewtonPolygon:
    points: tuple
    vertices: tuple
    slopes: tuple  # (slope, horizontal length)
    fuchs_regular: bool
    unramified_necessary: bool

    def slope_multiset(self):
        out = []
        for s, length in self.slopes:
            out += [s] * length
        return out

    def slope_set(self):
        return sorted({s for s, _ in self.slopes})

    def to_json(self):
        return {
            "points": [[i, frac_str(y)] for i, y in self.points],
            "vertices": [[frac_str(x), frac_str(y)] for x, y in self.vertices],
            "slopes": [{"slope": frac_str(s), "length": length} for s, length in self.slopes],
            "fuchs_regular": self.fuchs_regular,
            "unramified_necessary": self.unramified_necessary,
        }


def newton_polygon(op, center=0):
    """Newton polygon at ``center`` from the points (i, val(a_i) - i)."""
    pts = []
    for i, a in enumerate(op.coefficients):
        if not a.is_zero():
            pts.append((i, Fraction(a.valuation_at(center) - i)))
    ymin = min(y for _, y in pts)
    xstart = max(x for x, y in pts if y == ymin)
    vertices = [(0, ymin)] if xstart > 0 else []
    vertices.append((xstart, ymin))
    # lower convex hull of the points to the right of xstart
    cur = (xstart, ymin)
    right = [p for p in pts if p[0] > xstart]
    while right:
        best = min(right, key=lambda p: ((p[1] - cur[1]) / (p[0] - cur[0]), -p[0]))
        slope = (best[1] - cur[1]) / (best[0] - cur[0])
        far = max((p for p in right if (p[1] - cur[1]) / (p[0] - cur[0]) == slope), key=lambda p: p[0])
        vertices.append(far)
        cur = far
        right = [p for p in right if p[0] > far[0]]
    slopes = []
    for (x0, y0), (x1, y1) in zip(vertices, vertices[1:]):
        if x1 > x0:
            slopes.append(((y1 - y0) / (x1 - x0), x1 - x0))
    slope_vals = {s for s, _ in slopes}
    return NewtonPolygon(
        points=tuple(pts),
        vertices=tuple(vertices),
        slopes=tuple(slopes),
        fuchs_regular=slope_vals <= {0},
        unramified_necessary=slope_vals <= {0, 1},
    )


def connection_slopes(conn):
    """Newton polygon at 0 of the cyclic operator of ``conn``."""
    _, op = cyclic_operator(conn)
    return newton_polygon(op)


def constant_gauge(conn, g):
    """g^-1 A g for a constant invertible rational matrix g."""
    from .exactalg import inverse
    ginv = inverse(g)
    return RationalConnection(conn.var, ginv * conn.matrix * g)
