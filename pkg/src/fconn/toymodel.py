"""Cohomology-level toy model H_{q,u} = H*(M)[q,u] + (u/q) H*(D)[u/q, u].

Basis monomials of H_{q,u} are keys ``(part, exp, uexp, index)``:

* ``("M", j, k, i)``: q^j u^k times the i-th basis class of H*(M), j >= 0;
* ``("D", i, k, a)``: (u/q)^i u^k times the a-th basis class of H*(D), i >= 1.

Classes are indexed globally, ordered by cohomological degree.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import Matrix, RatFunc
from .formalconn import RationalConnection


def _as_frac_matrix(rows, nrows, ncols, what):
    rows = [[Fraction(x) for x in r] for r in rows]
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise ValueError(f"{what}: expected a {nrows}x{ncols} matrix")
    return rows


@dataclass(frozen=True)
class ToyInput:
    """Graded cohomology of M and D with restriction and pushforward.

    ``restriction[d]`` maps H^d(M) -> H^d(D) (shape dim_D(d) x dim_M(d));
    ``pushforward[d]`` maps H^d(D) -> H^{d+2}(M) (shape dim_M(d+2) x dim_D(d)).
    Missing blocks are zero.
    """

    dims_m: dict
    dims_d: dict
    restriction: dict
    pushforward: dict
    complex_dimension: int
    name: str = "toy"

    def __post_init__(self):
        dm = {int(k): int(v) for k, v in self.dims_m.items() if int(v)}
        dd = {int(k): int(v) for k, v in self.dims_d.items() if int(v)}
        if any(v < 0 for v in list(dm.values()) + list(dd.values())) or any(k < 0 for k in list(dm) + list(dd)):
            raise ValueError("dimensions and degrees must be non-negative")
        res = {}
        for k, rows in self.restriction.items():
            d = int(k)
            res[d] = _as_frac_matrix(rows, dd.get(d, 0), dm.get(d, 0), f"restriction in degree {d}")
        push = {}
        for k, rows in self.pushforward.items():
            d = int(k)
            push[d] = _as_frac_matrix(rows, dm.get(d + 2, 0), dd.get(d, 0), f"pushforward in degree {d}")
        object.__setattr__(self, "dims_m", dm)
        object.__setattr__(self, "dims_d", dd)
        object.__setattr__(self, "restriction", res)
        object.__setattr__(self, "pushforward", push)

    @staticmethod
    def _offsets(dims):
        out, pos = {}, 0
        for d in sorted(dims):
            out[d] = pos
            pos += dims[d]
        return out, pos

    @property
    def m_rank(self):
        return sum(self.dims_m.values())

    @property
    def d_rank(self):
        return sum(self.dims_d.values())

    def m_degrees(self):
        return [d for d in sorted(self.dims_m) for _ in range(self.dims_m[d])]

    def d_degrees(self):
        return [d for d in sorted(self.dims_d) for _ in range(self.dims_d[d])]

    def restriction_matrix(self):
        """iota^* on the whole of H*(M), as a d_rank x m_rank list of rows."""
        om, _ = self._offsets(self.dims_m)
        od, _ = self._offsets(self.dims_d)
        out = [[Fraction(0)] * self.m_rank for _ in range(self.d_rank)]
        for d, rows in self.restriction.items():
            for i, r in enumerate(rows):
                for j, x in enumerate(r):
                    out[od[d] + i][om[d] + j] = x
        return out

    def pushforward_matrix(self):
        """iota_* on the whole of H*(D), as an m_rank x d_rank list of rows."""
        om, _ = self._offsets(self.dims_m)
        od, _ = self._offsets(self.dims_d)
        out = [[Fraction(0)] * self.d_rank for _ in range(self.m_rank)]
        for d, rows in self.pushforward.items():
            for i, r in enumerate(rows):
                for j, x in enumerate(r):
                    out[om[d + 2] + i][od[d] + j] = x
        return out

    def to_json(self):
        def mat(m):
            return {str(d): [[str(x) for x in r] for r in rows] for d, rows in sorted(m.items())}
        return {"name": self.name, "complex_dimension": self.complex_dimension,
                "dims_m": {str(d): n for d, n in sorted(self.dims_m.items())},
                "dims_d": {str(d): n for d, n in sorted(self.dims_d.items())},
                "restriction": mat(self.restriction), "pushforward": mat(self.pushforward)}

    @classmethod
    def from_json(cls, data):
        for key in ("dims_m", "dims_d", "complex_dimension"):
            if key not in data:
                raise ValueError(f"toy input is missing {key!r}")
        return cls(data["dims_m"], data["dims_d"], data.get("restriction", {}), data.get("pushforward", {}),
                   int(data["complex_dimension"]), data.get("name", "toy"))


def _matmul(a, b, ncols):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(ncols)]
            for i in range(len(a))]


def _column_images(mat, idx):
    return [(i, row[idx]) for i, row in enumerate(mat) if row[idx]]


@dataclass(frozen=True)
class HquElement:
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (part, e, k, i), c in self.terms.items():
            if part not in ("M", "D"):
                raise ValueError(f"unknown part {part!r}")
            if (part == "M" and e < 0) or (part == "D" and e < 1) or k < 0:
                raise ValueError(f"exponent out of range in {(part, e, k, i)}")
            c = Fraction(c)
            if c:
                clean[(part, e, k, i)] = clean.get((part, e, k, i), 0) + c
        object.__setattr__(self, "terms", {key: c for key, c in clean.items() if c})

    @classmethod
    def m_class(cls, i, j=0, k=0, c=1):
        return cls({("M", j, k, i): c})

    @classmethod
    def d_class(cls, a, i=1, k=0, c=1):
        return cls({("D", i, k, a): c})

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return HquElement(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return HquElement({key: v * c for key, v in self.terms.items()})

    def times_u(self, n=1):
        return HquElement({(p, e, k + n, i): c for (p, e, k, i), c in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def max_d_exponent(self):
        return max((e for (p, e, _, _) in self.terms if p == "D"), default=0)

    def at_u_one(self):
        """Specialize u = 1: key (part, exp, index) -> coefficient."""
        out = {}
        for (p, e, _, i), c in self.terms.items():
            out[(p, e, i)] = out.get((p, e, i), 0) + c
        return {key: c for key, c in out.items() if c}

    def to_json(self):
        return [{"part": p, "exp": e, "u": k, "index": i, "coeff": str(c)}
                for (p, e, k, i), c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data):
        return cls({(t["part"], int(t["exp"]), int(t.get("u", 0)), int(t["index"])): Fraction(t["coeff"])
                    for t in data})


def _check(inp, elem):
    for (p, _, _, i) in elem.terms:
        bound = inp.m_rank if p == "M" else inp.d_rank
        if not 0 <= i < bound:
            raise ValueError(f"class index {i} out of range for part {p}")


def hqu_q_action(inp, elem):
    """Multiplication by q on H_{q,u}."""
    _check(inp, elem)
    rp = _matmul(inp.restriction_matrix(), inp.pushforward_matrix(), inp.d_rank)
    push = inp.pushforward_matrix()
    out = {}

    def put(key, c):
        out[key] = out.get(key, 0) + c

    for (p, e, k, i), c in elem.terms.items():
        if p == "M":
            put(("M", e + 1, k, i), c)
        elif e == 1:
            for r, x in _column_images(push, i):
                put(("M", 0, k, r), c * x)
        else:
            for r, x in _column_images(rp, i):
                put(("D", e - 1, k, r), c * x)
            put(("D", e - 1, k + 1, i), -(e - 1) * c)
    return HquElement(out)


def hqu_connection(inp, elem):
    """The connection nabla_{u d_q} on H_{q,u}."""
    _check(inp, elem)
    res = inp.restriction_matrix()
    pr = _matmul(inp.pushforward_matrix(), res, inp.m_rank)
    out = {}

    def put(key, c):
        out[key] = out.get(key, 0) + c

    for (p, e, k, i), c in elem.terms.items():
        if p == "D":
            put(("D", e + 1, k, i), c)
        elif e == 0:
            for r, x in _column_images(res, i):
                put(("D", 1, k, r), c * x)
        else:
            put(("M", e - 1, k + 1, i), e * c)
            for r, x in _column_images(pr, i):
                put(("M", e - 1, k, r), c * x)
    return HquElement(out)


def commutator_defect(inp, elem):
    """[nabla, q] elem - u elem; zero for every element."""
    lhs = hqu_connection(inp, hqu_q_action(inp, elem)) - hqu_q_action(inp, hqu_connection(inp, elem))
    return lhs - elem.times_u()


def q_power_into_m(inp, elem, max_power=None):
    """Smallest n with q^n elem in H*(M)[q,u], and q^n elem itself."""
    limit = max_power if max_power is not None else elem.max_d_exponent()
    cur = elem
    for n in range(limit + 1):
        if all(p == "M" for (p, _, _, _) in cur.terms):
            return n, cur
        cur = hqu_q_action(inp, cur)
    raise ArithmeticError(f"q^{limit} does not reach the M-part")


@dataclass
class DModuleReport:
    degree_parity: int
    relations: list
    basis_size: dict

    @property
    def passed(self):
        return all(r["holds"] for r in self.relations)

    def to_json(self):
        return {"degree_parity": self.degree_parity, "passed": self.passed,
                "relations": self.relations, "basis_size": self.basis_size}


def toy_dmodule_check(inp, degree, bound=4):
    """Check the relations nabla(m) = iota^* m and nabla(q t) = iota^* iota_* t.

    Here m runs over classes of H*(M) and t = (u/q)[theta] over classes of
    H*(D) of parity ``degree``; both sides are compared after u = 1.  The
    relations are also checked on q^j m and nabla^i t for j, i <= ``bound``
    against the closed forms obtained by iterating them.
    """
    par = degree % 2
    res = inp.restriction_matrix()
    rp = _matmul(res, inp.pushforward_matrix(), inp.d_rank)
    ms = [i for i, d in enumerate(inp.m_degrees()) if d % 2 == par]
    ts = [a for a, d in enumerate(inp.d_degrees()) if d % 2 == par]

    def t_of(vec_rows, idx, exp=1):
        return HquElement({("D", exp, 0, r): x for r, x in _column_images(vec_rows, idx)})

    rel_m, rel_t, rel_basis = [], [], []
    for i in ms:
        lhs = hqu_connection(inp, HquElement.m_class(i))
        rel_m.append(lhs.at_u_one() == t_of(res, i).at_u_one())
    for a in ts:
        lhs = hqu_connection(inp, hqu_q_action(inp, HquElement.d_class(a)))
        rel_t.append(lhs.at_u_one() == t_of(rp, a).at_u_one())
        # nabla^i t = (u/q)^{i+1} theta
        cur = HquElement.d_class(a)
        for i in range(1, bound + 1):
            cur = hqu_connection(inp, cur)
            rel_basis.append(cur == HquElement.d_class(a, i + 1))
    for i in ms:
        for j in range(1, bound + 1):
            # [nabla, q^j] = j u q^{j-1}, applied to m_i
            qm = HquElement.m_class(i, j)
            lhs = hqu_connection(inp, qm)
            rhs = HquElement.m_class(i, j - 1, 1, j)
            inner = hqu_connection(inp, HquElement.m_class(i))
            for _ in range(j):
                inner = hqu_q_action(inp, inner)
            rel_basis.append(lhs == rhs + inner)
    relations = [
        {"relation": "nabla(m) = iota^* m", "checked": len(rel_m), "holds": all(rel_m)},
        {"relation": "nabla(q t) = iota^* iota_* t", "checked": len(rel_t), "holds": all(rel_t)},
        {"relation": "iterated forms up to bound", "checked": len(rel_basis), "holds": all(rel_basis)},
    ]
    return DModuleReport(par, relations, {"m_generators": len(ms), "t_generators": len(ts)})


def toy_q_inverted_connection(inp, parity=0, var="q"):
    """d/dq + q^-1 N on the classes of H*(M) of the given parity, N = iota_* iota^*."""
    pr = _matmul(inp.pushforward_matrix(), inp.restriction_matrix(), inp.m_rank)
    idx = [i for i, d in enumerate(inp.m_degrees()) if d % 2 == parity]
    if not idx:
        raise ValueError(f"H*(M) has no classes of parity {parity}")
    rows = [[RatFunc.monomial(-1, pr[i][j], var) if pr[i][j] else 0 for j in idx] for i in idx]
    return RationalConnection(var, Matrix(rows))


def cup_with_divisor_matrix(inp, parity=0):
    pr = _matmul(inp.pushforward_matrix(), inp.restriction_matrix(), inp.m_rank)
    idx = [i for i, d in enumerate(inp.m_degrees()) if d % 2 == parity]
    return [[pr[i][j] for j in idx] for i in idx]


def projective_line_point():
    """M = P^1 with D a point: iota_* sends the point class to h."""
    return ToyInput({0: 1, 2: 1}, {0: 1}, {0: [[1]]}, {0: [[1]]}, 1, "p1_point")


def projective_plane_line():
    """M = P^2 with D a line: iota^* h = point class of D, iota_* 1_D = h, iota_* pt = h^2."""
    return ToyInput({0: 1, 2: 1, 4: 1}, {0: 1, 2: 1}, {0: [[1]], 2: [[1]]}, {0: [[1]], 2: [[1]]}, 2,
                    "p2_line")


def empty_divisor(dims_m=None, complex_dimension=1):
    dims_m = dims_m or {0: 1, 2: 1}
    return ToyInput(dims_m, {}, {}, {}, complex_dimension, "empty_divisor")


TOY_INPUTS = {"p1_point": projective_line_point, "p2_line": projective_plane_line, "empty_divisor": empty_divisor}
