"""Chain-level Hochschild and cyclic homology of a finite dga with a central element.

Chains are finite linear combinations of basis terms

    a0 (a1 | ... | al) q^i u^j t^k

stored as ``{(word, i, j, k): coefficient}`` with ``word = (a0, a1, ..., al)``
a tuple of basis indices.  Bar entries are normalized: the unit never
appears in a slot a1..al (such terms are dropped).  Degrees follow the
shifted convention ||a|| = |a| - 1; q and u have degree 2, t degree 0.

Two algebras appear: the base dga A and A_t = A[t, eps] with |eps| = -1 and
d eps = t - W.  Everything over A_t is t-linear, so t is a scalar exponent.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

from .errors import ComplexMismatch, InvalidAlgebra, OutOfBounds
from .exactalg import Matrix, frac_str, rank, to_frac


def _sign(e):
    return -1 if e % 2 else 1


# ------------------------------------------------------------------ algebras


class _Tables:
    """Structure constants of a (possibly t-linear) finite dga.

    ``mul[i, j]`` and ``diff[i]`` are tuples of (k, t_shift, coeff).
    """

    def __init__(self, names, degrees, unit, mul, diff, w):
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self.unit = unit
        self.mul = mul
        self.diff = diff
        self.w = tuple(w)
        self.dim = len(names)

    def times(self, x, y):
        """Product of combinations {(k, t): c}."""
        out = defaultdict(Fraction)
        for (i, ti), ci in x.items():
            for (j, tj), cj in y.items():
                for k, dt, c in self.mul.get((i, j), ()):
                    out[k, ti + tj + dt] += ci * cj * c
        return {k: v for k, v in out.items() if v}

    def basis_elem(self, i, t=0):
        return {(i, t): Fraction(1)}

    def d_elem(self, x):
        out = defaultdict(Fraction)
        for (i, ti), ci in x.items():
            for k, dt, c in self.diff.get(i, ()):
                out[k, ti + dt] += ci * c
        return {k: v for k, v in out.items() if v}

    def w_elem(self):
        return {(k, dt): Fraction(c) for k, dt, c in self.w}


class FiniteDGA:
    """Finite-dimensional dga over Q with a central closed degree-0 element W.

    ``products`` maps (i, j) to {k: c}; ``differential`` maps i to {k: c};
    ``w`` maps k to c.  All axioms are checked on construction.
    """

    def __init__(self, names, degrees, unit, products, differential, w, label=None):
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        self.unit = unit
        self.products = {k: {kk: to_frac(c) for kk, c in v.items() if c} for k, v in products.items()}
        self.differential = {k: {kk: to_frac(c) for kk, c in v.items() if c} for k, v in differential.items()}
        self.w = {k: to_frac(c) for k, c in w.items() if c}
        self.label = label or "A"
        n = len(self.names)
        if len(self.degrees) != n or not 0 <= unit < n:
            raise InvalidAlgebra("basis, degrees and unit index are inconsistent")
        self.tables = _Tables(
            self.names, self.degrees, unit,
            {k: tuple((kk, 0, c) for kk, c in v.items()) for k, v in self.products.items()},
            {k: tuple((kk, 0, c) for kk, c in v.items()) for k, v in self.differential.items()},
            [(k, 0, c) for k, c in self.w.items()],
        )
        self._validate()

    @property
    def dim(self):
        return len(self.names)

    def _validate(self):
        t = self.tables
        n = self.dim
        deg = self.degrees
        for (i, j), v in self.products.items():
            for k in v:
                if deg[k] != deg[i] + deg[j]:
                    raise InvalidAlgebra(f"product {self.names[i]}*{self.names[j]} is not homogeneous")
        for i, v in self.differential.items():
            for k in v:
                if deg[k] != deg[i] + 1:
                    raise InvalidAlgebra(f"d({self.names[i]}) does not have degree +1")
        for k in self.w:
            if deg[k] != 0:
                raise InvalidAlgebra("W must have degree 0")
        e = t.basis_elem(self.unit)
        for i in range(n):
            a = t.basis_elem(i)
            if t.times(e, a) != a or t.times(a, e) != a:
                raise InvalidAlgebra(f"unit law fails on {self.names[i]}")
            if t.d_elem(t.d_elem(a)):
                raise InvalidAlgebra(f"d^2 is nonzero on {self.names[i]}")
        for i, j in product(range(n), repeat=2):
            a, b = t.basis_elem(i), t.basis_elem(j)
            lhs = t.d_elem(t.times(a, b))
            rhs = _add(t.times(t.d_elem(a), b), t.times(a, t.d_elem(b)), _sign(deg[i]))
            if lhs != rhs:
                raise InvalidAlgebra(f"Leibniz rule fails on {self.names[i]}, {self.names[j]}")
            for k in range(n):
                c = t.basis_elem(k)
                if t.times(t.times(a, b), c) != t.times(a, t.times(b, c)):
                    raise InvalidAlgebra("product is not associative")
        w = t.w_elem()
        if t.d_elem(w):
            raise InvalidAlgebra("W is not closed")
        for i in range(n):
            a = t.basis_elem(i)
            if t.times(w, a) != t.times(a, w):
                raise InvalidAlgebra(f"W does not commute with {self.names[i]}")

    def to_json(self):
        return {
            "label": self.label,
            "basis": [{"name": nm, "degree": d} for nm, d in zip(self.names, self.degrees)],
            "unit": self.names[self.unit],
            "products": [[self.names[i], self.names[j], self.names[k], frac_str(c)]
                         for (i, j), v in sorted(self.products.items()) for k, c in sorted(v.items())],
            "differential": [[self.names[i], self.names[k], frac_str(c)]
                             for i, v in sorted(self.differential.items()) for k, c in sorted(v.items())],
            "W": [[self.names[k], frac_str(c)] for k, c in sorted(self.w.items())],
        }

    @classmethod
    def from_json(cls, data):
        from .errors import SchemaError
        try:
            names = [b["name"] for b in data["basis"]]
            degrees = [int(b["degree"]) for b in data["basis"]]
            idx = {nm: i for i, nm in enumerate(names)}

            def ix(x):
                return idx[x] if isinstance(x, str) else int(x)

            products = defaultdict(dict)
            for i, j, k, c in data.get("products", []):
                products[ix(i), ix(j)][ix(k)] = to_frac(c)
            diff = defaultdict(dict)
            for i, k, c in data.get("differential", []):
                diff[ix(i)][ix(k)] = to_frac(c)
            w = {ix(k): to_frac(c) for k, c in data.get("W", [])}
            unit = ix(data["unit"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed dga description: {exc}") from exc
        return cls(names, degrees, unit, dict(products), dict(diff), w, data.get("label"))


def _add(x, y, sy=1):
    out = defaultdict(Fraction, x)
    for k, v in y.items():
        out[k] += sy * v
    return {k: v for k, v in out.items() if v}


class ATAlgebra:
    """A_t = A[t, eps], d = d_A + (t - W) d/d eps.

    Basis: index i < n is the element a_i, index i + n is a_i eps (degree one lower).
    """

    def __init__(self, base):
        self.base = base
        n = base.dim
        self.n = n
        deg = base.degrees
        names = list(base.names) + [f"{nm}.eps" for nm in base.names]
        degrees = list(deg) + [d - 1 for d in deg]
        mul = {}
        for (i, j), v in base.products.items():
            # (a + b eps)(c + d eps) = ac + (ad + (-1)^|c| bc) eps
            mul[i, j] = tuple((k, 0, c) for k, c in v.items())
            mul[i, j + n] = tuple((k + n, 0, c) for k, c in v.items())
            mul[i + n, j] = tuple((k + n, 0, _sign(deg[j]) * c) for k, c in v.items())
        diff = {}
        for i in range(n):
            terms = defaultdict(Fraction)
            for k, c in base.differential.get(i, {}).items():
                terms[k + n, 0] += c
            # (-1)^|a| (t - W) a
            s = _sign(deg[i])
            terms[i, 1] += s
            for k, c in base.tables.times(base.tables.w_elem(), base.tables.basis_elem(i)).items():
                terms[k] -= s * c
            plain = tuple((k, 0, c) for k, c in base.differential.get(i, {}).items())
            if plain:
                diff[i] = plain
            diff[i + n] = tuple((k, dt, c) for (k, dt), c in terms.items() if c)
        self.tables = _Tables(names, degrees, base.unit, mul, diff, base.tables.w)
        self.eps_unit = base.unit + n

    def d_eps(self, i):
        """d/d eps of a basis element: (a eps) -> (-1)^|a| a."""
        if i < self.n:
            return {}
        return {(i - self.n, 0): Fraction(_sign(self.base.degrees[i - self.n]))}

    def check_d_squared(self):
        t = self.tables
        return all(not t.d_elem(t.d_elem(t.basis_elem(i))) for i in range(t.dim))


# ------------------------------------------------------------------ chains


@dataclass(frozen=True)
class Bounds:
    L: int = 4
    Kq: int = 3
    Ku: int = 3
    Kt: int = 3

    def contains(self, key):
        word, qe, ue, te = key
        return len(word) - 1 <= self.L and abs(qe) <= self.Kq and 0 <= ue <= self.Ku and 0 <= te <= self.Kt


@dataclass(frozen=True)
class Complex:
    """Which chain complex a chain lives in.

    ``curved``: differential includes the curvature insertion -q (..|W|..);
    ``qmax``: largest q exponent kept (None for no cutoff, 0 for q^-k with
    k >= 0, -1 for q^-1 Q[q^-1]); ``connes``: add the u-term.
    """

    name: str
    tables: _Tables
    curved: bool = False
    qmax: int = None
    connes: bool = False


def make_complexes(dga):
    at = ATAlgebra(dga)
    a = dga.tables
    return {
        "C(A)": Complex("C(A)", a),
        "CC(A)": Complex("CC(A)", a, connes=True),
        "C(A_q)": Complex("C(A_q)", a, curved=True),
        "CC(A_q)": Complex("CC(A_q)", a, curved=True, connes=True),
        "Q[q^-1] C(A_q)": Complex("Q[q^-1] C(A_q)", a, curved=True, qmax=0),
        "q^-1 CC(A_q)": Complex("q^-1 CC(A_q)", a, curved=True, qmax=-1, connes=True),
        "CQ(A_t)": Complex("CQ(A_t)", at.tables, curved=True, qmax=0),
        "C(A_t)": Complex("C(A_t)", at.tables),
        "CC(A_t)": Complex("CC(A_t)", at.tables, connes=True),
    }, at


@dataclass
class TruncatedChain:
    complex: Complex
    terms: dict
    bounds: Bounds = field(default_factory=Bounds)

    def is_zero(self):
        return not self.terms

    def in_bounds(self):
        return all(self.bounds.contains(k) for k in self.terms)

    def to_json(self):
        names = self.complex.tables.names
        return {
            "complex": self.complex.name,
            "terms": [{"word": [names[i] for i in w], "q": qe, "u": ue, "t": te, "coeff": frac_str(c)}
                      for (w, qe, ue, te), c in sorted(self.terms.items())],
        }


def basis_chain(cx, word, q=0, u=0, t=0, bounds=None):
    return TruncatedChain(cx, {(tuple(word), q, u, t): Fraction(1)}, bounds or Bounds())


class _Acc:
    """Accumulator for chain terms with bar-slot normalization."""

    def __init__(self, unit):
        self.unit = unit
        self.data = defaultdict(Fraction)

    def add(self, word, qe, ue, te, c):
        if c and self.unit not in word[1:]:
            self.data[word, qe, ue, te] += c

    def result(self):
        return {k: v for k, v in self.data.items() if v}


def _linear(op):
    """Extend a basis-term operation to chains given as dicts."""
    def run(tables, terms, *args):
        acc = _Acc(tables.unit)
        for (word, qe, ue, te), c in terms.items():
            op(tables, acc, word, qe, ue, te, c, *args)
        return acc.result()
    return run


# ------------------------------------------------------------------ cochains


@dataclass(frozen=True)
class Cochain:
    """Normalized Hochschild cochain with finitely many nonzero components.

    ``fn(args)`` returns {(k, t_shift): c} for a tuple of basis indices of
    length in ``arities``.
    """

    name: str
    degree: int
    arities: tuple
    fn: object = field(compare=False)

    def __call__(self, args):
        return self.fn(args) if len(args) in self.arities else {}


def w_cochain(tables):
    w = tables.w_elem()
    return Cochain("W", 0, (0,), lambda args: dict(w))


def d_eps_cochain(at):
    return Cochain("d_eps", 2, (1,), lambda args: at.d_eps(args[0]))


def eps_e_cochain(at):
    return Cochain("eps_e", -1, (0,), lambda args: {(at.eps_unit, 0): Fraction(1)})


def constant_cochain(name, elem, degree=0):
    return Cochain(name, degree, (0,), lambda args: dict(elem))


def cochain_differential(tables, phi):
    """Hochschild differential of a cochain over an uncurved algebra."""
    deg = tables.degrees
    n_ = lambda i: deg[i] - 1  # noqa: E731
    p = phi.degree
    arities = tuple(sorted({a for x in phi.arities for a in (x, x + 1)}))

    def fn(args):
        out = {}
        l = len(args)
        if l in phi.arities:
            out = _add(out, tables.d_elem(phi(args)))
            pre = 0
            for j in range(l):
                for (k, dt), c in tables.d_elem(tables.basis_elem(args[j])).items():
                    if k == tables.unit:
                        continue
                    val = phi(args[:j] + (k,) + args[j + 1:])
                    out = _add(out, {(kk, tt + dt): v * c for (kk, tt), v in val.items()}, _sign(pre + p))
                pre += n_(args[j])
        if l - 1 in phi.arities and l >= 1:
            out = _add(out, tables.times(tables.basis_elem(args[0]), phi(args[1:])), -_sign(p * n_(args[0])))
            pre = 0
            for j in range(l - 1):
                pre += n_(args[j])
                for (k, dt), c in tables.times(tables.basis_elem(args[j]), tables.basis_elem(args[j + 1])).items():
                    if k == tables.unit:
                        continue
                    val = phi(args[:j] + (k,) + args[j + 2:])
                    out = _add(out, {(kk, tt + dt): v * c for (kk, tt), v in val.items()},
                               -_sign(pre + n_(args[j + 1]) + p))
            tail = sum(n_(a) for a in args[:-1])
            out = _add(out, tables.times(phi(args[:-1]), tables.basis_elem(args[-1])), _sign(tail + p))
        return out

    return Cochain(f"d({phi.name})", p + 1, arities, fn)


# ------------------------------------------------------------------ operators


def _nd(tables, i):
    return tables.degrees[i] - 1


@_linear
def _hochschild(tb, acc, word, qe, ue, te, c, curved, qmax, connes):
    deg = tb.degrees
    a0, bar = word[0], word[1:]
    l = len(bar)
    nd = [deg[a] - 1 for a in bar]
    for k, dt, cc in tb.diff.get(a0, ()):
        acc.add((k,) + bar, qe, ue, te + dt, c * cc)
    pre = deg[a0] - 1
    for j in range(l):
        for k, dt, cc in tb.diff.get(bar[j], ()):
            acc.add((a0,) + bar[:j] + (k,) + bar[j + 1:], qe, ue, te + dt, _sign(pre) * c * cc)
        pre += nd[j]
    if l:
        for k, dt, cc in tb.mul.get((a0, bar[0]), ()):
            acc.add((k,) + bar[1:], qe, ue, te + dt, _sign(deg[a0]) * c * cc)
        pre = deg[a0]
        for j in range(l - 1):
            pre += nd[j]
            for k, dt, cc in tb.mul.get((bar[j], bar[j + 1]), ()):
                acc.add((a0,) + bar[:j] + (k,) + bar[j + 2:], qe, ue, te + dt, _sign(pre) * c * cc)
        s = -_sign(nd[-1] * (deg[a0] + sum(nd[:-1])))
        for k, dt, cc in tb.mul.get((bar[-1], a0), ()):
            acc.add((k,) + bar[:-1], qe, ue, te + dt, s * c * cc)
    if curved and (qmax is None or qe + 1 <= qmax):
        pre = deg[a0]
        for j in range(l + 1):
            for k, dt, cw in tb.w:
                acc.add((a0,) + bar[:j] + (k,) + bar[j:], qe + 1, ue, te + dt, -_sign(pre) * c * cw)
            if j < l:
                pre += nd[j]
    if connes and a0 != tb.unit:
        head = deg[a0] - 1
        total = sum(nd)
        for j in range(l + 1):
            tail = total - sum(nd[:j])
            s = -_sign((head + sum(nd[:j])) * tail)
            acc.add((tb.unit,) + bar[j:] + (a0,) + bar[:j], qe, ue + 1, te, s * c)


def _insert_value(acc, prefix, val, suffix, qe, ue, te, coeff):
    for (k, dt), v in val.items():
        acc.add(prefix + (k,) + suffix, qe, ue, te + dt, coeff * v)


@_linear
def _iota(tb, acc, word, qe, ue, te, c, phi):
    deg = tb.degrees
    a0, bar = word[0], word[1:]
    l = len(bar)
    nd = [deg[a] - 1 for a in bar]
    for m in phi.arities:
        j = l - m
        if j < 0:
            continue
        val = phi(bar[j:])
        if not val:
            continue
        s = _sign((deg[a0] + sum(nd[:j])) * sum(nd[j:]))
        prod = tb.times(val, tb.basis_elem(a0))
        _insert_value(acc, (), prod, bar[:j], qe, ue, te, s * c)


@_linear
def _lie(tb, acc, word, qe, ue, te, c, phi):
    deg = tb.degrees
    a0, bar = word[0], word[1:]
    l = len(bar)
    nd = [deg[a] - 1 for a in bar]
    nphi = phi.degree - 1
    c = _sign(phi.degree) * c
    # phi eats a0 together with a cyclic neighbourhood of it
    for k in range(l + 1):
        for j in range(k + 1):
            if l - k + j + 1 not in phi.arities:
                continue
            val = phi(bar[k:] + (a0,) + bar[:j])
            if not val:
                continue
            s = _sign((deg[a0] - 1 + sum(nd[:k])) * sum(nd[k:]))
            _insert_value(acc, (), val, bar[j:k], qe, ue, te, s * c)
    # phi applied inside the bar
    pre = deg[a0] - 1
    for j in range(l + 1):
        for m in phi.arities:
            if j + m > l:
                continue
            val = phi(bar[j:j + m])
            if val:
                _insert_value(acc, (a0,) + bar[:j], val, bar[j + m:], qe, ue, te, _sign(nphi * pre) * c)
        if j < l:
            pre += nd[j]


@_linear
def _big_iota_u(tb, acc, word, qe, ue, te, c, phi):
    """The u-term of I_phi (without the iota part)."""
    deg = tb.degrees
    a0, bar = word[0], word[1:]
    if a0 == tb.unit:
        return
    l = len(bar)
    nd = [deg[a] - 1 for a in bar]
    nphi = phi.degree - 1
    c = _sign(phi.degree) * c
    head = deg[a0] - 1
    for j in range(l + 1):
        rot = (head + sum(nd[:j])) * sum(nd[j:])
        for i in range(j, l + 1):
            for m in phi.arities:
                if i + m > l:
                    continue
                val = phi(bar[i:i + m])
                if not val:
                    continue
                s = -_sign(rot + nphi * sum(nd[j:i]))
                _insert_value(acc, (tb.unit,) + bar[j:i], val, bar[i + m:] + (a0,) + bar[:j],
                              qe, ue + 1, te, s * c)


def _check(chain, cx=None):
    if cx is not None and chain.complex.name != cx:
        raise ComplexMismatch(f"expected a chain in {cx}, got {chain.complex.name}")


def _wrap(chain, terms, cx=None, growth=None):
    out = TruncatedChain(cx or chain.complex, terms, chain.bounds)
    if not out.in_bounds():
        partial = TruncatedChain(out.complex, {k: v for k, v in terms.items() if chain.bounds.contains(k)},
                                 chain.bounds)
        raise OutOfBounds("result leaves the truncation bounds", partial)
    return out


def apply_differential(chain):
    cx = chain.complex
    terms = _hochschild(cx.tables, chain.terms, cx.curved, cx.qmax, cx.connes)
    return _wrap(chain, terms)


def cochain_act(phi, chain, mode):
    """iota_phi, L_phi or I_phi (= iota_phi plus the u-term) on a chain.

    All three carry an overall sign (-1)^|phi| relative to the textbook
    formulas written with a (-1)^|phi| inside iota only.  For even cochains
    nothing changes; for odd ones this is the choice under which the Cartan
    formula d I - (-1)^|phi| I d - I_{d phi} = u L holds.
    """
    tb = chain.complex.tables
    if mode == "iota":
        terms = _iota(tb, chain.terms, phi)
    elif mode == "L":
        terms = _lie(tb, chain.terms, phi)
    elif mode == "I":
        terms = _add(_iota(tb, chain.terms, phi), _big_iota_u(tb, chain.terms, phi))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _wrap(chain, terms)


def multiply_q(chain):
    """Multiplication by q, killing exponents above the complex's cutoff."""
    qmax = chain.complex.qmax
    terms = {(w, qe + 1, ue, te): c for (w, qe, ue, te), c in chain.terms.items()
             if qmax is None or qe + 1 <= qmax}
    return _wrap(chain, terms)


def multiply_t(chain):
    return _wrap(chain, {(w, qe, ue, te + 1): c for (w, qe, ue, te), c in chain.terms.items()})


def u_dq(chain):
    return _wrap(chain, {(w, qe - 1, ue + 1, te): qe * c for (w, qe, ue, te), c in chain.terms.items() if qe})


def u_dt(chain):
    return _wrap(chain, {(w, qe, ue + 1, te - 1): te * c for (w, qe, ue, te), c in chain.terms.items() if te})


def ggm_connection(chain, which, cochain=None):
    """nabla_{u d_q} = u d_q + I_W on the q-side, nabla_{u d_t} = u d_t + I_{d eps} on the t-side."""
    cx = chain.complex
    if which == "nabla_q":
        if not cx.curved or cx.name == "CQ(A_t)":
            raise ComplexMismatch("nabla_q acts on the cyclic complex of A_q")
        phi = cochain or w_cochain(cx.tables)
        return add(u_dq(chain), cochain_act(phi, chain, "I"))
    if which == "nabla_t":
        if cx.curved:
            raise ComplexMismatch("nabla_t acts on the cyclic complex of A_t")
        if cochain is None:
            raise ComplexMismatch("nabla_t needs the d/d eps cochain of A_t")
        return add(u_dt(chain), cochain_act(cochain, chain, "I"))
    raise ValueError(f"unknown connection {which!r}")


def add(x, y, sy=1):
    if x.complex.name != y.complex.name:
        raise ComplexMismatch(f"{x.complex.name} vs {y.complex.name}")
    return TruncatedChain(x.complex, _add(x.terms, y.terms, sy), x.bounds)


def scale(x, c):
    return TruncatedChain(x.complex, {k: v * c for k, v in x.terms.items() if v * c}, x.bounds)


# ------------------------------------------------------------------ shuffles


def _shuffle_terms(eps_unit, word, k):
    """Insertions of k copies of e.eps into the bar, positions 0 <= i1 <= ... <= ik <= l."""
    a0, bar = word[0], word[1:]
    l = len(bar)
    for pos in combinations_with_replacement(range(l + 1), k):
        out = [a0]
        p = 0
        for i in range(l + 1):
            while p < k and pos[p] == i:
                out.append(eps_unit)
                p += 1
            if i < l:
                out.append(bar[i])
        yield tuple(out)


def _sh_dict(at, terms, shift):
    acc = defaultdict(Fraction)
    for (word, qe, ue, te), c in terms.items():
        k = -qe - shift
        if k < 0:
            raise ValueError("shuffle input has a positive q exponent")
        for w in _shuffle_terms(at.eps_unit, word, k):
            acc[w, 0, ue, te] += _sign(k) * c
    return {key: v for key, v in acc.items() if v}


def shuffle_sh(chain, target, at):
    """sh: CQ(A_t) -> C(A_t), a0 (a1..al) q^-k -> (-1)^k sum of e.eps insertions."""
    _check(chain, "CQ(A_t)")
    return _wrap(chain, _sh_dict(at, chain.terms, 0), target)


def shuffle_SH(chain, target, at):
    """SH: q^-1 CC(A_q) -> CC(A_t), x q^{-k-1} -> sh(x q^{-k})."""
    _check(chain, "q^-1 CC(A_q)")
    return _wrap(chain, _sh_dict(at, chain.terms, 1), target)


def include_base(chain, target):
    """A-chains as A_t-chains (basis indices of A embed unchanged)."""
    return TruncatedChain(target, dict(chain.terms), chain.bounds)


# ------------------------------------------------------------------ growth


GROWTH = {
    # operator: (max length change, q change, u change, t change)
    "d": (1, 1, 1, 1),
    "iota": (0, 0, 0, 1),
    "L": (1, 0, 0, 1),
    "I": (2, 0, 1, 1),
    "q": (0, 1, 0, 0),
    "t": (0, 0, 0, 1),
    "u_dq": (0, -1, 1, 0),
    "u_dt": (0, 0, 1, -1),
}


def observed_growth(before, after):
    """Largest observed (length, q, u, t) increase from input to output terms."""
    if not after.terms or not before.terms:
        return None
    lb = max(len(w) for w, _, _, _ in before.terms)
    qb = max(q for _, q, _, _ in before.terms)
    ub = max(u for _, _, u, _ in before.terms)
    tb = max(t for _, _, _, t in before.terms)
    la = max(len(w) for w, _, _, _ in after.terms)
    qa = max(q for _, q, _, _ in after.terms)
    ua = max(u for _, _, u, _ in after.terms)
    ta = max(t for _, _, _, t in after.terms)
    return (la - lb, qa - qb, ua - ub, ta - tb)


def growth_within(op, before, after):
    seen = observed_growth(before, after)
    if seen is None:
        return True
    return all(s <= g for s, g in zip(seen, GROWTH[op]))


# ------------------------------------------------------------------ test dgas


def dga_ground_field():
    return FiniteDGA(["e"], [0], 0, {(0, 0): {0: 1}}, {}, {}, "Q")


def dga_dual_numbers(w_coeff=1):
    """Q[x]/x^2 with zero differential and W = w_coeff * x."""
    prods = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}
    return FiniteDGA(["e", "x"], [0, 0], 0, prods, {}, {1: w_coeff}, "Q[x]/x^2")


def dga_upper_triangular(c=1):
    """2x2 upper-triangular matrices, basis e = identity, e11, e12; W = c * identity."""
    prods = {(0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (1, 0): {1: 1}, (2, 0): {2: 1},
             (1, 1): {1: 1}, (1, 2): {2: 1}}
    return FiniteDGA(["e", "e11", "e12"], [0, 0, 0], 0, prods, {}, {0: c}, "upper triangular 2x2")


def dga_koszul():
    """Q[x, y]/(x^2, y^2), |x| = 0, |y| = -1, dy = x, W = x."""
    # basis e, x, y, xy
    prods = {(0, 0): {0: 1}, (0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 1},
             (1, 0): {1: 1}, (2, 0): {2: 1}, (3, 0): {3: 1},
             (1, 2): {3: 1}, (2, 1): {3: 1}}
    return FiniteDGA(["e", "x", "y", "xy"], [0, 0, -1, -1], 0, prods, {2: {1: 1}}, {1: 1}, "Koszul Q[x,y]")


TEST_DGAS = {
    "ground_field": dga_ground_field,
    "dual_numbers": dga_dual_numbers,
    "upper_triangular": dga_upper_triangular,
    "koszul": dga_koszul,
}


# ------------------------------------------------------------------ checks


def _words(tables, a0_set, max_len):
    bar = [i for i in range(tables.dim) if i != tables.unit]
    for l in range(max_len + 1):
        for tail in product(bar, repeat=l):
            for a0 in a0_set:
                yield (a0,) + tail


@dataclass
class IdentityResult:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures and self.checked > 0

    def to_json(self):
        return {"name": self.name, "checked": self.checked, "skipped": self.skipped, "passed": self.passed,
                "failures": self.failures[:3]}


@dataclass
class NCFTReport:
    dga: str
    bounds: Bounds
    results: list

    @property
    def failures(self):
        return [r for r in self.results if not r.passed]

    @property
    def passed(self):
        return not self.failures

    def to_json(self):
        return {"dga": self.dga, "bounds": vars(self.bounds), "passed": self.passed,
                "identities": [r.to_json() for r in self.results]}


def _record(res, chain, lhs, rhs):
    res.checked += 1
    diff = _add(lhs.terms, rhs.terms, -1)
    if diff:
        res.failures.append({"input": chain.to_json(), "difference": TruncatedChain(lhs.complex, diff).to_json()})


def _shift_u(chain):
    return TruncatedChain(chain.complex, {(w, qe, ue + 1, te): c for (w, qe, ue, te), c in chain.terms.items()},
                          chain.bounds)


def check_ncft_diagrams(dga, bounds=None):
    """Verify the chain-level identities on every basis chain in the certified range.

    An input is in the certified range when every intermediate chain of the
    identity stays inside ``bounds``; inputs outside it are counted as
    skipped, never as passes.
    """
    bounds = bounds or Bounds()
    cxs, at = make_complexes(dga)
    a_tb, t_tb = dga.tables, at.tables
    deps = d_eps_cochain(at)
    epse = eps_e_cochain(at)
    wq = w_cochain(a_tb)
    wt = w_cochain(t_tb)
    L, Kq = bounds.L, bounds.Kq
    results = []

    def run(name, cx, a0s, max_len, qs, us, ts, fn, bar_from=None):
        res = IdentityResult(name)
        tb = cx.tables
        bar_tb = bar_from or tb
        for word in _words(bar_tb, a0s, max_len):
            for q, u, t in product(qs, us, ts):
                ch = basis_chain(cx, word, q, u, t, bounds)
                try:
                    lhs, rhs = fn(ch)
                except OutOfBounds:
                    res.skipped += 1
                    continue
                _record(res, ch, lhs, rhs)
        results.append(res)

    zero = lambda cx: TruncatedChain(cx, {}, bounds)  # noqa: E731
    dd = lambda ch: (apply_differential(apply_differential(ch)), zero(ch.complex))  # noqa: E731
    a_all, t_all = range(a_tb.dim), range(t_tb.dim)
    run("d^2 = 0 on CC(A_q)", cxs["CC(A_q)"], a_all, L - 2, range(Kq - 1), (0, 1), (0,), dd)
    run("d^2 = 0 on q^-1 CC(A_q)", cxs["q^-1 CC(A_q)"], a_all, L - 2, range(-Kq, 0), (0, 1), (0,), dd)
    run("d^2 = 0 on CQ(A_t)", cxs["CQ(A_t)"], t_all, L - 2, range(-Kq + 2, 1), (0,), (0, 1), dd, a_tb)
    run("d^2 = 0 on CC(A_t)", cxs["CC(A_t)"], t_all, L - 2, (0,), (0, 1), (0, 1), dd)

    cq, ct = cxs["CQ(A_t)"], cxs["C(A_t)"]
    run("sh is a chain map", cq, t_all, L - 1, range(-Kq, 1), (0,), (0, 1),
        lambda ch: (shuffle_sh(apply_differential(ch), ct, at), apply_differential(shuffle_sh(ch, ct, at))), a_tb)
    run("sh q = -iota_{d eps} sh", cq, t_all, L - 1, range(-Kq, 1), (0,), (0, 1),
        lambda ch: (shuffle_sh(multiply_q(ch), ct, at),
                    scale(cochain_act(deps, shuffle_sh(ch, ct, at), "iota"), -1)), a_tb)

    dom, tgt = cxs["q^-1 CC(A_q)"], cxs["CC(A_t)"]
    qs = range(-Kq, 0)

    def sh_chain(ch):
        return shuffle_SH(apply_differential(ch), tgt, at), apply_differential(shuffle_SH(ch, tgt, at))

    def sh_q(ch):
        return (shuffle_SH(multiply_q(ch), tgt, at),
                scale(ggm_connection(shuffle_SH(ch, tgt, at), "nabla_t", deps), -1))

    def sh_dq(ch):
        return shuffle_SH(u_dq(ch), tgt, at), scale(_shift_u(cochain_act(epse, shuffle_SH(ch, tgt, at), "L")), -1)

    def sh_iw(ch):
        return shuffle_SH(cochain_act(wq, ch, "I"), tgt, at), cochain_act(wt, shuffle_SH(ch, tgt, at), "I")

    def sh_nabla(ch):
        sh = shuffle_SH(ch, tgt, at)
        lhs = shuffle_SH(ggm_connection(ch, "nabla_q", wq), tgt, at)
        rhs = add(multiply_t(sh), apply_differential(cochain_act(epse, sh, "I")), -1)
        rhs = add(rhs, cochain_act(epse, apply_differential(sh), "I"), -1)
        return lhs, rhs

    run("SH is a chain map", dom, a_all, L - 1, qs, (0, 1), (0,), sh_chain)
    run("SH q = -nabla_{u d_t} SH", dom, a_all, L - 1, qs, (0, 1), (0,), sh_q)
    run("SH u d_q = -u L_{eps e} SH", dom, a_all, L - 1, qs, (0, 1), (0,), sh_dq)
    run("SH I_W = I_W SH", dom, a_all, L - 1, qs, (0, 1), (0,), sh_iw)
    run("SH nabla_{u d_q} = (t - d I_{eps e} - I_{eps e} d) SH", dom, a_all, L - 1, qs, (0, 1), (0,), sh_nabla)

    def cartan(phi, tb):
        dphi = cochain_differential(tb, phi)

        def fn(ch):
            lhs = add(apply_differential(cochain_act(phi, ch, "I")),
                      cochain_act(phi, apply_differential(ch), "I"), -_sign(phi.degree))
            lhs = add(lhs, cochain_act(dphi, ch, "I"), -1)
            return lhs, _shift_u(cochain_act(phi, ch, "L"))
        return fn

    run("Cartan formula for W on q^-1 CC(A_q)", dom, a_all, L - 3, qs, (0,), (0,), cartan(wq, a_tb))
    run("Cartan formula for W on CC(A_t)", tgt, t_all, L - 3, (0,), (0,), (0, 1), cartan(wt, t_tb))
    run("Cartan formula for d_eps on CC(A_t)", tgt, t_all, L - 3, (0,), (0,), (0, 1), cartan(deps, t_tb))
    run("Cartan formula for eps_e on CC(A_t)", tgt, t_all, L - 3, (0,), (0,), (0, 1), cartan(epse, t_tb))

    res = IdentityResult("t - iota_W injective, image complementary to t-constant chains")
    res.checked += 1
    if not _complement_check(a_tb, bounds.Kt):
        res.failures.append({"reason": "rank condition fails"})
    results.append(res)

    if dga.dim == 1:
        res = IdentityResult("sh is a bijection on basis words (ground field)")
        images = set()
        for a0 in t_all:
            for k in range(L + 1):
                img = shuffle_sh(basis_chain(cq, (a0,), -k, 0, 0, bounds), ct, at)
                res.checked += 1
                if len(img.terms) != 1 or set(img.terms.values()) != {Fraction(_sign(k))}:
                    res.failures.append({"input": [a0, k]})
                images |= set(img.terms)
        if len(images) != t_tb.dim * (L + 1):
            res.failures.append({"reason": "images not distinct"})
        results.append(res)

    return NCFTReport(dga.label, bounds, results)


def _complement_check(tb, kt):
    """Q[t]_{<=kt} (x) A = A + (t - W) Q[t]_{<=kt-1} (x) A, with (t - W) injective."""
    n = tb.dim
    w = tb.w_elem()
    cols = []
    for m in range(kt):
        for i in range(n):
            v = [Fraction(0)] * (n * (kt + 1))
            v[(m + 1) * n + i] += 1
            for (k, _), c in tb.times(w, tb.basis_elem(i)).items():
                v[m * n + k] -= c
            cols.append(v)
    image = Matrix([[cols[j][r] for j in range(len(cols))] for r in range(n * (kt + 1))])
    injective = rank(image) == len(cols)
    consts = [[Fraction(1 if r == i else 0) for r in range(n * (kt + 1))] for i in range(n)]
    both = Matrix([[c[r] for c in cols + consts] for r in range(n * (kt + 1))])
    return injective and rank(both) == n * (kt + 1)
