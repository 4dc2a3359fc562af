"""Gauss-Manin connection of a one-variable Laurent polynomial superpotential.

The fibre of W: C* -> C over t is the finite set {W(z) = t}; functions on it
form the algebra Q(t)[z]/(z^-a (W - t)) with basis 1, z, ..., z^(n-1),
n = b - a.  A function f(z) on the fibres varies with t by f'(z)/W'(z), and
this defines the connection.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateDiscriminant, PoleReductionUnsupported
from .exactalg import (
    INFINITY,
    Matrix,
    Poly,
    RatFunc,
    charpoly,
    det,
    factor_over_rationals,
    frac_str,
    inverse,
    matrix_valuation,
    poly_to_json,
    roots_with_multiplicity,
    series_coefficient_matrix,
    solve,
    to_frac,
)
from .formalconn import (
    RationalConnection,
    _saturate,
    change_chart,
    local_expansion,
    monodromy_label,
)


@dataclass(frozen=True)
class LaurentPoly:
    """sum_{k=a}^{b} c_k z^k with a <= 0 <= b, a < b; end coefficients away from z^0 are nonzero."""

    min_exp: int
    coeffs: tuple
    var: str = "z"

    def __post_init__(self):
        cs = tuple(to_frac(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        a, b = self.min_exp, self.max_exp
        if not (a <= 0 <= b and a < b):
            raise ValueError("need min exponent <= 0 <= max exponent with min < max")
        # a = 0 is forced for polynomials, so only a genuine negative end must be nonzero
        if (a < 0 and cs[0] == 0) or (b > 0 and cs[-1] == 0):
            raise ValueError("extreme coefficients must be nonzero")
        if all(c == 0 for k, c in enumerate(cs) if k + a != 0):
            raise ValueError("superpotential is constant")

    @classmethod
    def from_dict(cls, terms, var="z"):
        a, b = min(min(terms), 0), max(max(terms), 0)
        return cls(a, tuple(terms.get(k, 0) for k in range(a, b + 1)), var)

    @property
    def max_exp(self):
        return self.min_exp + len(self.coeffs) - 1

    @property
    def rank(self):
        return self.max_exp - self.min_exp

    def terms(self):
        return {self.min_exp + k: c for k, c in enumerate(self.coeffs) if c}

    def derivative_terms(self):
        return {k - 1: k * c for k, c in self.terms().items() if k}

    def to_json(self):
        return {"var": self.var, "min_exp": self.min_exp, "coeffs": [frac_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["min_exp"]), tuple(to_frac(c) for c in data["coeffs"]), data.get("var", "z"))

    def __str__(self):
        out = ""
        for k, c in sorted(self.terms().items(), reverse=True):
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            mag = abs(c)
            body = frac_str(mag) if not mono else (mono if mag == 1 else f"{frac_str(mag)}*{mono}")
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


def fiber_basis(w):
    """Monomials 1, z, ..., z^(n-1) spanning the fibre algebra."""
    return [f"{w.var}^{j}" if j > 1 else (w.var if j == 1 else "1") for j in range(w.rank)]


class FiberAlgebra:
    """Q(t)[z]/(z^-a (W - t)) with elements as coefficient lists in the monomial basis."""

    def __init__(self, w, tvar="t"):
        self.w = w
        self.n = w.rank
        self.tvar = tvar
        t = RatFunc.gen(tvar)
        a = w.min_exp
        # F = z^-a (W - t), coefficient of z^k is c_{k+a} (minus t at k = -a)
        f = [RatFunc.const(w.terms().get(k + a, 0), tvar) for k in range(self.n + 1)]
        f[-a] = f[-a] - t
        self.f = f
        lead = f[-1]
        zero = RatFunc.const(0, tvar)
        one = RatFunc.const(1, tvar)
        rows = [[zero] * self.n for _ in range(self.n)]
        for j in range(self.n - 1):
            rows[j + 1][j] = one
        for i in range(self.n):
            rows[i][self.n - 1] = -f[i] / lead
        self.Z = Matrix(rows)
        self._zinv = None
        self._wprime_inv = None

    def zero(self):
        return [RatFunc.const(0, self.tvar)] * self.n

    def unit(self):
        return [RatFunc.const(1 if i == 0 else 0, self.tvar) for i in range(self.n)]

    def z_power(self, k):
        """Class of z^k (k may be negative)."""
        m = self.Z if k >= 0 else self.z_inverse()
        vec = self.unit()
        for _ in range(abs(k)):
            vec = _matvec(m, vec)
        return vec

    def z_inverse(self):
        if self._zinv is None:
            self._zinv = inverse(self.Z)
        return self._zinv

    def mult_matrix(self, elem):
        """Matrix of multiplication by ``elem``."""
        cols = []
        vec = elem
        for _ in range(self.n):
            cols.append(vec)
            vec = _matvec(self.Z, vec)
        return Matrix([[cols[j][i] for j in range(self.n)] for i in range(self.n)])

    def mul(self, f, g):
        return _matvec(self.mult_matrix(f), g)

    def laurent_class(self, terms):
        """Class of sum c_k z^k with constant coefficients."""
        acc = self.zero()
        for k, c in terms.items():
            acc = [x + c * y for x, y in zip(acc, self.z_power(k))]
        return acc

    def wprime_inverse(self):
        """Class of 1/W'."""
        if self._wprime_inv is None:
            mw = self.mult_matrix(self.laurent_class(self.w.derivative_terms()))
            if det(mw).is_zero():
                raise DegenerateDiscriminant("W' is a zero divisor on every fibre")
            rhs = Matrix([[x] for x in self.unit()])
            sol = solve(mw, rhs)
            self._wprime_inv = [sol[i, 0] for i in range(self.n)]
        return self._wprime_inv

    def nabla_laurent(self, terms):
        """nabla of the class of a t-independent Laurent polynomial: [f'/W']."""
        fprime = {k - 1: k * c for k, c in terms.items() if k}
        return self.mul(self.laurent_class(fprime), self.wprime_inverse())

    def connection_matrix(self):
        cols = [self.nabla_laurent({j: 1}) for j in range(self.n)]
        return Matrix([[cols[j][i] for j in range(self.n)] for i in range(self.n)])

    def nabla(self, elem, a=None):
        """nabla of a general element sum f_j(t) z^j."""
        a = a or self.connection_matrix()
        av = _matvec(a, elem)
        return [f.derivative() + x for f, x in zip(elem, av)]


def _matvec(m, v):
    return [sum((m[i, j] * v[j] for j in range(m.ncols)), v[0] * 0) for i in range(m.nrows)]


def gm_connection(w, tvar="t"):
    """Gauss-Manin connection d/dt + A in the basis 1, z, ..., z^(n-1)."""
    return RationalConnection(tvar, FiberAlgebra(w, tvar).connection_matrix())


def discriminant_in_t(w, tvar="t"):
    """Resultant of z^-a (W - t) and its z-derivative, as a polynomial in t."""
    alg = FiberAlgebra(w, tvar)
    f = alg.f
    n = alg.n
    fz = [f[k + 1] * (k + 1) for k in range(n)]
    size = 2 * n - 1
    zero = RatFunc.const(0, tvar)
    rows = []
    for i in range(n - 1):
        row = [zero] * size
        for k in range(n + 1):
            row[i + k] = f[n - k]
        rows.append(row)
    for i in range(n):
        row = [zero] * size
        for k in range(n):
            row[i + k] = fz[n - 1 - k]
        rows.append(row)
    if size == 1:
        return fz[0].num
    res = det(Matrix(rows))
    if not res.is_poly():
        raise ArithmeticError("resultant is not a polynomial")
    return res.num * (1 / res.den.lead)


@dataclass(frozen=True)
class SingularityData:
    point: object  # Fraction, INFINITY, or an irreducible Poly
    pole_order: int
    residue_charpoly: Poly = None
    exponents: tuple = ()
    irrational_exponents: tuple = ()
    residue_trace: Fraction = None
    saturated: bool = False
    error: str = None

    def monodromy_eigenvalues(self):
        return sorted({monodromy_label(a) for a in self.exponents})

    def to_json(self):
        if self.point is INFINITY:
            point = "infinity"
        elif isinstance(self.point, Poly):
            point = {"irreducible_factor": poly_to_json(self.point)}
        else:
            point = frac_str(self.point)
        out = {"point": point, "pole_order": self.pole_order}
        if self.residue_charpoly is not None:
            out["residue_charpoly"] = poly_to_json(self.residue_charpoly)
            out["residue_eigenvalues"] = [frac_str(a) for a in self._residue_roots()]
            out["monodromy_exponents"] = [f"{frac_str(a)} mod 1" for a in self.exponents]
            out["monodromy_eigenvalues"] = self.monodromy_eigenvalues()
        if self.residue_trace is not None:
            out["residue_trace"] = frac_str(self.residue_trace)
        if self.saturated:
            out["saturated"] = True
        if self.error:
            out["error"] = self.error
        return out

    def _residue_roots(self):
        roots, _ = roots_with_multiplicity(self.residue_charpoly)
        return [r for r, m in roots for _ in range(m)]


@dataclass(frozen=True)
class GMReport:
    superpotential: LaurentPoly
    rank: int
    connection: RationalConnection
    discriminant: Poly
    critical_values: tuple
    singularities: tuple
    infinity: SingularityData
    regular_everywhere: bool
    notes: tuple = field(default=())

    def residue_trace_sum(self):
        total = sum((s.residue_trace for s in self.singularities if s.residue_trace is not None), Fraction(0))
        return total + (self.infinity.residue_trace or 0)

    def to_json(self):
        return {
            "superpotential": self.superpotential.to_json(),
            "rank": self.rank,
            "connection": self.connection.to_json(),
            "discriminant": poly_to_json(self.discriminant),
            "critical_values": [frac_str(c) if not isinstance(c, Poly) else {"irreducible_factor": poly_to_json(c)}
                                for c in self.critical_values],
            "singularities": [s.to_json() for s in self.singularities],
            "infinity": self.infinity.to_json(),
            "regular_everywhere": self.regular_everywhere,
            "residue_trace_sum": frac_str(self.residue_trace_sum()),
        }


def _residue_sum_over_factor(h, f):
    """Sum of residues of the rational function h at the roots of irreducible f (simple poles)."""
    g = h.den // f
    # residue at a simple root rho: num(rho) / (f'(rho) g(rho))
    denom = (f.derivative() * g) % f
    _, s, _ = denom.xgcd(f)
    elem = (h.num * s) % f
    # trace of multiplication by elem on Q[x]/f
    n = f.degree
    total = Fraction(0)
    basis_elem = Poly.const(1, f.var)
    for i in range(n):
        total += ((elem * basis_elem) % f).coefficient(i)
        basis_elem = basis_elem * Poly.gen(f.var)
    return total


def _local_data(conn, point, order=10):
    if point is INFINITY:
        series = change_chart(conn, conn.var + "_inf").expand(order)
    else:
        series = local_expansion(conn, point, order)
    val = matrix_valuation(series)
    pole = 0 if val == INFINITY else max(0, -val)
    saturated = False
    if pole > 1:
        try:
            _, series = _saturate(series, conn.rank)
            saturated = True
        except Exception as exc:  # report and move on
            return SingularityData(point, pole, error=f"PoleReductionUnsupported: {exc}")
    res = series_coefficient_matrix(series, -1)
    cp = charpoly(res)
    roots, irr = roots_with_multiplicity(cp)
    exps = tuple(sorted(lam % 1 for lam, m in roots for _ in range(m)))
    irr_exps = tuple(f for f, m in irr for _ in range(m))
    return SingularityData(point, pole, cp, exps, irr_exps, res.trace(), saturated)


def singularity_report(w, tvar="t", order=10):
    conn = gm_connection(w, tvar)
    disc = discriminant_in_t(w, tvar)
    crit = []
    sings = []
    notes = []
    for fac, _ in (factor_over_rationals(disc) if disc.degree > 0 else []):
        if fac.degree == 1:
            sigma = -fac.coefficient(0)
            crit.append(sigma)
            sings.append(_local_data(conn, sigma, order))
        else:
            crit.append(fac)
            tr = conn.matrix.trace()
            tr_sum = _residue_sum_over_factor(tr, fac.with_var(tvar)) if (tr.den % fac.with_var(tvar)).is_zero() \
                else Fraction(0)
            sings.append(SingularityData(fac, _pole_order_at_factor(conn, fac), residue_trace=tr_sum))
            notes.append(f"irrational critical values {fac}: residues live in an extension field")
    inf = _local_data(conn, INFINITY, order)
    regular = all(s.pole_order <= 1 for s in sings) and inf.pole_order <= 1
    for s in sings + [inf]:
        if s.error:
            notes.append(s.error)
    return GMReport(w, w.rank, conn, disc, tuple(crit), tuple(sings), inf, regular, tuple(notes))


def _pole_order_at_factor(conn, fac):
    fac = fac.with_var(conn.var)
    worst = 0
    for f in conn.matrix.entries():
        k = 0
        d = f.den
        while not d.is_zero() and d.degree >= fac.degree and (d % fac).is_zero():
            d = d // fac
            k += 1
        worst = max(worst, k)
    return worst


def require_simple_poles(report):
    """Raise PoleReductionUnsupported if some singularity stayed irregular-looking."""
    for s in list(report.singularities) + [report.infinity]:
        if s.error:
            raise PoleReductionUnsupported(s.error)
