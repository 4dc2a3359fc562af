"""Formal connections d/dx + A in one variable.

A connection is stored through its matrix A (so that nabla = d + A), either
exactly over Q(x) (``RationalConnection``) or as a matrix of truncated
Laurent series at x = 0.  Gauge transformations act by
A -> G^-1 A G + G^-1 G'.

Conventions used throughout:

* For a pole of order two, A = x^-2 A_{-2} + x^-1 A_{-1} + ...  The numbers
  lambda reported for an exponential-type decomposition are the eigenvalues
  of -A_{-2}, i.e. the operator is written d - x^-2 lambda + x^-1 R + ...
* A residue eigenvalue alpha contributes exp(-2 pi i alpha) to the formal
  monodromy; alpha is only ever stored as a rational number mod 1.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    InsufficientPrecision,
    NonSemisimpleLeading,
    NonSplitSpectrum,
    NotQuadraticPole,
    OddDegree,
    Uncertified,
)
from .exactalg import (
    INFINITY,
    JordanData,
    Matrix,
    RatFunc,
    TruncSeries,
    charpoly,
    frac_str,
    generalized_eigenspace,
    inverse,
    jordan_data_rational,
    matrix_min_order,
    matrix_valuation,
    poly_to_json,
    ratfunc_from_json,
    ratfunc_to_json,
    roots_with_multiplicity,
    series_coefficient_matrix,
    series_from_coefficients,
    series_matrix_derivative,
    series_matrix_inverse,
    solve,
    to_frac,
)

CHART_PARTNER = {"q": "Q", "Q": "q", "t": "s", "s": "t"}


@dataclass(frozen=True)
class RationalConnection:
    """nabla = d/d(var) + matrix, with entries in Q(var)."""

    var: str
    matrix: Matrix

    def __post_init__(self):
        if not self.matrix.is_square():
            raise ValueError("connection matrix must be square")
        rows = [[_as_ratfunc(x, self.var) for x in r] for r in self.matrix.rows]
        object.__setattr__(self, "matrix", Matrix(rows))

    @classmethod
    def from_rows(cls, var, rows):
        return cls(var, Matrix(rows))

    @classmethod
    def zero(cls, var, rank):
        return cls(var, Matrix.zeros(rank, zero=RatFunc.const(0, var)))

    @property
    def rank(self):
        return self.matrix.nrows

    def expand(self, order, center=0):
        """Matrix of Laurent expansions at ``center``, exact below x^order."""
        return self.matrix.map(lambda f: f.laurent(center, order, self.var))

    def pole_order(self, center=0):
        vals = [f.valuation_at(center) for f in self.matrix.entries() if not f.is_zero()]
        return max(0, -min(vals)) if vals else 0

    def singular_points(self):
        """Distinct finite poles, as the monic denominators' irreducible factors."""
        from .exactalg import factor_over_rationals
        seen = {}
        for f in self.matrix.entries():
            for fac, _ in factor_over_rationals(f.den):
                seen[tuple(fac.coeffs)] = fac
        return list(seen.values())

    def __eq__(self, other):
        if not isinstance(other, RationalConnection):
            return NotImplemented
        return self.var == other.var and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.var, self.matrix))

    def to_json(self):
        return {"var": self.var, "matrix": [[ratfunc_to_json(f) for f in r] for r in self.matrix.rows]}

    @classmethod
    def from_json(cls, data):
        var = data.get("var", "q")
        return cls(var, Matrix([[ratfunc_from_json(x, var) for x in r] for r in data["matrix"]]))


def _as_ratfunc(x, var):
    if isinstance(x, RatFunc):
        return x.with_var(var) if x.var != var else x
    return RatFunc.const(to_frac(x), var)


@dataclass(frozen=True)
class GaugeSeries:
    """Invertible matrix of truncated Laurent series (a formal gauge transformation)."""

    matrix: Matrix

    @classmethod
    def identity(cls, n, order, var):
        one = TruncSeries([1], 0, order, var)
        zero = TruncSeries.zero(order, var)
        return cls(Matrix.identity(n, one, zero))

    @classmethod
    def constant(cls, m, order, var):
        return cls(m.map(lambda c: TruncSeries([c], 0, order, var)))

    @property
    def order(self):
        return matrix_min_order(self.matrix)

    @property
    def var(self):
        return self.matrix[0, 0].var

    def inverse(self):
        return GaugeSeries(series_matrix_inverse(self.matrix))

    def __mul__(self, other):
        return GaugeSeries(self.matrix * other.matrix)

    def to_json(self):
        from .exactalg import series_to_json
        return [[series_to_json(s) for s in r] for r in self.matrix.rows]


@dataclass(frozen=True)
class GradingVector:
    degrees: tuple

    def __post_init__(self):
        if any(d % 2 for d in self.degrees):
            raise OddDegree(f"grading degrees must be even, got {self.degrees}")


# ---------------------------------------------------------- basic operations


def _series_matrix(conn, order):
    """Series matrix and variable for either kind of input."""
    if isinstance(conn, RationalConnection):
        return conn.expand(order), conn.var
    if isinstance(conn, Matrix):
        return conn, conn[0, 0].var
    raise TypeError(f"not a connection: {conn!r}")


def apply_gauge(conn, g, order):
    """G^-1 A G + G^-1 G', truncated at x^order (or lower if less is certified)."""
    gm = g.matrix if isinstance(g, GaugeSeries) else g
    if matrix_min_order(gm) < order:
        raise InsufficientPrecision(f"gauge certified to {matrix_min_order(gm)} < {order}")
    ginv = series_matrix_inverse(gm)
    gval = min(matrix_valuation(gm), 0)
    ival = min(matrix_valuation(ginv), 0)
    slack = -gval - ival
    if isinstance(conn, RationalConnection):
        a = conn.expand(order + slack + 2)
    else:
        a = conn
    out = ginv * (a * gm) + ginv * series_matrix_derivative(gm)
    top = min(order, matrix_min_order(out))
    return out.map(lambda s: s.truncate(top))


def change_chart(conn, new_variable=None):
    """Rewrite the connection in the coordinate 1/x: A~(y) = -y^-2 A(1/y)."""
    new = new_variable or CHART_PARTNER.get(conn.var, conn.var + "'")
    minus_y2 = RatFunc.monomial(-2, -1, new)
    return RationalConnection(new, conn.matrix.map(lambda f: minus_y2 * f.reciprocal_substitution(new)))


def grading_gauge(conn, gr):
    """Conjugate by diag(x^(delta/2)): x^(Gr/2) A x^(-Gr/2) - (Gr/2) x^-1."""
    if not isinstance(gr, GradingVector):
        gr = GradingVector(tuple(gr))
    if len(gr.degrees) != conn.rank:
        raise ValueError("grading vector length differs from the rank")
    half = [d // 2 for d in gr.degrees]
    v = conn.var
    rows = []
    for i in range(conn.rank):
        row = []
        for j in range(conn.rank):
            f = conn.matrix[i, j] * RatFunc.monomial(half[i] - half[j], 1, v)
            if i == j:
                f = f - RatFunc.monomial(-1, half[i], v)
            row.append(f)
        rows.append(row)
    return RationalConnection(v, Matrix(rows))


def dualize(conn, pullback=False):
    """The dual connection d - A^T; with ``pullback`` also substitute x -> -x."""
    m = conn.matrix.T.map(lambda f: -f)
    if pullback:
        x = RatFunc.gen(conn.var)
        m = m.map(lambda f: -RatFunc(f.num(-x.num), f.den(-x.num), var=conn.var))
    return RationalConnection(conn.var, m)


def local_expansion(conn, center, order):
    """Series matrix of the connection in the local coordinate at ``center``.

    For a finite center c the coordinate is y = x - c (so d/dy = d/dx).
    At infinity the chart y = 1/x is used.
    """
    if center is INFINITY or center == INFINITY:
        return change_chart(conn, conn.var + "_inf").expand(order)
    shifted = conn.matrix.map(lambda f: f.translate(to_frac(center)))
    return shifted.map(lambda f: f.laurent(0, order, conn.var))


# ---------------------------------------------------------------- reporting


@dataclass(frozen=True)
class ExpTypeBlock:
    """Data of one summand exp(lambda/x) (x) (regular singular part)."""

    lam: Fraction
    multiplicity: int
    residue: Matrix
    residue_charpoly: object
    exponents: tuple
    irrational_exponents: tuple = ()
    jordan: JordanData = None
    resonant: bool = False
    leading_semisimple: bool = True
    normalized: bool = True
    split_residue_charpoly: object = None

    def to_json(self):
        out = {
            "lambda": frac_str(self.lam),
            "multiplicity": self.multiplicity,
            "residue_charpoly": poly_to_json(self.residue_charpoly),
            "monodromy_exponents": [f"{frac_str(a)} mod 1" for a in self.exponents],
            "monodromy_eigenvalues": [monodromy_label(a) for a in self.exponents],
            "resonant": self.resonant,
            "leading_semisimple": self.leading_semisimple,
        }
        if self.irrational_exponents:
            out["irrational_exponents"] = [poly_to_json(f) for f in self.irrational_exponents]
        if self.jordan is not None:
            out["jordan"] = self.jordan.to_json()
        if not self.leading_semisimple:
            out["normalized"] = self.normalized
            out["split_residue_charpoly"] = poly_to_json(self.split_residue_charpoly)
        return out


@dataclass(frozen=True)
class ExpTypeReport:
    var: str
    pole_order: int
    blocks: tuple
    certified: bool = True
    normal_gauge: GaugeSeries = field(default=None, compare=False)

    @property
    def rank(self):
        return sum(b.multiplicity for b in self.blocks)

    @property
    def lambdas(self):
        return [(b.lam, b.multiplicity) for b in self.blocks]

    @property
    def residue_blocks(self):
        return {b.lam: b.residue_charpoly for b in self.blocks}

    @property
    def monodromy_exponents(self):
        return {b.lam: tuple(sorted(b.exponents)) for b in self.blocks}

    @property
    def jordan(self):
        return {b.lam: b.jordan for b in self.blocks if b.jordan is not None}

    def classification(self):
        if self.pole_order == 0:
            return "nonsingular"
        if self.pole_order == 1:
            return "regular singular"
        if all(b.lam == 0 for b in self.blocks):
            return "regular singular after reduction"
        return "unramified exponential type"

    def invariants(self):
        """Gauge-invariant summary: lambda multiset, residue char polys, exponents."""
        return tuple((b.lam, b.multiplicity, tuple(b.residue_charpoly.coeffs), tuple(sorted(b.exponents)))
                     for b in self.blocks)

    def to_json(self):
        return {
            "var": self.var,
            "pole_order": self.pole_order,
            "classification": self.classification(),
            "certified": self.certified,
            "blocks": [b.to_json() for b in self.blocks],
        }


def monodromy_label(alpha):
    """Human label for exp(-2 pi i alpha)."""
    alpha = to_frac(alpha) % 1
    if alpha == 0:
        return "1"
    if alpha == Fraction(1, 2):
        return "-1"
    return f"exp(-2*pi*i*{frac_str(alpha)})"


# --------------------------------------------------------------- splitting


def _sylvester(a, b, rhs):
    """Solve X b - a X = rhs for X (a: m x m, b: n x n, rhs: m x n)."""
    m, n = rhs.shape
    size = m * n
    rows = []
    for i in range(m):
        for j in range(n):
            row = [Fraction(0)] * size
            for k in range(n):
                row[i * n + k] += b[k, j]
            for k in range(m):
                row[k * n + j] -= a[i, k]
            rows.append(row)
    vec = Matrix([[rhs[i, j]] for i in range(m) for j in range(n)])
    sol = solve(Matrix(rows), vec)
    return Matrix([[sol[i * n + j, 0] for j in range(n)] for i in range(m)])


def _block_of(m, idx_i, idx_j):
    return m.submatrix(idx_i, idx_j)


def _split_recursion(coeffs, blocks):
    """Block-diagonalize x^-2 sum_k coeffs[k] x^k.

    ``coeffs[0]`` must be block-diagonal with blocks of disjoint spectra.
    Returns gauge coefficients G_k (G_0 = I) and block-diagonal B_k with
    G B = A G + x^2 G' coefficientwise; the block-diagonal part of each G_k
    is zero.
    """
    n = coeffs[0].nrows
    ident = Matrix.identity(n)
    a0 = coeffs[0]
    owner = [None] * n
    for b, idx in enumerate(blocks):
        for i in idx:
            owner[i] = b
    gs, bs = [ident], [a0]
    for k in range(1, len(coeffs)):
        r = coeffs[k]
        for i in range(1, k):
            r = r + coeffs[k - i] * gs[i] - gs[i] * bs[k - i]
        r = r + gs[k - 1] * (k - 1)
        bk = Matrix.from_fn(n, n, lambda i, j: r[i, j] if owner[i] == owner[j] else Fraction(0))
        gk = [[Fraction(0)] * n for _ in range(n)]
        for bi, idx_i in enumerate(blocks):
            for bj, idx_j in enumerate(blocks):
                if bi == bj:
                    continue
                x = _sylvester(_block_of(a0, idx_i, idx_i), _block_of(a0, idx_j, idx_j),
                               _block_of(r, idx_i, idx_j))
                for p, i in enumerate(idx_i):
                    for q, j in enumerate(idx_j):
                        gk[i][j] = x[p, q]
        gs.append(Matrix(gk))
        bs.append(bk)
    return gs, bs


def _lattice_basis(y, n):
    """Q[[x]]-basis of the column span of y (n x m Laurent matrix of full rank n).

    Column elimination always pivots on an entry of least valuation, so
    every multiplier used is integral.
    """
    cols = [list(y.column(j)) for j in range(y.ncols)]
    basis = []
    free_rows = list(range(n))
    for _ in range(n):
        best = None
        for ci, col in enumerate(cols):
            for r in free_rows:
                s = col[r]
                if not s.is_zero() and (best is None or s.valuation < best[2]):
                    best = (ci, r, s.valuation)
        if best is None:
            raise InsufficientPrecision("lattice generators degenerate to their certified order")
        ci, r, _ = best
        piv = cols.pop(ci)
        inv = piv[r].inverse()
        for col in cols:
            if not col[r].is_zero():
                f = col[r] * inv
                for k in range(n):
                    col[k] = col[k] - f * piv[k]
        basis.append(piv)
        free_rows.remove(r)
    return Matrix([[basis[j][i] for j in range(n)] for i in range(n)])


def _gauge_transform(a, g):
    ginv = series_matrix_inverse(g)
    return ginv * (a * g) + ginv * series_matrix_derivative(g)


def _saturate(c, n):
    """Reduce a regular singular block to a simple pole by lattice saturation.

    ``c`` is the block's series matrix after removing the scalar x^-2 term.
    Returns (E, C_E) with C_E the matrix in basis E, or raises
    NonSemisimpleLeading when n saturation steps do not stabilise.
    """
    var = c[0, 0].var
    order = matrix_min_order(c)
    e = Matrix.identity(n, TruncSeries([1], 0, order + 2, var), TruncSeries.zero(order + 2, var))
    cur = c
    for _ in range(n):
        if matrix_valuation(cur) >= -1:
            return e, cur
        x_cur = cur.map(lambda s: s.shift(1))
        gens = Matrix.identity(n, TruncSeries([1], 0, order + 2, var),
                               TruncSeries.zero(order + 2, var)).hstack(x_cur)
        h = _lattice_basis(gens, n)
        e = e * h
        cur = _gauge_transform(c, e)
    if matrix_valuation(cur) >= -1:
        return e, cur
    raise NonSemisimpleLeading(
        "leading term is not semisimple and the block is not regular after removing it "
        "(slopes are reported by the Newton polygon instead)")


def _pure_gauge(c, r, order):
    """I + x(...) gauge taking x^-1 r + (holomorphic) to exactly x^-1 r.

    Returns None when some shift k + ad(r) is singular (resonance).
    """
    n = r.nrows
    var = c[0, 0].var
    hol = [series_coefficient_matrix(c, k) for k in range(0, min(order, matrix_min_order(c)))]
    gs = [Matrix.identity(n)]
    for k in range(1, len(hol) + 1):
        rhs = None
        for j in range(k):
            term = hol[k - 1 - j] * gs[j]
            rhs = term if rhs is None else rhs + term
        rhs = -rhs
        # solve k g + r g - g r = rhs, i.e. g (-r) - (r + k) g = -rhs ... written as Sylvester
        try:
            g = _sylvester(r + Matrix.identity(n) * k, r, -rhs)
        except ZeroDivisionError:
            return None
        gs.append(g)
    top = len(gs)
    return series_from_coefficients(gs, 0, top, var)


def _exponent_data(r):
    cp = charpoly(r)
    roots, irr = roots_with_multiplicity(cp)
    exps = []
    for lam, m in roots:
        exps += [lam % 1] * m
    rational = [lam for lam, _ in roots]
    resonant = any((a - b).denominator == 1 and a != b for a in rational for b in rational)
    return cp, tuple(sorted(exps)), tuple(f for f, m in irr for _ in range(m)), resonant, roots


def _normalize_classes(r, target_trace):
    """Raise eigenvalue classes of r by integers so its trace meets target_trace.

    Classes are raised by one, largest eigenvalue first, while the remaining
    deficit allows.  Returns (basis change Q, shifts per column) or None.
    """
    _, _, irr, resonant, roots = _exponent_data(r)
    deficit = target_trace - r.trace()
    if deficit == 0:
        return Matrix.identity(r.nrows), [0] * r.nrows
    if irr or resonant or deficit.denominator != 1 or deficit < 0:
        return None
    classes = [[lam, m, 0] for lam, m in roots]
    d = int(deficit)
    while d > 0:
        moved = False
        for cls in sorted(classes, key=lambda c: -(c[0] + c[2])):
            if cls[1] <= d:
                cls[2] += 1
                d -= cls[1]
                moved = True
                break
        if not moved:
            return None
    cols, shifts = [], []
    for lam, m, k in classes:
        basis = generalized_eigenspace(r, lam, m)
        cols += basis
        shifts += [k] * len(basis)
    q = Matrix([[cols[j][i] for j in range(len(cols))] for i in range(r.nrows)])
    return q, shifts


def split_exponential_type(conn, order=12):
    """Formal decomposition at x = 0 of a connection with pole order <= 2.

    Returns (report, gauge) where ``gauge`` = P (I + O(x)) block-diagonalizes
    the connection along the generalized eigenspaces of the leading term
    (P is the constant eigenbasis change), and ``report.normal_gauge``, when
    every block could be normalized, takes the connection to
    d - x^-2 diag(lambda) + x^-1 diag(R_lambda).
    """
    n = conn.rank if isinstance(conn, RationalConnection) else conn.nrows
    work = order + 2 + 3 * n
    a, var = _series_matrix(conn, work)
    avail = matrix_min_order(a)
    val = matrix_valuation(a)
    if val < -2:
        raise NotQuadraticPole(f"pole of order {-val} > 2; use the Newton polygon instead")
    pole_order = 0 if val == INFINITY else max(0, -val)
    top = min(work, avail)
    count = top + 2
    if count < 2:
        raise InsufficientPrecision("connection known to too low an order")
    coeffs = [series_coefficient_matrix(a, k - 2) for k in range(count)]

    lead = coeffs[0]
    roots, irr = roots_with_multiplicity(charpoly(lead))
    if irr:
        raise NonSplitSpectrum(f"leading term has irrational eigenvalues {[str(f) for f in irr]}")
    roots = sorted(roots, key=lambda rm: -rm[0])  # ascending lambda = -mu
    cols, blocks = [], []
    for mu, m in roots:
        basis = generalized_eigenspace(lead, mu, m)
        blocks.append(list(range(len(cols), len(cols) + len(basis))))
        cols += basis
    p = Matrix([[cols[j][i] for j in range(n)] for i in range(n)])
    pinv = inverse(p)
    coeffs = [pinv * c * p for c in coeffs]
    gs, bs = _split_recursion(coeffs, blocks)

    split_order = min(order, count - 1)
    g_split = p * series_from_coefficients(gs[: split_order], 0, split_order, var)

    out_blocks = []
    block_gauges = []
    normal_ok = True
    for (mu, m), idx in zip(roots, blocks):
        lam = -mu
        bser = series_from_coefficients([_block_of(b, idx, idx) for b in bs], -2, count - 2, var)
        b0 = _block_of(bs[0], idx, idx)
        b1 = _block_of(bs[1], idx, idx)
        split_cp = charpoly(b1)
        nil = b0 - Matrix.identity(len(idx)) * mu
        scalar = Matrix.identity(len(idx)) * mu
        c = bser - scalar.map(lambda x: TruncSeries([x], -2, count - 2, var))
        if nil.is_zero():
            e = None
            csat = c
            semisimple = True
        else:
            e, csat = _saturate(c, len(idx))
            semisimple = False
        r = series_coefficient_matrix(csat, -1)
        normalized = True
        gpure = None
        _, _, _, resonant, _ = _exponent_data(r)
        if not resonant:
            gpure = _pure_gauge(csat, r, split_order + 1)
            if gpure is None:
                resonant = True
        if not semisimple:
            norm = None if resonant else _normalize_classes(r, b1.trace())
            if norm is None:
                normalized = False
            else:
                qm, shifts = norm
                r = inverse(qm) * r * qm + Matrix.diag([Fraction(k) for k in shifts])
        cp, exps, irr_exps, resonant2, _ = _exponent_data(r)
        resonant = resonant or resonant2
        jd = None if resonant else jordan_data_rational(r)
        out_blocks.append(ExpTypeBlock(lam, len(idx), r, cp, exps, irr_exps, jd, resonant,
                                       semisimple, normalized, split_cp))
        if gpure is None or not normalized:
            normal_ok = False
            continue
        gb = gpure
        if e is not None:
            gb = e * gpure
            qm, shifts = norm
            shear = Matrix.diag([TruncSeries([1], k, split_order + 1 + k, var) for k in shifts],
                                TruncSeries.zero(split_order + 1, var))
            gb = gb * qm.map(lambda x: TruncSeries([x], 0, split_order + 1, var)) * shear
        block_gauges.append(gb)

    normal_gauge = None
    if normal_ok:
        zero = TruncSeries.zero(split_order + 1, var)
        total = Matrix.block_diag(block_gauges, zero)
        normal_gauge = GaugeSeries(g_split * total)
    report = ExpTypeReport(var, pole_order, tuple(out_blocks), True, normal_gauge)
    return report, GaugeSeries(g_split)


def regularized_monodromy_eigenvalues(report):
    """Per-lambda exponent multisets (eigenvalues exp(-2 pi i alpha)) and the largest Jordan block."""
    if not report.certified:
        raise Uncertified("report is not certified")
    per_lambda = [(b.lam, tuple(sorted(b.exponents))) for b in report.blocks]
    sizes = [b.jordan.max_block() for b in report.blocks if b.jordan is not None]
    return per_lambda, (max(sizes) if sizes else None)


def block_diagonal_to_order(m, blocks):
    """True when every entry outside the diagonal blocks vanishes to its certified order."""
    owner = {}
    for b, idx in enumerate(blocks):
        for i in idx:
            owner[i] = b
    return all(m[i, j].is_zero() for i in range(m.nrows) for j in range(m.ncols) if owner[i] != owner[j])


def split_blocks(report):
    """Index lists of the blocks in the order used by the splitting gauge."""
    out, start = [], 0
    for b in report.blocks:
        out.append(list(range(start, start + b.multiplicity)))
        start += b.multiplicity
    return out
