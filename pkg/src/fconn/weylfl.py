"""Weyl algebra, Fourier-Laplace renaming and the regular singular local model.

The local model is the module Q[t]^r + Q[d_t]^s built from maps
U: Q^r -> Q^s, V: Q^s -> Q^r and a point sigma.  Elements of the first
summand are written in the local coordinate tau = t - sigma; at sigma = 0
this is literally Q[t]^r, and for other sigma it is what makes the action
satisfy [d_t, t] = 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NegativeValuation, VariableMismatch
from .exactalg import (
    Matrix,
    Poly,
    RatFunc,
    TruncSeries,
    frac_str,
    jordan_data_rational,
    to_frac,
)
from .formalconn import RationalConnection, local_expansion, split_exponential_type


# ------------------------------------------------------------------ Weyl algebra


class WeylElement:
    """sum c_jk x^j d^k in normal order (all x to the left of all d)."""

    __slots__ = ("vars", "terms")

    def __init__(self, terms=None, vars=("q", "dq")):
        clean = {}
        for (j, k), c in (terms or {}).items():
            c = to_frac(c)
            if c:
                clean[(j, k)] = clean.get((j, k), 0) + c
        self.terms = {jk: c for jk, c in clean.items() if c}
        self.vars = tuple(vars)

    @classmethod
    def x(cls, vars=("q", "dq")):
        return cls({(1, 0): 1}, vars)

    @classmethod
    def d(cls, vars=("q", "dq")):
        return cls({(0, 1): 1}, vars)

    @classmethod
    def const(cls, c, vars=("q", "dq")):
        return cls({(0, 0): c}, vars)

    def _check(self, other):
        if isinstance(other, WeylElement):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return WeylElement.const(other, self.vars)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for jk, c in other.terms.items():
            out[jk] = out.get(jk, 0) + c
        return WeylElement(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement({jk: -c for jk, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for (a, b), c1 in self.terms.items():
            for (c, d), c2 in other.terms.items():
                # d^b x^c = sum_i C(b,i) c!/(c-i)! x^(c-i) d^(b-i)
                for i in range(min(b, c) + 1):
                    coef = c1 * c2 * math.comb(b, i) * math.perm(c, i)
                    key = (a + c - i, b + d - i)
                    out[key] = out.get(key, 0) + coef
        return WeylElement(out, self.vars)

    def __rmul__(self, other):
        return WeylElement.const(other, self.vars) * self

    def __pow__(self, n):
        result = WeylElement.const(1, self.vars)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = WeylElement.const(other, self.vars)
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    def degree(self):
        return max((j + k for j, k in self.terms), default=0)

    def order(self):
        """Order in the derivative."""
        return max((k for _, k in self.terms), default=0)

    def to_json(self):
        return {"vars": list(self.vars),
                "terms": [{"j": j, "k": k, "c": frac_str(c)} for (j, k), c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data):
        return cls({(t["j"], t["k"]): to_frac(t["c"]) for t in data["terms"]}, tuple(data["vars"]))

    def __repr__(self):
        x, d = self.vars
        if not self.terms:
            return "0"
        parts = []
        for (j, k), c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(p for p in (
                (x if j == 1 else f"{x}^{j}") if j else "",
                (d if k == 1 else f"{d}^{k}") if k else "") if p)
            parts.append(f"{frac_str(c)}*{mono}" if mono and c != 1 else (mono or frac_str(c)))
        return " + ".join(parts)


def weyl_normalize_and_multiply(a, b):
    return a * b


def fl_rename(w, target=("q", "dq")):
    """Fourier-Laplace identification t -> d_q, d_t -> -q."""
    dq = WeylElement.d(target)
    minus_q = -WeylElement.x(target)
    out = WeylElement({}, target)
    for (j, k), c in w.terms.items():
        out = out + (dq ** j) * (minus_q ** k) * c
    return out


def fl_inverse(w, target=("t", "dt")):
    """Inverse identification q -> -d_t, d_q -> t."""
    t = WeylElement.x(target)
    minus_dt = -WeylElement.d(target)
    out = WeylElement({}, target)
    for (j, k), c in w.terms.items():
        out = out + (minus_dt ** j) * (t ** k) * c
    return out


# ------------------------------------------------------------------ formal Borel


def formal_borel(series, var="s"):
    """sum a_m q^m  ->  sum m! a_m t^(-m-1), returned as a series in s = 1/t."""
    if series.valuation < 0:
        raise NegativeValuation("formal Borel transform needs a power series")
    coeffs = [math.factorial(m) * series.coefficient(m) for m in range(series.order)]
    return TruncSeries(coeffs, 1, series.order + 1, var)


def apply_weyl_to_series(w, series):
    """Apply w in (x, d_x) to a truncated series in x."""
    total = None
    for (j, k), c in w.terms.items():
        term = series
        for _ in range(k):
            term = term.derivative()
        term = term.shift(j) * c
        total = term if total is None else total + term
    return total if total is not None else series * 0


def apply_weyl_at_infinity(w, series):
    """Apply w in (t, d_t) to a truncated series in s = 1/t (d_t = -s^2 d_s)."""
    total = None
    for (j, k), c in w.terms.items():
        term = series
        for _ in range(k):
            term = -term.derivative().shift(2)
        term = term.shift(-j) * c
        total = term if total is None else total + term
    return total if total is not None else series * 0


def borel_check(p_q, series):
    """Compare P_q Pi with P_t Pi-hat.

    Returns (residual_q, polar_t, boundary): the residual of P_q on the input
    series, the negative-power part of P_t applied to the Borel transform
    (this vanishes when P_q Pi = 0), and the polynomial part in t, which is
    the boundary contribution of the Laplace integral.
    """
    p_t = fl_inverse(p_q)
    res_q = apply_weyl_to_series(p_q, series)
    hat = formal_borel(series)
    img = apply_weyl_at_infinity(p_t, hat)
    polar = TruncSeries([img.coefficient(k) for k in range(1, img.order)] if img.order > 1 else [],
                        1, max(img.order, 1), img.var)
    boundary = Poly([img.coefficient(-k) for k in range(0, -img.valuation + 1)], "t") \
        if img.valuation <= 0 else Poly((), "t")
    return res_q, polar, boundary


# ------------------------------------------------------------------ local model


@dataclass(frozen=True)
class LocalModel:
    """U: Q^r -> Q^s (an s x r matrix), V: Q^s -> Q^r (r x s) and sigma."""

    U: Matrix
    V: Matrix
    sigma: Fraction = Fraction(0)

    def __post_init__(self):
        if self.U.nrows != self.V.ncols or self.U.ncols != self.V.nrows:
            raise ValueError("U must be s x r and V must be r x s")
        object.__setattr__(self, "sigma", to_frac(self.sigma))

    @property
    def r(self):
        return self.U.ncols

    @property
    def s(self):
        return self.U.nrows

    @property
    def VU(self):
        return self.V * self.U

    @property
    def UV(self):
        return self.U * self.V

    def to_json(self):
        return {"U": [[frac_str(x) for x in row] for row in self.U.rows],
                "V": [[frac_str(x) for x in row] for row in self.V.rows],
                "sigma": frac_str(self.sigma)}

    @classmethod
    def from_json(cls, data):
        return cls(Matrix.rational(data["U"]), Matrix.rational(data["V"]), to_frac(data.get("sigma", 0)))


@dataclass(frozen=True)
class ModelElement:
    """(sum_m tau^m x_m, sum_n d^n y_m) with tau = t - sigma.

    ``poly_part`` holds r polynomials in tau, ``dpoly_part`` s polynomials in d_t.
    """

    poly_part: tuple
    dpoly_part: tuple

    @classmethod
    def from_coefficients(cls, xs, ys, r, s):
        """xs[m] is the vector multiplying tau^m, ys[n] the one multiplying d^n."""
        poly = tuple(Poly([xs[m][i] for m in range(len(xs))], "tau") for i in range(r))
        dpoly = tuple(Poly([ys[n][i] for n in range(len(ys))], "dt") for i in range(s))
        return cls(poly, dpoly)

    def x_coeffs(self):
        top = max((p.degree for p in self.poly_part), default=-1)
        return [[p.coefficient(m) for p in self.poly_part] for m in range(top + 1)]

    def y_coeffs(self):
        top = max((p.degree for p in self.dpoly_part), default=-1)
        return [[p.coefficient(n) for p in self.dpoly_part] for n in range(top + 1)]

    def __add__(self, other):
        return ModelElement(tuple(a + b for a, b in zip(self.poly_part, other.poly_part)),
                            tuple(a + b for a, b in zip(self.dpoly_part, other.dpoly_part)))

    def __sub__(self, other):
        return ModelElement(tuple(a - b for a, b in zip(self.poly_part, other.poly_part)),
                            tuple(a - b for a, b in zip(self.dpoly_part, other.dpoly_part)))


def _apply(m, vec):
    return [sum((m[i, j] * vec[j] for j in range(m.ncols)), Fraction(0)) for i in range(m.nrows)]


def _accumulate(store, k, vec):
    while len(store) <= k:
        store.append([Fraction(0)] * len(vec))
    store[k] = [a + b for a, b in zip(store[k], vec)]


def model_act(model, generator, elem):
    """Action of t or d_t on the local model."""
    r, s = model.r, model.s
    xs_out, ys_out = [], []
    for m, x in enumerate(elem.x_coeffs()):
        if not any(x):
            continue
        if generator == "dt":
            if m > 0:
                _accumulate(xs_out, m - 1, [m * c for c in x])
                _accumulate(xs_out, m - 1, _apply(model.VU, x))
            else:
                _accumulate(ys_out, 0, _apply(model.U, x))
        elif generator == "t":
            _accumulate(xs_out, m + 1, x)
            _accumulate(xs_out, m, [model.sigma * c for c in x])
        else:
            raise ValueError(f"unknown generator {generator!r}")
    for n, y in enumerate(elem.y_coeffs()):
        if not any(y):
            continue
        if generator == "dt":
            _accumulate(ys_out, n + 1, y)
        else:
            _accumulate(ys_out, n, [model.sigma * c for c in y])
            if n > 0:
                _accumulate(ys_out, n - 1, [-n * c for c in y])
                _accumulate(ys_out, n - 1, _apply(model.UV, y))
            else:
                _accumulate(xs_out, 0, _apply(model.V, y))
    return ModelElement.from_coefficients(xs_out or [[0] * r], ys_out or [[0] * s], r, s)


def local_model_connections(model):
    """The t-side, q-side and Q-side connections of the local model."""
    sig = model.sigma
    t = RatFunc.gen("t")
    inv = 1 / (t - sig)
    t_side = RationalConnection("t", model.VU.map(lambda c: inv * c))
    q = RatFunc.gen("q")
    uv = model.UV
    q_rows = [[(-uv[i, j]) / q + (sig if i == j else 0) for j in range(model.s)] for i in range(model.s)]
    q_side = RationalConnection("q", Matrix(q_rows))
    Q = RatFunc.gen("Q")
    Q_rows = [[uv[i, j] / Q - (sig / (Q * Q) if i == j else 0) for j in range(model.s)]
              for i in range(model.s)]
    Q_side = RationalConnection("Q", Matrix(Q_rows))
    return {"t_side": t_side, "q_side": q_side, "Q_side": Q_side}


# ----------------------------------------------------------- Flanders comparison


def _zero_defect(a, b):
    a = sorted(a, reverse=True)
    b = sorted(b, reverse=True)
    n = max(len(a), len(b))
    a += [0] * (n - len(a))
    b += [0] * (n - len(b))
    return max((abs(x - y) for x, y in zip(a, b)), default=0)


def flanders_compare(U, V):
    """Compare the Jordan data of VU and UV."""
    vu = jordan_data_rational(V * U)
    uv = jordan_data_rational(U * V)
    nz_vu = {lam: s for lam, s in vu.blocks if lam != 0}
    nz_uv = {lam: s for lam, s in uv.blocks if lam != 0}
    irr_vu = sorted((tuple(f.coeffs), m) for f, m in vu.irreducible_part)
    irr_uv = sorted((tuple(f.coeffs), m) for f, m in uv.irreducible_part)
    return {
        "nonzero_match": nz_vu == nz_uv and irr_vu == irr_uv,
        "zero_defect": _zero_defect(list(vu.sizes(0)), list(uv.sizes(0))),
        "VU": vu,
        "UV": uv,
    }


# ------------------------------------------------------- exponent comparison


def random_local_model(rng, max_size=4, lo=-3, hi=3):
    """U (s x r), V (r x s) with integer entries in [lo, hi] and an integer sigma."""
    r, s = rng.randint(1, max_size), rng.randint(1, max_size)
    u = Matrix.rational([[rng.randint(lo, hi) for _ in range(r)] for _ in range(s)])
    v = Matrix.rational([[rng.randint(lo, hi) for _ in range(s)] for _ in range(r)])
    return LocalModel(u, v, Fraction(rng.randint(lo, hi)))


def _eigen_mod_one(m):
    jd = jordan_data_rational(m)
    if jd.irreducible_part:
        return None
    return sorted(lam % 1 for lam, sizes in jd.blocks for _ in range(sum(sizes)))


def _exponents_mod_one(conn, order=6):
    rep, _ = split_exponential_type(conn, order)
    return sorted(a % 1 for b in rep.blocks for a in b.exponents)


def compare_local_model(model):
    """Jordan comparison of VU and UV, and residue exponents of both sides.

    ``exponents`` is None unless UV and VU have rational spectra; otherwise it
    records whether the Q-side exponents are the eigenvalues of UV mod 1 and
    the t-side exponents at t = sigma those of VU mod 1.
    """
    cmp = flanders_compare(model.U, model.V)
    out = {"nonzero_match": cmp["nonzero_match"], "zero_defect": cmp["zero_defect"], "exponents": None}
    uv, vu = _eigen_mod_one(model.UV), _eigen_mod_one(model.VU)
    if uv is None or vu is None:
        return out
    conns = local_model_connections(model)
    q_side = _exponents_mod_one(conns["Q_side"])
    t_side = _exponents_mod_one(local_expansion(conns["t_side"], model.sigma, 8))
    out["exponents"] = {"Q_matches_UV": q_side == uv, "t_matches_VU": t_side == vu}
    return out
