"""Exact arithmetic over the rationals.

Polynomials, rational functions, truncated Laurent series and small dense
matrices over any of these, together with the bits of linear algebra the
rest of the package needs (ranks, kernels, characteristic polynomials,
factorization over Q, Jordan data).

Every value here is immutable.  Truncated series carry a ``order``: the
coefficients of all exponents strictly below it are known exactly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import (
    FactorizationInconclusive,
    InsufficientPrecision,
    VariableMismatch,
    ZeroDenominator,
)

INFINITY = math.inf

_NUMBER = (int, Fraction)


def to_frac(x):
    """Coerce an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational number")


def frac_str(x):
    x = to_frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def is_zero(x):
    if isinstance(x, _NUMBER):
        return x == 0
    return x.is_zero()


def _merge_var(a, b):
    if a == b:
        return a
    raise VariableMismatch(f"variables {a!r} and {b!r} differ")


# ---------------------------------------------------------------- polynomials


class Poly:
    """Dense univariate polynomial with rational coefficients, low degree first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs=(), var="x"):
        cs = [to_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    @classmethod
    def const(cls, c, var="x"):
        return cls([c], var)

    @classmethod
    def gen(cls, var="x"):
        return cls([0, 1], var)

    @classmethod
    def monomial(cls, k, c=1, var="x"):
        return cls([0] * k + [c], var)

    @classmethod
    def from_roots(cls, roots, var="x"):
        return reduce(lambda p, r: p * cls([-to_frac(r), 1], var), roots, cls.const(1, var))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self):
        return not self.coeffs

    def is_const(self):
        return len(self.coeffs) <= 1

    def coefficient(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def valuation(self):
        """Lowest exponent with nonzero coefficient (infinity for 0)."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return INFINITY

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.var != self.var and not (self.is_const() or other.is_const()):
                _merge_var(self.var, other.var)
            return other
        if isinstance(other, _NUMBER):
            return Poly([other], self.var)
        return NotImplemented

    def _var_with(self, other):
        return other.var if self.is_const() and not other.is_const() else self.var

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coefficient(k) + other.coefficient(k) for k in range(n)],
                    self._var_with(other))

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly((), self._var_with(other))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out, self._var_with(other))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDenominator("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return Poly((), self.var), self
        quo = [Fraction(0)] * dq
        inv = 1 / other.lead
        for k in range(dq - 1, -1, -1):
            c = rem[k + other.degree] * inv
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return Poly(quo, self.var), Poly(rem[: other.degree], self.var)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, _NUMBER):
            return self.coeffs == Poly([other]).coeffs
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs and (self.var == other.var or self.is_const())
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        if not self.coeffs:
            return Fraction(0)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self):
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def monic(self):
        if self.is_zero():
            return self
        return self * (1 / self.lead)

    def gcd(self, other):
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other):
        """Return (g, s, t) with s*self + t*other = g, g monic."""
        r0, r1 = self, self._coerce(other)
        s0, s1 = Poly.const(1, self.var), Poly((), self.var)
        t0, t1 = Poly((), self.var), Poly.const(1, self.var)
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = 1 / r0.lead
        return r0 * inv, s0 * inv, t0 * inv

    def compose(self, inner):
        """self(inner(x)); inner may be any ring element."""
        return self(inner)

    def shift(self, c):
        """The polynomial x -> self(x + c)."""
        return self(Poly([to_frac(c), 1], self.var))

    def reverse(self, n=None):
        """x^n * self(1/x) as a polynomial (n defaults to the degree)."""
        n = self.degree if n is None else n
        if n < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        return Poly(([Fraction(0)] * (n - self.degree) + list(reversed(self.coeffs)))
                    if self.coeffs else (), self.var)

    def with_var(self, var):
        return Poly(self.coeffs, var)

    def __repr__(self):
        return f"Poly({[frac_str(c) for c in self.coeffs]}, {self.var!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{frac_str(mag)}*{mono}"
            else:
                body = frac_str(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


# --------------------------------------------------------- rational functions


class RatFunc:
    """Quotient of polynomials, kept reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, var=None):
        if not isinstance(num, Poly):
            num = Poly([num], var or "x")
        if den is None:
            den = Poly.const(1, num.var)
        elif not isinstance(den, Poly):
            den = Poly([den], num.var)
        if den.is_zero():
            raise ZeroDenominator("rational function with zero denominator")
        v = var or (num.var if not num.is_const() else den.var)
        if num.is_zero():
            num, den = Poly((), v), Poly.const(1, v)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num, den = num // g, den // g
            lc = den.lead
            num, den = num * (1 / lc), den * (1 / lc)
        self.num = num.with_var(v)
        self.den = den.with_var(v)

    @classmethod
    def const(cls, c, var="x"):
        return cls(Poly([c], var), var=var)

    @classmethod
    def gen(cls, var="x"):
        return cls(Poly.gen(var), var=var)

    @classmethod
    def monomial(cls, k, c=1, var="x"):
        """c * x**k for any integer k."""
        if k >= 0:
            return cls(Poly.monomial(k, c, var), var=var)
        return cls(Poly.const(c, var), Poly.monomial(-k, 1, var), var=var)

    @property
    def var(self):
        return self.num.var

    def is_zero(self):
        return self.num.is_zero()

    def is_poly(self):
        return self.den.degree == 0

    def is_const(self):
        return self.num.is_const() and self.den.is_const()

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.var != self.var and not (self.is_const() or other.is_const()):
                _merge_var(self.var, other.var)
            return other
        if isinstance(other, Poly):
            return RatFunc(other, var=self.var if other.is_const() else other.var)
        if isinstance(other, _NUMBER):
            return RatFunc.const(other, self.var)
        return NotImplemented

    def _var_with(self, other):
        return other.var if self.is_const() and not other.is_const() else self.var

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        v = self._var_with(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den, var=v)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den, var=v)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, var=self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den, var=self._var_with(other))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDenominator("inverse of the zero rational function")
        return RatFunc(self.den, self.num, var=self.var)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n, var=self.var)

    def __eq__(self, other):
        if isinstance(other, (_NUMBER + (Poly,))):
            other = self._coerce(other)
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        d = self.den(x)
        if is_zero(d):
            raise ZeroDenominator(f"pole at {x}")
        return self.num(x) / d if isinstance(d, _NUMBER) else self.num(x) * (1 / d)

    def derivative(self):
        return RatFunc(self.num.derivative() * self.den - self.num * self.den.derivative(),
                       self.den * self.den, var=self.var)

    def with_var(self, var):
        return RatFunc(self.num.with_var(var), self.den.with_var(var), var=var)

    def reciprocal_substitution(self, new_var=None):
        """f(1/y) as a rational function of y."""
        v = new_var or self.var
        n, d = self.num.degree, self.den.degree
        if self.is_zero():
            return RatFunc.const(0, v)
        num = self.num.reverse().with_var(v)
        den = self.den.reverse().with_var(v)
        shift = d - n
        if shift >= 0:
            num = num * Poly.monomial(shift, 1, v)
        else:
            den = den * Poly.monomial(-shift, 1, v)
        return RatFunc(num, den, var=v)

    def translate(self, c):
        """f(y + c) as a rational function of y."""
        return RatFunc(self.num.shift(c), self.den.shift(c), var=self.var)

    def valuation_at(self, center=0):
        """Order of vanishing at ``center`` (negative for poles)."""
        if self.is_zero():
            return INFINITY
        if center is INFINITY or center == INFINITY:
            return self.den.degree - self.num.degree
        f = self.translate(center) if center != 0 else self
        return f.num.valuation() - f.den.valuation()

    def laurent(self, center=0, order=8, var=None):
        """Laurent expansion in the local coordinate at ``center``.

        The local coordinate is x - center, or 1/x when ``center`` is
        INFINITY.  Coefficients are exact for exponents below ``order``.
        """
        if center is INFINITY or center == INFINITY:
            f = self.reciprocal_substitution()
        elif center != 0:
            f = self.translate(to_frac(center))
        else:
            f = self
        v = var or self.var
        if f.is_zero():
            return TruncSeries.zero(order, v)
        vn, vd = f.num.valuation(), f.den.valuation()
        val = vn - vd
        num = f.num.coeffs[vn:]
        den = f.den.coeffs[vd:]
        n = order - val
        if n <= 0:
            return TruncSeries.zero(order, v)
        inv0 = 1 / den[0]
        out = []
        for k in range(n):
            acc = num[k] if k < len(num) else Fraction(0)
            for j in range(1, min(k, len(den) - 1) + 1):
                acc -= den[j] * out[k - j]
            out.append(acc * inv0)
        return TruncSeries(out, val, order, v)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        n = str(self.num)
        d = str(self.den)
        if len(self.num.coeffs) > 1 and sum(1 for c in self.num.coeffs if c) > 1:
            n = f"({n})"
        if sum(1 for c in self.den.coeffs if c) > 1:
            d = f"({d})"
        return f"{n}/{d}"


# ------------------------------------------------------------ truncated series


class TruncSeries:
    """Truncated Laurent series sum_{k >= valuation} c_k x^k + O(x^order)."""

    __slots__ = ("var", "valuation", "coeffs", "order")

    def __init__(self, coeffs=(), valuation=0, order=None, var="x"):
        cs = [to_frac(c) for c in coeffs]
        if order is None:
            order = valuation + len(cs)
        cs = cs[: max(order - valuation, 0)]
        cs += [Fraction(0)] * (order - valuation - len(cs))
        k = 0
        while k < len(cs) and cs[k] == 0:
            k += 1
        if k == len(cs):
            valuation, cs = order, []
        else:
            valuation, cs = valuation + k, cs[k:]
        self.var = var
        self.valuation = valuation
        self.coeffs = tuple(cs)
        self.order = order

    @classmethod
    def zero(cls, order, var="x"):
        return cls((), order, order, var)

    @classmethod
    def from_poly(cls, p, order, var=None):
        if isinstance(p, _NUMBER):
            return cls([p], 0, order, var or "x")
        return cls(p.coeffs, 0, order, var or p.var)

    @classmethod
    def monomial(cls, k, c, order, var="x"):
        return cls([c], k, order, var)

    def is_zero(self):
        return not self.coeffs

    def coefficient(self, k):
        if k >= self.order:
            raise InsufficientPrecision(f"coefficient {k} beyond certified order {self.order}")
        if k < self.valuation:
            return Fraction(0)
        return self.coeffs[k - self.valuation]

    def truncate(self, order):
        if order > self.order:
            raise InsufficientPrecision(f"cannot raise order {self.order} to {order}")
        return TruncSeries(self.coeffs, self.valuation, order, self.var)

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            if other.var != self.var:
                _merge_var(self.var, other.var)
            return other
        if isinstance(other, _NUMBER):
            return TruncSeries([other], 0, max(self.order, 1), self.var)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, _NUMBER):
            if self.order <= 0:
                return self
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        order = min(self.order, other.order)
        lo = min(self.valuation, other.valuation, order)
        return TruncSeries([self.coefficient(k) + other.coefficient(k) for k in range(lo, order)],
                           lo, order, self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.valuation, self.order, self.var)

    def __sub__(self, other):
        if isinstance(other, _NUMBER):
            return self + (-other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _NUMBER):
            c = to_frac(other)
            if c == 0:
                return TruncSeries.zero(self.order, self.var)
            return TruncSeries([c * a for a in self.coeffs], self.valuation, self.order, self.var)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        order = min(self.valuation + other.order, other.valuation + self.order)
        lo = self.valuation + other.valuation
        n = order - lo
        if n <= 0:
            return TruncSeries.zero(order, self.var)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * n
        for i in range(min(len(a), n)):
            ai = a[i]
            if ai:
                for j in range(min(len(b), n - i)):
                    out[i + j] += ai * b[j]
        return TruncSeries(out, lo, order, self.var)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by x**k."""
        return TruncSeries(self.coeffs, self.valuation + k, self.order + k, self.var)

    def inverse(self):
        if self.is_zero():
            raise InsufficientPrecision("series vanishes to its certified order")
        v = self.valuation
        order = self.order - 2 * v
        n = self.order - v
        a = self.coeffs
        inv0 = 1 / a[0]
        out = []
        for k in range(n):
            acc = Fraction(1) if k == 0 else Fraction(0)
            for j in range(1, min(k, len(a) - 1) + 1):
                acc -= a[j] * out[k - j]
            out.append(acc * inv0)
        return TruncSeries(out, -v, order, self.var)

    def __truediv__(self, other):
        if isinstance(other, _NUMBER):
            return self * (1 / to_frac(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return TruncSeries([1], 0, max(self.order - self.valuation, 1), self.var)
        result = self
        for _ in range(n - 1):
            result = result * self
        return result

    def derivative(self):
        return TruncSeries([(self.valuation + k) * c for k, c in enumerate(self.coeffs)],
                           self.valuation - 1, self.order - 1, self.var)

    def __eq__(self, other):
        if isinstance(other, _NUMBER):
            return (self - other).is_zero()
        if isinstance(other, TruncSeries):
            return (self.order == other.order and self.valuation == other.valuation
                    and self.coeffs == other.coeffs)
        return NotImplemented

    def __hash__(self):
        return hash((self.valuation, self.coeffs, self.order))

    def agrees_with(self, other):
        """Equal on every exponent that both operands certify."""
        return (self - other).is_zero()

    def terms(self):
        return [(self.valuation + k, c) for k, c in enumerate(self.coeffs) if c]

    def __repr__(self):
        return f"TruncSeries({self})"

    def __str__(self):
        parts = []
        for k, c in self.terms():
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if mono and abs(c) == 1:
                body = ("-" if c < 0 else "") + mono
            elif mono:
                body = f"{frac_str(c)}*{mono}"
            else:
                body = frac_str(c)
            parts.append(body)
        parts.append(f"O({self.var}^{self.order})")
        return " + ".join(parts).replace("+ -", "- ")


# -------------------------------------------------------------------- matrices


class Matrix:
    """Dense matrix over a commutative ring of exact elements."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
        self.rows = rows

    @classmethod
    def from_fn(cls, n, m, fn):
        return cls([[fn(i, j) for j in range(m)] for i in range(n)])

    @classmethod
    def identity(cls, n, one=Fraction(1), zero=Fraction(0)):
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n, m=None, zero=Fraction(0)):
        return cls([[zero] * (m or n) for _ in range(n)])

    @classmethod
    def diag(cls, entries, zero=Fraction(0)):
        entries = list(entries)
        n = len(entries)
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def rational(cls, rows):
        return cls([[to_frac(x) for x in r] for r in rows])

    @classmethod
    def block_diag(cls, blocks, zero=Fraction(0)):
        n = sum(b.nrows for b in blocks)
        out = [[zero] * n for _ in range(n)]
        off = 0
        for b in blocks:
            for i in range(b.nrows):
                for j in range(b.ncols):
                    out[off + i][off + j] = b.rows[i][j]
            off += b.nrows
        return cls(out)

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0])

    @property
    def shape(self):
        return self.nrows, self.ncols

    def is_square(self):
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        return [x for r in self.rows for x in r]

    def column(self, j):
        return [r[j] for r in self.rows]

    def map(self, fn):
        return Matrix([[fn(x) for x in r] for r in self.rows])

    def submatrix(self, rows, cols):
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    @property
    def T(self):
        return Matrix(list(zip(*self.rows)))

    def trace(self):
        return reduce(lambda a, b: a + b, (self.rows[i][i] for i in range(self.nrows)))

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch in matrix sum")
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch in matrix difference")
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch in matrix product")
            cols = list(zip(*other.rows))
            return Matrix([[_dot(r, c) for c in cols] for r in self.rows])
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        return self.map(lambda x: other * x)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self):
        return all(is_zero(x) for x in self.entries())

    def hstack(self, other):
        return Matrix([r + s for r, s in zip(self.rows, other.rows)])

    def vstack(self, other):
        return Matrix(self.rows + other.rows)

    def __repr__(self):
        return "Matrix([" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "])"


def _dot(r, c):
    return reduce(lambda a, b: a + b, (x * y for x, y in zip(r, c)))


# ------------------------------------------------- linear algebra over a field


def _gauss_jordan(rows, ncols):
    """Reduced row echelon form in place; returns pivot columns."""
    pivots = []
    r = 0
    n = len(rows)
    for c in range(ncols):
        p = next((i for i in range(r, n) if not is_zero(rows[i][c])), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and not is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return pivots


def rref(m):
    rows = [list(r) for r in m.rows]
    pivots = _gauss_jordan(rows, m.ncols)
    return Matrix(rows), pivots


def rank(m):
    return len(rref(m)[1])


def nullspace(m):
    """Basis of the right kernel, as a list of column lists."""
    red, pivots = rref(m)
    free = [j for j in range(m.ncols) if j not in pivots]
    zero = Fraction(0)
    basis = []
    for f in free:
        v = [zero] * m.ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red.rows[i][f]
        basis.append(v)
    return basis


def solve(m, b):
    """Solve m x = b for a square invertible m; b is a Matrix."""
    aug = [list(r) + list(s) for r, s in zip(m.rows, b.rows)]
    pivots = _gauss_jordan(aug, m.ncols)
    if len(pivots) < m.ncols:
        raise ZeroDivisionError("singular linear system")
    return Matrix([r[m.ncols:] for r in aug[: m.ncols]])


def inverse(m):
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    return solve(m, Matrix.identity(m.nrows))


def det(m):
    """Determinant by elimination over a field."""
    rows = [list(r) for r in m.rows]
    n = len(rows)
    result = None
    sign = 1
    for c in range(n):
        p = next((i for i in range(c, n) if not is_zero(rows[i][c])), None)
        if p is None:
            return rows[0][0] - rows[0][0]
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            sign = -sign
        piv = rows[c][c]
        result = piv if result is None else result * piv
        inv = 1 / piv
        for i in range(c + 1, n):
            if not is_zero(rows[i][c]):
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return result if sign == 1 else -result


def charpoly(m, var="x"):
    """Characteristic polynomial det(x I - m) of a rational matrix (Faddeev-LeVerrier)."""
    n = m.nrows
    ident = Matrix.identity(n)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = Matrix.zeros(n)
    for k in range(1, n + 1):
        mk = m * mk + ident * coeffs[n - k + 1]
        coeffs[n - k] = -(m * mk).trace() / k
    return Poly(coeffs, var)


def series_matrix_inverse(m):
    """Inverse of a square matrix of truncated Laurent series.

    Elimination pivots on the entry of least valuation, which keeps the
    loss of certified precision as small as the matrix allows.
    """
    n = m.nrows
    var = next((x.var for x in m.entries() if isinstance(x, TruncSeries)), "x")
    big = max((x.order for x in m.entries() if isinstance(x, TruncSeries)), default=1)
    one = TruncSeries([1], 0, big, var)
    zero = TruncSeries.zero(big, var)
    rows = [[_as_series(x, big, var) for x in r] + [one if i == j else zero for j in range(n)]
            for i, r in enumerate(m.rows)]
    for c in range(n):
        cands = [i for i in range(c, n) if not rows[i][c].is_zero()]
        if not cands:
            raise InsufficientPrecision("matrix is singular to its certified order")
        p = min(cands, key=lambda i: (rows[i][c].valuation, -rows[i][c].order))
        rows[c], rows[p] = rows[p], rows[c]
        inv = rows[c][c].inverse()
        rows[c] = [x * inv for x in rows[c]]
        for i in range(n):
            if i != c and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return Matrix([r[n:] for r in rows])


def _as_series(x, order, var):
    if isinstance(x, TruncSeries):
        return x
    return TruncSeries([x], 0, order, var)


def series_matrix_derivative(m):
    return m.map(lambda x: x.derivative() if isinstance(x, TruncSeries) else Fraction(0))


def matrix_min_order(m):
    return min((x.order for x in m.entries() if isinstance(x, TruncSeries)), default=INFINITY)


def matrix_valuation(m):
    return min((x.valuation for x in m.entries() if isinstance(x, TruncSeries) and not x.is_zero()),
               default=INFINITY)


def series_coefficient_matrix(m, k):
    """The constant matrix of x^k coefficients."""
    return m.map(lambda x: x.coefficient(k) if isinstance(x, TruncSeries) else
                 (to_frac(x) if k == 0 else Fraction(0)))


def series_from_coefficients(mats, valuation, order, var):
    """Assemble sum_k mats[k] x^(valuation + k) + O(x^order)."""
    n, m = mats[0].shape
    return Matrix([[TruncSeries([mats[k].rows[i][j] for k in range(len(mats))], valuation, order, var)
                    for j in range(m)] for i in range(n)])


# ------------------------------------------------------- factorization over Q


def _integer_content_form(p):
    """Scale p to a primitive integer polynomial."""
    den = reduce(lambda a, c: a * c.denominator // math.gcd(a, c.denominator), p.coeffs, 1)
    ints = [int(c * den) for c in p.coeffs]
    g = reduce(math.gcd, ints, 0) or 1
    return [c // g for c in ints]


def _divisors(n):
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p):
    """Distinct rational roots of p, in increasing order."""
    if p.is_zero():
        raise ValueError("zero polynomial has every root")
    roots = set()
    v = p.valuation()
    if v > 0:
        roots.add(Fraction(0))
        p = Poly(p.coeffs[v:], p.var)
    if p.degree < 1:
        return sorted(roots)
    ints = _integer_content_form(p)
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in roots and p(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def squarefree_decomposition(p):
    """Yun's algorithm: list of (squarefree monic factor, multiplicity)."""
    p = p.monic()
    out = []
    dp = p.derivative()
    a = p.gcd(dp)
    b = p // a
    c = dp // a - b.derivative()
    i = 1
    while b.degree > 0:
        d = b.gcd(c)
        if d.degree > 0:
            out.append((d.monic(), i))
        b = b // d
        c = c // d - b.derivative()
        i += 1
    return out


def _irreducible_split(p):
    """Split a squarefree monic polynomial without rational roots into irreducibles."""
    if p.degree <= 3:
        return [p]
    try:
        import sympy
    except ImportError as exc:  # pragma: no cover
        raise FactorizationInconclusive(f"cannot certify irreducibility of {p}") from exc
    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x ** k for k, c in enumerate(p.coeffs))
    _, facs = sympy.factor_list(expr, x, domain="QQ")
    out = []
    for f, mult in facs:
        coeffs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
                  for c in reversed(sympy.Poly(f, x).all_coeffs())]
        out.extend([Poly(coeffs, p.var).monic()] * mult)
    return out


def factor_over_rationals(p):
    """Monic irreducible factors over Q with multiplicities, linear factors first."""
    if p.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if p.degree < 1:
        return []
    linear, other = [], []
    for part, mult in squarefree_decomposition(p):
        rest = part
        for r in rational_roots(part):
            lin = Poly([-r, 1], p.var)
            linear.append((lin, mult))
            rest = rest // lin
        if rest.degree > 0:
            for f in _irreducible_split(rest.monic()):
                other.append((f, mult))
    linear.sort(key=lambda fm: -fm[0].coeffs[0])
    other.sort(key=lambda fm: (fm[0].degree, [float(c) for c in fm[0].coeffs]))
    return linear + other


def roots_with_multiplicity(p):
    """(rational roots with multiplicity, irreducible nonlinear factors with multiplicity)."""
    roots, irr = [], []
    for f, m in factor_over_rationals(p):
        if f.degree == 1:
            roots.append((-f.coeffs[0], m))
        else:
            irr.append((f, m))
    return roots, irr


# ------------------------------------------------------------------ Jordan data


@dataclass(frozen=True)
class JordanData:
    """Jordan block sizes per rational eigenvalue; irrational part by factor."""

    blocks: tuple
    irreducible_part: tuple = ()

    def dimension(self):
        return (sum(sum(s) for _, s in self.blocks)
                + sum(f.degree * m for f, m in self.irreducible_part))

    def sizes(self, eigenvalue):
        for lam, s in self.blocks:
            if lam == eigenvalue:
                return s
        return ()

    def eigenvalues(self):
        return [lam for lam, _ in self.blocks]

    def max_block(self):
        return max((max(s) for _, s in self.blocks if s), default=0)

    def rank_of_power(self, eigenvalue, k):
        """rank (m - eigenvalue I)^k implied by the block data."""
        total = self.dimension()
        drop = sum(min(size, k) for size in self.sizes(eigenvalue))
        return total - drop

    def to_json(self):
        return {
            "blocks": [{"eigenvalue": frac_str(lam), "sizes": list(s)} for lam, s in self.blocks],
            "irreducible_part": [{"factor": [frac_str(c) for c in f.coeffs], "multiplicity": m}
                                 for f, m in self.irreducible_part],
        }


def matrix_power(m, k):
    result = Matrix.identity(m.nrows)
    for _ in range(k):
        result = result * m
    return result


def jordan_data_rational(m):
    if not m.is_square():
        raise ValueError("Jordan data of a non-square matrix")
    n = m.nrows
    roots, irr = roots_with_multiplicity(charpoly(m))
    blocks = []
    ident = Matrix.identity(n)
    for lam, mult in roots:
        shifted = m - ident * lam
        ranks = [n]
        power = ident
        for _ in range(mult):
            power = power * shifted
            ranks.append(rank(power))
        # number of blocks of size >= k is ranks[k-1] - ranks[k]
        at_least = [ranks[k - 1] - ranks[k] for k in range(1, mult + 1)] + [0]
        sizes = []
        for k in range(1, mult + 1):
            sizes += [k] * (at_least[k - 1] - at_least[k])
        blocks.append((lam, tuple(sorted(sizes, reverse=True))))
    return JordanData(tuple(blocks), tuple(irr))


def generalized_eigenspace(m, lam, mult):
    """Basis (list of columns) of ker (m - lam I)^mult."""
    shifted = m - Matrix.identity(m.nrows) * lam
    return nullspace(matrix_power(shifted, mult))


# ---------------------------------------------------------------- serialization


def poly_to_json(p):
    return [frac_str(c) for c in p.coeffs]


def poly_from_json(data, var="x"):
    return Poly([to_frac(c) for c in data], var)


def ratfunc_to_json(f):
    if f.is_poly() and f.num.is_const():
        return frac_str(f.num.coefficient(0))
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def ratfunc_from_json(data, var="x"):
    if isinstance(data, (int, str)):
        return RatFunc.const(to_frac(data), var)
    if isinstance(data, dict) and "num" in data:
        return RatFunc(poly_from_json(data["num"], var), poly_from_json(data.get("den", ["1"]), var),
                       var=var)
    raise ValueError(f"not a rational function: {data!r}")


def series_to_json(s):
    return {"valuation": s.valuation, "coeffs": [frac_str(c) for c in s.coeffs], "order": s.order}
