"""Exact arithmetic in Z[s, 1/s] (s = q^{1/2}) and in the cyclotomic field Q(zeta_r)."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Rational = Union[int, Fraction]


def _as_rational(x) -> Rational:
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, str):
        f = Fraction(x)
        return f.numerator if f.denominator == 1 else f
    raise TypeError(f"not a rational: {x!r}")


def _norm_rational(x: Rational) -> Rational:
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


# --------------------------------------------------------------------------
# Laurent polynomials in s = q^{1/2}
# --------------------------------------------------------------------------


class LaurentHalf:
    """Laurent polynomial in s = q^{1/2} with integer (or rational) coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, coeffs: Mapping[int, Rational] | Rational | None = None):
        if coeffs is None:
            terms: dict[int, Rational] = {}
        elif isinstance(coeffs, (int, Fraction)):
            terms = {0: _norm_rational(coeffs)} if coeffs else {}
        elif isinstance(coeffs, LaurentHalf):
            terms = dict(coeffs._terms)
        else:
            terms = {}
            for e, c in coeffs.items():
                c = _norm_rational(_as_rational(c))
                if c:
                    terms[int(e)] = c
        self._terms = terms
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[int, Rational]) -> "LaurentHalf":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def s(cls, e: int = 1) -> "LaurentHalf":
        return cls._raw({e: 1})

    @classmethod
    def q(cls, e: int = 1) -> "LaurentHalf":
        return cls._raw({2 * e: 1})

    @property
    def coeffs(self) -> dict[int, Rational]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def min_degree(self) -> int:
        return min(self._terms) if self._terms else 0

    def max_degree(self) -> int:
        return max(self._terms) if self._terms else 0

    @staticmethod
    def _coerce(other) -> "LaurentHalf | None":
        if isinstance(other, LaurentHalf):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentHalf(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for e, c in o._terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = _norm_rational(v)
            else:
                terms.pop(e, None)
        return LaurentHalf._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentHalf._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict[int, Rational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = e1 + e2
                terms[e] = terms.get(e, 0) + c1 * c2
        return LaurentHalf._raw({e: _norm_rational(c) for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self._terms.items()
            return LaurentHalf._raw({e * n: _norm_rational(Fraction(1) / Fraction(c) ** (-n))})
        result = LaurentHalf(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def bar(self) -> "LaurentHalf":
        """The involution s -> 1/s."""
        return LaurentHalf._raw({-e: c for e, c in self._terms.items()})

    def derivative(self) -> "LaurentHalf":
        """d/ds."""
        return LaurentHalf._raw({e - 1: _norm_rational(e * c) for e, c in self._terms.items() if e})

    def exact_div(self, other: "LaurentHalf") -> "LaurentHalf":
        """Quotient self/other; raises ArithmeticError unless the division is exact."""
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if not self:
            return LaurentHalf()
        lo_d = other.min_degree()
        d = [Fraction(0)] * (other.max_degree() - lo_d + 1)
        for e, c in other._terms.items():
            d[e - lo_d] = Fraction(c)
        lo_n = self.min_degree()
        num = [Fraction(0)] * (self.max_degree() - lo_n + 1)
        for e, c in self._terms.items():
            num[e - lo_n] = Fraction(c)
        if len(num) < len(d):
            raise ArithmeticError("non-exact Laurent division")
        quot = [Fraction(0)] * (len(num) - len(d) + 1)
        lead = d[-1]
        for i in range(len(quot) - 1, -1, -1):
            c = num[i + len(d) - 1] / lead
            quot[i] = c
            if c:
                for j, dj in enumerate(d):
                    num[i + j] -= c * dj
        if any(num):
            raise ArithmeticError("non-exact Laurent division")
        shift = lo_n - lo_d
        return LaurentHalf({i + shift: c for i, c in enumerate(quot) if c})

    def __call__(self, s: complex) -> complex:
        return sum(complex(c) * s ** e for e, c in self._terms.items())

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            mono = "" if e == 0 else ("s" if e == 1 else f"s^{e}")
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ")


ONE = LaurentHalf(1)
ZERO = LaurentHalf()
S = LaurentHalf.s()
Q = LaurentHalf.q()


@lru_cache(maxsize=None)
def qint(n: int) -> LaurentHalf:
    """Balanced quantum integer [n] = (q^n - q^-n)/(q - q^-1)."""
    if n < 0:
        return -qint(-n)
    return LaurentHalf._raw({2 * (n - 1 - 2 * j): 1 for j in range(n)})


@lru_cache(maxsize=None)
def qfact(n: int) -> LaurentHalf:
    if n < 0:
        raise ValueError("qfact needs n >= 0")
    return ONE if n == 0 else qfact(n - 1) * qint(n)


@lru_cache(maxsize=None)
def qbinom(m: int, n: int) -> LaurentHalf:
    """Quantum binomial [m][m-1]...[m-n+1]/[n]!, exact for every integer m."""
    if n < 0:
        raise ValueError("qbinom needs n >= 0")
    num = ONE
    for k in range(n):
        num = num * qint(m - k)
    return num.exact_div(qfact(n))


# --------------------------------------------------------------------------
# Cyclotomic fields
# --------------------------------------------------------------------------


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division of integer polynomials (low-to-high) by a monic divisor."""
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(r: int) -> tuple[int, ...]:
    """Coefficients (low to high) of Phi_r, by recursive division of x^r - 1."""
    poly = [-1] + [0] * (r - 1) + [1]
    for d in range(1, r):
        if r % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


class CyclotomicField:
    """Precomputed reduction data for Q(zeta_r)."""

    _cache: dict[int, "CyclotomicField"] = {}

    def __new__(cls, r: int):
        if r in cls._cache:
            return cls._cache[r]
        if not isinstance(r, int) or r < 3 or r % 2 == 0:
            raise ValueError(f"level r must be an odd integer >= 3, got {r!r}")
        self = super().__new__(cls)
        self.r = r
        self.phi = cyclotomic_polynomial(r)
        self.degree = d = len(self.phi) - 1
        # reduction of x^k for k < 2d - 1 (products of two reduced elements)
        table = []
        for k in range(2 * d - 1):
            vec = [0] * d
            if k < d:
                vec[k] = 1
            else:
                prev = table[k - 1]
                # x^k = x * x^{k-1}; shift and reduce the top coefficient
                top = prev[d - 1]
                vec = [0] + prev[: d - 1]
                for j in range(d):
                    vec[j] -= top * self.phi[j]
            table.append(vec)
        self._table = tuple(tuple(v) for v in table)
        pw = []
        for k in range(r):
            vec = [0] * d
            if k < d:
                vec[k] = 1
            else:
                prev = pw[k - 1]
                top = prev[d - 1]
                vec = [0] + list(prev[: d - 1])
                for j in range(d):
                    vec[j] -= top * self.phi[j]
            pw.append(tuple(vec))
        self._powers = tuple(pw)
        self.units = tuple(k for k in range(1, r) if math.gcd(k, r) == 1)
        cls._cache[r] = self
        return self

    def __reduce__(self):
        return (CyclotomicField, (self.r,))

    @property
    def zero(self) -> "CycNum":
        return CycNum._make(self, (0,) * self.degree, 1)

    @property
    def one(self) -> "CycNum":
        return CycNum._make(self, self._powers[0], 1)

    def zeta(self, k: int = 1) -> "CycNum":
        return CycNum._make(self, self._powers[k % self.r], 1)

    def from_int(self, n: Rational) -> "CycNum":
        n = Fraction(n)
        v = [0] * self.degree
        v[0] = n.numerator
        return CycNum._make(self, tuple(v), n.denominator)

    def __repr__(self):
        return f"CyclotomicField({self.r})"


def _gcd_vec(num: tuple[int, ...], den: int) -> int:
    g = den
    for c in num:
        if c:
            g = math.gcd(g, c)
            if g == 1:
                return 1
    return g


class CycNum:
    """Element of Q(zeta_r), stored as an integer numerator vector over a positive denominator."""

    __slots__ = ("field", "_num", "_den", "_hash")

    def __init__(self, r: int | CyclotomicField, coeffs: Iterable = ()):
        field = r if isinstance(r, CyclotomicField) else CyclotomicField(r)
        vals = [Fraction(_as_rational(c)) for c in coeffs]
        if len(vals) > field.degree:
            raise ValueError("too many coefficients; reduce modulo Phi_r first")
        vals += [Fraction(0)] * (field.degree - len(vals))
        den = 1
        for v in vals:
            den = den * v.denominator // math.gcd(den, v.denominator)
        num = tuple(int(v * den) for v in vals)
        self.field = field
        self._num, self._den = num, den
        self._normalize()
        self._hash = None

    @classmethod
    def _make(cls, field: CyclotomicField, num: tuple[int, ...], den: int) -> "CycNum":
        obj = cls.__new__(cls)
        obj.field = field
        obj._num = num
        obj._den = den
        obj._hash = None
        if den != 1:
            obj._normalize()
        return obj

    def _normalize(self):
        if self._den < 0:
            self._num = tuple(-c for c in self._num)
            self._den = -self._den
        g = _gcd_vec(self._num, self._den)
        if g != 1:
            self._num = tuple(c // g for c in self._num)
            self._den //= g
        if not any(self._num):
            self._den = 1

    @property
    def r(self) -> int:
        return self.field.r

    @property
    def coeffs(self) -> tuple[Rational, ...]:
        return tuple(_norm_rational(Fraction(c, self._den)) for c in self._num)

    @property
    def denominator(self) -> int:
        return self._den

    def is_integral(self) -> bool:
        """Membership in Z[zeta_r] (power basis is a Z-basis of the ring of integers)."""
        return self._den == 1

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self):
        return any(self._num)

    def _coerce(self, other) -> "CycNum | None":
        if isinstance(other, CycNum):
            if other.field is not self.field:
                raise ValueError("mixed cyclotomic levels")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_int(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._den == o._den:
            return CycNum._make(self.field, tuple(a + b for a, b in zip(self._num, o._num)), self._den)
        d1, d2 = self._den, o._den
        return CycNum._make(self.field, tuple(a * d2 + b * d1 for a, b in zip(self._num, o._num)), d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return CycNum._make(self.field, tuple(-a for a in self._num), self._den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._den == o._den:
            return CycNum._make(self.field, tuple(a - b for a, b in zip(self._num, o._num)), self._den)
        d1, d2 = self._den, o._den
        return CycNum._make(self.field, tuple(a * d2 - b * d1 for a, b in zip(self._num, o._num)), d1 * d2)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycNum._make(self.field, tuple(a * other for a in self._num), self._den)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._num, o._num
        d = self.field.degree
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:d]
        table = self.field._table
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                row = table[k]
                for j in range(d):
                    if row[j]:
                        out[j] += c * row[j]
        return CycNum._make(self.field, tuple(out), self._den * o._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * invert(o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * invert(self)

    def __pow__(self, n: int):
        if n < 0:
            return invert(self) ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return other.field is self.field and self._den == other._den and self._num == other._num
        if isinstance(other, (int, Fraction)):
            return self == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.r, self._num, self._den))
        return self._hash

    def conj(self) -> "CycNum":
        """Complex conjugation zeta -> zeta^{-1}."""
        field = self.field
        out = [0] * field.degree
        pw = field._powers
        for j, c in enumerate(self._num):
            if c:
                vec = pw[(-j) % field.r]
                for i in range(field.degree):
                    if vec[i]:
                        out[i] += c * vec[i]
        return CycNum._make(field, tuple(out), self._den)

    def galois(self, k: int) -> "CycNum":
        """The automorphism zeta -> zeta^k."""
        field = self.field
        if math.gcd(k, field.r) != 1:
            raise ValueError("k must be coprime to r")
        out = [0] * field.degree
        for j, c in enumerate(self._num):
            if c:
                vec = field._powers[(j * k) % field.r]
                for i in range(field.degree):
                    out[i] += c * vec[i]
        return CycNum._make(field, tuple(out), self._den)

    def embed(self, k: int = 1) -> complex:
        return embed(self, k)

    def to_json(self) -> dict:
        return {"r": self.r, "coeffs": [str(Fraction(c, self._den)) for c in self._num]}

    @classmethod
    def from_json(cls, data: Mapping) -> "CycNum":
        return cls(int(data["r"]), data["coeffs"])

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if j == 0 else f"{c}*z^{j}")
        return f"CycNum(r={self.r}: {' + '.join(terms) or '0'})"


def _fpoly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _fpoly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return q, _fpoly_trim(a[: len(b) - 1])


def _fpoly_sub_mul(a: list[Fraction], q: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = list(a) + [Fraction(0)] * max(0, len(q) + len(b) - 1 - len(a))
    for i, qi in enumerate(q):
        if qi:
            for j, bj in enumerate(b):
                out[i + j] -= qi * bj
    return _fpoly_trim(out)


def invert(x: CycNum) -> CycNum:
    """Multiplicative inverse via the extended Euclidean algorithm against Phi_r."""
    if not x:
        raise ZeroDivisionError("inverse of zero in Q(zeta_r)")
    field = x.field
    a = _fpoly_trim([Fraction(c) for c in x._num])
    b = [Fraction(c) for c in field.phi]
    # invariant: s0 * x_num = a (mod phi), s1 * x_num = b (mod phi)
    s0, s1 = [Fraction(1)], []
    while len(a) != 1:
        q, rem = _fpoly_divmod(b, a)
        s_new = _fpoly_sub_mul(s1, q, s0)
        b, a = a, rem
        s1, s0 = s0, s_new
        if not a:
            raise ArithmeticError("element not invertible")
    c = a[0]
    # deg s0 < deg phi, so no further reduction is needed
    return CycNum(field, [v / c * x._den for v in s0])


def embed(x: CycNum, k: int = 1) -> complex:
    """Complex value under zeta_r -> exp(2 pi i k / r)."""
    r = x.r
    if math.gcd(k, r) != 1:
        raise ValueError(f"embedding index {k} is not coprime to r={r}")
    z = cmath.exp(2j * math.pi * k / r)
    total = 0j
    for j, c in enumerate(x._num):
        if c:
            total += c * z ** j
    return total / x._den


def _specialize_uncached(x: LaurentHalf, field: CyclotomicField) -> CycNum:
    r = field.r
    den = 1
    for c in x._terms.values():
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    out = [0] * field.degree
    for e, c in x._terms.items():
        # s^e -> (-zeta)^e
        cc = int(c * den)
        if e & 1:
            cc = -cc
        vec = field._powers[e % r]
        for i in range(field.degree):
            if vec[i]:
                out[i] += cc * vec[i]
    return CycNum._make(field, tuple(out), den)


_SPEC_CACHE: dict[tuple[int, LaurentHalf], CycNum] = {}


def specialize(x: LaurentHalf | Rational, r: int | CyclotomicField) -> CycNum:
    """Ring map Z[s, 1/s] -> Q(zeta_r), s -> -zeta_r."""
    field = r if isinstance(r, CyclotomicField) else CyclotomicField(r)
    if not isinstance(x, LaurentHalf):
        return field.from_int(x)
    key = (field.r, x)
    val = _SPEC_CACHE.get(key)
    if val is None:
        val = _specialize_uncached(x, field)
        if len(_SPEC_CACHE) < 500_000:
            _SPEC_CACHE[key] = val
    return val


def s_power(e: int, r: int | CyclotomicField) -> CycNum:
    """The specialized monomial s^e = (-zeta_r)^e."""
    field = r if isinstance(r, CyclotomicField) else CyclotomicField(r)
    v = field.zeta(e)
    return -v if e & 1 else v


def conj(x: CycNum) -> CycNum:
    return x.conj()
