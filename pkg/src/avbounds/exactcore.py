"""Exact arithmetic kernel.

Integer polynomials, the real quadratic field Q(sqrt q), exact rational
intervals, Sturm sequences, subresultant resultants and Newton power sums.
Nothing in this module touches floating point when deciding a sign.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class InvalidInput(ValueError):
    """Raised when an operation receives input outside its contract."""


# ---------------------------------------------------------------------------
# Integer polynomials
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"([+-]?)\s*(\d*)\s*(\*?\s*x(?:\s*(?:\^|\*\*)\s*(\d+))?)?")


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, stored in ascending degree order.

    The zero polynomial has an empty coefficient tuple; otherwise the last
    coefficient is nonzero.
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    # -- construction -----------------------------------------------------
    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> IntPolynomial:
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @classmethod
    def x(cls) -> IntPolynomial:
        return cls([0, 1])

    @classmethod
    def parse(cls, text: str) -> IntPolynomial:
        """Parse strings such as ``"x^3-13x^2+54x-71"`` or ``"x**2 - 9*x + 19"``."""
        s = text.replace(" ", "").replace("−", "-")
        if not s:
            raise InvalidInput("empty polynomial string")
        terms: dict[int, int] = {}
        pos = 0
        while pos < len(s):
            m = _TERM_RE.match(s, pos)
            if m is None or m.end() == pos:
                raise InvalidInput(f"cannot parse polynomial {text!r} at offset {pos}")
            sign, digits, xpart, power = m.groups()
            if not digits and not xpart:
                raise InvalidInput(f"cannot parse polynomial {text!r} at offset {pos}")
            coef = int(digits) if digits else 1
            if sign == "-":
                coef = -coef
            deg = 0 if not xpart else (int(power) if power else 1)
            terms[deg] = terms.get(deg, 0) + coef
            pos = m.end()
        top = max(terms)
        return cls([terms.get(k, 0) for k in range(top + 1)])

    # -- basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> IntPolynomial:
        g = self.content()
        if g <= 1:
            return self
        return IntPolynomial(c // g for c in self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- ring operations ----------------------------------------------------
    def __add__(self, other: IntPolynomial) -> IntPolynomial:
        other = _as_poly(other)
        n = max(len(self), len(other))
        return IntPolynomial(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> IntPolynomial:
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: IntPolynomial) -> IntPolynomial:
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> IntPolynomial:
        return _as_poly(other) - self

    def __mul__(self, other) -> IntPolynomial:
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return IntPolynomial()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> IntPolynomial:
        result = IntPolynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, k: int) -> IntPolynomial:
        return IntPolynomial(k * c for c in self.coeffs)

    def derivative(self) -> IntPolynomial:
        return IntPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def divmod_monic(self, divisor: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
        """Exact division by a divisor with leading coefficient +-1."""
        if divisor.leading not in (1, -1):
            raise InvalidInput("divmod_monic needs a divisor with unit leading coefficient")
        rem = list(self.coeffs)
        dd = divisor.degree
        if len(rem) - 1 < dd:
            return IntPolynomial(), self
        quot = [0] * (len(rem) - dd)
        lc = divisor.leading
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k] * lc
            if c:
                quot[k - dd] = c
                for j, d in enumerate(divisor.coeffs):
                    rem[k - dd + j] -= c * d
        return IntPolynomial(quot), IntPolynomial(rem[:dd])

    def divides(self, other: IntPolynomial) -> bool:
        """True if ``self`` divides ``other`` in Z[x] (self must be monic up to sign)."""
        return other.divmod_monic(self)[1].is_zero

    def pseudo_remainder(self, divisor: IntPolynomial) -> IntPolynomial:
        """lc(divisor)^(deg self - deg divisor + 1) * self mod divisor."""
        if divisor.is_zero:
            raise InvalidInput("pseudo-division by zero polynomial")
        dd = divisor.degree
        delta = self.degree - dd
        if delta < 0:
            return self
        lc = divisor.leading
        rem = list(self.coeffs)
        e = delta + 1
        while rem and len(rem) - 1 >= dd:
            c = rem[-1]
            shift = len(rem) - 1 - dd
            rem = [lc * r for r in rem]
            for j, d in enumerate(divisor.coeffs):
                rem[shift + j] -= c * d
            while rem and rem[-1] == 0:
                rem.pop()
            e -= 1
        m = lc**e
        return IntPolynomial(m * r for r in rem)

    def taylor_shift(self, a: int) -> IntPolynomial:
        """Return p(x + a)."""
        c = list(self.coeffs)
        n = len(c)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                c[k] += a * c[k + 1]
        return IntPolynomial(c)

    def reflect(self, a: int) -> IntPolynomial:
        """Return p(a - x)."""
        c = [(-1) ** k * v for k, v in enumerate(self.coeffs)]
        return IntPolynomial(c).taylor_shift(-a)

    def monic_sign(self) -> IntPolynomial:
        return -self if self.leading < 0 else self

    # -- display ------------------------------------------------------------
    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                coef = "" if a == 1 else str(a)
                body = coef + ("x" if k == 1 else f"x^{k}")
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f"{sign}{body}"
        return out

    def __repr__(self) -> str:
        return f"IntPolynomial({str(self)!r})"


def _as_poly(v) -> IntPolynomial:
    if isinstance(v, IntPolynomial):
        return v
    if isinstance(v, int):
        return IntPolynomial([v])
    raise TypeError(f"cannot treat {type(v).__name__} as IntPolynomial")


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over Z[x], normalised to positive leading coefficient."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero:
        r = a.pseudo_remainder(b)
        a, b = b, r.primitive()
    return a.primitive().monic_sign()


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    """p / gcd(p, p'), made primitive with positive leading coefficient."""
    if p.degree <= 0:
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p.primitive().monic_sign()
    quot = _exact_quotient(p.primitive(), g)
    return quot.primitive().monic_sign()


def _exact_quotient(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Exact quotient a / b in Q[x] returned as a primitive integer polynomial."""
    rem = [Fraction(c) for c in a.coeffs]
    dd = b.degree
    quot = [Fraction(0)] * (len(rem) - dd)
    lc = b.leading
    for k in range(len(rem) - 1, dd - 1, -1):
        c = rem[k] / lc
        quot[k - dd] = c
        for j, d in enumerate(b.coeffs):
            rem[k - dd + j] -= c * d
    if any(rem[:dd]):
        raise InvalidInput("polynomial division is not exact")
    den = 1
    for c in quot:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return IntPolynomial(int(c * den) for c in quot).primitive()


# ---------------------------------------------------------------------------
# Q(sqrt q)
# ---------------------------------------------------------------------------

def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@total_ordering
@dataclass(frozen=True)
class QuadraticNumber:
    """Exact value ``a + b*sqrt(q)`` with rational a, b and positive integer q."""

    a: Fraction
    b: Fraction
    q: int

    def __init__(self, a: Rational = 0, b: Rational = 0, q: int = 1):
        if q <= 0:
            raise InvalidInput("radicand must be positive")
        a, b = Fraction(a), Fraction(b)
        if _is_square(q):
            a, b = a + b * math.isqrt(q), Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "q", q)

    def _coerce(self, other) -> QuadraticNumber:
        if isinstance(other, QuadraticNumber):
            if other.q != self.q and other.b and self.b:
                raise InvalidInput("mixed radicands")
            return other
        return QuadraticNumber(other, 0, self.q)

    def _radicand(self, other: QuadraticNumber) -> int:
        return self.q if self.b else other.q

    def __add__(self, other) -> QuadraticNumber:
        o = self._coerce(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self._radicand(o))

    __radd__ = __add__

    def __neg__(self) -> QuadraticNumber:
        return QuadraticNumber(-self.a, -self.b, self.q)

    def __sub__(self, other) -> QuadraticNumber:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuadraticNumber:
        return self._coerce(other) - self

    def __mul__(self, other) -> QuadraticNumber:
        o = self._coerce(other)
        q = self._radicand(o)
        return QuadraticNumber(self.a * o.a + self.b * o.b * q, self.a * o.b + self.b * o.a, q)

    __rmul__ = __mul__

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 q
        diff = a * a - b * b * self.q
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __eq__(self, other) -> bool:
        try:
            return (self - other).sign() == 0
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.q if self.b else 1))

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.q)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def floor(self) -> int:
        lo, _ = self.bracket(8)
        n = lo.numerator // lo.denominator
        while self >= n + 1:
            n += 1
        while self < n:
            n -= 1
        return n

    def ceil(self) -> int:
        n = self.floor()
        return n if self == n else n + 1

    def bracket(self, bits: int) -> tuple[Fraction, Fraction]:
        """Dyadic rationals lo <= self <= hi with hi - lo <= 2^(1-bits) (equal if rational)."""
        scale = 1 << bits
        if self.b == 0:
            v = self.a * scale
            fl = v.numerator // v.denominator
            if fl == v:
                return Fraction(fl, scale), Fraction(fl, scale)
            return Fraction(fl, scale), Fraction(fl + 1, scale)
        # floor(b*sqrt(q)*scale) via isqrt on the exact square
        bs = self.b * scale
        sq = bs * bs * self.q
        r = math.isqrt(sq.numerator // sq.denominator)
        # r <= |b| sqrt(q) scale < r + 1
        root_lo = Fraction(r) if bs > 0 else Fraction(-r - 1)
        v = self.a * scale + root_lo
        fl = v.numerator // v.denominator
        return Fraction(fl, scale), Fraction(fl + 2, scale)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        sign = "+" if self.b > 0 else "-"
        bb = abs(self.b)
        coef = "" if bb == 1 else f"{bb}*"
        head = "" if self.a == 0 else f"{self.a}"
        if not head:
            return f"{'-' if self.b < 0 else ''}{coef}sqrt({self.q})"
        return f"{head}{sign}{coef}sqrt({self.q})"


def sign_at(p: IntPolynomial, x: QuadraticNumber | Rational) -> int:
    """Exact sign of p(x) for x in Q(sqrt q), integer-only arithmetic."""
    if not isinstance(x, QuadraticNumber):
        x = QuadraticNumber(x, 0, 1)
    if p.is_zero:
        return 0
    den = math.lcm(x.a.denominator, x.b.denominator)
    A = int(x.a * den)
    B = int(x.b * den)
    q = x.q
    n = p.degree
    u, v = p.coeffs[-1], 0
    dpow = 1
    for k in range(n - 1, -1, -1):
        dpow *= den
        u, v = u * A + v * B * q, u * B + v * A
        u += p.coeffs[k] * dpow
    return QuadraticNumber(u, v, q).sign() if v else ((u > 0) - (u < 0))


# ---------------------------------------------------------------------------
# Rational intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __init__(self, lo: Rational, hi: Rational):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise InvalidInput(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def bisect(self) -> tuple[RationalInterval, RationalInterval]:
        m = self.mid
        return RationalInterval(self.lo, m), RationalInterval(m, self.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other: RationalInterval) -> RationalInterval:
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def __mul__(self, other: RationalInterval) -> RationalInterval:
        prods = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(prods), max(prods))

    def abs_max(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------

def sturm_sequence(p: IntPolynomial) -> list[IntPolynomial]:
    """Sturm sequence of the squarefree part of p, using a primitive PRS.

    Each term is a positive multiple of the classical -rem term, so sign
    variations are unchanged.
    """
    if p.is_zero:
        raise InvalidInput("Sturm sequence of the zero polynomial")
    s = squarefree_part(p)
    seq = [s, s.derivative().primitive()]
    while seq[-1].degree > 0:
        a, b = seq[-2], seq[-1]
        delta = a.degree - b.degree
        r = a.pseudo_remainder(b)
        # prem multiplies by lc(b)^(delta+1); undo a negative factor
        if b.leading < 0 and (delta + 1) % 2 == 1:
            r = -r
        r = -r
        if r.is_zero:
            break
        g = r.content()
        seq.append(IntPolynomial(c // g for c in r.coeffs))
    return seq


def _variations(signs: Iterable[int]) -> int:
    last = 0
    count = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _variations_at(seq: Sequence[IntPolynomial], x) -> int:
    return _variations(sign_at(f, x) for f in seq)


def _variations_at_infinity(seq: Sequence[IntPolynomial], positive: bool) -> int:
    signs = []
    for f in seq:
        s = 1 if f.leading > 0 else -1
        if not positive and f.degree % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def sturm_count(p: IntPolynomial, lo=None, hi=None, seq: Sequence[IntPolynomial] | None = None) -> int:
    """Number of distinct real roots of p in the half-open interval (lo, hi].

    ``lo``/``hi`` may be ints, Fractions, QuadraticNumbers or None (meaning
    -inf / +inf). Endpoint roots are handled exactly: a root at ``hi`` is
    counted, a root at ``lo`` is not.
    """
    if p.is_zero:
        raise InvalidInput("sturm_count of the zero polynomial")
    if seq is None:
        seq = sturm_sequence(p)
    if lo is not None and hi is not None and _as_qn(lo) > _as_qn(hi):
        raise InvalidInput("sturm_count needs lo <= hi")
    v_lo = _variations_at_infinity(seq, False) if lo is None else _variations_at(seq, lo)
    v_hi = _variations_at_infinity(seq, True) if hi is None else _variations_at(seq, hi)
    return v_lo - v_hi


def count_roots_closed(p: IntPolynomial, lo, hi, seq: Sequence[IntPolynomial] | None = None) -> int:
    """Distinct real roots of p in [lo, hi]."""
    n = sturm_count(p, lo, hi, seq)
    return n + (1 if sign_at(p, _as_qn(lo)) == 0 else 0)


def _as_qn(x) -> QuadraticNumber:
    return x if isinstance(x, QuadraticNumber) else QuadraticNumber(x, 0, 1)


def isolate_real_roots(p: IntPolynomial, lo: Fraction, hi: Fraction, width: Fraction) -> list[RationalInterval]:
    """Disjoint rational intervals of width <= ``width``, each holding exactly one root in (lo, hi]."""
    seq = sturm_sequence(p)
    s = seq[0]
    out: list[RationalInterval] = []
    stack = [(Fraction(lo), Fraction(hi), sturm_count(p, lo, hi, seq))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and b - a <= width:
            out.append(RationalInterval(a, b))
            continue
        m = (a + b) / 2
        if n == 1:
            # single root: plain sign bisection is cheaper than Sturm
            sb = sign_at(s, b)
            sm = sign_at(s, m)
            if sm == 0:
                out.append(RationalInterval(m, m))
            elif sb == 0:
                out.append(RationalInterval(b, b))
            elif sm * sb < 0:
                stack.append((m, b, 1))
            else:
                stack.append((a, m, 1))
            continue
        n_left = sturm_count(p, a, m, seq)
        stack.append((m, b, n - n_left))
        stack.append((a, m, n_left))
    out.sort(key=lambda iv: iv.lo)
    return out


def real_roots(p: IntPolynomial, lo, hi, tol: float = 1e-12) -> list[float]:
    """Floating approximations of the distinct real roots of p in [lo, hi]."""
    lo_f = Fraction(lo) if not isinstance(lo, QuadraticNumber) else lo.bracket(60)[0]
    hi_f = Fraction(hi) if not isinstance(hi, QuadraticNumber) else hi.bracket(60)[1]
    width = Fraction(tol).limit_denominator(1 << 62) or Fraction(1, 1 << 60)
    roots = [float(iv.mid) for iv in isolate_real_roots(p, lo_f, hi_f, width)]
    if sign_at(p, lo_f) == 0:
        roots.insert(0, float(lo_f))
    return roots


# ---------------------------------------------------------------------------
# Resultants and power sums
# ---------------------------------------------------------------------------

def resultant(p: IntPolynomial, r: IntPolynomial) -> int:
    """Res(p, r) by the subresultant pseudo-remainder sequence (Collins/Brown)."""
    if p.is_zero or r.is_zero:
        raise InvalidInput("resultant of the zero polynomial")
    A, B = p, r
    if A.degree == 0:
        return A.leading ** B.degree
    if B.degree == 0:
        return B.leading ** A.degree
    a, b = A.content(), B.content()
    if A.leading < 0:
        a = -a
    if B.leading < 0:
        b = -b
    # keep leading coefficients positive after removing content
    A = IntPolynomial(c // a for c in A.coeffs)
    B = IntPolynomial(c // b for c in B.coeffs)
    t = a ** B.degree * b ** A.degree
    s = 1
    if A.degree < B.degree:
        A, B = B, A
        if A.degree % 2 == 1 and B.degree % 2 == 1:
            s = -s
    g = h = Fraction(1)
    while True:
        delta = A.degree - B.degree
        if A.degree % 2 == 1 and B.degree % 2 == 1:
            s = -s
        R = A.pseudo_remainder(B)
        A = B
        div = g * h**delta
        B = _div_exact(R, div)
        g = Fraction(A.leading)
        h = h ** (1 - delta) * g**delta
        if B.is_zero:
            return 0
        if B.degree == 0:
            break
    h = h ** (1 - A.degree) * Fraction(B.leading) ** A.degree
    res = s * t * h
    if res.denominator != 1:
        raise ArithmeticError("non-integral resultant; subresultant invariant broken")
    return int(res)


def _div_exact(p: IntPolynomial, d: Fraction) -> IntPolynomial:
    out = []
    for c in p.coeffs:
        v = Fraction(c) / d
        if v.denominator != 1:
            raise ArithmeticError("subresultant division not exact")
        out.append(int(v))
    return IntPolynomial(out)


def resultant_sylvester(p: IntPolynomial, r: IntPolynomial) -> int:
    """Determinant of the Sylvester matrix; slow reference used by tests."""
    m, n = p.degree, r.degree
    size = m + n
    if size == 0:
        return 1
    rows = []
    pc = list(reversed(p.coeffs))
    rc = list(reversed(r.coeffs))
    for i in range(n):
        rows.append([0] * i + pc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + rc + [0] * (size - n - 1 - i))
    return _det([[Fraction(v) for v in row] for row in rows])


def _det(mat: list[list[Fraction]]) -> int:
    n = len(mat)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        for r in range(col + 1, n):
            f = mat[r][col] / mat[col][col]
            if f:
                for c in range(col, n):
                    mat[r][c] -= f * mat[col][c]
    return int(det)


def power_sums(p: IntPolynomial, up_to: int) -> list[int]:
    """[s_1, ..., s_k]: sums of j-th powers of the roots of monic p (Newton's identities)."""
    if not p.is_monic:
        raise InvalidInput("power_sums needs a monic polynomial")
    n = p.degree
    # e_j with p = x^n - e1 x^(n-1) + e2 x^(n-2) - ...
    e = [(-1) ** j * p.coeffs[n - j] for j in range(n + 1)]
    s: list[int] = []
    for k in range(1, up_to + 1):
        total = (-1) ** (k - 1) * k * e[k] if k <= n else 0
        for i in range(1, min(k - 1, n) + 1):
            total += (-1) ** (i - 1) * e[i] * s[k - i - 1]
        s.append(total)
    return s


def from_power_sums(s: Sequence[int], n: int) -> IntPolynomial:
    """Monic degree-n polynomial whose root power sums start with s (inverse Newton)."""
    e = [Fraction(1)]
    for k in range(1, n + 1):
        total = Fraction(0)
        for i in range(1, k + 1):
            total += (-1) ** (i - 1) * e[k - i] * s[i - 1]
        e.append(total / k)
    coeffs = [0] * (n + 1)
    for j in range(n + 1):
        v = e[j]
        if v.denominator != 1:
            raise InvalidInput("power sums do not come from an integer polynomial")
        coeffs[n - j] = (-1) ** j * int(v)
    return IntPolynomial(coeffs)
