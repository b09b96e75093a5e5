"""Totally real side of the Honda-Tate correspondence.

An orbit is the minimal polynomial of a totally real algebraic integer whose
conjugates all lie in the Weil interval [q+1-2*sqrt(q), q+1+2*sqrt(q)].  The
matching Weil polynomial is prod (x^2 - (1+q-alpha_i) x + q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exactcore import (
    IntPolynomial,
    InvalidInput,
    QuadraticNumber,
    count_roots_closed,
    from_power_sums,
    power_sums,
    resultant,
    sign_at,
    squarefree_part,
)


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next((k for k in range(2, math.isqrt(q) + 1) if q % k == 0), q)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


@dataclass(frozen=True)
class FieldSize:
    q: int
    p: int
    exponent: int

    def __post_init__(self):
        if self.p ** self.exponent != self.q or _prime_power(self.p) != (self.p, 1):
            raise InvalidInput(f"{self.q} is not {self.p}^{self.exponent} with {self.p} prime")

    @classmethod
    def of(cls, q) -> FieldSize:
        if isinstance(q, FieldSize):
            return q
        q = int(q)
        pe = _prime_power(q)
        if pe is None:
            raise InvalidInput(f"q={q} is not a prime power")
        return cls(q, *pe)

    def __int__(self) -> int:
        return self.q

    def __str__(self) -> str:
        return str(self.q)


def weil_interval(q) -> tuple[QuadraticNumber, QuadraticNumber]:
    """(q+1-2*sqrt(q), q+1+2*sqrt(q)) as exact quadratic numbers."""
    q = FieldSize.of(q).q
    return QuadraticNumber(q + 1, -2, q), QuadraticNumber(q + 1, 2, q)


@lru_cache(maxsize=None)
def weil_interval_float(q: int) -> tuple[float, float]:
    lo, hi = weil_interval(q)
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def float_roots(p: IntPolynomial) -> np.ndarray:
    return np.roots([float(c) for c in reversed(p.coeffs)])


@lru_cache(maxsize=None)
def _inner_dyadic(q: int) -> tuple[Fraction, Fraction]:
    """Dyadic rationals just inside the Weil interval."""
    lo, hi = weil_interval(q)
    return lo.bracket(60)[1], hi.bracket(60)[0]


def _sign_at_ratio(coeffs: Sequence[int], num: int, den: int) -> int:
    # sign of den^d * p(num/den), den > 0
    acc = coeffs[-1]
    dpow = 1
    for c in reversed(coeffs[:-1]):
        dpow *= den
        acc = acc * num + c * dpow
    return (acc > 0) - (acc < 0)


def _alternation_certificate(p: IntPolynomial, q: int, roots) -> bool:
    """True if exact signs of p alternate strictly on a < x_1 < ... < x_{d-1} < b.

    a and b are dyadic points just inside the Weil interval and the x_i are
    dyadic midpoints between consecutive float roots.  By the intermediate
    value theorem each gap then holds a root, so all d roots are real and
    inside the interval.  A False answer decides nothing.
    """
    d = p.degree
    roots = np.asarray(roots)
    if len(roots) != d:
        return False
    if np.iscomplexobj(roots):
        if np.any(np.abs(roots.imag) > 1e-6 * (1 + np.abs(roots.real))):
            return False
        roots = roots.real
    r = np.sort(roots)
    a, b = _inner_dyadic(q)
    points = [a.as_integer_ratio()]
    for i in range(d - 1):
        points.append(((float(r[i]) + float(r[i + 1])) / 2).as_integer_ratio())
    points.append(b.as_integer_ratio())
    for (n1, d1), (n2, d2) in zip(points, points[1:]):
        if n1 * d2 >= n2 * d1:
            return False
    coeffs = p.coeffs
    expected = -1 if d % 2 else 1
    for num, den in points:
        if _sign_at_ratio(coeffs, num, den) != expected:
            return False
        expected = -expected
    return True


def _member_exact(p: IntPolynomial, lo: QuadraticNumber, hi: QuadraticNumber) -> bool:
    s = squarefree_part(p)
    return count_roots_closed(s, lo, hi) == s.degree


def is_member(p: IntPolynomial, q, roots=None) -> bool:
    """All roots of monic p are real and lie in the closed Weil interval.

    The decision is exact.  Floating roots (computed here, or passed in) only
    pick the rational test points of a sign-alternation certificate; when
    that certificate does not apply the Sturm count decides.
    """
    if p.is_zero:
        raise InvalidInput("zero polynomial")
    if not p.is_monic:
        raise InvalidInput(f"{p} is not monic")
    if p.degree == 0:
        return True
    q = FieldSize.of(q).q
    if roots is None:
        roots = float_roots(p)
    if _alternation_certificate(p, q, roots):
        return True
    lo, hi = weil_interval(q)
    return _member_exact(p, lo, hi)


def touches_endpoint(p: IntPolynomial, q) -> bool:
    lo, hi = weil_interval(q)
    return sign_at(p, lo) == 0 or sign_at(p, hi) == 0


# ---------------------------------------------------------------------------
# Orbits and Weil polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RealOrbit:
    """Galois orbit of a totally real algebraic integer in the Weil interval.

    Irreducibility of the polynomial is taken on trust; membership is checked.
    """

    minimal_polynomial: IntPolynomial
    q: FieldSize

    def __init__(self, minimal_polynomial, q, check: bool = True):
        if not isinstance(minimal_polynomial, IntPolynomial):
            minimal_polynomial = IntPolynomial(minimal_polynomial)
        q = FieldSize.of(q)
        if check:
            if minimal_polynomial.degree < 1:
                raise InvalidInput("an orbit needs degree >= 1")
            if not is_member(minimal_polynomial, q):
                raise InvalidInput(f"{minimal_polynomial} has roots outside the Weil interval for q={q.q}")
        object.__setattr__(self, "minimal_polynomial", minimal_polynomial)
        object.__setattr__(self, "q", q)

    @property
    def degree(self) -> int:
        return self.minimal_polynomial.degree

    @property
    def norm(self) -> int:
        return point_count(self)

    @property
    def normalized_norm(self) -> float:
        return math.exp(math.log(self.norm) / self.degree)

    @property
    def trace(self) -> int:
        return -self.minimal_polynomial.coeffs[-2]

    @property
    def at_endpoint(self) -> bool:
        return touches_endpoint(self.minimal_polynomial, self.q)

    def sort_key(self):
        # within one degree the normalized norm orders like the norm itself
        return (self.degree, self.norm, self.minimal_polynomial.coeffs)

    def serialize(self) -> str:
        return f"{self.q.q};" + ",".join(str(c) for c in self.minimal_polynomial.coeffs)

    @classmethod
    def deserialize(cls, line: str, check: bool = True) -> RealOrbit:
        try:
            qs, cs = line.strip().split(";")
            coeffs = [int(c) for c in cs.split(",")]
        except ValueError as exc:
            raise InvalidInput(f"malformed orbit line {line!r}") from exc
        if not coeffs or coeffs[-1] != 1:
            raise InvalidInput(f"orbit line {line!r} is not monic")
        return cls(IntPolynomial(coeffs), int(qs), check=check)

    def __str__(self) -> str:
        return str(self.minimal_polynomial)


@dataclass(frozen=True)
class WeilPolynomial:
    polynomial: IntPolynomial
    q: FieldSize

    def __init__(self, polynomial, q, check: bool = True):
        if not isinstance(polynomial, IntPolynomial):
            polynomial = IntPolynomial(polynomial)
        object.__setattr__(self, "polynomial", polynomial)
        object.__setattr__(self, "q", FieldSize.of(q))
        if check:
            from_weil(self)

    @property
    def degree(self) -> int:
        return self.polynomial.degree

    @property
    def frobenius_trace(self) -> int:
        return -self.polynomial.coeffs[-2]

    def __str__(self) -> str:
        return str(self.polynomial)


def to_weil(orbit: RealOrbit) -> WeilPolynomial:
    """prod_i (x^2 - (1+q-alpha_i) x + q) as an exact composed product."""
    q = orbit.q.q
    c = orbit.minimal_polynomial.coeffs
    d = len(c) - 1
    u = IntPolynomial([q, -(1 + q), 1])
    x = IntPolynomial.x()
    # prod (u + alpha_i x) = (-1)^d x^d p(-u/x)
    w = IntPolynomial()
    upow = IntPolynomial([1])
    for k in range(d + 1):
        sign = -1 if (d + k) % 2 else 1
        w = w + (upow * x ** (d - k)).scale(sign * c[k])
        upow = upow * u
    return WeilPolynomial(w, orbit.q, check=False)


def from_weil(w: WeilPolynomial) -> RealOrbit:
    """Inverse of to_weil; rejects input without the q-Weil functional equation."""
    q = w.q.q
    f = w.polynomial
    if f.is_zero or not f.is_monic or f.degree % 2:
        raise InvalidInput(f"{f} is not monic of even degree")
    d = f.degree // 2
    c = f.coeffs
    for i in range(1, d + 1):
        if c[d - i] != q**i * c[d + i]:
            raise InvalidInput(f"{f} fails x^{2 * d} f(q/x) = q^{d} f(x)")
    # x^-d f(x) = c_d + sum_j c_{d+j} (x^j + (q/x)^j); the bracket is D_j(t), t = x + q/x
    t = IntPolynomial.x()
    d_prev, d_cur = IntPolynomial([2]), t
    g = IntPolynomial([c[d]])
    for j in range(1, d + 1):
        g = g + d_cur.scale(c[d + j])
        d_prev, d_cur = d_cur, t * d_cur - d_prev.scale(q)
    # t_i = 1 + q - alpha_i, so p(y) = (-1)^d g(1 + q - y)
    p = g.reflect(1 + q)
    if d % 2:
        p = -p
    if not is_member(p, q):
        raise InvalidInput(f"{f} has a root of absolute value other than sqrt({q})")
    return RealOrbit(p, w.q, check=False)


def point_count(orbit: RealOrbit) -> int:
    """Norm(alpha) = (-1)^d p(0) = #A(F_q) for the dimension-d representative."""
    p = orbit.minimal_polynomial
    n = p.coeffs[0] if p.degree % 2 == 0 else -p.coeffs[0]
    if n <= 0:
        raise InvalidInput(f"{p} does not have a positive norm")
    return n


def point_count_extension(orbit: RealOrbit, r: int) -> int:
    """#A(F_{q^r}) = prod over Weil roots gamma of (1 - gamma^r) = Res(W, x^r - 1)."""
    if r < 1:
        raise InvalidInput("extension degree must be positive")
    w = to_weil(orbit).polynomial
    return resultant(w, IntPolynomial([-1] + [0] * (r - 1) + [1]))


def point_count_extension_power_sums(orbit: RealOrbit, r: int) -> int:
    """Same count through Newton power sums of the Frobenius roots."""
    if r < 1:
        raise InvalidInput("extension degree must be positive")
    w = to_weil(orbit).polynomial
    n = w.degree
    s = power_sums(w, n * r)
    wr = from_power_sums([s[r * j - 1] for j in range(1, n + 1)], n)
    return wr(1)


def quadratic_twist(orbit: RealOrbit) -> RealOrbit:
    """Orbit of 2(1+q) - alpha, the image of gamma -> -gamma."""
    q = orbit.q.q
    p = orbit.minimal_polynomial.reflect(2 * (1 + q))
    if p.degree % 2:
        p = -p
    return RealOrbit(p, orbit.q, check=False)


def normalized_norm(p: IntPolynomial) -> float:
    n = abs(p.coeffs[0])
    return math.exp(math.log(n) / p.degree) if n else 0.0


def parse_orbits(texts: Sequence[str], q) -> list[RealOrbit]:
    return [RealOrbit(IntPolynomial.parse(t), q) for t in texts]
