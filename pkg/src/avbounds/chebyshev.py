"""Shifted monic Chebyshev polynomials and their translates.

P_n = 2 T_n(x/2 - 1) is monic with integer coefficients and roots
2 + 2 cos((2k-1) pi / (2n)) in (0, 4).  For odd n it vanishes at 2, and the
cofactor R_n = P_n / (x - 2) translated by an integer N gives orbits whose
normalized norm sits close to N + 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath

from .exactcore import IntPolynomial, InvalidInput, sturm_count
from .weilring import FieldSize, RealOrbit, is_member, weil_interval


class ConsistencyError(RuntimeError):
    """A construction that is guaranteed to succeed did not."""


@lru_cache(maxsize=None)
def monic_chebyshev(n: int) -> IntPolynomial:
    """V_1 = x-2, V_2 = (x-2)^2-2, V_{k+1} = (x-2) V_k - V_{k-1}."""
    if n < 1:
        raise InvalidInput("degree must be at least 1")
    y = IntPolynomial([-2, 1])
    if n == 1:
        return y
    prev, cur = y, y * y - IntPolynomial([2])
    for _ in range(n - 2):
        prev, cur = cur, y * cur - prev
    return cur


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class ChebyshevFamily:
    n: int
    P: IntPolynomial
    R: IntPolynomial | None
    shift: int = 0

    @classmethod
    def build(cls, n: int, shift: int = 0) -> ChebyshevFamily:
        if shift < 0:
            raise InvalidInput("shift must be nonnegative")
        P = monic_chebyshev(n)
        R = None
        if n % 2 == 1 and _is_prime(n):
            R, rem = P.divmod_monic(IntPolynomial([-2, 1]))
            if not rem.is_zero:
                raise ConsistencyError(f"x-2 does not divide P_{n}")
        return cls(n, P, R, shift)

    def roots_in_range(self) -> bool:
        """All n roots of P_n are real and inside [0, 4] (Sturm)."""
        return self.P(0) != 0 and self.P(4) != 0 and sturm_count(self.P, 0, 4) == self.n

    def translate(self) -> IntPolynomial:
        """R_n(x - N)."""
        if self.R is None:
            raise InvalidInput(f"P_{self.n} has no (x-2) cofactor: n must be an odd prime")
        return self.R.taylor_shift(-self.shift)


def closed_form_limit(N) -> mpmath.mpf:
    """lim |P_n(-N)|^(1/n) = M + sqrt(M^2 - 1) with M = 1 + N/2."""
    m = 1 + mpmath.mpf(N) / 2
    return m + mpmath.sqrt(m * m - 1)


def growth_rate(n: int, N: int, dps: int = 50) -> mpmath.mpf:
    """|P_n(-N)|^(1/n) from the exact integer value."""
    if N < 1:
        raise InvalidInput("N must be at least 1")
    value = abs(monic_chebyshev(n)(-N))
    with mpmath.workdps(dps):
        return mpmath.root(mpmath.mpf(value), n)


def lemma_bracket(N: int) -> tuple[float, float]:
    return N + 2 - 1 / N, N + 2


def family_shift(q, side: str) -> int:
    lo, hi = weil_interval(q)
    if side == "lower":
        return lo.ceil()
    if side == "upper":
        return hi.floor() - 4
    raise InvalidInput(f"side must be lower or upper, not {side!r}")


def extremal_family(q, side: str, ell: int) -> RealOrbit:
    """Orbit of R_ell(x - N), N = ceil(lo) for the lower side, floor(hi) - 4 for the upper."""
    if ell == 2 or ell % 2 == 0 or not _is_prime(ell):
        raise InvalidInput(f"ell={ell} must be an odd prime")
    fq = FieldSize.of(q)
    N = family_shift(fq, side)
    p = ChebyshevFamily.build(ell, N).translate()
    if not is_member(p, fq):
        raise ConsistencyError(f"R_{ell}(x-{N}) left the Weil interval for q={fq.q}")
    return RealOrbit(p, fq, check=False)


def family_normalized_norm(orbit: RealOrbit, dps: int = 30) -> mpmath.mpf:
    with mpmath.workdps(dps):
        return mpmath.root(mpmath.mpf(orbit.norm), orbit.degree)
