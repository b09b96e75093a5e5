"""Certified bounds from auxiliary functions.

For monic integer polynomials P_i and positive exponents g_i, every orbit
alpha in the Weil interval that is not a root of some P_i satisfies

    min_x  x * prod |P_i(x)|^(-g_i)  <=  Norm(alpha)^(1/deg alpha)

because prod_i |Res(minpoly, P_i)|^(g_i) >= 1.  Dually for upper bounds with
x * prod |Q_j(x)|^(b_j).  This module computes those extrema with a rigorous
branch and bound and packages the result as a certificate.

Both sides are handled as the minimum of H(x) = s*log x + sum w_i log|P_i(x)|
with s = +1, w = -g (lower) or s = -1, w = -b (upper).  All w_i are negative,
so zeros of the P_i push H to +infinity and never decide the minimum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactcore import IntPolynomial, InvalidInput
from .weilring import FieldSize, RealOrbit, is_member, weil_interval

CERT_VERSION = 1
SIDES = ("lower", "upper")
_GRID_BITS = 40
_MIN_WIDTH = 2.0**-36
_INITIAL_CELLS = 256


def as_fraction(v) -> Fraction:
    """Exact rational from int, Fraction, Decimal or decimal string (never via binary float)."""
    if isinstance(v, float):
        v = repr(v)
    if isinstance(v, Decimal):
        return Fraction(v)
    return Fraction(v)


@dataclass
class AuxiliarySystem:
    q: FieldSize
    side: str
    polynomials: list[IntPolynomial]
    exponents: list[Fraction]
    require_members: bool = True

    def __post_init__(self):
        self.q = FieldSize.of(self.q)
        if self.side not in SIDES:
            raise InvalidInput(f"side must be lower or upper, not {self.side!r}")
        self.polynomials = [p if isinstance(p, IntPolynomial) else IntPolynomial(p) for p in self.polynomials]
        self.exponents = [as_fraction(g) for g in self.exponents]
        if len(self.polynomials) != len(self.exponents):
            raise InvalidInput(f"{len(self.polynomials)} polynomials but {len(self.exponents)} exponents")
        for p, g in zip(self.polynomials, self.exponents):
            if g <= 0:
                raise InvalidInput(f"exponent {g} of {p} is not positive")
            if not p.is_monic or p.degree < 1:
                raise InvalidInput(f"{p} is not monic of positive degree")
            if max(abs(c) for c in p.coeffs) >= 2**53:
                raise InvalidInput(f"coefficients of {p} are too large for the float enclosures")

    def membership_warnings(self) -> list[str]:
        if not self.require_members:
            return []
        return [f"{p} is not in the Weil interval set for q={self.q.q}"
                for p in self.polynomials if not is_member(p, self.q)]

    def value(self, x):
        """x * prod |P_i(x)|^(-g_i) (lower) or x * prod |Q_j(x)|^(b_j) (upper), in floats."""
        x = np.asarray(x, dtype=float)
        s = 1.0 if self.side == "upper" else -1.0
        logv = np.log(x)
        with np.errstate(divide="ignore"):
            for p, g in zip(self.polynomials, self.exponents):
                logv = logv + s * float(g) * np.log(np.abs(np.polyval([float(c) for c in reversed(p.coeffs)], x)))
        return np.exp(logv)


@dataclass
class ExceptionRecord:
    orbit: RealOrbit
    normalized_norm: Decimal
    violates: bool


@dataclass
class BoundCertificate:
    system: AuxiliarySystem
    certified_bound: Decimal
    subdivision_depth: int
    tolerance: Decimal
    exceptions: list[ExceptionRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    argext: float | None = None
    estimate: float | None = None
    # set by the LP pipeline; not part of the JSON schema
    lp_solution: object = field(default=None, repr=False, compare=False)
    lp_feasible: bool | None = field(default=None, compare=False)

    @property
    def side(self) -> str:
        return self.system.side

    @property
    def direction(self) -> str:
        return self.system.side

    @property
    def value(self) -> float:
        return float(self.certified_bound)

    def marked(self, digits: int = 6) -> str:
        return ("≥" if self.side == "lower" else "≤") + f"{self.certified_bound:.{digits}f}"

    def to_dict(self) -> dict:
        return {
            "version": CERT_VERSION,
            "q": self.system.q.q,
            "side": self.side,
            "polynomials": [list(p.coeffs) for p in self.system.polynomials],
            "exponents": [f"{g.numerator}/{g.denominator}" for g in self.system.exponents],
            "certified_bound": str(self.certified_bound),
            "direction": self.direction,
            "tolerance": str(self.tolerance),
            "subdivision_depth": self.subdivision_depth,
            "exceptions": [
                {"poly": list(e.orbit.minimal_polynomial.coeffs), "normalized_norm": str(e.normalized_norm),
                 "violates": e.violates}
                for e in self.exceptions
            ],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, doc: dict) -> BoundCertificate:
        if doc.get("version") != CERT_VERSION:
            raise InvalidInput(f"unsupported certificate version {doc.get('version')!r}")
        if doc["direction"] != doc["side"]:
            raise InvalidInput("certificate direction does not match its side")
        system = AuxiliarySystem(doc["q"], doc["side"], [IntPolynomial(c) for c in doc["polynomials"]],
                                 [Fraction(g) for g in doc["exponents"]])
        exceptions = [ExceptionRecord(RealOrbit(IntPolynomial(e["poly"]), doc["q"], check=False),
                                      Decimal(e["normalized_norm"]), bool(e["violates"]))
                      for e in doc["exceptions"]]
        return cls(system, Decimal(doc["certified_bound"]), int(doc["subdivision_depth"]),
                   Decimal(doc["tolerance"]), exceptions, list(doc["warnings"]))

    @classmethod
    def from_json(cls, text: str) -> BoundCertificate:
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Outward-rounded interval arithmetic on arrays of cells
# ---------------------------------------------------------------------------

_NEG = -np.inf
_POS = np.inf


def _dn(v):
    return np.nextafter(v, _NEG)


def _up(v):
    return np.nextafter(v, _POS)


def _horner_pos(coeffs: Sequence[int], xl, xh):
    """Enclosure of p over [xl, xh] with 0 < xl <= xh, by interval Horner."""
    lo = np.full_like(xl, float(coeffs[-1]))
    hi = lo.copy()
    for c in reversed(coeffs[:-1]):
        # [lo, hi] * [xl, xh] with xl > 0
        a = np.minimum(lo * xl, lo * xh)
        b = np.maximum(hi * xl, hi * xh)
        lo = _dn(_dn(a) + c)
        hi = _up(_up(b) + c)
    return lo, hi


def _poly_enclosure(p: IntPolynomial, xl, xh):
    """Naive Horner enclosure intersected with the centered form."""
    lo, hi = _horner_pos(p.coeffs, xl, xh)
    if p.degree >= 1:
        c = 0.5 * (xl + xh)
        # radius rounded up so that [c - r, c + r] covers the cell even if c was rounded
        r = _up(np.maximum(_up(c - xl), _up(xh - c)))
        pcl, pch = _horner_pos(p.coeffs, c, c)
        dl, dh = _horner_pos(p.derivative().coeffs, xl, xh)
        slope = _up(np.maximum(np.abs(dl), np.abs(dh)) * r)
        lo = np.maximum(lo, _dn(pcl - slope))
        hi = np.minimum(hi, _up(pch + slope))
    return lo, hi


def _log_abs(lo, hi):
    """Enclosure of log|y| for y in [lo, hi]; lower end -inf when 0 is inside."""
    amax = np.maximum(np.abs(lo), np.abs(hi))
    straddle = (lo <= 0) & (hi >= 0)
    amin = np.where(straddle, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    with np.errstate(divide="ignore"):
        llo = np.log(amin)
        lhi = np.log(amax)
    # libm log is within one ulp; widen by more than that
    llo = llo - (np.abs(llo) * 2.0**-50 + 2.0**-1070)
    lhi = lhi + (np.abs(lhi) * 2.0**-50 + 2.0**-1070)
    return llo, lhi


def _weight_interval(w: Fraction) -> tuple[float, float]:
    f = float(w)
    lo, hi = f, f
    if Fraction(lo) > w:
        lo = math.nextafter(lo, -math.inf)
    if Fraction(hi) < w:
        hi = math.nextafter(hi, math.inf)
    return lo, hi


class _Objective:
    """H = s log x + sum w_i log|P_i| with all w_i < 0, evaluated on cell arrays."""

    def __init__(self, system: AuxiliarySystem):
        self.sign = 1.0 if system.side == "lower" else -1.0
        self.polys = list(system.polynomials)
        self.weights = [_weight_interval(-g) for g in system.exponents]

    def lower(self, xl, xh):
        ll, lh = _log_abs(xl, xh)
        h = ll if self.sign > 0 else -lh
        for p, (wl, wh) in zip(self.polys, self.weights):
            _, top = _log_abs(*_poly_enclosure(p, xl, xh))
            # w < 0, so w * [a, top] is smallest at top
            term = np.minimum(wl * top, wh * top)
            h = _dn(h + _dn(term))
        return h

    def upper_at(self, x):
        ll, lh = _log_abs(x, x)
        h = lh if self.sign > 0 else -ll
        for p, (wl, wh) in zip(self.polys, self.weights):
            bottom, _ = _log_abs(*_horner_pos(p.coeffs, x, x))
            with np.errstate(invalid="ignore"):
                term = np.maximum(wl * bottom, wh * bottom)
            term = np.where(np.isnan(term), np.inf, term)
            h = _up(h + _up(term))
        return h


def _grid_interval(q: FieldSize) -> tuple[float, float]:
    lo, hi = weil_interval(q)
    a = lo.bracket(_GRID_BITS)[0]
    b = hi.bracket(_GRID_BITS)[1]
    return float(a), float(b)


def _minimize(system: AuxiliarySystem, tolerance: Fraction, max_rounds: int = 200):
    """Rigorous lower bound L on min H over the Weil interval, plus an upper bound U."""
    obj = _Objective(system)
    a, b = _grid_interval(system.q)
    edges = np.linspace(a, b, _INITIAL_CELLS + 1)
    xl, xh = edges[:-1], edges[1:]
    depth = 0
    certified = np.inf  # min lower bound over retired cells
    hl = obj.lower(xl, xh)
    probe = np.concatenate([edges, 0.5 * (xl + xh)])
    hu = obj.upper_at(probe)
    best = float(np.min(hu))
    arg = float(probe[int(np.argmin(hu))])
    tol = float(tolerance)
    for _ in range(max_rounds):
        # a cell whose bound already sits within tolerance of the best value is done
        limit = _target(best, tol, obj.sign)
        keep = hl < limit
        retired = hl[~keep]
        if retired.size:
            certified = min(certified, float(retired.min()))
        xl, xh, hl = xl[keep], xh[keep], hl[keep]
        if xl.size == 0:
            break
        narrow = (xh - xl) <= _MIN_WIDTH
        if narrow.any():
            certified = min(certified, float(hl[narrow].min()))
            xl, xh, hl = xl[~narrow], xh[~narrow], hl[~narrow]
            if xl.size == 0:
                break
        mid = 0.5 * (xl + xh)
        xl, xh = np.concatenate([xl, mid]), np.concatenate([mid, xh])
        depth += 1
        hl = obj.lower(xl, xh)
        hu = obj.upper_at(mid)
        i = int(np.argmin(hu))
        if hu[i] < best:
            best, arg = float(hu[i]), float(mid[i])
    else:
        raise RuntimeError("branch and bound did not converge")
    return min(certified, best), best, depth, arg


def _target(best: float, tol: float, sign: float) -> float:
    """Cells with lower bound >= this value cannot move the reported bound by more than tol/2.

    The lower side reports exp(L) and the upper side exp(-L); half the
    tolerance is left for the final decimal rounding.
    """
    half = tol / 2
    if sign > 0:
        v = math.exp(best)
        return math.log(max(v - half, v * 1e-3))
    v = math.exp(-best)
    return -math.log(v + half)


def _round_bound(L: float, side: str) -> Decimal:
    if side == "lower":
        v = math.exp(L) * (1 - 2.0**-49)
        return Decimal(v).quantize(Decimal("0.000001"), rounding=ROUND_FLOOR)
    v = math.exp(-L) * (1 + 2.0**-49)
    return Decimal(v).quantize(Decimal("0.000001"), rounding=ROUND_CEILING)


def _exception_record(orbit: RealOrbit, bound: Decimal, side: str) -> ExceptionRecord:
    d = orbit.degree
    n = orbit.norm
    b = Fraction(bound)
    violates = n < b**d if side == "lower" else n > b**d
    nn = Decimal(orbit.normalized_norm).quantize(Decimal("0.000001"))
    return ExceptionRecord(orbit, nn, violates)


def certify(system: AuxiliarySystem, tolerance="1e-4") -> BoundCertificate:
    """Certified m (lower) or M (upper) for the auxiliary function of ``system``.

    The reported bound is within ``tolerance`` of the true extremum and is
    rounded to 6 decimals in the safe direction.
    """
    tol = as_fraction(tolerance)
    if tol < Fraction(1, 10**8):
        raise InvalidInput("tolerance must be at least 1e-8")
    L, U, depth, arg = _minimize(system, tol)
    bound = _round_bound(L, system.side)
    warnings = system.membership_warnings()
    exceptions = []
    for p in system.polynomials:
        if is_member(p, system.q):
            exceptions.append(_exception_record(RealOrbit(p, system.q, check=False), bound, system.side))
    est = math.exp(U) if system.side == "lower" else math.exp(-U)
    return BoundCertificate(system, bound, depth, Decimal(str(tolerance)), exceptions, warnings, arg, est)


def exception_set(system: AuxiliarySystem, pool, bound=None) -> list[tuple[RealOrbit, bool]]:
    """Pool orbits that are roots of some system polynomial, tagged with whether they violate the bound."""
    if bound is None:
        bound = certify(system).certified_bound
    if not isinstance(bound, (Decimal, Fraction)):
        bound = Decimal(str(bound))
    out = []
    for orbit in pool:
        f = orbit.minimal_polynomial
        if any(f.degree <= p.degree and f.divides(p) for p in system.polynomials):
            out.append((orbit, _exception_record(orbit, bound, system.side).violates))
    return out


def bound_theorem_easy(q, side: str, tolerance="1e-6") -> BoundCertificate:
    """Single-polynomial bounds floor((sqrt q - 1)^2) + 1 and ceil((sqrt q + 1)^2) - 1."""
    fq = FieldSize.of(q)
    lo, hi = weil_interval(fq)
    if side == "lower":
        n = lo.floor()
        if n == 0:
            # no auxiliary polynomial: the bound is min x = lo < 1, and point counts are >= 1
            system = AuxiliarySystem(fq, "lower", [], [], require_members=False)
            cert = certify(system, tolerance)
            if cert.certified_bound < 1:
                cert.warnings.append(f"degenerate case n=0: min of x is {cert.certified_bound}; reporting 1 "
                                     "since point counts are positive integers")
                cert.certified_bound = Decimal("1.000000")
            return cert
        system = AuxiliarySystem(fq, "lower", [IntPolynomial([-n, 1])], [Fraction(1, n + 1)],
                                 require_members=False)
    elif side == "upper":
        N = hi.ceil()
        system = AuxiliarySystem(fq, "upper", [IntPolynomial([-N, 1])], [Fraction(1, N - 1)],
                                 require_members=False)
    else:
        raise InvalidInput(f"side must be lower or upper, not {side!r}")
    return certify(system, tolerance)
