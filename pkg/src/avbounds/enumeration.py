"""Exhaustive enumeration of orbits in the Weil interval up to a degree cap.

Candidates come from a derivative recursion.  Write a real-rooted monic p of
degree d as sum (-1)^j e_j x^(d-j) and let D_k be its (d-k)-th derivative,
scaled to be monic of degree k.  D_k depends only on e_0..e_k and
D_k' = k D_{k-1}.  Given D_{k-1} with all roots in [lo, hi], D_k has all its
roots there iff its signs alternate weakly on hi, r_{k-1}, ..., r_1, lo.
Those sign conditions cut out an interval of admissible e_k.  The walk runs in
floating point with slack, so it over-approximates; every survivor is then
checked exactly.
"""

from __future__ import annotations

import functools
import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .exactcore import IntPolynomial, InvalidInput, poly_gcd, sign_at
from .weilring import FieldSize, RealOrbit, _alternation_certificate, _member_exact, weil_interval

MAX_DEGREE = 8
CACHE_HEADER = "avbounds-orbits v1"

_COUNT, _COLLECT, _SCAN = 0, 1, 2


# ---------------------------------------------------------------------------
# Float kernel
# ---------------------------------------------------------------------------

@njit(cache=True)
def _horner(coef, k, x):
    v = coef[0]
    for j in range(1, k + 1):
        v = v * x + coef[j]
    return v


@njit(cache=True)
def _horner_abs(coef, k, x):
    ax = abs(x)
    v = abs(coef[0])
    for j in range(1, k + 1):
        v = v * ax + abs(coef[j])
    return v


@njit(cache=True)
def _admissible(k, d, e, roots, lo, hi, binom, coef):
    """Integer range of e_k keeping D_k real-rooted in [lo, hi], padded by slack."""
    for j in range(k):
        a = binom[k, j] / binom[d, j] * e[j]
        coef[j] = -a if j % 2 else a
    coef[k] = 0.0
    cmin = -np.inf
    cmax = np.inf
    mag = 0.0
    for i in range(k + 1):
        if i == 0:
            x = hi
        elif i == k:
            x = lo
        else:
            x = roots[k - 1, k - 1 - i]
        f = _horner(coef, k, x)
        mag = max(mag, _horner_abs(coef, k, x))
        if i % 2 == 0:
            cmin = max(cmin, -f)
        else:
            cmax = min(cmax, -f)
    slack = 1e-9 * (1.0 + mag)
    cmin -= slack
    cmax += slack
    if cmin > cmax:
        return 1, 0
    c = binom[d, k]
    if k % 2 == 0:
        a, b = c * cmin, c * cmax
    else:
        a, b = -c * cmax, -c * cmin
    return math.ceil(a), math.floor(b)


@njit(cache=True)
def _bracketed_root(coef, k, a, b):
    fa = _horner(coef, k, a)
    fb = _horner(coef, k, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        # double root up to rounding: the critical point is the root
        return a if abs(fa) < abs(fb) else b
    pos_a = fa > 0
    x = 0.5 * (a + b)
    for _ in range(200):
        f = coef[0]
        df = 0.0
        for j in range(1, k + 1):
            df = df * x + f
            f = f * x + coef[j]
        if f == 0.0:
            return x
        if (f > 0) == pos_a:
            a = x
        else:
            b = x
        xn = x - f / df if df != 0.0 else 0.5 * (a + b)
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) <= 1e-15 * (1.0 + abs(x)) or b - a <= 1e-15 * (1.0 + abs(x)):
            return xn
        x = xn
    return x


@njit(cache=True)
def _min_product(s, d, lo, hi):
    # smallest product of d numbers in [lo, hi] with sum s (log is concave)
    best = np.inf
    for a in range(d):
        b = d - 1 - a
        m = s - a * lo - b * hi
        if lo - 1e-9 <= m <= hi + 1e-9:
            best = min(best, lo**a * hi**b * max(m, lo))
    return best


@njit(cache=True)
def _walk(d, lo, hi, mode, cut_lo, cut_hi, out):
    """Traverse the recursion; returns (candidate count, rows needed for ``out``).

    mode 0 counts, mode 1 writes every candidate (e_0..e_d) to ``out``, mode 2
    writes only candidates with e_d <= cut_lo or e_d >= cut_hi and skips top
    level traces that cannot produce such a candidate.
    """
    binom = np.zeros((d + 1, d + 1))
    for n in range(d + 1):
        binom[n, 0] = 1.0
        for j in range(1, n + 1):
            binom[n, j] = binom[n - 1, j - 1] + (binom[n - 1, j] if j <= n - 1 else 0.0)
    e = np.zeros(d + 1, dtype=np.int64)
    e[0] = 1
    ef = np.zeros(d + 1)
    ef[0] = 1.0
    roots = np.zeros((d + 1, d + 1))
    coef = np.zeros(d + 1)
    cur = np.zeros(d + 1, dtype=np.int64)
    top = np.zeros(d + 1, dtype=np.int64)
    total = 0
    rows = 0
    cap = out.shape[0]

    k = 1
    a, b = _admissible(1, d, ef, roots, lo, hi, binom, coef)
    if d == 1:
        k = 0
        leaf_a, leaf_b = a, b
    else:
        cur[1], top[1] = a, b
    while k >= 1:
        if cur[k] > top[k]:
            k -= 1
            if k >= 1:
                cur[k] += 1
            continue
        e[k] = cur[k]
        ef[k] = float(cur[k])
        if mode == _SCAN and k == 1:
            s = float(e[1])
            if _min_product(s, d, lo, hi) > cut_lo * (1 + 1e-9) + 1 and (s / d) ** d < cut_hi * (1 - 1e-9) - 1:
                cur[1] += 1
                continue
        # roots of D_k, one per gap of the roots of D_{k-1}
        c = binom[d, k]
        for j in range(k):
            t = binom[k, j] / binom[d, j] * ef[j]
            coef[j] = -t if j % 2 else t
        coef[k] = -ef[k] / c if k % 2 else ef[k] / c
        for i in range(k):
            left = lo if i == 0 else roots[k - 1, i - 1]
            right = hi if i == k - 1 else roots[k - 1, i]
            roots[k, i] = _bracketed_root(coef, k, left, right)
        a, b = _admissible(k + 1, d, ef, roots, lo, hi, binom, coef)
        if k + 1 < d:
            if a <= b:
                k += 1
                cur[k], top[k] = a, b
            else:
                cur[k] += 1
            continue
        # leaf level: e_d ranges over [a, b]
        if a <= b:
            total += b - a + 1
            if mode == _COLLECT:
                for v in range(a, b + 1):
                    if rows < cap:
                        out[rows, :d] = e[:d]
                        out[rows, d] = v
                    rows += 1
            elif mode == _SCAN:
                for v in range(a, b + 1):
                    if v <= cut_lo or v >= cut_hi:
                        if rows < cap:
                            out[rows, :d] = e[:d]
                            out[rows, d] = v
                        rows += 1
        cur[k] += 1

    if d == 1:
        for v in range(leaf_a, leaf_b + 1):
            total += 1
            if mode == _COLLECT or (mode == _SCAN and (v <= cut_lo or v >= cut_hi)):
                if rows < cap:
                    out[rows, 0] = 1
                    out[rows, 1] = v
                rows += 1
    return total, rows


def _float_interval(q: int) -> tuple[float, float]:
    lo, hi = weil_interval(q)
    # widened outward; the exact filter removes anything this lets in
    return float(lo) - 1e-9, float(hi) + 1e-9


def _run(q: int, d: int, mode: int, cut_lo: float = -1.0, cut_hi: float = np.inf) -> tuple[int, np.ndarray]:
    lo, hi = _float_interval(q)
    cap = 1 << 16
    while True:
        out = np.zeros((cap, d + 1), dtype=np.int64)
        total, rows = _walk(d, lo, hi, mode, float(cut_lo), float(cut_hi), out)
        if rows <= cap:
            return total, out[:rows]
        cap = rows


def candidate_count(q, d: int) -> int:
    """Number of real-rooted candidates the float walk produces (reducible included)."""
    return _run(FieldSize.of(q).q, d, _COUNT)[0]


def _rows_to_coeffs(rows: np.ndarray) -> np.ndarray:
    # e_0..e_d  ->  ascending coefficients c_{d-j} = (-1)^j e_j
    d = rows.shape[1] - 1
    signs = np.array([(-1) ** j for j in range(d + 1)], dtype=np.int64)
    return (rows * signs)[:, ::-1]


# ---------------------------------------------------------------------------
# Exact filter
# ---------------------------------------------------------------------------

def _batch_roots(coeffs: np.ndarray) -> np.ndarray:
    n, width = coeffs.shape
    d = width - 1
    if n == 0:
        return np.zeros((0, d))
    if d == 1:
        return -coeffs[:, :1].astype(float)
    comp = np.zeros((n, d, d))
    comp[:, 0, :] = -coeffs[:, d - 1::-1].astype(float)
    comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    return np.linalg.eigvals(comp)


@functools.lru_cache(maxsize=None)
def _subsets(d: int) -> list[np.ndarray]:
    return [np.array(list(itertools.combinations(range(d), s))) for s in range(1, d // 2 + 1)]


def _factor_hints(roots: np.ndarray) -> list[list[np.ndarray]]:
    """Per candidate, the root subsets whose sum and product are both near integers.

    A monic integer factor of degree s <= d/2 is the product over some s roots,
    so its trace and constant term are integers.  Subsets failing that screen
    cannot give a factor, provided the roots are simple and accurate to well
    within the tolerance.
    """
    n, d = roots.shape
    hints: list[list[np.ndarray]] = [[] for _ in range(n)]
    for combos in _subsets(d):
        picked = roots[:, combos]
        sums = picked.sum(axis=2)
        prods = picked.prod(axis=2)
        near = (np.abs(sums - np.round(sums)) <= 1e-6 * (1 + np.abs(sums))) & (
            np.abs(prods - np.round(prods)) <= 1e-6 * (1 + np.abs(prods)))
        for i, j in zip(*np.nonzero(near)):
            hints[i].append(picked[i, j])
    return hints


def _has_factor(p: IntPolynomial, subsets: Sequence[np.ndarray]) -> bool:
    # exact confirmation of the screened subsets
    for vals in subsets:
        ints = np.round(np.poly(vals))
        f = IntPolynomial(int(v) for v in ints[::-1])
        if f.degree >= 1 and f.divides(p):
            return True
    return False


def _exact_filter(q: int, rows: np.ndarray, irreducible: bool = True) -> list[RealOrbit]:
    if len(rows) == 0:
        return []
    coeffs = _rows_to_coeffs(rows)
    roots = _batch_roots(coeffs)
    d = coeffs.shape[1] - 1
    real = np.sort(np.real(roots), axis=1)
    hints = _factor_hints(real) if irreducible and d > 1 else [[] for _ in range(len(rows))]
    lo, hi = weil_interval(q)
    fq = FieldSize.of(q)
    out = []
    endpoint_poly = IntPolynomial([(q - 1) ** 2, -2 * (q + 1), 1])
    for row, rts, hint in zip(coeffs.tolist(), roots, hints):
        p = IntPolynomial(row)
        if not _alternation_certificate(p, q, rts):
            if irreducible and d > 1:
                # repeated roots or an endpoint root force a proper factor
                if poly_gcd(p, p.derivative()).degree > 0:
                    continue
                if d > 2 and (sign_at(p, lo) == 0 or sign_at(p, hi) == 0 or endpoint_poly.divides(p)):
                    continue
            if not _member_exact(p, lo, hi):
                continue
        if irreducible and d > 1 and hint and _has_factor(p, hint):
            continue
        out.append(RealOrbit(p, fq, check=False))
    return out


# ---------------------------------------------------------------------------
# Orbit sets
# ---------------------------------------------------------------------------

def _normalized_cmp(a: RealOrbit, b: RealOrbit) -> int:
    # Norm(a)^(1/da) vs Norm(b)^(1/db), exactly
    x = a.norm ** b.degree
    y = b.norm ** a.degree
    return (x > y) - (x < y)


@dataclass
class OrbitSet:
    q: FieldSize
    max_degree: int
    orbits: list[RealOrbit] = field(default_factory=list)

    def __post_init__(self):
        self.q = FieldSize.of(self.q)
        self.orbits = sorted(set(self.orbits), key=RealOrbit.sort_key)

    def __len__(self) -> int:
        return len(self.orbits)

    def __iter__(self):
        return iter(self.orbits)

    def of_degree(self, d: int) -> list[RealOrbit]:
        return [o for o in self.orbits if o.degree == d]

    def counts(self) -> dict[int, int]:
        out = {d: 0 for d in range(1, self.max_degree + 1)}
        for o in self.orbits:
            out[o.degree] += 1
        return out


def enumerate_orbits(q, max_degree: int) -> OrbitSet:
    """Every irreducible monic integer polynomial of degree <= max_degree with roots in the Weil interval."""
    fq = FieldSize.of(q)
    if not 1 <= max_degree <= MAX_DEGREE:
        raise InvalidInput(f"max_degree must be between 1 and {MAX_DEGREE}")
    orbits: list[RealOrbit] = []
    for d in range(1, max_degree + 1):
        _, rows = _run(fq.q, d, _COLLECT)
        orbits.extend(_exact_filter(fq.q, rows))
    return OrbitSet(fq, max_degree, orbits)


def scan_norm_outliers(q, max_degree: int, lower=None, upper=None) -> list[RealOrbit]:
    """Orbits of degree <= max_degree with normalized norm < lower or > upper.

    Exhaustive like enumerate_orbits, but only candidates whose norm can fall
    outside the window are materialized and checked exactly.
    """
    fq = FieldSize.of(q)
    if not 1 <= max_degree <= MAX_DEGREE:
        raise InvalidInput(f"max_degree must be between 1 and {MAX_DEGREE}")
    lower = None if lower is None else Fraction(lower)
    upper = None if upper is None else Fraction(upper)
    found: list[RealOrbit] = []
    for d in range(1, max_degree + 1):
        cut_lo = -1.0 if lower is None else float(lower**d) * (1 + 1e-9) + 1
        cut_hi = np.inf if upper is None else float(upper**d) * (1 - 1e-9) - 1
        _, rows = _run(fq.q, d, _SCAN, cut_lo, cut_hi)
        for o in _exact_filter(fq.q, rows):
            n = o.norm
            if (lower is not None and n < lower**d) or (upper is not None and n > upper**d):
                found.append(o)
    return sorted(found, key=RealOrbit.sort_key)


def extremal_orbits(orbit_set: OrbitSet, side: str, count: int) -> list[RealOrbit]:
    """The ``count`` orbits of smallest (lower) or largest (upper) normalized norm."""
    if not orbit_set.orbits:
        raise InvalidInput("empty orbit set")
    if side not in ("lower", "upper"):
        raise InvalidInput(f"side must be lower or upper, not {side!r}")
    key = functools.cmp_to_key(_normalized_cmp)
    if side == "lower":
        ranked = sorted(orbit_set.orbits, key=lambda o: (key(o), o.degree, o.minimal_polynomial.coeffs))
    else:
        ranked = sorted(orbit_set.orbits, key=lambda o: (key(o), -o.degree, o.minimal_polynomial.coeffs), reverse=True)
    return ranked[:count]


# ---------------------------------------------------------------------------
# Cache files
# ---------------------------------------------------------------------------

class CacheFormatError(InvalidInput):
    pass


def save_cache(orbit_set: OrbitSet, path) -> None:
    path = Path(path)
    lines = [f"{CACHE_HEADER} q={orbit_set.q.q} maxdeg={orbit_set.max_degree} count={len(orbit_set)}"]
    lines.extend(o.serialize() for o in orbit_set.orbits)
    path.write_text("\n".join(lines) + "\n")


def load_cache(path, check: bool = False) -> OrbitSet:
    path = Path(path)
    text = path.read_text().splitlines()
    if not text:
        raise CacheFormatError(f"{path}: line 1: missing header")
    parts = text[0].split()
    try:
        if " ".join(parts[:2]) != CACHE_HEADER or len(parts) != 5:
            raise ValueError
        fields = dict(p.split("=", 1) for p in parts[2:])
        q, maxdeg, count = int(fields["q"]), int(fields["maxdeg"]), int(fields["count"])
    except (ValueError, KeyError):
        raise CacheFormatError(f"{path}: line 1: malformed header {text[0]!r}") from None
    orbits = []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        try:
            o = RealOrbit.deserialize(line, check=check)
        except InvalidInput as exc:
            raise CacheFormatError(f"{path}: line {lineno}: {exc}") from None
        if o.q.q != q:
            raise CacheFormatError(f"{path}: line {lineno}: q={o.q.q} differs from header q={q}")
        if o.degree > maxdeg:
            raise CacheFormatError(f"{path}: line {lineno}: degree {o.degree} exceeds maxdeg={maxdeg}")
        orbits.append(o)
    if len(orbits) != count:
        raise CacheFormatError(f"{path}: line 1: header count={count} but body has {len(orbits)} orbits")
    return OrbitSet(FieldSize.of(q), maxdeg, orbits)


def default_cache_dir() -> Path | None:
    env = os.environ.get("AVBOUNDS_CACHE")
    return Path(env) if env else None


def cached_orbits(q, max_degree: int, cache_dir=None) -> OrbitSet:
    """enumerate_orbits, reusing a cache file named q<q>_d<d>.orbits when present."""
    fq = FieldSize.of(q)
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    if cache_dir is None:
        return _memo_orbits(fq.q, max_degree)
    path = cache_dir / f"q{fq.q}_d{max_degree}.orbits"
    if path.exists():
        return load_cache(path)
    result = _memo_orbits(fq.q, max_degree)
    cache_dir.mkdir(parents=True, exist_ok=True)
    save_cache(result, path)
    return result


@functools.lru_cache(maxsize=32)
def _memo_orbits(q: int, max_degree: int) -> OrbitSet:
    return enumerate_orbits(q, max_degree)


def orbits_from_polynomials(q, polys: Iterable[IntPolynomial]) -> list[RealOrbit]:
    return [RealOrbit(p, q) for p in polys]
