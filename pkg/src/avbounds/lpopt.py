"""Exponent search by linear programming on a mesh.

For fixed polynomials the best exponents for the lower side solve

    max t  s.t.  t + sum_i g_i log|P_i(x_k)| <= log x_k  for all mesh points x_k,  g >= 0

and for the upper side min t with log x_k + sum_j b_j log|Q_j(x_k)| <= t.  The
LP is solved by a small dense simplex method (condensed tableau, Bland's rule),
the exponents are rounded to 4 decimals and the result is certified by
auxbound over the whole interval.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .auxbound import AuxiliarySystem, BoundCertificate, certify
from .enumeration import OrbitSet, extremal_orbits
from .exactcore import IntPolynomial, InvalidInput, real_roots
from .weilring import FieldSize, weil_interval

log = logging.getLogger(__name__)

EXPONENT_DECIMALS = 4


class DegenerateMesh(InvalidInput):
    pass


class SolverFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Dense simplex
# ---------------------------------------------------------------------------

@dataclass
class SimplexResult:
    status: str
    x: np.ndarray
    objective: float
    iterations: int
    trace: list[str] = field(default_factory=list)


class _Tableau:
    """Condensed (Tucker) tableau: basic_i + sum_j D[i, j] nonbasic_j = beta_i,  z = z0 + c . nonbasic."""

    def __init__(self, D, beta, c, basic, nonbasic, eps):
        self.D = D
        self.beta = beta
        self.c = c
        self.z0 = 0.0
        self.basic = basic
        self.nonbasic = nonbasic
        self.eps = eps

    def pivot(self, r: int, j: int) -> None:
        D, beta, c = self.D, self.beta, self.c
        p = D[r, j]
        row = D[r].copy()
        row[j] = 1.0
        row /= p
        br = beta[r] / p
        col = D[:, j].copy()
        col[r] = 0.0
        D -= np.outer(col, row)
        D[:, j] = -col / p
        D[r] = row
        beta -= col * br
        beta[r] = br
        cj = c[j]
        c -= cj * row
        c[j] = -cj / p
        self.z0 += cj * br
        self.basic[r], self.nonbasic[j] = self.nonbasic[j], self.basic[r]

    def entering(self):
        # Bland: smallest label with positive reduced cost
        best = None
        for j in np.nonzero(self.c > self.eps)[0]:
            if best is None or self.nonbasic[j] < self.nonbasic[best]:
                best = j
        return best

    def leaving(self, j: int):
        col = self.D[:, j]
        rows = np.nonzero(col > self.eps)[0]
        if rows.size == 0:
            return None
        ratios = self.beta[rows] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + self.eps * (1 + abs(best))]
        return min(tied, key=lambda i: self.basic[i])

    def run(self, max_iter: int, trace: list[str] | None) -> tuple[str, int]:
        for it in range(max_iter):
            j = self.entering()
            if j is None:
                return "optimal", it
            r = self.leaving(j)
            if r is None:
                return "unbounded", it
            if trace is not None:
                trace.append(f"iter {it}: enter x{self.nonbasic[j]} leave x{self.basic[r]} z={self.z0:.12g}")
            self.pivot(r, j)
        raise SolverFailure(f"simplex did not terminate in {max_iter} iterations; "
                            f"objective {self.z0:.12g}, basis {sorted(self.basic)[:10]}...")


def simplex_max(c, A, b, max_iter: int = 50000, eps: float = 1e-11, debug: bool = False) -> SimplexResult:
    """max c.x subject to A x <= b, x >= 0.

    Variables are labelled 0..n-1, slacks n..n+m-1.  When some b_i < 0 an
    auxiliary variable (label n+m) is introduced for a first phase.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    trace: list[str] | None = [] if debug else None
    iterations = 0
    if m == 0:
        if np.any(c > eps):
            return SimplexResult("unbounded", np.zeros(n), math.inf, 0, trace or [])
        return SimplexResult("optimal", np.zeros(n), 0.0, 0, trace or [])
    if b.min() < 0:
        aux = n + m
        D = np.hstack([A, -np.ones((m, 1))])
        t = _Tableau(D, b.copy(), np.r_[np.zeros(n), -1.0], list(range(n, n + m)), list(range(n)) + [aux], eps)
        t.pivot(int(np.argmin(b)), n)
        status, it = t.run(max_iter, trace)
        iterations += it
        if status != "optimal" or t.z0 < -1e-9 * (1 + np.abs(b).max()):
            return SimplexResult("infeasible", np.zeros(n), math.nan, iterations, trace or [])
        if aux in t.basic:
            r = t.basic.index(aux)
            j = int(np.argmax(np.abs(t.D[r])))
            t.pivot(r, j)
        j = t.nonbasic.index(aux)
        keep = [k for k in range(len(t.nonbasic)) if k != j]
        D = t.D[:, keep].copy()
        beta = np.maximum(t.beta, 0.0)
        basic, nonbasic = t.basic, [t.nonbasic[k] for k in keep]
    else:
        D, beta = A.copy(), b.copy()
        basic, nonbasic = list(range(n, n + m)), list(range(n))
    # objective in terms of the current nonbasic variables
    cost = np.zeros(len(nonbasic))
    z0 = 0.0
    pos = {v: k for k, v in enumerate(nonbasic)}
    for v in range(n):
        if v in pos:
            cost[pos[v]] += c[v]
        else:
            i = basic.index(v)
            cost -= c[v] * D[i]
            z0 += c[v] * beta[i]
    t = _Tableau(D, beta, cost, basic, nonbasic, eps)
    t.z0 = z0
    status, it = t.run(max_iter, trace)
    iterations += it
    x = np.zeros(n)
    for i, v in enumerate(t.basic):
        if v < n:
            x[v] = t.beta[i]
    obj = float(c @ x) if status == "optimal" else math.inf
    return SimplexResult(status, x, obj, iterations, trace or [])


# ---------------------------------------------------------------------------
# Mesh LP
# ---------------------------------------------------------------------------

@dataclass
class MeshLP:
    q: FieldSize
    side: str
    polynomials: list[IntPolynomial]
    mesh: np.ndarray
    exclusion_radius: float
    log_x: np.ndarray = field(repr=False, default=None)
    log_p: np.ndarray = field(repr=False, default=None)  # (polys, points)

    def __post_init__(self):
        m = np.asarray(self.mesh, dtype=float)
        if m.size and np.any(np.diff(m) <= 0):
            raise InvalidInput("mesh must be strictly increasing")
        self.mesh = m
        if self.log_x is None:
            self.log_x = np.log(m)
        if self.log_p is None:
            self.log_p = np.array([np.log(np.abs(_polyval(p, m))) for p in self.polynomials]).reshape(
                len(self.polynomials), m.size)


@dataclass
class LPSolution:
    exponents: list[float]
    objective: float
    status: str
    iterations: int = 0
    trace: list[str] = field(default_factory=list)

    @property
    def bound(self) -> float:
        return math.exp(self.objective)


def _polyval(p: IntPolynomial, x: np.ndarray) -> np.ndarray:
    return np.polyval([float(c) for c in reversed(p.coeffs)], x)


def build_lp(q, side: str, polynomials: Sequence[IntPolynomial], mesh_size: int,
             exclusion_radius: float | None = None) -> MeshLP:
    """Uniform mesh of ``mesh_size`` points, minus points near polynomial roots.

    The first and last points sit a few ulps inside the interval ends, where
    the extremum is often attained.
    """
    fq = FieldSize.of(q)
    if side not in ("lower", "upper"):
        raise InvalidInput(f"side must be lower or upper, not {side!r}")
    if mesh_size < 64:
        raise InvalidInput("mesh_size must be at least 64")
    if not polynomials:
        raise InvalidInput("at least one polynomial is needed")
    lo, hi = (float(v) for v in weil_interval(fq))
    if exclusion_radius is None:
        exclusion_radius = 1e-3 * (hi - lo)
    a, b = lo, hi
    for _ in range(4):
        a, b = np.nextafter(a, math.inf), np.nextafter(b, -math.inf)
    mesh = np.linspace(a, b, mesh_size)
    keep = np.ones(mesh.size, dtype=bool)
    for p in polynomials:
        for r in real_roots(p, Fraction(math.floor(lo)), Fraction(math.ceil(hi)), tol=1e-12):
            keep &= np.abs(mesh - r) > exclusion_radius
    mesh = mesh[keep]
    if mesh.size == 0:
        raise DegenerateMesh(f"every mesh point lies within {exclusion_radius} of a root")
    return MeshLP(fq, side, list(polynomials), mesh, exclusion_radius)


def solve(lp: MeshLP, max_iter: int = 50000, debug: bool = False) -> LPSolution:
    """Optimal exponents for the mesh LP (see module docstring)."""
    L = lp.log_p.T  # (points, polys)
    bx = lp.log_x
    n = L.shape[1]
    # shift t so that the origin is feasible: t = t0 + u (lower), t = t0 - u (upper)
    if lp.side == "lower":
        t0 = float(bx.min())
        rhs = bx - t0
    else:
        t0 = float(bx.max())
        rhs = t0 - bx
    A = np.hstack([L, np.ones((L.shape[0], 1))])
    c = np.r_[np.zeros(n), 1.0]
    res = simplex_max(c, A, rhs, max_iter=max_iter, debug=debug)
    if debug:
        for line in res.trace:
            log.debug(line)
    if res.status != "optimal":
        return LPSolution([math.nan] * n, math.nan, res.status, res.iterations, res.trace)
    u = res.x[n]
    t = t0 + u if lp.side == "lower" else t0 - u
    return LPSolution([float(v) for v in res.x[:n]], t, "optimal", res.iterations, res.trace)


def lp_violation(lp: MeshLP, exponents: Sequence[float], t: float) -> float:
    """Largest constraint violation of (exponents, t) over the mesh, in floats."""
    g = np.asarray(exponents, dtype=float)
    vals = lp.log_x - lp.log_p.T @ g if lp.side == "lower" else lp.log_x + lp.log_p.T @ g
    return float(np.max(t - vals)) if lp.side == "lower" else float(np.max(vals - t))


def recheck_feasibility(lp: MeshLP, exponents: Sequence[Fraction], t: float, dps: int = 40,
                        slack: float = 1e-9) -> bool:
    """Re-evaluate every constraint from exact integers and rational exponents at high precision."""
    if any(Fraction(g) < 0 for g in exponents):
        return False
    with mpmath.workdps(dps):
        sign = -1 if lp.side == "lower" else 1
        tt = mpmath.mpf(t)
        for x in lp.mesh:
            xr = Fraction(float(x))
            val = mpmath.log(mpmath.mpf(xr.numerator) / xr.denominator)
            for p, g in zip(lp.polynomials, exponents):
                if g == 0:
                    continue
                pv = sum(c * xr**k for k, c in enumerate(p.coeffs))
                val += sign * mpmath.mpf(Fraction(g).numerator) / Fraction(g).denominator * mpmath.log(
                    abs(mpmath.mpf(pv.numerator) / pv.denominator))
            if lp.side == "lower" and tt > val + slack:
                return False
            if lp.side == "upper" and tt < val - slack:
                return False
    return True


def _rounded_objective(lp: MeshLP, exponents: Sequence[Fraction]) -> float:
    g = np.array([float(e) for e in exponents])
    if lp.side == "lower":
        return float(np.min(lp.log_x - lp.log_p.T @ g)) - 1e-12
    return float(np.max(lp.log_x + lp.log_p.T @ g)) + 1e-12


def round_exponents(values: Sequence[float], decimals: int = EXPONENT_DECIMALS) -> list[Fraction]:
    return [Fraction(Decimal(repr(max(v, 0.0))).quantize(Decimal(1).scaleb(-decimals))) for v in values]


def optimize_and_certify(q, side: str, pool: OrbitSet, pool_size: int, mesh_size: int = 4096,
                         tolerance="1e-4", debug: bool = False) -> BoundCertificate:
    """Pick extremal orbits, solve the mesh LP, round the exponents and certify."""
    fq = FieldSize.of(q)
    chosen = extremal_orbits(pool, side, pool_size)
    polys = [o.minimal_polynomial for o in chosen]
    lp = build_lp(fq, side, polys, mesh_size)
    sol = solve(lp, debug=debug)
    if sol.status != "optimal":
        raise SolverFailure(f"mesh LP is {sol.status} for q={fq.q} {side}")
    exps = round_exponents(sol.exponents)
    kept = [(p, g) for p, g in zip(polys, exps) if g >= Fraction(1, 10**EXPONENT_DECIMALS)]
    if not kept:
        raise SolverFailure("every exponent rounded to zero")
    # the rounded exponents must still satisfy every mesh constraint at the rounded-exponent objective
    t = _rounded_objective(lp, exps)
    lp_feasible = recheck_feasibility(lp, exps, t)
    system = AuxiliarySystem(fq, side, [p for p, _ in kept], [g for _, g in kept])
    cert = certify(system, tolerance)
    cert.lp_solution = sol
    cert.lp_feasible = lp_feasible
    if not lp_feasible:
        cert.warnings.append("rounded exponents failed the high-precision mesh recheck")
    return cert
