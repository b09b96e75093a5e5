"""Certified bounds on point counts of simple abelian varieties over small finite fields."""

from .auxbound import AuxiliarySystem, BoundCertificate, bound_theorem_easy, certify, exception_set
from .chebyshev import ChebyshevFamily, extremal_family, monic_chebyshev
from .enumeration import OrbitSet, enumerate_orbits, extremal_orbits, load_cache, save_cache, scan_norm_outliers
from .exactcore import IntPolynomial, InvalidInput, resultant, sturm_count
from .lpopt import build_lp, optimize_and_certify, solve
from .weilring import (
    FieldSize,
    RealOrbit,
    WeilPolynomial,
    from_weil,
    is_member,
    point_count,
    point_count_extension,
    quadratic_twist,
    to_weil,
)

__version__ = "0.1.0"

__all__ = [
    "AuxiliarySystem", "BoundCertificate", "ChebyshevFamily", "FieldSize", "IntPolynomial", "InvalidInput",
    "OrbitSet", "RealOrbit", "WeilPolynomial", "bound_theorem_easy", "build_lp", "certify", "enumerate_orbits",
    "exception_set", "extremal_family", "extremal_orbits", "from_weil", "is_member", "load_cache",
    "monic_chebyshev", "optimize_and_certify", "point_count", "point_count_extension", "quadratic_twist",
    "resultant", "save_cache", "scan_norm_outliers", "solve", "sturm_count", "to_weil",
]
