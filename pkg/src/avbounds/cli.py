"""Command-line front end.

Exit codes: 0 success, 1 verification discrepancy, 2 usage error, 3 internal or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, fields, replace
from decimal import Decimal
from pathlib import Path

from . import __version__
from .exactcore import InvalidInput

log = logging.getLogger("avbounds")

EXIT_OK, EXIT_DISCREPANCY, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
CONFIG_ENV = "AVBOUNDS_CONFIG"
DEFAULT_CONFIG = Path("~/.config/avbounds/config")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    tolerance: Decimal = Decimal("1e-4")
    mesh_size: int = 4096
    degree_cap: int = 6
    cache_dir: Path | None = None
    output_format: str = "text"

    _parsers = {
        "tolerance": Decimal,
        "mesh_size": int,
        "degree_cap": int,
        "cache_dir": lambda s: Path(s).expanduser(),
        "output_format": str,
    }

    def validated(self) -> RunConfig:
        if self.output_format not in ("text", "json"):
            raise UsageError(f"output_format must be text or json, not {self.output_format!r}")
        if self.mesh_size < 64:
            raise UsageError("mesh_size must be at least 64")
        if not 1 <= self.degree_cap <= 8:
            raise UsageError("degree_cap must be between 1 and 8")
        if self.tolerance <= 0:
            raise UsageError("tolerance must be positive")
        return self


def read_config_file(path: Path) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    names = {f.name for f in fields(RunConfig)}
    for n, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in names:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        try:
            out[key] = RunConfig._parsers[key](value)
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"{path}:{n}: bad value for {key}: {value!r}") from exc
    return out


def load_config(args) -> RunConfig:
    """Defaults < config file < AVBOUNDS_CACHE < flags."""
    values: dict = {}
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        path = Path(path).expanduser()
        if not path.exists():
            raise UsageError(f"config file {path} not found")
        values.update(read_config_file(path))
    elif DEFAULT_CONFIG.expanduser().exists():
        values.update(read_config_file(DEFAULT_CONFIG.expanduser()))
    if os.environ.get("AVBOUNDS_CACHE"):
        values["cache_dir"] = Path(os.environ["AVBOUNDS_CACHE"])
    for key in ("tolerance", "mesh_size", "degree_cap", "cache_dir", "output_format"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = RunConfig._parsers[key](str(v))
    return replace(RunConfig(), **values).validated()


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_bounds(args, cfg: RunConfig) -> int:
    from .auxbound import bound_theorem_easy
    from .enumeration import cached_orbits
    from .lpopt import optimize_and_certify
    from .paperlab import SUPPORTED_Q, from_paper

    sides = [args.side] if args.side else ["lower", "upper"]
    certs = []
    for side in sides:
        if args.from_paper:
            if args.q not in SUPPORTED_Q:
                raise UsageError(f"--from-paper supports q in {{{', '.join(map(str, SUPPORTED_Q))}}}, not {args.q}")
            certs.append(from_paper(args.q, side, cfg.tolerance))
        elif args.easy:
            certs.append(bound_theorem_easy(args.q, side, cfg.tolerance))
        else:
            pool = cached_orbits(args.q, args.pool_degree, cfg.cache_dir)
            certs.append(optimize_and_certify(args.q, side, pool, args.pool_size, cfg.mesh_size, cfg.tolerance,
                                              debug=getattr(args, "verbose", 0) > 1))
    doc = certs[0].to_dict() if len(certs) == 1 else [c.to_dict() for c in certs]
    if cfg.output_format == "json":
        print(_dump(doc))
    else:
        for c in certs:
            name = "m" if c.side == "lower" else "M"
            print(f"q={c.system.q.q} {c.side}: {name} {c.marked()}  (tolerance {c.tolerance}, depth {c.subdivision_depth})")
            for p, g in zip(c.system.polynomials, c.system.exponents):
                print(f"  {p}  exponent {g.numerator}/{g.denominator}")
            for e in c.exceptions:
                flag = "violates" if e.violates else "satisfies"
                print(f"  exception candidate {e.orbit}: normalized norm {e.normalized_norm} ({flag})")
            for w in c.warnings:
                print(f"  note: {w}")
    _write(args.out, _dump(doc))
    return EXIT_OK


def cmd_enumerate(args, cfg: RunConfig) -> int:
    from .enumeration import cached_orbits, save_cache

    orbit_set = cached_orbits(args.q, args.max_degree, cfg.cache_dir)
    if args.out:
        try:
            save_cache(orbit_set, args.out)
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    if cfg.output_format == "json":
        print(_dump({"q": args.q, "max_degree": args.max_degree, "count": len(orbit_set),
                     "counts": {str(k): v for k, v in orbit_set.counts().items()},
                     "orbits": [list(o.minimal_polynomial.coeffs) for o in orbit_set]}))
    else:
        for o in orbit_set:
            print(f"{o}\tnorm {o.norm}\tnormalized {o.normalized_norm:.6f}")
        print(f"# {len(orbit_set)} orbits for q={args.q}, degree <= {args.max_degree}")
    return EXIT_OK


def cmd_chebyshev(args, cfg: RunConfig) -> int:
    from .chebyshev import ChebyshevFamily, closed_form_limit, growth_rate, lemma_bracket

    fam = ChebyshevFamily.build(args.ell, args.N)
    translate = fam.translate()
    rate = growth_rate(args.ell, args.N) if args.N >= 1 else None
    limit = closed_form_limit(args.N)
    doc = {
        "N": args.N,
        "ell": args.ell,
        "P": list(fam.P.coeffs),
        "R_translate": list(translate.coeffs),
        "growth_rate": None if rate is None else f"{float(rate):.12f}",
        "closed_form_limit": f"{float(limit):.12f}",
        "lemma_bracket": [f"{v:.12f}" for v in lemma_bracket(args.N)] if args.N >= 1 else None,
    }
    if cfg.output_format == "json":
        print(_dump(doc))
    else:
        print(f"P_{args.ell} = {fam.P}")
        print(f"R_{args.ell}(x-{args.N}) = {translate}")
        if rate is not None:
            print(f"|P_{args.ell}(-{args.N})|^(1/{args.ell}) = {doc['growth_rate']}")
            print(f"lemma bracket [{doc['lemma_bracket'][0]}, {doc['lemma_bracket'][1]}]")
        print(f"limit (1+N/2)+sqrt((1+N/2)^2-1) = {doc['closed_form_limit']}")
    return EXIT_OK


def cmd_verify_paper(args, cfg: RunConfig) -> int:
    from .paperlab import reproduce_tables

    report = reproduce_tables(cfg.tolerance)
    doc = report.to_dict()
    show_bounds = args.table in ("1", "2", "all")
    show_aux = args.table in ("3", "all")
    if cfg.output_format == "json":
        print(_dump(doc))
    else:
        if show_bounds:
            print(f"{'q':>3}  {'m certified':>12}  {'listed':>7}  {'M certified':>12}  {'listed':>7}")
            for r in report.rows:
                print(f"{r.q:>3}  ≥{r.m_certified:>11}  {r.m_paper!s:>7}  ≤{r.M_certified:>11}  {r.M_paper!s:>7}")
        if show_aux:
            print("\nexception candidates (normalized norm, violates):")
            for r in report.rows:
                for side, rows in (("lower", r.exceptions_lower), ("upper", r.exceptions_upper)):
                    for p, nn, v in rows:
                        print(f"  q={r.q} {side}: {p}  {nn}  {'yes' if v else 'no'}")
        print("\nannotated discrepancies:")
        for d in report.discrepancies:
            print(f"  {d}")
        contra = [c for r in report.rows for c in r.contradictions]
        if contra:
            print("\nunsupported listed values (beyond slack, not annotated):")
            for c in contra:
                print(f"  {c}")
    _write(args.json_out, _dump(doc))
    return EXIT_DISCREPANCY if report.contradicted else EXIT_OK


def cmd_new_points(args, cfg: RunConfig) -> int:
    from .paperlab import new_points_scan

    cap = args.degree_cap if args.degree_cap is not None else cfg.degree_cap
    report = new_points_scan(cap)
    if cfg.output_format == "json":
        print(_dump(report.to_dict()))
    else:
        print("stage 1 pairs: " + ", ".join(f"({q},{r})" for q, r in report.candidate_pairs))
        print("surviving pairs: " + ", ".join(f"({q},{r})" for q, r in report.surviving_pairs))
        for q, r in report.surviving_pairs:
            found = [str(o) for qq, rr, o in report.exceptional_orbits if (qq, rr) == (q, r)]
            print(f"(q={q}, r={r}): #A(F_q^r) = #A(F_q) for " + (", ".join(found) if found else "no orbit"))
        for note in report.notes:
            print(f"note: {note}")
        print(f"# exhaustive up to degree {cap} only")
    return EXIT_OK


def cmd_torsion(args, cfg: RunConfig) -> int:
    from .paperlab import torsion_bound

    value = torsion_bound(3, cfg.tolerance)
    if cfg.output_format == "json":
        print(_dump({"q": 3, "bound": str(value), "direction": "upper"}))
    else:
        print(f"#A(F_3)[2] ≤{value}^g")
    return EXIT_OK


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's parser from resetting options given before it
    quiet = argparse.SUPPRESS
    common.add_argument("--config", default=quiet, help="key=value config file")
    common.add_argument("--format", dest="output_format", choices=["text", "json"], default=quiet)
    common.add_argument("--tolerance", default=quiet)
    common.add_argument("--mesh-size", dest="mesh_size", type=int, default=quiet)
    common.add_argument("--cache-dir", dest="cache_dir", default=quiet)
    common.add_argument("-v", "--verbose", action="count", default=quiet)

    p = _Parser(prog="avbounds", description="Certified point-count bounds for simple abelian varieties.",
                parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", parents=[common], help="certify m(q) and/or M(q)")
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--side", choices=["lower", "upper"])
    mode = b.add_mutually_exclusive_group()
    mode.add_argument("--from-paper", action="store_true", help="use the tabulated auxiliary systems")
    mode.add_argument("--optimize", action="store_true", help="choose exponents by the mesh LP (default)")
    mode.add_argument("--easy", action="store_true", help="single-polynomial integer-endpoint bounds")
    b.add_argument("--pool-degree", type=int, default=3)
    b.add_argument("--pool-size", type=int, default=8)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("enumerate", parents=[common], help="list orbits up to a degree")
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--max-degree", type=int, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_enumerate)

    c = sub.add_parser("chebyshev", parents=[common], help="shifted Chebyshev family data")
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--ell", type=int, required=True)
    c.set_defaults(func=cmd_chebyshev)

    v = sub.add_parser("verify-paper", parents=[common], help="reproduce the bound tables")
    v.add_argument("--table", choices=["1", "2", "3", "all"], default="all")
    v.add_argument("--json-out")
    v.set_defaults(func=cmd_verify_paper)

    n = sub.add_parser("new-points", parents=[common], help="fields with no new points")
    n.add_argument("--degree-cap", dest="degree_cap", type=int, default=None)
    n.set_defaults(func=cmd_new_points)

    t = sub.add_parser("torsion", parents=[common], help="2-torsion bound over F_3")
    t.set_defaults(func=cmd_torsion)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        verbose = getattr(args, "verbose", 0)
        logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last resort
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
