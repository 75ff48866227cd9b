"""Command-line interface: ``unipotent <subcommand> [flags]``.

Subcommands: ``dims``, ``crossing``, ``polylog``, ``solve``, ``reduce``,
``check``.  ``--config FILE`` reads flat ``key = value`` lines whose keys
are flag names without the leading dashes (``max-n = 8``, ``compact = true``);
flags on the command line take precedence.  A value starting with a minus
sign needs the ``--flag=value`` form on the command line (``--x=-1/2``).

Connection files (``--file``) are line based, ``#`` starts a comment::

    places = 0, 1          # finite punctures (rational literals)
    basepoint = 1/2        # for solve/check
    rank = 3               # for reduce
    omega[1,2] = z         # connection entry (row, column), a rational function of z
    alpha[1] = 1/z         # basis form override for solve/check

Without ``alpha`` lines the forms are ``dz/(z - a)`` for each place.  The
basepoint defaults to the first integer in ``0, -1, 2, -2, ...`` that is not
a place.

Exit status: 0 on success (a crossing search that finds none included),
1 when an input is rejected, 2 when an internal identity fails.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
import warnings
from fractions import Fraction

from . import __version__
from .coeffs import PAdicNumber
from .connection import (UniversalConnection, evaluate_section, form_offset,
                         independence_test, polylog, regular_basepoint, shuffle_check,
                         solve_horizontal, word_tail)
from .derham import ConnMatrix, PlaceSet, gauge_identity_holds, gauge_reduce, parse_ratfunc, \
    parse_rational
from .errors import DiskError, DomainError, InvariantViolation, ParseError
from .lcs_dims import CurveShape, dim_ladder, elliptic_example
from .ncseries import format_word, is_grouplike
from .report import CheckReport, Report, SolveReport, encode_rational, render
from .selmer_bounds import MODES, AwayPlace, CurveData, find_crossing

log = logging.getLogger("unipotent")

SUBCOMMANDS = ("dims", "crossing", "polylog", "solve", "reduce", "check")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input rejections (exit 1), not internal failures."""

    def error(self, message):
        raise DomainError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# connection files and config files
# ---------------------------------------------------------------------------

class ConnectionSpec:
    def __init__(self, places=(), basepoint=None, rank=None, omega=None, alpha=None):
        self.places = PlaceSet(tuple(places))
        self.basepoint = basepoint
        self.rank = rank
        self.omega = dict(omega or {})
        self.alpha = dict(alpha or {})

    def forms(self) -> tuple:
        if not self.alpha:
            if not self.places.poles:
                raise DomainError("connection file lists neither places nor alpha forms")
            return self.places.basis_forms()
        m = max(self.alpha)
        missing = [i for i in range(1, m + 1) if i not in self.alpha]
        if missing:
            raise DomainError(f"alpha forms missing for indices {missing}")
        return tuple(self.alpha[i] for i in range(1, m + 1))

    def resolved_basepoint(self) -> Fraction:
        if self.basepoint is not None:
            return self.basepoint
        for c in (0, -1, 2, -2, 3, -3, 4):
            if c not in self.places:
                return Fraction(c)
        raise DomainError("no default basepoint; give one with 'basepoint ='")

    def connection(self) -> UniversalConnection:
        return UniversalConnection(self.forms(), self.resolved_basepoint(), self.places)


_ENTRY = re.compile(r"^(omega|alpha)\s*\[\s*([^\]]*)\]$")


def parse_connection_text(text: str) -> ConnectionSpec:
    places, basepoint, rank = (), None, None
    omega, alpha = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "places":
                places = tuple(parse_rational(a) for a in value.split(",") if a.strip())
            elif key == "basepoint":
                basepoint = parse_rational(value)
            elif key == "rank":
                rank = int(value)
            elif (mt := _ENTRY.match(key)):
                idx = tuple(int(i) for i in mt.group(2).split(","))
                f = parse_ratfunc(value)
                if mt.group(1) == "omega":
                    if len(idx) != 2:
                        raise DomainError("omega needs two indices")
                    omega[idx] = f
                else:
                    if len(idx) != 1 or idx[0] < 1:
                        raise DomainError("alpha needs one positive index")
                    alpha[idx[0]] = f
            else:
                raise DomainError(f"unknown key {key!r}")
        except (DomainError, ValueError) as exc:
            raise DomainError(f"line {lineno}: {exc}") from None
    return ConnectionSpec(places, basepoint, rank, omega, alpha)


def read_connection_file(path: str) -> ConnectionSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    return parse_connection_text(text)


def read_config(path: str) -> list[str]:
    """Config lines turned into flag tokens (inserted before the user's flags)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc.strerror}") from None
    tokens = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key == "config":
            raise DomainError("config files cannot include other config files")
        if value.lower() in ("true", "yes", "on"):
            tokens.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            tokens.append(f"--{key}={value}")
    return tokens


def parse_away(text: str) -> tuple:
    """``"gr1:gr2,gr1:gr2"``; an empty field means the default (``2g`` or ``g``)."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise DomainError(f"away place {item!r}: expected gr1:gr2")
        vals = [int(x) if x.strip() else None for x in parts]
        out.append(AwayPlace(*vals))
    return tuple(out)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _points(text: str) -> tuple:
    return tuple(_rational(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unipotent", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"unipotent {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--config", help="flat key = value file of flag defaults")
        p.add_argument("-v", "--verbose", action="count", default=0)

    def shape(p):
        p.add_argument("--genus", type=int, default=0)
        p.add_argument("--punctures", type=int, default=None)
        p.add_argument("--compact", action="store_true")

    def conn_source(p):
        p.add_argument("--file", help="connection input file")
        p.add_argument("--standard-p1", action="store_true",
                       help="P^1 minus {0, 1, inf} with dz/z, dz/(1-z) at b = 0")

    p = sub.add_parser("dims", help="graded dimension ladder")
    shape(p)
    p.add_argument("--max-n", type=int, default=10)
    common(p)

    p = sub.add_parser("crossing", help="Selmer bounds and crossing level")
    shape(p)
    p.add_argument("--mode", choices=MODES, default="conjecture2")
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--K", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n0", type=int, default=1)
    p.add_argument("--atp-places", type=int, default=1)
    p.add_argument("--away", default="", help="bad places away from p as gr1:gr2,...")
    p.add_argument("--elliptic-example", action="store_true")
    p.add_argument("--rank", type=int, default=1)
    common(p)

    p = sub.add_parser("polylog", help="p-adic polylogarithm near 0")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--x", type=_rational, required=True,
                   help="point in the residue disk of 0 (write --x=-5 for a leading minus)")
    p.add_argument("--order", type=int, default=40)
    common(p)

    p = sub.add_parser("solve", help="horizontal section of a connection")
    conn_source(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--x", type=_points, default=(),
                   help="evaluation points a,b,... (write --x=-1/2 for a leading minus)")
    p.add_argument("--p", type=int, default=None, help="evaluate p-adically at this prime")
    common(p)

    p = sub.add_parser("reduce", help="gauge reduction of a connection matrix")
    p.add_argument("--file", required=True)
    common(p)

    p = sub.add_parser("check", help="shuffle, group-like and independence checks")
    conn_source(p)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--deg-bound", type=int, default=1)
    p.add_argument("--order", type=int, default=40)
    p.add_argument("--p", type=int, default=5, help="prime for group-like sample points")
    common(p)
    return parser


def parse_args(argv) -> argparse.Namespace:
    argv = list(argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config and argv and argv[0] in SUBCOMMANDS:
        argv = [argv[0]] + read_config(known.config) + argv[1:]
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _shape(args) -> CurveShape:
    s = args.punctures
    if s is None:
        s = 0 if args.compact else 1
    return CurveShape(args.genus, s, args.compact)


def _positive(name, value, least=1):
    if value < least:
        raise DomainError(f"--{name} must be >= {least}")


def cmd_dims(args) -> Report:
    shape = _shape(args)
    rep = dim_ladder(shape, args.max_n)
    inputs = {"genus": args.genus, "punctures": shape.punctures, "compact": args.compact,
              "max_n": args.max_n}
    return Report("dims", inputs, rep, rep.warnings)


def cmd_crossing(args) -> Report:
    if args.elliptic_example:
        rep = elliptic_example(args.rank)
        inputs = {"elliptic_example": True, "rank": args.rank}
        return Report("crossing", inputs, rep, (
            "genus 1 minus the origin; level-2 Selmer piece built from units of Z vanishes",))
    shape = _shape(args)
    data = CurveData(shape, args.atp_places, parse_away(args.away), args.K, args.k, args.n0)
    rep = find_crossing(data, args.mode, args.n_max)
    inputs = {"genus": args.genus, "punctures": shape.punctures, "compact": args.compact,
              "mode": args.mode, "n_max": args.n_max, "K": args.K, "k": args.k,
              "n0": args.n0, "atp_places": args.atp_places,
              "away": [list(a.resolved(shape.genus)) for a in data.away]}
    return Report("crossing", inputs, rep, rep.warnings)


def cmd_polylog(args) -> Report:
    _positive("order", args.order)
    value = polylog(args.p, args.degree, PAdicNumber.exact(args.x, args.p), args.order)
    inputs = {"p": args.p, "degree": args.degree, "x": encode_rational(args.x),
              "order": args.order}
    return Report("polylog", inputs, value)


def _load_connection(args) -> tuple[UniversalConnection, str]:
    if args.standard_p1 == bool(args.file):
        raise DomainError("give exactly one of --file and --standard-p1")
    if args.standard_p1:
        return UniversalConnection.standard(), "standard-p1"
    return read_connection_file(args.file).connection(), args.file


def _tail_for(conn: UniversalConnection, base, p: int):
    off = min(form_offset(a, base, p) for a in conn.forms)
    return word_tail(off)


def _divergence_warning(sec) -> list:
    if not sec.divergent:
        return []
    words = ", ".join(sorted(format_word(w) for w in sec.divergent))
    return [f"iterated integrals diverge at the basepoint for: {words}; omitted"]


def cmd_solve(args) -> Report:
    _positive("depth", args.depth, 0)
    _positive("order", args.order)
    conn, source = _load_connection(args)
    sec = solve_horizontal(conn, args.depth, args.order)
    warns = _divergence_warning(sec)
    evals = []
    for x in args.x:
        if args.p is not None:
            px = PAdicNumber.exact(x, args.p)
            evals.append((px, evaluate_section(sec, px, _tail_for(conn, sec.basepoint, args.p))))
        else:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                evals.append((x, evaluate_section(sec, x)))
            warns.extend(str(w.message) for w in caught)
    places = conn.places.poles if conn.places else ()
    inputs = {"source": source, "depth": args.depth, "order": args.order,
              "x": [encode_rational(x) for x in args.x], "p": args.p}
    return Report("solve", inputs, SolveReport(sec, places, tuple(evals)), tuple(warns))


def cmd_reduce(args) -> Report:
    spec = read_connection_file(args.file)
    if spec.rank is None:
        raise DomainError("connection file needs 'rank =' for reduce")
    omega = ConnMatrix.from_dict(spec.rank, spec.omega)
    res = gauge_reduce(omega, spec.places, keep_factors=args.verbose > 0)
    verified = gauge_identity_holds(omega, res.gauge, res.reduced)
    if not verified:
        raise InvariantViolation("gauge identity failed for the reduced connection")
    inputs = {"source": args.file, "rank": spec.rank}
    return Report("reduce", inputs, (res, spec.places.poles, verified))


def _grouplike_samples(conn: UniversalConnection, depth: int, order: int, p: int):
    """Evaluate at ``b + p`` and ``b + 2p`` for a basepoint ``b`` regular at ``p``."""
    poles = set(conn.places.poles) if conn.places else set()
    for a in conn.forms:
        poles.update(a.den.rational_roots())
    base = conn.basepoint
    try:
        tail = _tail_for(conn, base, p)
        if base in poles:
            raise DiskError("basepoint is a pole")
    except DiskError:
        base = regular_basepoint(sorted(poles), p)
        tail = _tail_for(conn, base, p)
    rebased = UniversalConnection(conn.forms, base, conn.places)
    sec = solve_horizontal(rebased, depth, order, strict=True)
    out = []
    for c in (1, 2):
        x = PAdicNumber.exact(base + c * p, p)
        out.append((x, bool(is_grouplike(evaluate_section(sec, x, tail)))))
    return base, tuple(out)


def cmd_check(args) -> Report:
    _positive("depth", args.depth, 0)
    _positive("order", args.order)
    _positive("deg-bound", args.deg_bound, 0)
    conn, source = _load_connection(args)
    sec = solve_horizontal(conn, args.depth, args.order)
    words = sec.words()
    pairs = skipped = 0
    failed = []
    for i, u in enumerate(words):
        for v in words[i:]:
            if len(u) + len(v) > args.depth:
                continue
            try:
                res = shuffle_check(sec, u, v)
            except DomainError:
                skipped += 1
                continue
            pairs += 1
            if not res:
                failed.append((u, v, res.deviation_order))
    warns = _divergence_warning(sec)
    if skipped:
        warns.append(f"{skipped} shuffle pairs skipped (a shuffle term diverges)")
    base, samples = _grouplike_samples(conn, args.depth, args.order, args.p)
    if base != sec.basepoint:
        warns.append(f"group-like samples use the regular basepoint {encode_rational(base)}")
    ind = independence_test(sec, args.deg_bound, args.order)
    rep = CheckReport(args.depth, args.order, args.deg_bound, pairs, tuple(failed), base,
                      samples, ind.full_rank, ind.rank, ind.unknowns)
    inputs = {"source": source, "depth": args.depth, "deg_bound": args.deg_bound,
              "order": args.order, "p": args.p}
    return Report("check", inputs, rep, tuple(warns))


COMMANDS = {"dims": cmd_dims, "crossing": cmd_crossing, "polylog": cmd_polylog,
            "solve": cmd_solve, "reduce": cmd_reduce, "check": cmd_check}


def run(argv) -> tuple[int, str]:
    """Run a command; returns ``(exit status, rendered output)``."""
    args = parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    log.info("running %s", args.subcommand)
    report = COMMANDS[args.subcommand](args)
    return 0, render(report, args.format)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        status, out = run(argv)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
