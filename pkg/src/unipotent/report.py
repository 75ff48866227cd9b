"""JSON/CSV/table rendering of command results.

Every report is an envelope ``{tool_version, subcommand, inputs, results,
warnings}``.  Rationals are written as ``"p/q"`` strings (``"3"`` when
integral), p-adic numbers as ``{p, valuation, precision, digits}`` with
digits least significant first, exact p-adic values as ``{p, exact}``.
Dictionaries keep insertion order, so output is byte-stable.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .coeffs import PAdicNumber, PowerSeries
from .connection import HorizontalSection
from .derham import ConnMatrix, GaugeResult, parse_ratfunc
from .errors import DomainError
from .lcs_dims import DimReport, EllipticReport
from .ncseries import NCPoly, format_word, parse_word
from .selmer_bounds import BoundReport

__all__ = [
    "Report", "CheckReport", "SolveReport", "encode_rational", "decode_rational",
    "encode_padic", "decode_padic", "encode_value", "decode_value", "render",
]

SCHEMA_KEYS = ("tool_version", "subcommand", "inputs", "results", "warnings")


def encode_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decode_rational(text: str) -> Fraction:
    return Fraction(text)


def encode_padic(x: PAdicNumber) -> dict:
    if x.is_exact:
        return {"p": x.p, "exact": encode_rational(x.lift())}
    return {"p": x.p, "valuation": int(x.valuation), "precision": int(x.precision),
            "digits": x.digits()}


def decode_padic(d: dict) -> PAdicNumber:
    p = d["p"]
    if "exact" in d:
        return PAdicNumber.exact(decode_rational(d["exact"]), p)
    if d["precision"] == 0:
        return PAdicNumber.big_oh(p, d["valuation"])
    unit = sum(c * p ** i for i, c in enumerate(d["digits"]))
    return PAdicNumber(p, d["valuation"], unit, d["precision"])


def encode_value(x):
    """Coefficient encoding shared by series and NC polynomials."""
    if isinstance(x, PAdicNumber):
        return encode_padic(x)
    return encode_rational(x)


def decode_value(x):
    return decode_padic(x) if isinstance(x, dict) else decode_rational(x)


def encode_ncpoly(a: NCPoly) -> dict:
    return {"m": a.m, "depth": a.n,
            "terms": {format_word(w): encode_value(c) for w, c in a}}


def decode_ncpoly(d: dict) -> NCPoly:
    return NCPoly(d["m"], d["depth"], {parse_word(w): decode_value(c)
                                       for w, c in d["terms"].items()})


def _encode_matrix(rows) -> list:
    return [[str(f) for f in row] for row in rows]


def _decode_matrix(rows) -> tuple:
    return tuple(tuple(parse_ratfunc(f) for f in row) for row in rows)


@dataclass(frozen=True)
class SolveReport:
    """A horizontal section together with optional point evaluations."""

    section: HorizontalSection
    places: tuple = ()
    evaluations: tuple = ()

    def to_dict(self) -> dict:
        sec = self.section
        return {
            "m": sec.m, "depth": sec.depth, "order": sec.order,
            "basepoint": encode_rational(sec.basepoint),
            "places": [encode_rational(a) for a in self.places],
            "coords": {format_word(w): [encode_value(c) for c in u.coeffs]
                       for w, u in sec.coords.items()},
            "divergent": sorted(format_word(w) for w in sec.divergent),
            "evaluations": [{"x": encode_value(x), "value": encode_ncpoly(v)}
                            for x, v in self.evaluations],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolveReport":
        coords = {parse_word(w): PowerSeries(tuple(decode_value(c) for c in cs))
                  for w, cs in d["coords"].items()}
        sec = HorizontalSection(d["m"], d["depth"], d["order"],
                                decode_rational(d["basepoint"]), coords,
                                frozenset(parse_word(w) for w in d["divergent"]))
        evals = tuple((decode_value(e["x"]), decode_ncpoly(e["value"]))
                      for e in d["evaluations"])
        return cls(sec, tuple(decode_rational(a) for a in d["places"]), evals)


@dataclass(frozen=True)
class CheckReport:
    """Outcome of the identity-check suite on one connection."""

    depth: int
    order: int
    deg_bound: int
    shuffle_pairs: int
    shuffle_failures: tuple
    grouplike_basepoint: Fraction | None
    grouplike: tuple
    full_rank: bool
    rank: int
    unknowns: int

    @property
    def passed(self) -> bool:
        return (not self.shuffle_failures and all(ok for _, ok in self.grouplike)
                and self.full_rank)

    def to_dict(self) -> dict:
        gb = self.grouplike_basepoint
        return {
            "depth": self.depth, "order": self.order, "deg_bound": self.deg_bound,
            "shuffle": {"pairs": self.shuffle_pairs,
                        "failures": [{"u": format_word(u), "v": format_word(v),
                                      "order": k} for u, v, k in self.shuffle_failures]},
            "grouplike": {"basepoint": None if gb is None else encode_rational(gb),
                          "points": [{"x": encode_value(x), "ok": ok}
                                     for x, ok in self.grouplike]},
            "independence": {"full_rank": self.full_rank, "rank": self.rank,
                             "unknowns": self.unknowns},
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        sh, gl, ind = d["shuffle"], d["grouplike"], d["independence"]
        gb = gl["basepoint"]
        return cls(d["depth"], d["order"], d["deg_bound"], sh["pairs"],
                   tuple((parse_word(f["u"]), parse_word(f["v"]), f["order"])
                         for f in sh["failures"]),
                   None if gb is None else decode_rational(gb),
                   tuple((decode_value(p["x"]), p["ok"]) for p in gl["points"]),
                   ind["full_rank"], ind["rank"], ind["unknowns"])


def _encode_gauge(res: GaugeResult, places) -> dict:
    return {"places": [encode_rational(a) for a in places],
            "rank": res.reduced.rank,
            "gauge": _encode_matrix(res.gauge),
            "reduced": _encode_matrix(res.reduced.entries),
            "factors": [_encode_matrix(f) for f in res.factors]}


def _decode_gauge(d: dict) -> GaugeResult:
    return GaugeResult(_decode_matrix(d["gauge"]), ConnMatrix(_decode_matrix(d["reduced"])),
                       tuple(_decode_matrix(f) for f in d["factors"]))


def _encode_results(subcommand: str, obj) -> dict:
    if subcommand == "reduce":
        res, places, verified = obj
        out = _encode_gauge(res, places)
        out["identity_verified"] = verified
        return out
    return obj.to_dict() if hasattr(obj, "to_dict") else encode_value(obj)


def _decode_results(subcommand: str, d):
    if subcommand == "dims":
        return DimReport.from_dict(d)
    if subcommand == "crossing":
        return EllipticReport.from_dict(d) if "rank" in d else BoundReport.from_dict(d)
    if subcommand == "polylog":
        return decode_padic(d)
    if subcommand == "solve":
        return SolveReport.from_dict(d)
    if subcommand == "reduce":
        return (_decode_gauge(d), tuple(decode_rational(a) for a in d["places"]),
                d["identity_verified"])
    if subcommand == "check":
        return CheckReport.from_dict(d)
    raise DomainError(f"unknown subcommand {subcommand!r}")


@dataclass(frozen=True)
class Report:
    subcommand: str
    inputs: dict
    results: object
    warnings: tuple = field(default=())
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return {"tool_version": self.tool_version, "subcommand": self.subcommand,
                "inputs": self.inputs,
                "results": _encode_results(self.subcommand, self.results),
                "warnings": list(self.warnings)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if tuple(d) != SCHEMA_KEYS:
            raise DomainError(f"report keys {tuple(d)} do not match {SCHEMA_KEYS}")
        results = _decode_results(d["subcommand"], d["results"])
        if isinstance(results, (DimReport, BoundReport)):
            results = type(results).from_dict(d["results"], warnings=d["warnings"])
        return cls(d["subcommand"], d["inputs"], results, tuple(d["warnings"]),
                   d["tool_version"])

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# tabular views
# ---------------------------------------------------------------------------

def _rows(report: Report) -> tuple[list, list]:
    """Header and rows for the table and CSV views."""
    sub, res = report.subcommand, report.results
    if sub == "dims":
        head = ["level", "d", "dim_U", "hodge_bound", "quotient_lower"]
        return head, [[r[h] for h in head] for r in res.rows()]
    if sub == "crossing" and isinstance(res, BoundReport):
        head = ["level", "d", "minus_dim", "h2", "h1", "selmer_upper", "quotient_lower", "gap"]
        return head, [[r.to_dict()[h] for h in head] for r in res.rows]
    if sub == "polylog":
        d = encode_padic(res)
        return ["field", "value"], [[k, " ".join(map(str, v)) if isinstance(v, list) else v]
                                    for k, v in d.items()]
    if sub == "solve":
        head = ["word", "coefficients"]
        return head, [[format_word(w), " ".join(encode_rational(c) for c in u.coeffs)]
                      for w, u in res.section.coords.items()]
    flat = _flatten(report.to_dict()["results"])
    return ["field", "value"], [[k, v] for k, v in flat]


def _flatten(obj, prefix=""):
    if isinstance(obj, dict) and not {"p", "valuation"} <= set(obj) and "exact" not in obj:
        out = []
        for k, v in obj.items():
            out.extend(_flatten(v, f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, list) and obj and isinstance(obj[0], (list, dict)):
        out = []
        for i, v in enumerate(obj):
            out.extend(_flatten(v, f"{prefix}[{i}]"))
        return out
    return [(prefix, json.dumps(obj) if isinstance(obj, (dict, list)) else obj)]


def _fmt_cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return str(v)


def render_table(report: Report) -> str:
    head, rows = _rows(report)
    lines = []
    res = report.results
    if report.subcommand == "polylog":
        lines.append(f"value = {res}")
    elif report.subcommand == "crossing" and isinstance(res, BoundReport):
        lines.append(f"crossing level: {'none' if res.crossing is None else res.crossing}")
    elif report.subcommand == "crossing":
        lines.append(f"verdict: {res.verdict}")
    cells = [[_fmt_cell(c) for c in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(head)]
    # free-text columns (coefficient lists, field values) read better flush left
    left = report.subcommand in ("solve", "check", "reduce", "polylog")

    def line(row):
        parts = [c.rjust(w) for c, w in zip(row, widths)]
        if left:
            parts[-1] = row[-1].ljust(widths[-1])
        return "  ".join(parts).rstrip()

    lines.append(line(head))
    for r in cells:
        lines.append(line(r))
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def render_csv(report: Report) -> str:
    head, rows = _rows(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(head)
    writer.writerows([[_fmt_cell(c) for c in row] for row in rows])
    return buf.getvalue()


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "csv":
        return render_csv(report)
    if fmt == "table":
        return render_table(report)
    raise DomainError(f"unknown format {fmt!r}")
