"""Horizontal sections of the universal unipotent connection in a residue disk.

For basis forms ``α_1..α_m`` and a basepoint ``b`` the flat section
``u = sum_w u_w [w]`` with ``u(b) = 1`` has coordinates

    u_() = 1,        u_(i,) + w = ∫_b α_i · u_w,

power series in the local coordinate ``t = z - b``.  ``u_w`` is the iterated
integral ``∫ α_(i1) α_(i2) ... α_(in)`` with ``α_(i1)`` outermost.

A form may have a pole at ``b`` as long as every integrand it meets stays
regular there; words whose integral diverges (a logarithm at ``b``) are left
out of the section and recorded in :attr:`HorizontalSection.divergent`.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import Matrix, Rational

from .coeffs import PAdicNumber, PowerSeries, TailBound, padic_valuation, series_eval_disk
from .derham import (PlaceSet, Poly, RatFunc, laurent_expansion, partial_fractions,
                     taylor_expansion)
from .errors import DiskError, DivergentIntegralError, DomainError, PoleError
from .ncseries import NCPoly, all_words, format_word, shuffle

__all__ = [
    "UniversalConnection", "HorizontalSection", "ShuffleCheck", "IndependenceResult",
    "TruncatedEvaluationWarning", "expand_form", "solve_horizontal", "evaluate_section",
    "polylog", "shuffle_check", "flatness_defects", "independence_test", "word_tail",
    "form_offset", "regular_basepoint",
]


class TruncatedEvaluationWarning(UserWarning):
    """A rational point was substituted formally; the series tail was discarded."""


@dataclass(frozen=True)
class UniversalConnection:
    """``∇f = -sum_i A_i f α_i`` with the forms ``α_i`` given as rational functions."""

    forms: tuple
    basepoint: Fraction
    places: PlaceSet | None = None

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        object.__setattr__(self, "basepoint", Fraction(self.basepoint))
        if not self.forms:
            raise DomainError("a connection needs at least one form")

    @property
    def m(self) -> int:
        return len(self.forms)

    @classmethod
    def from_places(cls, places: PlaceSet, basepoint) -> "UniversalConnection":
        """Basis forms ``dz/(z - a_i)``; the basepoint must not be a place."""
        if basepoint in places:
            raise DomainError(f"basepoint {basepoint} is a place")
        return cls(places.basis_forms(), basepoint, places)

    @classmethod
    def standard(cls) -> "UniversalConnection":
        """``P^1 - {0, 1, ∞}`` with ``α_1 = dz/z``, ``α_2 = dz/(1 - z)`` at ``b = 0``."""
        a1 = RatFunc(Poly.const(1), Poly.z())
        a2 = RatFunc(Poly.const(1), Poly((1, -1)))
        return cls((a1, a2), Fraction(0), PlaceSet((0, 1)))


def expand_form(alpha: RatFunc, b, order: int) -> PowerSeries:
    """Taylor series of ``α`` at ``b`` in ``t = z - b``."""
    return PowerSeries(tuple(taylor_expansion(alpha, b, order)))


@dataclass(frozen=True)
class HorizontalSection:
    """Coordinates ``u_w`` for every convergent word of length ``<= depth``."""

    m: int
    depth: int
    order: int
    basepoint: Fraction
    coords: dict
    divergent: frozenset = field(default_factory=frozenset)

    def __getitem__(self, w) -> PowerSeries:
        w = tuple(w)
        if w in self.coords:
            return self.coords[w]
        if w in self.divergent:
            raise DivergentIntegralError(w)
        raise KeyError(f"word {format_word(w)} not in a depth-{self.depth} section")

    def __contains__(self, w) -> bool:
        return tuple(w) in self.coords

    def words(self) -> list:
        return list(self.coords)

    def replace(self, w, series: PowerSeries) -> "HorizontalSection":
        """A copy with one coordinate swapped (for negative controls)."""
        coords = dict(self.coords)
        coords[tuple(w)] = series
        return HorizontalSection(self.m, self.depth, self.order, self.basepoint, coords,
                                 self.divergent)


def _form_data(conn: UniversalConnection, order: int):
    out = []
    for i, alpha in enumerate(conn.forms, start=1):
        e, coeffs = laurent_expansion(alpha, conn.basepoint, order)
        out.append((e, PowerSeries(tuple(coeffs))))
    return out


def _step(form, u: PowerSeries, order: int):
    """``∫ α u`` to ``order`` terms, or None when the integrand has a pole at ``t = 0``."""
    e, s = form
    prod = s * u
    if any(prod[k] != 0 for k in range(min(e, prod.order))):
        return None
    shifted = PowerSeries(prod.coeffs[e:])
    return shifted.integrate(extend=True).truncate(order)


def solve_horizontal(conn: UniversalConnection, depth: int, order: int,
                     strict: bool = False) -> HorizontalSection:
    """Solve for ``u_w``, ``|w| <= depth``, as series to ``order`` terms.

    With ``strict`` a divergent word raises :class:`DivergentIntegralError`;
    otherwise it is recorded and skipped (together with its extensions).
    """
    if depth < 0 or order < 1:
        raise DomainError("need depth >= 0 and order >= 1")
    max_pole = 0
    for alpha in conn.forms:
        max_pole = max(max_pole, laurent_expansion(alpha, conn.basepoint, 1)[0])
    # each integration through a pole of order e costs e - 1 terms
    work = order + depth * max(max_pole - 1, 0)
    forms = _form_data(conn, work)
    coords = {(): PowerSeries.one(work)}
    divergent = set()
    for w in all_words(conn.m, depth):
        if not w:
            continue
        tail = w[1:]
        if tail in divergent:
            divergent.add(w)
            continue
        u = _step(forms[w[0] - 1], coords[tail], work)
        if u is None or u.order < order:
            if strict:
                raise DivergentIntegralError(w)
            divergent.add(w)
            continue
        coords[w] = u
    coords = {w: s.truncate(order) for w, s in coords.items()}
    return HorizontalSection(conn.m, depth, order, conn.basepoint, coords, frozenset(divergent))


def flatness_defects(sec: HorizontalSection, conn: UniversalConnection) -> list:
    """Words ``A_i w`` where ``d u_(A_i w) != α_i u_w`` on the known coefficients."""
    forms = _form_data(conn, sec.order)
    bad = []
    for w, u in sec.coords.items():
        if not w:
            continue
        e, s = forms[w[0] - 1]
        du = u.derivative()
        rhs = s * sec.coords[w[1:]]
        # t^e du = s u_tail; compare degrees where both sides are known
        lhs = (0,) * e + du.coeffs
        n = min(len(lhs), rhs.order)
        if any(lhs[k] != rhs[k] for k in range(n)):
            bad.append(w)
    return bad


def word_tail(form_offset: int = 0):
    """Tail bound for ``u_w`` when each form expands with ``v_p(coeff) >= form_offset``.

    Each of the ``|w|`` integrations divides by an index ``<= k``, so the
    coefficient of ``t^k`` has valuation ``>= |w| (form_offset - floor(log_p k))``.
    """
    def bound(w):
        n = len(w)
        return TailBound.log_growth(slope=n, offset=n * form_offset) if n else \
            TailBound.polynomial()
    return bound


def form_offset(alpha: RatFunc, b, p: int) -> int:
    """Lower bound for ``v_p`` of the Laurent coefficients of ``α`` at ``b``.

    Requires the poles of ``α`` to be rational and, apart from ``b`` itself,
    outside the residue disk of ``b``.  Then ``c/(z-a)^j`` expands in
    ``t = z - b`` with coefficients of valuation ``>= v_p(c)``.
    """
    b = Fraction(b)
    places = PlaceSet(tuple(alpha.den.rational_roots()))
    pf = partial_fractions(alpha, places)
    vals = [padic_valuation(c, p) for c in pf.poly.shift(b).coeffs if c]
    for a, cs in pf.principal.items():
        if a != b and padic_valuation(a - b, p) >= 1:
            raise DiskError(f"pole {a} lies in the residue disk of {b} at p = {p}")
        vals.extend(padic_valuation(c, p) for c in cs if c)
    return min(vals, default=0)


def regular_basepoint(poles, p: int) -> Fraction:
    """First of ``-1, 2, -2, 3, ...`` lying in no residue disk of a pole."""
    c = 1
    while True:
        for cand in (-c, c + 1):
            if all(padic_valuation(Fraction(cand) - a, p) < 1 for a in poles):
                return Fraction(cand)
        c += 1
        if c > 2 * p + len(poles) + 2:
            raise DomainError(f"no regular integer basepoint found at p = {p}")


def evaluate_section(sec: HorizontalSection, x, tail=None) -> NCPoly:
    """Value of the section at ``x`` as an element of ``E[depth]``.

    For a :class:`PAdicNumber` ``x`` in the residue disk of the basepoint,
    ``tail`` (a :class:`TailBound` or a function from words to one) certifies
    the precision; :func:`word_tail` covers forms with p-integral expansions.
    A rational ``x`` is substituted formally into the truncated series and a
    :class:`TruncatedEvaluationWarning` is issued.
    """
    if isinstance(x, PAdicNumber):
        if tail is None:
            raise DomainError("p-adic evaluation needs an explicit tail bound")
        t = x - sec.basepoint
        if not t.is_exact_zero and t.valuation < 1:
            raise DiskError(f"v_{x.p}(x - b) = {t.valuation} < 1: point outside the residue disk")
        pick = tail if callable(tail) else (lambda w: tail)
        terms = {w: series_eval_disk(u.truncate(u.order), t, pick(w)) if w else
                 PAdicNumber.exact(1, x.p) for w, u in sec.coords.items()}
        return NCPoly(sec.m, sec.depth, terms)
    t = Fraction(x) - sec.basepoint
    if t != 0:
        warnings.warn(f"formal evaluation at {x}: series truncated at order {sec.order}",
                      TruncatedEvaluationWarning, stacklevel=2)
    terms = {}
    for w, u in sec.coords.items():
        acc, power = Fraction(0), Fraction(1)
        for c in u.coeffs:
            acc += c * power
            power *= t
        terms[w] = acc
    return NCPoly(sec.m, sec.depth, terms)


def polylog(p: int, degree: int, x, order: int) -> PAdicNumber:
    """``Li_degree(x) = sum_k x^k / k^degree`` in the residue disk of 0.

    Computed as the coordinate ``u_w`` at ``w = A_1^(degree-1) A_2`` of the
    standard connection on ``P^1 - {0, 1, ∞}``.
    """
    if degree < 1:
        raise DomainError("polylog degree must be >= 1")
    if not isinstance(x, PAdicNumber):
        x = PAdicNumber.exact(x, p)
    elif x.p != p:
        raise DomainError(f"point is {x.p}-adic, expected p = {p}")
    if not x.is_exact_zero and x.valuation < 1:
        raise DiskError(f"v_{p}(x) = {x.valuation} < 1: point outside the residue disk")
    conn = UniversalConnection.standard()
    forms = _form_data(conn, order)
    u = PowerSeries.one(order)
    word = (1,) * (degree - 1) + (2,)
    for i in reversed(word):
        u = _step(forms[i - 1], u, order)
    return series_eval_disk(u, x, word_tail(0)(word))


@dataclass(frozen=True)
class ShuffleCheck:
    passed: bool
    deviation_order: int | None = None

    def __bool__(self):
        return self.passed


def shuffle_check(sec: HorizontalSection, u, v) -> ShuffleCheck:
    """Compare ``u_u · u_v`` with ``sum_(w in u ш v) c_w u_w`` coefficientwise."""
    u, v = tuple(u), tuple(v)
    if len(u) + len(v) > sec.depth:
        raise DomainError("|u| + |v| exceeds the section depth")
    lhs = sec[u] * sec[v]
    rhs = PowerSeries.zero(sec.order)
    for w, c in shuffle(u, v, sec.m):
        rhs = rhs + sec[w] * c
    for k in range(sec.order):
        if lhs[k] != rhs[k]:
            return ShuffleCheck(False, k)
    return ShuffleCheck(True)


@dataclass(frozen=True)
class IndependenceResult:
    full_rank: bool
    rank: int
    unknowns: int
    words: tuple
    nullspace: tuple = ()

    def relations(self) -> list:
        """Each relation as ``{word: (h_0, ..., h_D)}`` with ``sum_w h_w(t) u_w = 0``."""
        return [dict(rel) for rel in self.nullspace]


def independence_test(sec: HorizontalSection, degree_bound: int,
                      order: int | None = None) -> IndependenceResult:
    """Look for ``sum_w h_w(t) u_w(t) ≡ 0 mod t^order`` with ``deg h_w <= degree_bound``."""
    order = sec.order if order is None else order
    if order > sec.order:
        raise DomainError(f"order {order} exceeds the section order {sec.order}")
    words = tuple(sec.words())
    D = degree_bound
    needed = len(words) * (D + 1) + D + 1
    if order < needed:
        raise DomainError(f"order {order} too small: need >= {needed} for "
                          f"{len(words)} words at degree bound {D}")
    cols = [(w, d) for w in words for d in range(D + 1)]
    rows = []
    for j in range(order):
        rows.append([Rational(sec[w][j - d].numerator, sec[w][j - d].denominator)
                     if j >= d else 0 for w, d in cols])
    mat = Matrix(rows)
    basis = mat.nullspace()
    nullspace = []
    for vec in basis:
        rel = {}
        for (w, d), c in zip(cols, vec):
            if c != 0:
                coeffs = list(rel.get(w, [Fraction(0)] * (D + 1)))
                coeffs[d] = Fraction(int(c.p), int(c.q))
                rel[w] = tuple(coeffs)
        nullspace.append(tuple(rel.items()))
    return IndependenceResult(not basis, len(cols) - len(basis), len(cols), words,
                              tuple(nullspace))
