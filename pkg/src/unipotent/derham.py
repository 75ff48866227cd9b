"""One-forms on ``P^1`` minus a finite set of rational places.

Everything is exact over Q.  A one-form ``f dz`` is represented by its
rational function ``f``; ``H^1_dR`` has the basis ``dz/(z - a_i)`` and every
other form reduces to that basis modulo an exact form.  :func:`gauge_reduce`
uses this to bring a strictly upper-triangular connection matrix to
basis-valued form, one superdiagonal at a time.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, InvariantViolation, ParseError, PoleError

__all__ = [
    "Poly", "RatFunc", "OneForm", "PlaceSet", "ConnMatrix", "PartialFractions",
    "ReducedForm", "GaugeResult", "parse_ratfunc", "partial_fractions", "reduce_form",
    "in_basis_span", "gauge_reduce", "gauge_transform", "gauge_identity_holds",
    "laurent_expansion", "taylor_expansion",
]


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

def _strip(coeffs) -> tuple:
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Poly:
    """Polynomial in ``z`` with Fraction coefficients, lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def linear_root(cls, a) -> "Poly":
        """``z - a``."""
        return cls((-Fraction(a), 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other):
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.lead
        for i in range(len(quot) - 1, -1, -1):
            c = rem[i + other.degree] / lead
            quot[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i + j] -= c * b
        return Poly(quot), Poly(rem[: other.degree] if other.degree > 0 else ())

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, Poly) else Poly()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "Poly":
        return Poly(tuple(c / self.lead for c in self.coeffs)) if self.coeffs else self

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def antiderivative(self) -> "Poly":
        return Poly((0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def shift(self, b) -> "Poly":
        """``p(z + b)``."""
        return self(Poly((Fraction(b), 1)))

    def root_multiplicity(self, a) -> tuple[int, "Poly"]:
        """Multiplicity of ``a`` as a root and the cofactor."""
        k, rest = 0, self
        factor = Poly.linear_root(a)
        while not rest.is_zero() and rest(Fraction(a)) == 0:
            rest = rest // factor
            k += 1
        return k, rest

    def rational_roots(self) -> list[Fraction]:
        """Distinct rational roots, by the rational root test."""
        if self.degree < 1:
            return []
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        roots = set()
        if ints[0] == 0:
            roots.add(Fraction(0))
            while ints and ints[0] == 0:
                ints.pop(0)
        if len(ints) > 1:
            for num in _divisors(abs(ints[0])):
                for dd in _divisors(abs(ints[-1])):
                    for cand in (Fraction(num, dd), Fraction(-num, dd)):
                        if self(cand) == 0:
                            roots.add(cand)
        return sorted(roots)

    def __str__(self):
        return _poly_str(self)

    def __repr__(self):
        return f"Poly({_poly_str(self)})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0] if n else [1]


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else Poly.const(1)


def _poly_str(p: Poly) -> str:
    if p.is_zero():
        return "0"
    terms = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{_coeff_str(abs(c))}*{mono}"
        else:
            body = _coeff_str(abs(c))
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def _coeff_str(c: Fraction) -> str:
    return str(c) if c.denominator == 1 else f"({c})"


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatFunc:
    """``num / den`` in lowest terms with ``den`` monic."""

    num: Poly = field(default_factory=Poly)
    den: Poly = field(default_factory=lambda: Poly.const(1))

    def __post_init__(self):
        num, den = _as_poly(self.num), _as_poly(self.den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = Poly(), Poly.const(1)
        else:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.lead
            num = Poly(tuple(c / lead for c in num.coeffs))
            den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(Poly.const(c))

    @classmethod
    def poly(cls, p: Poly) -> "RatFunc":
        return cls(p)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = _as_rat(other)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_as_rat(other))

    def __rsub__(self, other):
        return _as_rat(other) - self

    def __mul__(self, other):
        other = _as_rat(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rat(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rat(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc.const(1) / self ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def derivative(self) -> "RatFunc":
        return RatFunc(self.num.derivative() * self.den - self.num * self.den.derivative(),
                       self.den * self.den)

    def __call__(self, x):
        d = self.den(Fraction(x))
        if d == 0:
            raise PoleError(f"pole at z = {x}", Fraction(x))
        return self.num(Fraction(x)) / d

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = _as_rat(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.degree == 0:
            return _poly_str(self.num)
        n = _poly_str(self.num)
        if sum(1 for c in self.num.coeffs if c) > 1:
            n = f"({n})"
        return f"{n}/({_poly_str(self.den)})"

    def __repr__(self):
        return f"RatFunc({self})"


def _as_rat(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, Poly):
        return RatFunc(x)
    if isinstance(x, (int, Fraction)):
        return RatFunc.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a rational function")


OneForm = RatFunc
"""A one-form ``f dz`` is stored as its coefficient ``f``."""


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    """Recursive descent over ``+ - * / ^ ( )``, integers and the variable ``z``."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.pos)

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> RatFunc:
        if not self.peek():
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.peek()
            self.pos += 1
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek() in ("*", "/") and self.peek():
            op = self.peek()
            at = self.pos
            self.pos += 1
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by the zero polynomial", at)
                value = value / rhs
        return value

    def unary(self):
        ch = self.peek()
        if ch in ("+", "-") and ch:
            self.pos += 1
            value = self.unary()
            return -value if ch == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.peek()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                self.error("exponent must be a nonnegative integer literal")
            base = base ** int(self.text[start:self.pos])
            if self.peek() == "^":
                self.error("chained exponents need parentheses")
        return base

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            self.take(")")
            return value
        if ch == "z":
            self.pos += 1
            return RatFunc(Poly.z())
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return RatFunc.const(int(self.text[start:self.pos]))
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected {ch!r}")


def parse_ratfunc(text: str) -> RatFunc:
    """Parse an expression such as ``"z^2/(z-1)"`` or ``"(1/2)*z + 3"``."""
    return _Parser(text).parse()


def parse_rational(text: str) -> Fraction:
    """A rational literal: integer or ``p/q``, optionally signed."""
    f = parse_ratfunc(text)
    if f.num.degree > 0 or f.den.degree > 0:
        raise DomainError(f"{text!r} is not a rational constant")
    return f.num.coeffs[0] if f.num.coeffs else Fraction(0)


# ---------------------------------------------------------------------------
# places, expansions, partial fractions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaceSet:
    """Finite punctures of ``P^1``; infinity is always punctured as well."""

    poles: tuple

    def __post_init__(self):
        poles = tuple(Fraction(a) for a in self.poles)
        if len(set(poles)) != len(poles):
            raise DomainError("places must be pairwise distinct")
        object.__setattr__(self, "poles", poles)

    @property
    def m(self) -> int:
        return len(self.poles)

    def basis_forms(self) -> tuple:
        """``dz / (z - a_i)`` for each finite place."""
        return tuple(RatFunc(Poly.const(1), Poly.linear_root(a)) for a in self.poles)

    def __contains__(self, a):
        return Fraction(a) in self.poles


def laurent_expansion(f: RatFunc, b, order: int) -> tuple[int, list[Fraction]]:
    """Pole order ``e`` at ``b`` and the first ``order`` coefficients of ``(z-b)^e f``."""
    b = Fraction(b)
    num, den = f.num.shift(b), f.den.shift(b)
    e = 0
    dc = list(den.coeffs)
    while dc and dc[0] == 0:
        dc.pop(0)
        e += 1
    nc = list(num.coeffs)
    out = []
    inv = 1 / dc[0]
    for k in range(order):
        acc = nc[k] if k < len(nc) else Fraction(0)
        for j in range(1, min(k, len(dc) - 1) + 1):
            acc -= dc[j] * out[k - j]
        out.append(acc * inv)
    return e, out


def taylor_expansion(f: RatFunc, b, order: int) -> list[Fraction]:
    e, coeffs = laurent_expansion(f, b, order)
    if e:
        raise PoleError(f"pole of order {e} at z = {b}", Fraction(b))
    return coeffs


@dataclass(frozen=True)
class PartialFractions:
    """``f = poly + sum_a sum_j principal[a][j-1] / (z - a)^j``."""

    poly: Poly
    principal: dict

    def recombine(self) -> RatFunc:
        total = RatFunc(self.poly)
        for a, cs in self.principal.items():
            lin = RatFunc(Poly.linear_root(a))
            for j, c in enumerate(cs, start=1):
                if c:
                    total = total + RatFunc.const(c) / lin ** j
        return total


def _check_poles(f: RatFunc, places: PlaceSet) -> dict:
    """Multiplicity of each place in the denominator; rejects any other pole."""
    mult = {}
    rest = f.den
    for a in places.poles:
        k, rest = rest.root_multiplicity(a)
        if k:
            mult[a] = k
    if rest.degree > 0:
        roots = rest.rational_roots()
        if roots:
            raise PoleError(f"pole {roots[0]} not permitted (places: "
                            f"{', '.join(str(a) for a in places.poles)})", roots[0])
        raise PoleError(f"denominator factor {rest} does not split over the places")
    return mult


def partial_fractions(f: RatFunc, places: PlaceSet) -> PartialFractions:
    mult = _check_poles(f, places)
    poly, rem = divmod(f.num, f.den)
    principal = {}
    for a, k in mult.items():
        cofactor = f.den // Poly.linear_root(a) ** k
        g = RatFunc(rem, cofactor)
        coeffs = taylor_expansion(g, a, k)
        principal[a] = tuple(coeffs[k - j] for j in range(1, k + 1))
    return PartialFractions(poly, principal)


@dataclass(frozen=True)
class ReducedForm:
    """``ω = sum_i coeffs[i] dz/(z - a_i) + d(exact)``."""

    coeffs: tuple
    exact: RatFunc


def reduce_form(omega: RatFunc, places: PlaceSet) -> ReducedForm:
    pf = partial_fractions(omega, places)
    exact = RatFunc(pf.poly.antiderivative())
    coeffs = []
    for a in places.poles:
        cs = pf.principal.get(a, ())
        coeffs.append(cs[0] if cs else Fraction(0))
        lin = RatFunc(Poly.linear_root(a))
        for j, c in enumerate(cs[1:], start=2):
            if c:
                exact = exact + RatFunc.const(c / (1 - j)) / lin ** (j - 1)
    return ReducedForm(tuple(coeffs), exact)


def in_basis_span(omega: RatFunc, places: PlaceSet) -> bool:
    return reduce_form(omega, places).exact.is_zero()


# ---------------------------------------------------------------------------
# connections and gauge transformations
# ---------------------------------------------------------------------------

def _zeros(r):
    return [[RatFunc() for _ in range(r)] for _ in range(r)]


def _identity(r):
    out = _zeros(r)
    for i in range(r):
        out[i][i] = RatFunc.const(1)
    return out


def _matmul(a, b):
    r = len(a)
    out = _zeros(r)
    for i in range(r):
        for j in range(r):
            acc = RatFunc()
            for k in range(r):
                if not a[i][k].is_zero() and not b[k][j].is_zero():
                    acc = acc + a[i][k] * b[k][j]
            out[i][j] = acc
    return out


def _unipotent_inverse(g):
    """Inverse of ``I + N`` with ``N`` strictly upper-triangular: ``sum (-N)^k``."""
    r = len(g)
    neg_n = [[(-g[i][j] if i != j else RatFunc()) for j in range(r)] for i in range(r)]
    out = _identity(r)
    power = _identity(r)
    for _ in range(r - 1):
        power = _matmul(power, neg_n)
        out = [[out[i][j] + power[i][j] for j in range(r)] for i in range(r)]
    return out


@dataclass(frozen=True)
class ConnMatrix:
    """Strictly upper-triangular matrix of one-forms; entry ``(i, j)`` is ``ω_ij dz``."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_rat(x) for x in row) for row in self.entries)
        r = len(rows)
        if any(len(row) != r for row in rows):
            raise DomainError("connection matrix must be square")
        for i in range(r):
            for j in range(i + 1):
                if not rows[i][j].is_zero():
                    raise DomainError(f"entry ({i + 1},{j + 1}) must vanish "
                                      "(strictly upper-triangular)")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_dict(cls, rank: int, entries: dict) -> "ConnMatrix":
        """``entries`` keyed by 1-based ``(row, column)``."""
        mat = _zeros(rank)
        for (i, j), f in entries.items():
            if not (1 <= i <= rank and 1 <= j <= rank):
                raise DomainError(f"entry ({i},{j}) outside a rank-{rank} matrix")
            mat[i - 1][j - 1] = _as_rat(f)
        return cls(tuple(tuple(row) for row in mat))

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]

    def nonzero(self) -> dict:
        return {(i + 1, j + 1): f for i, row in enumerate(self.entries)
                for j, f in enumerate(row) if not f.is_zero()}


def gauge_transform(omega, g):
    """``G^-1 ω G + G^-1 dG`` for unipotent upper-triangular ``G`` (matrices as lists)."""
    g_inv = _unipotent_inverse(g)
    dg = [[x.derivative() for x in row] for row in g]
    a = _matmul(_matmul(g_inv, omega), g)
    b = _matmul(g_inv, dg)
    r = len(g)
    return [[a[i][j] + b[i][j] for j in range(r)] for i in range(r)]


@dataclass(frozen=True)
class GaugeResult:
    gauge: tuple
    reduced: ConnMatrix
    factors: tuple = ()


def gauge_identity_holds(omega: ConnMatrix, gauge, reduced: ConnMatrix) -> bool:
    g = [list(row) for row in gauge]
    lhs = gauge_transform([list(row) for row in omega.entries], g)
    return all((lhs[i][j] - reduced.entries[i][j]).is_zero()
               for i in range(omega.rank) for j in range(omega.rank))


def gauge_reduce(omega: ConnMatrix, places: PlaceSet, keep_factors: bool = False) -> GaugeResult:
    """Gauge a strictly upper-triangular connection into basis-valued form.

    Superdiagonals are treated in increasing order; on each, the entry
    ``ω_ij = basis + dF`` is cleared with ``G = I - F E_ij``.  Changes made
    to entries further from the diagonal are picked up on later passes.
    """
    r = omega.rank
    current = [list(row) for row in omega.entries]
    total = _identity(r)
    factors = []
    for c in range(1, r):
        for i in range(r - c):
            j = i + c
            exact = reduce_form(current[i][j], places).exact
            if exact.is_zero():
                continue
            g = _identity(r)
            g[i][j] = -exact
            current = gauge_transform(current, g)
            total = _matmul(total, g)
            if keep_factors:
                factors.append(tuple(tuple(row) for row in g))
    reduced = ConnMatrix(tuple(tuple(row) for row in current))
    gauge = tuple(tuple(row) for row in total)
    for (i, j), f in reduced.nonzero().items():
        if not in_basis_span(f, places):
            raise InvariantViolation(f"entry ({i},{j}) not basis-valued after reduction")
    return GaugeResult(gauge, reduced, tuple(factors))
