"""Coefficient tower: exact rationals, capped-precision p-adic numbers and
truncated power series over either.

Rationals are :class:`fractions.Fraction` throughout.  A :class:`PAdicNumber`
stores ``p**valuation * unit`` where the unit is known modulo
``p**precision`` (relative precision).  Exact values (coerced ints and
Fractions) have ``precision == inf`` and a rational unit, so they can be
mixed freely with finite-precision numbers without inventing digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import (DiskError, DomainError, PrecisionError, PrimeMismatchError,
                     RingMismatchError)

INF = math.inf

__all__ = [
    "INF", "PAdicNumber", "PowerSeries", "TailBound", "padic_arith", "padic_valuation",
    "series_arith", "series_integrate", "series_eval_disk", "floor_log",
]


def padic_valuation(x, p: int):
    """Valuation of an int or Fraction; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def floor_log(k: int, p: int) -> int:
    """``floor(log_p k)`` for ``k >= 1`` in exact integer arithmetic (0 for k = 0)."""
    j, q = 0, p
    while q <= k:
        q *= p
        j += 1
    return j


def _unit_mod(u: Fraction, p: int, r: int) -> int:
    modulus = p ** r
    if modulus == 1:
        return 0
    return (u.numerator * pow(u.denominator, -1, modulus)) % modulus


def _pow_p(p: int, v: int) -> Fraction:
    return Fraction(p) ** v


@dataclass(frozen=True, eq=False)
class PAdicNumber:
    """An element ``p**valuation * unit`` of Q_p.

    ``precision`` is the number of known digits of the unit.  Three flavours
    share this class: exact values (``precision == inf``), finite-precision
    values (``unit`` an int in ``[0, p**precision)``), and ``O(p**a)`` which
    has ``valuation == a`` and ``precision == 0``.  The exact zero has
    ``valuation == inf``.
    """

    p: int
    valuation: float
    unit: object
    precision: float

    def __post_init__(self):
        if self.p < 2:
            raise DomainError(f"prime must be >= 2, got {self.p}")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "PAdicNumber":
        return cls(p, INF, 0, INF)

    @classmethod
    def big_oh(cls, p: int, absolute: int) -> "PAdicNumber":
        """The inexact zero ``O(p**absolute)``."""
        return cls(p, absolute, 0, 0)

    @classmethod
    def exact(cls, value, p: int) -> "PAdicNumber":
        return cls._make(p, Fraction(value), INF)

    @classmethod
    def from_rational(cls, value, p: int, precision: int) -> "PAdicNumber":
        """``value`` known to ``precision`` relative digits."""
        value = Fraction(value)
        if value == 0:
            return cls.zero(p)
        v = padic_valuation(value, p)
        return cls._make(p, value, v + precision)

    @classmethod
    def from_absolute(cls, value, p: int, absolute) -> "PAdicNumber":
        """``value + O(p**absolute)``."""
        return cls._make(p, Fraction(value), absolute)

    @classmethod
    def _make(cls, p, value: Fraction, absolute) -> "PAdicNumber":
        if value == 0:
            return cls.zero(p) if absolute == INF else cls.big_oh(p, absolute)
        v = padic_valuation(value, p)
        if absolute == INF:
            return cls(p, v, value / _pow_p(p, v), INF)
        if v >= absolute:
            return cls.big_oh(p, absolute)
        r = absolute - v
        return cls(p, v, _unit_mod(value / _pow_p(p, v), p, r), r)

    # -- queries ----------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.precision == INF

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == INF

    @property
    def has_digits(self) -> bool:
        """False for ``O(p**a)``: no digit of the value is known."""
        return self.precision > 0

    @property
    def absolute_precision(self):
        return self.valuation + self.precision

    def lift(self) -> Fraction:
        """A rational representative (the value itself when exact)."""
        if self.is_exact_zero:
            return Fraction(0)
        return Fraction(self.unit) * _pow_p(self.p, self.valuation)

    def digits(self, count: int | None = None) -> list[int]:
        """Base-p digits of the unit, least significant first."""
        if count is None:
            if not self.is_exact:
                count = self.precision
            else:
                raise DomainError("digit count required for an exact value")
        if self.is_exact_zero:
            return [0] * count
        u = _unit_mod(Fraction(self.unit), self.p, min(count, self.precision))
        out = []
        for _ in range(min(count, self.precision)):
            u, d = divmod(u, self.p)
            out.append(d)
        return out

    def with_precision(self, precision: int) -> "PAdicNumber":
        """Forget all but ``precision`` relative digits."""
        if self.is_exact_zero:
            return self
        r = min(precision, self.precision)
        return PAdicNumber._make(self.p, self.lift(), self.valuation + r)

    def agrees(self, other) -> bool:
        """True when both values are consistent on their common known digits."""
        other = self._coerce(other)
        diff = self.lift() - other.lift()
        cap = min(self.absolute_precision, other.absolute_precision)
        return padic_valuation(diff, self.p) >= cap

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "PAdicNumber":
        if isinstance(other, PAdicNumber):
            if other.p != self.p:
                raise PrimeMismatchError(f"primes differ: {self.p} vs {other.p}")
            return other
        if isinstance(other, (int, _RationalABC)):
            return PAdicNumber.exact(other, self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        absolute = min(self.absolute_precision, other.absolute_precision)
        return PAdicNumber._make(self.p, self.lift() + other.lift(), absolute)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero:
            return self
        if self.is_exact:
            return PAdicNumber(self.p, self.valuation, -self.unit, INF)
        return PAdicNumber(self.p, self.valuation, (-self.unit) % self.p ** self.precision,
                           self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_exact_zero or other.is_exact_zero:
            return PAdicNumber.zero(self.p)
        v = self.valuation + other.valuation
        r = min(self.precision, other.precision)
        if r == INF:
            return PAdicNumber(self.p, v, Fraction(self.unit) * Fraction(other.unit), INF)
        unit = (_unit_mod(Fraction(self.unit), self.p, r)
                * _unit_mod(Fraction(other.unit), self.p, r)) % self.p ** r
        return PAdicNumber(self.p, v, unit, r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_exact_zero:
            raise ZeroDivisionError("p-adic division by exact zero")
        if not other.has_digits:
            raise PrecisionError(f"division by O({other.p}^{other.valuation})")
        if self.is_exact_zero:
            return self
        v = self.valuation - other.valuation
        r = min(self.precision, other.precision)
        if r == INF:
            return PAdicNumber(self.p, v, Fraction(self.unit) / Fraction(other.unit), INF)
        modulus = self.p ** r
        unit = (_unit_mod(Fraction(self.unit), self.p, r)
                * pow(_unit_mod(Fraction(other.unit), self.p, r), -1, modulus)) % modulus \
            if r > 0 else 0
        return PAdicNumber(self.p, v, unit, r)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            return PAdicNumber.exact(1, self.p) / self ** (-k)
        result = PAdicNumber.exact(1, self.p)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison and display --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, PAdicNumber):
            return (self.p, self.valuation, self.precision) == \
                (other.p, other.valuation, other.precision) and \
                Fraction(self.unit) == Fraction(other.unit)
        if isinstance(other, (int, _RationalABC)):
            return self.is_exact and self.lift() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.valuation, self.precision, Fraction(self.unit)))

    def __repr__(self):
        return f"PAdicNumber(p={self.p}, valuation={self.valuation}, unit={self.unit}, " \
               f"precision={self.precision})"

    def __str__(self):
        if self.is_exact_zero:
            return "0"
        if self.is_exact:
            return f"{self.lift()}"
        if not self.has_digits:
            return f"O({self.p}^{self.valuation})"
        terms = []
        shown = self.digits()[:8]
        for i, d in enumerate(shown):
            if d:
                e = self.valuation + i
                terms.append(f"{d}" if e == 0 else f"{d}*{self.p}^{e}")
        if len(shown) < self.precision:
            terms.append("...")
        terms.append(f"O({self.p}^{self.absolute_precision})")
        return " + ".join(terms)


def padic_arith(a: PAdicNumber, b: PAdicNumber, op: str) -> PAdicNumber:
    """Binary p-adic arithmetic; ``op`` is one of add, sub, mul, div."""
    if isinstance(a, PAdicNumber) and isinstance(b, PAdicNumber) and a.p != b.p:
        raise PrimeMismatchError(f"primes differ: {a.p} vs {b.p}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise DomainError(f"unknown p-adic operation {op!r}")


# ---------------------------------------------------------------------------
# power series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerSeries:
    """``c_0 + c_1 t + ... + c_{N-1} t^{N-1} + O(t^N)``.

    ``prime`` is None for rational coefficients; otherwise every coefficient
    is a :class:`PAdicNumber` for that prime.
    """

    coeffs: tuple
    prime: int | None = None

    def __post_init__(self):
        if self.prime is None:
            object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        else:
            conv = []
            for c in self.coeffs:
                if not isinstance(c, PAdicNumber):
                    c = PAdicNumber.exact(c, self.prime)
                elif c.p != self.prime:
                    raise PrimeMismatchError(f"coefficient prime {c.p} in a {self.prime}-adic series")
                conv.append(c)
            object.__setattr__(self, "coeffs", tuple(conv))

    @classmethod
    def zero(cls, order: int, prime=None) -> "PowerSeries":
        return cls((0,) * order, prime)

    @classmethod
    def one(cls, order: int, prime=None) -> "PowerSeries":
        return cls((1,) + (0,) * (order - 1), prime) if order else cls((), prime)

    @classmethod
    def from_function(cls, fn, order: int, prime=None) -> "PowerSeries":
        return cls(tuple(fn(k) for k in range(order)), prime)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def _check(self, other: "PowerSeries"):
        if not isinstance(other, PowerSeries):
            raise RingMismatchError(f"expected a PowerSeries, got {type(other).__name__}")
        if self.prime != other.prime:
            raise RingMismatchError(f"coefficient rings differ: {self.ring_name} vs {other.ring_name}")

    @property
    def ring_name(self) -> str:
        return "QQ" if self.prime is None else f"Q_{self.prime}"

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[:order], self.prime)

    def __add__(self, other):
        self._check(other)
        return PowerSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.prime)

    def __sub__(self, other):
        self._check(other)
        return PowerSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.prime)

    def __neg__(self):
        return PowerSeries(tuple(-c for c in self.coeffs), self.prime)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(tuple(c * other for c in self.coeffs), self.prime)
        self._check(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n):
            acc = 0
            for i in range(k + 1):
                if a[i] != 0 and b[k - i] != 0:
                    acc = a[i] * b[k - i] + acc
            out.append(acc)
        return PowerSeries(tuple(out), self.prime)

    def __rmul__(self, other):
        return self * other

    def integrate(self, extend: bool = False) -> "PowerSeries":
        """Termwise antiderivative with zero constant term.

        The order is preserved (top input coefficient dropped) unless
        ``extend`` is set, in which case the result has order ``N + 1``.
        """
        src = self.coeffs if extend else self.coeffs[:-1]
        out = [0] + [c / (k + 1) for k, c in enumerate(src)]
        return PowerSeries(tuple(out[: self.order + (1 if extend else 0)]), self.prime)

    def derivative(self) -> "PowerSeries":
        return PowerSeries(tuple(k * c for k, c in enumerate(self.coeffs) if k), self.prime)

    def valuation(self):
        """Index of the first nonzero coefficient (``inf`` if none)."""
        for k, c in enumerate(self.coeffs):
            if c != 0:
                return k
        return INF

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return (" + ".join(terms) or "0") + f" + O(t^{self.order})"


def series_arith(f: PowerSeries, g: PowerSeries, op: str) -> PowerSeries:
    """Truncated ring operation; ``op`` is add, sub or mul."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise DomainError(f"unknown series operation {op!r}")


def series_integrate(f: PowerSeries) -> PowerSeries:
    return f.integrate()


@dataclass(frozen=True)
class TailBound:
    """The caller's promise about the coefficients beyond the truncation.

    ``slope=None`` declares that the series is a polynomial (nothing beyond
    the stored coefficients).  Otherwise every coefficient, stored or not,
    satisfies ``v_p(c_k) >= offset - slope * floor(log_p k)``.
    """

    slope: int | None = 1
    offset: int = 0

    @classmethod
    def polynomial(cls) -> "TailBound":
        return cls(None, 0)

    @classmethod
    def log_growth(cls, slope: int = 1, offset: int = 0) -> "TailBound":
        return cls(slope, offset)

    def tail_valuation(self, p: int, order: int, xval):
        """Lower bound for the valuation of ``sum_{k >= order} c_k x^k``."""
        if self.slope is None or xval == INF:
            return INF

        def term(k):
            return self.offset + k * xval - self.slope * floor_log(k, p)

        # floor(log_p k) is constant on [p^j, p^(j+1)), so only k = order and
        # the powers of p above it are candidates; their values increase once
        # xval * p^j * (p - 1) >= slope.
        best = term(order)
        q = 1
        while q <= order:
            q *= p
        while True:
            best = min(best, term(q))
            if xval * q * (p - 1) >= self.slope:
                return best
            q *= p


def series_eval_disk(f: PowerSeries, x, tail: TailBound) -> PAdicNumber:
    """Evaluate ``f`` at a point of the open unit disk with a precision certificate.

    ``x`` is a :class:`PAdicNumber` (or an exact int/Fraction if ``f`` is
    p-adic).  The returned absolute precision accounts for the declared tail
    bound and for the precision of ``x`` and of the coefficients.
    """
    if isinstance(x, PAdicNumber):
        p = x.p
        if f.prime is not None and f.prime != p:
            raise PrimeMismatchError(f"series over Q_{f.prime} evaluated at a {p}-adic point")
    elif f.prime is not None:
        p = f.prime
        x = PAdicNumber.exact(x, p)
    else:
        raise DomainError("a rational series needs a p-adic evaluation point")
    if not x.is_exact_zero and x.valuation < 1:
        raise DiskError(f"v_{p}(x) = {x.valuation} < 1: point outside the residue disk")

    total = PAdicNumber.zero(p)
    power = PAdicNumber.exact(1, p)
    for c in f.coeffs:
        if c != 0:
            total = total + power * c
        power = power * x
    t = tail.tail_valuation(p, f.order, x.valuation)
    if t != INF:
        total = total + PAdicNumber.big_oh(p, t)
    if not total.is_exact_zero and not total.has_digits:
        raise PrecisionError(f"precision certificate collapsed: value known only as "
                             f"O({p}^{total.valuation})")
    return total
