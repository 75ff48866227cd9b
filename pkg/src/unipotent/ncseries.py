"""The truncated free non-commutative Hopf algebra ``E[n] = Q<A_1..A_m> / I^(n+1)``.

Words are tuples of generator indices in ``1..m`` (the empty tuple is the
unit).  Coefficients may be Fractions or :class:`~unipotent.coeffs.PAdicNumber`
values; arithmetic is generic over both.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .coeffs import PAdicNumber
from .errors import AugmentationError, DomainError, ShapeMismatchError

Word = tuple

__all__ = [
    "Word", "NCPoly", "TensorSquare", "GrouplikeResult", "format_word", "parse_word",
    "all_words", "nc_mul", "coproduct", "shuffle", "is_grouplike", "nc_exp", "nc_log",
]


def format_word(w) -> str:
    """``(1, 2, 1)`` renders as ``A1.A2.A1``; the empty word as ``1``."""
    return ".".join(f"A{i}" for i in w) if w else "1"


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    letters = []
    for part in text.split("."):
        part = part.strip()
        if not part.startswith("A") or not part[1:].isdigit():
            raise DomainError(f"bad letter {part!r} in word {text!r}")
        letters.append(int(part[1:]))
    return tuple(letters)


def all_words(m: int, n: int):
    """All words of length ``<= n`` ordered by length then lexicographically."""
    for k in range(n + 1):
        yield from itertools.product(range(1, m + 1), repeat=k)


def _is_zero(c) -> bool:
    return c == 0


def _coeff_equal(a, b) -> bool:
    if isinstance(a, PAdicNumber) or isinstance(b, PAdicNumber):
        d = a - b
        if not isinstance(d, PAdicNumber):
            return d == 0
        return d.is_exact_zero or not d.has_digits
    return a == b


def _fmt_coeff(c) -> str:
    return f"({c})" if isinstance(c, PAdicNumber) else str(c)


def _render(terms: dict, fmt_key) -> str:
    if not terms:
        return "0"
    pieces = []
    for key, c in terms.items():
        label = fmt_key(key)
        if c == 1:
            piece = label
        elif label == "1":
            piece = _fmt_coeff(c)
        else:
            piece = f"{_fmt_coeff(c)}*{label}"
        pieces.append(piece)
    return " + ".join(pieces).replace("+ -", "- ")


@dataclass(frozen=True)
class NCPoly:
    """A sparse element of ``E[n]`` on ``m`` generators.

    ``terms`` maps words to nonzero coefficients and is treated as immutable.
    """

    m: int
    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for w, c in self.terms.items():
            w = tuple(w)
            if any(not 1 <= i <= self.m for i in w):
                raise DomainError(f"word {format_word(w)} uses a letter outside A1..A{self.m}")
            if len(w) > self.n or _is_zero(c):
                continue
            if isinstance(c, int):
                c = Fraction(c)
            clean[w] = c
        ordered = dict(sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0])))
        object.__setattr__(self, "terms", ordered)

    # -- constructors -----------------------------------------------------
    @classmethod
    def one(cls, m: int, n: int) -> "NCPoly":
        return cls(m, n, {(): Fraction(1)})

    @classmethod
    def zero(cls, m: int, n: int) -> "NCPoly":
        return cls(m, n, {})

    @classmethod
    def gen(cls, i: int, m: int, n: int) -> "NCPoly":
        return cls(m, n, {(i,): Fraction(1)})

    @classmethod
    def word(cls, w, m: int, n: int, coeff=1) -> "NCPoly":
        return cls(m, n, {tuple(w): coeff})

    # -- access -----------------------------------------------------------
    def __getitem__(self, w):
        return self.terms.get(tuple(w), 0)

    def coefficient(self, w):
        return self[w]

    @property
    def augmentation(self):
        return self.terms.get((), 0)

    def __iter__(self):
        return iter(self.terms.items())

    def _check(self, other: "NCPoly"):
        if not isinstance(other, NCPoly):
            raise ShapeMismatchError(f"expected NCPoly, got {type(other).__name__}")
        if (self.m, self.n) != (other.m, other.n):
            raise ShapeMismatchError(
                f"shape mismatch: (m={self.m}, n={self.n}) vs (m={other.m}, n={other.n})")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, NCPoly):
            return self + NCPoly(self.m, self.n, {(): other})
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return NCPoly(self.m, self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.m, self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return NCPoly(self.m, self.n, {w: c * other for w, c in self.terms.items()})
        self._check(other)
        out = {}
        for u, a in self.terms.items():
            room = self.n - len(u)
            for v, b in other.terms.items():
                if len(v) > room:
                    continue
                w = u + v
                out[w] = out[w] + a * b if w in out else a * b
        return NCPoly(self.m, self.n, out)

    def __rmul__(self, other):
        return NCPoly(self.m, self.n, {w: other * c for w, c in self.terms.items()})

    def __truediv__(self, scalar):
        return NCPoly(self.m, self.n, {w: c / scalar for w, c in self.terms.items()})

    def __pow__(self, k: int):
        out = NCPoly.one(self.m, self.n)
        for _ in range(k):
            out = out * self
        return out

    def equals(self, other: "NCPoly") -> bool:
        """Coefficientwise equality, up to known digits for p-adic coefficients."""
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(_coeff_equal(self[w], other[w]) for w in keys)

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) and self.terms == other.terms

    def __str__(self):
        return _render(self.terms, format_word)


def nc_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    return a * b


@dataclass(frozen=True)
class TensorSquare:
    """A sparse element of ``E[n] (x) E[n]`` truncated at total word length ``n``."""

    m: int
    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (u, v), c in self.terms.items():
            if len(u) + len(v) > self.n or _is_zero(c):
                continue
            clean[(tuple(u), tuple(v))] = c
        ordered = dict(sorted(clean.items(), key=lambda kv: _pair_key(kv[0])))
        object.__setattr__(self, "terms", ordered)

    def __getitem__(self, pair):
        u, v = pair
        return self.terms.get((tuple(u), tuple(v)), 0)

    def __mul__(self, other: "TensorSquare") -> "TensorSquare":
        if (self.m, self.n) != (other.m, other.n):
            raise ShapeMismatchError("tensor squares of different shapes")
        out = {}
        for (u, v), a in self.terms.items():
            room = self.n - len(u) - len(v)
            for (x, y), b in other.terms.items():
                if len(x) + len(y) > room:
                    continue
                key = (u + x, v + y)
                out[key] = out[key] + a * b if key in out else a * b
        return TensorSquare(self.m, self.n, out)

    def __sub__(self, other: "TensorSquare") -> "TensorSquare":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] - c if k in out else -c
        return TensorSquare(self.m, self.n, out)

    def __eq__(self, other):
        if not isinstance(other, TensorSquare):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) and self.terms == other.terms

    @classmethod
    def outer(cls, a: NCPoly, b: NCPoly) -> "TensorSquare":
        a._check(b)
        out = {}
        for u, x in a.terms.items():
            for v, y in b.terms.items():
                if len(u) + len(v) <= a.n:
                    out[(u, v)] = x * y
        return cls(a.m, a.n, out)

    def __str__(self):
        return _render(self.terms, lambda k: f"{format_word(k[0])}⊗{format_word(k[1])}")


def _pair_key(pair):
    u, v = pair
    return (len(u) + len(v), len(u), u, v)


@lru_cache(maxsize=None)
def _word_coproduct(w: Word) -> tuple:
    """Sum over subsets S of positions of ``w|S (x) w|complement``."""
    counts: dict = {}
    for mask in range(1 << len(w)):
        left = tuple(w[i] for i in range(len(w)) if mask >> i & 1)
        right = tuple(w[i] for i in range(len(w)) if not mask >> i & 1)
        counts[(left, right)] = counts.get((left, right), 0) + 1
    return tuple(counts.items())


def coproduct(a: NCPoly) -> TensorSquare:
    """The algebra morphism with ``A_i -> A_i (x) 1 + 1 (x) A_i``."""
    out = {}
    for w, c in a.terms.items():
        for pair, k in _word_coproduct(w):
            out[pair] = out[pair] + k * c if pair in out else k * c
    return TensorSquare(a.m, a.n, out)


@lru_cache(maxsize=None)
def _shuffle_counts(u: Word, v: Word) -> tuple:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    out: dict = {}
    for w, k in _shuffle_counts(u[1:], v):
        key = (u[0],) + w
        out[key] = out.get(key, 0) + k
    for w, k in _shuffle_counts(u, v[1:]):
        key = (v[0],) + w
        out[key] = out.get(key, 0) + k
    return tuple(out.items())


def shuffle(u, v, m: int | None = None) -> NCPoly:
    """Shuffle product of two words, as an element of ``E[|u|+|v|]``."""
    u, v = tuple(u), tuple(v)
    if m is None:
        m = max(u + v, default=1)
    return NCPoly(m, len(u) + len(v), {w: Fraction(k) for w, k in _shuffle_counts(u, v)})


@dataclass(frozen=True)
class GrouplikeResult:
    ok: bool
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_grouplike(a: NCPoly) -> GrouplikeResult:
    """Check ``Δ(a) = a ⊗ a`` on every word pair of total length ``<= n``.

    The first failing pair is reported in the order (total length, left
    length, left word, right word).
    """
    if not _coeff_equal(a.augmentation, 1):
        return GrouplikeResult(False, None, f"augmentation is {a.augmentation}, not 1")
    lhs = coproduct(a)
    rhs = TensorSquare.outer(a, a)
    for pair in sorted(set(lhs.terms) | set(rhs.terms), key=_pair_key):
        if not _coeff_equal(lhs[pair], rhs[pair]):
            u, v = pair
            return GrouplikeResult(False, pair,
                                   f"coefficient of {format_word(u)}⊗{format_word(v)} differs")
    return GrouplikeResult(True)


def nc_exp(x: NCPoly) -> NCPoly:
    """``sum_k x^k / k!``; requires augmentation 0 (the sum is finite)."""
    if not _coeff_equal(x.augmentation, 0):
        raise AugmentationError("nc_exp needs augmentation 0")
    out = NCPoly.one(x.m, x.n)
    power = NCPoly.one(x.m, x.n)
    for k in range(1, x.n + 1):
        power = power * x
        out = out + power / math.factorial(k)
    return out


def nc_log(a: NCPoly) -> NCPoly:
    """``sum_k (-1)^(k+1) (a-1)^k / k``; requires augmentation 1."""
    if not _coeff_equal(a.augmentation, 1):
        raise AugmentationError("nc_log needs augmentation 1")
    y = a - 1
    out = NCPoly.zero(a.m, a.n)
    power = NCPoly.one(a.m, a.n)
    for k in range(1, a.n + 1):
        power = power * y
        out = out + power * Fraction((-1) ** (k + 1), k)
    return out


def is_primitive(x: NCPoly) -> bool:
    """``Δ(x) = x ⊗ 1 + 1 ⊗ x``."""
    one = NCPoly.one(x.m, x.n)
    expected = TensorSquare.outer(x, one).terms
    for k, c in TensorSquare.outer(one, x).terms.items():
        expected[k] = expected[k] + c if k in expected else c
    lhs = coproduct(x)
    keys = set(lhs.terms) | set(expected)
    return all(_coeff_equal(lhs.terms.get(k, 0), expected.get(k, 0)) for k in keys)
