"""Upper bounds for Selmer-variety dimensions against lower bounds for
``dim U_n / F^0``, and the first level at which the former drops below the
latter.

Two modes bound the ``H^2`` of the graded pieces:

``conjecture2``
    sum of local bounds over the bad places (valid from level ``n0`` on;
    below it the unconditional ``K * d_n`` is used);
``weak_jannsen``
    the Grothendieck-group decomposition of ``H_1^(x)n`` into pieces
    ``V^(x)(n-j) (x) W^j`` with twists ``j``, each killed once ``j >= k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .errors import DomainError
from .lcs_dims import CurveShape, dim_ladder

__all__ = [
    "AwayPlace", "CurveData", "BoundRow", "BoundReport", "MODES", "h2_local_away",
    "h2_local_atp", "h2_global_bound", "selmer_upper", "find_crossing",
]

MODES = ("conjecture2", "weak_jannsen")

EVEN_LEVEL_WARNING = ("even levels use the conservative minus-eigenspace bound d_k "
                      "(exact value known only for odd k)")
FALLBACK_WARNING = "levels below n0 use the unconditional fallback K * d_n for H^2"
H0_WARNING = "H^0 contributions to the Euler characteristic taken as 0"


def _gpow(g: int, e: int) -> int:
    """``g**e`` with ``g**0 = 1``; negative exponents contribute nothing."""
    return 0 if e < 0 else g ** e


def h2_local_away(n: int, g: int, gr1: int, gr2: int) -> int:
    """Local bound at a bad place away from p (weight/monodromy filtration)."""
    if n < 1:
        raise DomainError("level must be >= 1")
    return n * gr2 * _gpow(g, n - 1) + (n * (n - 1) // 2) * gr1 ** 2 * _gpow(g, n - 2)


def h2_local_atp(n: int, g: int, s: int) -> int:
    """Local bound at a place above p (Hodge–Tate decomposition)."""
    if n < 1:
        raise DomainError("level must be >= 1")
    return n * (g + s - 1) * _gpow(g, n - 1)


@dataclass(frozen=True)
class AwayPlace:
    """Graded weight dimensions at a bad place not above p; None means the default."""

    gr1: int | None = None
    gr2: int | None = None

    def resolved(self, g: int) -> tuple[int, int]:
        return (2 * g if self.gr1 is None else self.gr1,
                g if self.gr2 is None else self.gr2)


@dataclass(frozen=True)
class CurveData:
    """Curve shape plus the place data and constants the bounds need.

    Defaults: one place above p, no bad places away from p, ``K = 1``,
    ``k = 1``, ``n0 = 1``.  An away place with unset ``gr1``/``gr2`` is
    resolved to ``2g`` and ``g`` on construction.
    """

    shape: CurveShape
    atp_places: int = 1
    away: tuple = ()
    K: int = 1
    k: int = 1
    n0: int = 1

    def __post_init__(self):
        if self.atp_places < 0 or self.K < 1 or self.k < 1 or self.n0 < 1:
            raise DomainError("need atp_places >= 0, K >= 1, k >= 1, n0 >= 1")
        g = self.shape.genus
        away = tuple(AwayPlace(*(a if isinstance(a, AwayPlace) else AwayPlace(*a)).resolved(g))
                     for a in self.away)
        for a in away:
            if a.gr1 < 0 or a.gr2 < 0:
                raise DomainError("graded dimensions must be nonnegative")
        object.__setattr__(self, "away", away)

    def to_dict(self) -> dict:
        g = self.shape.genus
        return {"shape": self.shape.to_dict(), "atp_places": self.atp_places,
                "away": [list(a.resolved(g)) for a in self.away],
                "K": self.K, "k": self.k, "n0": self.n0}

    @classmethod
    def from_dict(cls, d: dict) -> "CurveData":
        return cls(CurveShape.from_dict(d["shape"]), d["atp_places"],
                   tuple(AwayPlace(*a) for a in d["away"]), d["K"], d["k"], d["n0"])


def _h2_twisted_v(nu: int, twist: int, g: int, K: int, k: int) -> int:
    """Weak-Jannsen bound for ``H^2(G_T, V^(x)nu (twist))``."""
    if twist >= k:
        return 0
    if g == 0:
        # V = 0: only the empty tensor power survives
        return K if nu == 0 else 0
    q, i = divmod(nu, 2 * k)
    return K * ((2 * g) ** (2 * k) - 1) ** q * (2 * g) ** i


def h2_global_bound(n: int, data: CurveData, mode: str) -> int:
    """Upper bound for ``dim H^2(G_T, Z^(n+1) \\ Z^n)``."""
    if n < 1:
        raise DomainError("level must be >= 1")
    g, s = data.shape.genus, data.shape.punctures
    if mode == "conjecture2":
        if n < data.n0:
            return data.K * data.shape.graded_dim(n)
        total = data.atp_places * h2_local_atp(n, g, s)
        for place in data.away:
            gr1, gr2 = place.resolved(g)
            total += h2_local_away(n, g, gr1, gr2)
        return total
    if mode == "weak_jannsen":
        if data.shape.compact:
            raise DomainError("weak_jannsen mode needs an affine (open) curve")
        return sum(comb(n, j) * (s - 1) ** j * _h2_twisted_v(n - j, j, g, data.K, data.k)
                   for j in range(n + 1))
    raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def _minus_eigenspace(k: int, dk: int) -> int:
    return (dk + 1) // 2 if k % 2 else dk


def selmer_upper(n: int, data: CurveData, mode: str) -> int:
    """Upper bound for ``dim H^1_f(G_T, U_n)`` summed over the graded pieces below ``n``."""
    if n < 2:
        raise DomainError("selmer_upper needs n >= 2")
    return sum(_minus_eigenspace(k, data.shape.graded_dim(k)) + h2_global_bound(k, data, mode)
               for k in range(1, n))


@dataclass(frozen=True)
class BoundRow:
    """Level ``n``: graded data for ``Z^(n+1) \\ Z^n`` and cumulative bounds for ``U_n``."""

    level: int
    d: int
    minus_dim: int
    h2: int
    h1: int
    selmer_upper: int
    quotient_lower: int

    @property
    def gap(self) -> int:
        return self.quotient_lower - self.selmer_upper

    def to_dict(self) -> dict:
        return {"level": self.level, "d": self.d, "minus_dim": self.minus_dim, "h2": self.h2,
                "h1": self.h1, "selmer_upper": self.selmer_upper,
                "quotient_lower": self.quotient_lower, "gap": self.gap}

    @classmethod
    def from_dict(cls, d: dict) -> "BoundRow":
        return cls(d["level"], d["d"], d["minus_dim"], d["h2"], d["h1"], d["selmer_upper"],
                   d["quotient_lower"])


@dataclass(frozen=True)
class BoundReport:
    data: CurveData
    mode: str
    n_max: int
    rows: tuple
    crossing: int | None
    warnings: tuple = field(default=())

    def row(self, n: int) -> BoundRow:
        return self.rows[n - 1]

    def to_dict(self) -> dict:
        return {"data": self.data.to_dict(), "mode": self.mode, "n_max": self.n_max,
                "crossing": self.crossing, "levels": [r.to_dict() for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict, warnings=()) -> "BoundReport":
        return cls(CurveData.from_dict(d["data"]), d["mode"], d["n_max"],
                   tuple(BoundRow.from_dict(r) for r in d["levels"]), d["crossing"],
                   tuple(warnings))


def find_crossing(data: CurveData, mode: str, n_max: int) -> BoundReport:
    """Smallest ``2 <= n <= n_max`` with ``selmer_upper(n) < dim U_n / F^0`` lower bound."""
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    ladder = dim_ladder(data.shape, n_max)
    rows = []
    selmer = 0
    crossing = None
    used_even = used_fallback = False
    for n in range(1, n_max + 1):
        dn = ladder.d[n - 1]
        minus = _minus_eigenspace(n, dn)
        h2 = h2_global_bound(n, data, mode)
        q = ladder.quotient[n - 1]
        rows.append(BoundRow(n, dn, minus, h2, minus + h2, selmer, q))
        if n >= 2 and crossing is None and selmer < q:
            crossing = n
        if n < n_max:
            used_even |= n % 2 == 0
            used_fallback |= mode == "conjecture2" and n < data.n0
        selmer += minus + h2
    warnings = list(ladder.warnings)
    if used_even:
        warnings.append(EVEN_LEVEL_WARNING)
    if used_fallback:
        warnings.append(FALLBACK_WARNING)
    warnings.append(H0_WARNING)
    return BoundReport(data, mode, n_max, tuple(rows), crossing, tuple(warnings))
