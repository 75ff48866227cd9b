"""Graded dimensions of the lower central series of the unipotent fundamental group.

``d_n = dim Z^(n+1) \\ Z^n`` comes from Möbius inversion of the divisor sums
``sum_{k | n} k d_k = m^n`` (open curve, free group on ``m = 2g + s - 1``
generators) or ``= t_n`` with ``t_n = (g + sqrt(g^2-1))^n + (g - sqrt(g^2-1))^n``
(compact curve, one quadratic relation).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from sympy import divisors, mobius

from .errors import DomainError

__all__ = [
    "CurveShape", "DimReport", "EllipticReport", "witt_open", "witt_compact",
    "compact_trace", "dim_ladder", "elliptic_example",
]

ELLIPTIC_WARNING = ("compact genus 1 treated as the elliptic curve minus its origin "
                    "(open recursion with m = 2); the compact recursion assumes g >= 2")


def _mobius_invert(rhs, n: int) -> int:
    total = sum(int(mobius(k)) * rhs(n // k) for k in divisors(n))
    d, rem = divmod(total, n)
    if rem:
        raise ArithmeticError(f"Möbius inversion not integral at n={n}")
    return d


@lru_cache(maxsize=None)
def witt_open(m: int, n: int) -> int:
    """Rank of the degree-``n`` piece of the free Lie algebra on ``m`` generators."""
    if m < 1 or n < 1:
        raise DomainError(f"witt_open needs m, n >= 1 (got m={m}, n={n})")
    return _mobius_invert(lambda j: m ** j, n)


@lru_cache(maxsize=None)
def compact_trace(g: int, n: int) -> int:
    """``t_n``: ``t_0 = 2``, ``t_1 = 2g``, ``t_n = 2g t_(n-1) - t_(n-2)``."""
    a, b = 2, 2 * g
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, 2 * g * b - a
    return b


@lru_cache(maxsize=None)
def witt_compact(g: int, n: int) -> int:
    """Graded rank for a surface group of genus ``g`` (``2g`` generators, one relation).

    For ``g = 1`` this is the abelian group Z^2, so ``d_n = 0`` for ``n >= 2``.
    """
    if g < 1 or n < 1:
        raise DomainError(f"witt_compact needs g, n >= 1 (got g={g}, n={n})")
    return _mobius_invert(lambda j: compact_trace(g, j), n)


@dataclass(frozen=True)
class CurveShape:
    """Genus, puncture count and case of a hyperbolic curve.

    A compact shape of genus 1 stands for the elliptic curve minus its
    origin, which is how the rank-one elliptic example enters the ladders.
    """

    genus: int
    punctures: int = 0
    compact: bool = False

    def __post_init__(self):
        g, s = self.genus, self.punctures
        if g < 0 or s < 0:
            raise DomainError("genus and puncture count must be nonnegative")
        if self.compact:
            if s != 0:
                raise DomainError("a compact curve has no punctures")
            if g < 1:
                raise DomainError("compact case needs genus >= 1 (g = 0 is not hyperbolic)")
        elif s < 1:
            raise DomainError(f"open case needs at least one puncture "
                              f"(m = 2g + s - 1 = {2 * g + s - 1} is invalid)")

    @property
    def is_elliptic_special(self) -> bool:
        return self.compact and self.genus == 1

    @property
    def m(self) -> int:
        """Number of generators of the free group (open case)."""
        if self.is_elliptic_special:
            return 2
        if self.compact:
            return 2 * self.genus
        return 2 * self.genus + self.punctures - 1

    @property
    def case(self) -> str:
        return "compact" if self.compact else "open"

    def graded_dim(self, k: int) -> int:
        if self.compact and not self.is_elliptic_special:
            return witt_compact(self.genus, k)
        return witt_open(self.m, k)

    def warnings(self) -> list[str]:
        return [ELLIPTIC_WARNING] if self.is_elliptic_special else []

    def to_dict(self) -> dict:
        return {"genus": self.genus, "punctures": self.punctures, "compact": self.compact}

    @classmethod
    def from_dict(cls, d: dict) -> "CurveShape":
        return cls(d["genus"], d["punctures"], d["compact"])


@dataclass(frozen=True)
class DimReport:
    """Dimension ladder through level ``n_max``; lists are indexed from level 1.

    ``dim_u[k-1] = dim U_k = sum_{j<k} d_j``; ``hodge[k-1] = min(g^k, d_k)``
    bounds ``dim F^0`` of the graded piece; ``quotient[k-1]`` is the certified
    lower bound ``sum_{j<k} (d_j - hodge_j)`` for ``dim U_k / F^0``.
    """

    shape: CurveShape
    n_max: int
    d: tuple
    dim_u: tuple
    hodge: tuple
    quotient: tuple
    warnings: tuple = field(default=())

    def level(self, k: int) -> dict:
        i = k - 1
        return {"level": k, "d": self.d[i], "dim_U": self.dim_u[i],
                "hodge_bound": self.hodge[i], "quotient_lower": self.quotient[i]}

    def rows(self) -> list[dict]:
        return [self.level(k) for k in range(1, self.n_max + 1)]

    def to_dict(self) -> dict:
        return {"shape": self.shape.to_dict(), "n_max": self.n_max, "m": self.shape.m,
                "levels": self.rows()}

    @classmethod
    def from_dict(cls, data: dict, warnings=()) -> "DimReport":
        rows = data["levels"]
        return cls(CurveShape.from_dict(data["shape"]), data["n_max"],
                   tuple(r["d"] for r in rows), tuple(r["dim_U"] for r in rows),
                   tuple(r["hodge_bound"] for r in rows),
                   tuple(r["quotient_lower"] for r in rows), tuple(warnings))


def dim_ladder(shape: CurveShape, n_max: int) -> DimReport:
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    g = shape.genus
    d = [shape.graded_dim(k) for k in range(1, n_max + 1)]
    hodge = [min(g ** k, dk) for k, dk in enumerate(d, start=1)]
    dim_u, quotient = [], []
    running_u = running_q = 0
    for dk, fk in zip(d, hodge):
        dim_u.append(running_u)
        quotient.append(running_q)
        running_u += dk
        running_q += dk - fk
    return DimReport(shape, n_max, tuple(d), tuple(dim_u), tuple(hodge), tuple(quotient),
                     tuple(shape.warnings()))


@dataclass(frozen=True)
class EllipticReport:
    """Level-3 dimension chain for a rank-``r`` elliptic curve minus its origin."""

    rank: int
    selmer_u2: int
    selmer_z3: int
    selmer_u3: int
    dim_u3: int
    dim_f0_u3: int
    derham_quotient: int
    satisfied: bool

    @property
    def verdict(self) -> str:
        if self.satisfied:
            return "finiteness criterion satisfied at level 3"
        return "level 3 insufficient"

    def to_dict(self) -> dict:
        return {"rank": self.rank, "selmer_U2": self.selmer_u2, "selmer_Z3": self.selmer_z3,
                "selmer_U3": self.selmer_u3, "dim_U3": self.dim_u3, "dim_F0_U3": self.dim_f0_u3,
                "derham_quotient": self.derham_quotient, "satisfied": self.satisfied,
                "verdict": self.verdict}

    @classmethod
    def from_dict(cls, d: dict) -> "EllipticReport":
        return cls(d["rank"], d["selmer_U2"], d["selmer_Z3"], d["selmer_U3"], d["dim_U3"],
                   d["dim_F0_U3"], d["derham_quotient"], d["satisfied"])


def elliptic_example(rank: int) -> EllipticReport:
    """Refined Selmer accounting at level 3 for ``E`` minus the origin.

    The graded Selmer piece at level 2 is built from units of Z and vanishes,
    so ``dim Sel(U_3) = dim Sel(U_2) = rank``.  On the de Rham side
    ``F^0 H_1`` is ``g = 1`` dimensional and ``F^0 H_1 ∧ F^0 H_1 = 0`` kills
    ``F^0`` of the graded piece.
    """
    if rank < 0:
        raise DomainError("rank must be nonnegative")
    g, m = 1, 2
    d1, d2 = witt_open(m, 1), witt_open(m, 2)
    dim_u3 = d1 + d2
    dim_f0_u2 = g
    dim_f0_u3 = dim_f0_u2 + 0
    quotient = dim_u3 - dim_f0_u3
    selmer_z3 = 0
    selmer_u3 = rank + selmer_z3
    return EllipticReport(rank, rank, selmer_z3, selmer_u3, dim_u3, dim_f0_u3, quotient,
                          selmer_u3 < quotient)
