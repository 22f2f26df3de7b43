"""Partitions, cycle-type data, characters and isotype multiplicities.

Groups act only through class data: every quantity here is a function of a
cycle type (partition) plus, for point sets, fixed-point counts supplied by
the caller.  Nothing enumerates group elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Mapping

from .errors import NonIntegerMultiplicityError

ALTERNATING = "ALTERNATING"
TRIVIAL = "TRIVIAL"
HOOK = "HOOK"


@dataclass(frozen=True, order=True)
class PartitionData:
    """A partition of ``k`` with its conjugacy-class data."""

    k: int
    parts: tuple[int, ...]

    def __post_init__(self):
        if sum(self.parts) != self.k:
            raise ValueError(f"parts {self.parts} do not sum to {self.k}")
        if any(p <= 0 for p in self.parts):
            raise ValueError(f"nonpositive part in {self.parts}")
        if list(self.parts) != sorted(self.parts, reverse=True):
            raise ValueError(f"parts {self.parts} not weakly decreasing")

    @property
    def alpha(self) -> tuple[int, ...]:
        """alpha[i-1] = number of parts equal to i, for i = 1..k."""
        counts = [0] * self.k
        for p in self.parts:
            counts[p - 1] += 1
        return tuple(counts)

    @property
    def num_cycles(self) -> int:
        return len(self.parts)

    @property
    def class_size(self) -> int:
        denom = 1
        for i, a in enumerate(self.alpha, start=1):
            denom *= (i ** a) * factorial(a)
        return factorial(self.k) // denom

    @property
    def sign(self) -> int:
        return -1 if (self.k - len(self.parts)) % 2 else 1

    @property
    def fixed_points(self) -> int:
        return self.alpha[0] if self.k >= 1 else 0

    def is_identity(self) -> bool:
        return all(p == 1 for p in self.parts)

    def with_extra_fixed_point(self) -> "PartitionData":
        """Embed as a class of the next symmetric group by adding a 1-cycle."""
        return PartitionData(self.k + 1, tuple(sorted(self.parts + (1,), reverse=True)))

    def label(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


def partitions_of(k: int) -> list[PartitionData]:
    """All partitions of ``k`` in reverse-lexicographic order, largest first."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out: list[PartitionData] = []

    def rec(remaining: int, cap: int, prefix: tuple[int, ...]):
        if remaining == 0:
            out.append(PartitionData(k, prefix))
            return
        for part in range(min(cap, remaining), 0, -1):
            rec(remaining - part, part, prefix + (part,))

    rec(k, k, ())
    return out


def marar_coefficient(gamma: PartitionData) -> Fraction:
    """Weight of a cycle-type stratum in the Euler-characteristic formula
    for the image of a stable perturbation."""
    denom = 1
    for i, a in enumerate(gamma.alpha, start=1):
        denom *= (i ** a) * factorial(a)
    num = -1 if (gamma.num_cycles + 1) % 2 else 1
    return Fraction(num, denom)


def hook_character(gamma: PartitionData) -> int:
    """Character of the irreducible labelled (2,1,...,1): sign * (fix - 1)."""
    if gamma.k < 2:
        raise ValueError("hook character needs k >= 2")
    return gamma.sign * (gamma.fixed_points - 1)


def character_value(which: str, gamma: PartitionData) -> int:
    if which == ALTERNATING:
        return gamma.sign
    if which == TRIVIAL:
        return 1
    if which == HOOK:
        return hook_character(gamma)
    raise ValueError(f"unknown character {which!r}")


def isotype_rank_points(
    orbit_type_counts: Mapping[PartitionData, int], k: int, which: str
) -> int:
    """Multiplicity of an irreducible in the permutation module on a point set.

    ``orbit_type_counts`` gives, for each cycle type of the acting symmetric
    group, the number of points fixed by any element of that type.
    """
    total = Fraction(0)
    for gamma in partitions_of(k):
        if gamma not in orbit_type_counts:
            raise NonIntegerMultiplicityError(
                f"missing fixed-point count for class {gamma.label()}"
            )
        total += Fraction(
            gamma.class_size * character_value(which, gamma) * orbit_type_counts[gamma]
        )
    total /= factorial(k)
    if total.denominator != 1 or total < 0:
        raise NonIntegerMultiplicityError(
            f"{which} multiplicity {total} is not a non-negative integer",
            counts={g.label(): int(c) for g, c in orbit_type_counts.items()},
        )
    return int(total)


def top_row_ranks(s: int, d: int) -> tuple[int, int]:
    """Ranks from the tail of the binomial alternating sums.

    Returns ``(corner_rank, weighted_rank)`` where the corner rank is
    ``|sum (-1)^l C(s,l)|`` over ``l = d+1..s`` (checked against C(s-1,d))
    and the weighted rank is the same sum with an extra factor ``l``.
    """
    if not (1 <= d < s):
        raise ValueError("need 1 <= d < s")
    corner = abs(sum((-1) ** l * comb(s, l) for l in range(d + 1, s + 1)))
    weighted = abs(sum((-1) ** l * l * comb(s, l) for l in range(d + 1, s + 1)))
    if corner != comb(s - 1, d):
        raise NonIntegerMultiplicityError(
            f"corner rank {corner} != C({s-1},{d}) = {comb(s-1, d)}"
        )
    return corner, weighted


def comparativan_comparison(s: int, d: int) -> dict:
    """Both candidate values for the coefficient tying the two top alternating
    multiplicities together, reported side by side.

    The closed-form coefficient ``d*s^2/(s-1)`` applied to C(s-1,d) disagrees
    with the directly evaluated weighted sum; both are surfaced and never
    silently reconciled.
    """
    corner, weighted = top_row_ranks(s, d)
    stated = Fraction(d * s * s, s - 1) * corner
    return {
        "s": s,
        "d": d,
        "corner_rank": corner,
        "direct_weighted_rank": weighted,
        "stated_coefficient_times_corner": str(stated),
        "agree": stated == weighted,
        "note": "closed-form coefficient and direct sum reported side by side; "
        "they disagree in general (e.g. 32 vs 8 at s=4, d=2)",
    }
