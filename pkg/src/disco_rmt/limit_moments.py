"""Exact limiting moments from labelled pair partitions.

A chord diagram on ``2k`` points is labelled chord by chord with ``G``
(Gaussian, from the Toeplitz block) or ``S`` (semicircular, from a Wigner
block).  A labelling contributes iff no ``S`` chord crosses any other chord,
so ``G`` chords only ever cross ``G`` chords.  Summing
``g_weight**#G * s_weight**#S`` over valid labellings gives the ``2k``-th
moment of ``alpha*g + beta*s`` with ``g`` Gaussian and ``s`` semicircular,
free, where the weights are the variances ``alpha**2`` and ``beta**2``.

A second, independent route weights each diagram by ``2**height`` where the
height counts chords crossed by nothing; for unit weights it must agree
exactly with the labelling sum.

All sums are exact :class:`~fractions.Fraction` arithmetic.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Iterator

import numpy as np

__all__ = [
    "BudgetExceeded",
    "PairPartition",
    "LabeledPairing",
    "MomentRow",
    "MomentTable",
    "catalan",
    "double_factorial",
    "gaussian_moment",
    "enumerate_pair_partitions",
    "crosses",
    "is_non_crossing",
    "constrained_moment",
    "height",
    "height_moment",
    "limit_moment_disco",
    "moment_bounds",
    "moment_table",
]

ENUMERATION_BUDGET = 16
MOMENT_BUDGET = 14

Chord = tuple[int, int]


class BudgetExceeded(ValueError):
    """Requested enumeration is larger than the configured budget."""


def _check_two_k(two_k: int, budget: int) -> int:
    if two_k < 2 or two_k % 2:
        raise ValueError(f"need a positive even number of points, got {two_k}")
    if two_k > budget:
        raise BudgetExceeded(f"2k = {two_k} exceeds the enumeration budget of {budget}")
    return two_k // 2


@dataclass(frozen=True)
class PairPartition:
    """Perfect matching of ``1..2k``; chords ``(r, s)`` with ``r < s``, sorted by ``r``."""

    chords: tuple[Chord, ...]

    def __post_init__(self):
        points = sorted(p for c in self.chords for p in c)
        if points != list(range(1, 2 * len(self.chords) + 1)):
            raise ValueError(f"chords do not partition 1..{2 * len(self.chords)}: {self.chords}")
        if any(r >= s for r, s in self.chords):
            raise ValueError("each chord must be written (r, s) with r < s")
        if list(self.chords) != sorted(self.chords):
            raise ValueError("chords must be sorted by their left endpoint")

    @property
    def k(self) -> int:
        return len(self.chords)

    @classmethod
    def from_word(cls, word: str) -> "PairPartition":
        """``"abba"`` -> ``((1, 4), (2, 3))``; each letter must occur exactly twice."""
        where: dict[str, list[int]] = {}
        for pos, letter in enumerate(word, start=1):
            where.setdefault(letter, []).append(pos)
        if any(len(v) != 2 for v in where.values()):
            raise ValueError(f"{word!r} is not pair-matched")
        return cls(tuple(sorted(tuple(v) for v in where.values())))

    def crossing_count(self) -> int:
        c = self.chords
        return sum(crosses(c[i], c[j]) for i in range(len(c)) for j in range(i + 1, len(c)))


@dataclass(frozen=True)
class LabeledPairing:
    partition: PairPartition
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != self.partition.k or set(self.labels) - {"G", "S"}:
            raise ValueError(f"need one G/S label per chord, got {self.labels}")

    def is_valid(self) -> bool:
        c = self.partition.chords
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                if crosses(c[i], c[j]) and (self.labels[i] == "S" or self.labels[j] == "S"):
                    return False
        return True

    def weight(self, g_weight, s_weight) -> Fraction:
        n_s = self.labels.count("S")
        return Fraction(g_weight) ** (self.partition.k - n_s) * Fraction(s_weight) ** n_s


def catalan(n: int) -> int:
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return comb(2 * n, n) // (n + 1)


def double_factorial(n: int) -> int:
    """``n!!``; ``(-1)!! = 0!! = 1``."""
    return prod(range(n, 0, -2)) if n > 0 else 1


def gaussian_moment(h: int) -> int:
    if h < 1:
        raise ValueError(f"h must be positive, got {h}")
    return 0 if h % 2 else double_factorial(h - 1)


def crosses(c1: Chord, c2: Chord) -> bool:
    (r1, s1), (r2, s2) = c1, c2
    return r1 < r2 < s1 < s2 or r2 < r1 < s2 < s1


def is_non_crossing(p: PairPartition) -> bool:
    return p.crossing_count() == 0


def _matchings(points: tuple[int, ...]) -> Iterator[tuple[Chord, ...]]:
    if not points:
        yield ()
        return
    first, rest = points[0], points[1:]
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for tail in _matchings(remaining):
            yield ((first, partner),) + tail


def enumerate_pair_partitions(two_k: int) -> Iterator[PairPartition]:
    """Every perfect matching of ``1..2k`` exactly once, in lexicographic order."""
    _check_two_k(two_k, ENUMERATION_BUDGET)
    for chords in _matchings(tuple(range(1, two_k + 1))):
        yield PairPartition(chords)


def _cross_masks(p: PairPartition) -> list[int]:
    c = p.chords
    masks = [0] * len(c)
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if crosses(c[i], c[j]):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


@lru_cache(maxsize=None)
def _labeling_counts(two_k: int) -> tuple[int, ...]:
    """``counts[j]``: valid labellings, over all diagrams, with exactly ``j`` S chords."""
    k = _check_two_k(two_k, MOMENT_BUDGET)
    masks = np.array([_cross_masks(p) for p in enumerate_pair_partitions(two_k)], dtype=np.int64)
    labellings = np.arange(1 << k, dtype=np.int64)  # bit i set: chord i is S
    valid = np.ones((len(masks), len(labellings)), dtype=bool)
    for i in range(k):
        is_s = ((labellings >> i) & 1).astype(bool)[None, :]
        cross_i = masks[:, i:i + 1]
        # an S chord must cross nothing; a G chord must cross no S chord
        valid &= ~(is_s & (cross_i != 0))
        valid &= ~(~is_s & ((cross_i & labellings[None, :]) != 0))
    per_labelling = valid.sum(axis=0)
    n_s = np.array([bin(x).count("1") for x in range(1 << k)])
    return tuple(int(per_labelling[n_s == j].sum()) for j in range(k + 1))


def constrained_moment(g_weight, s_weight, two_k: int) -> Fraction:
    """``2k``-th moment of ``alpha*g + beta*s`` given ``g_weight = alpha**2``, ``s_weight = beta**2``."""
    g, s = Fraction(g_weight), Fraction(s_weight)
    if g < 0 or s < 0:
        raise ValueError("weights are variances and must be non-negative")
    counts = _labeling_counts(two_k)
    k = two_k // 2
    return sum((c * g ** (k - j) * s ** j for j, c in enumerate(counts)), Fraction(0))


def height(p: PairPartition) -> int:
    """Number of chords crossed by no other chord."""
    return sum(
        not any(crosses(c, other) for other in p.chords if other != c) for c in p.chords
    )


@lru_cache(maxsize=None)
def height_moment(two_k: int) -> int:
    _check_two_k(two_k, MOMENT_BUDGET)
    return sum(2 ** height(p) for p in enumerate_pair_partitions(two_k))


def limit_moment_disco(depth: int, h: int) -> Fraction:
    """``h``-th limiting moment of ``D_d / sqrt(2**d N)``; zero for odd ``h``.

    The ``d`` free semicircular summands merge into one of variance
    ``1 - 2**-d``; the Gaussian keeps variance ``2**-d``.
    """
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    if h < 1:
        raise ValueError(f"h must be positive, got {h}")
    if h % 2:
        return Fraction(0)
    if depth == 0:
        _check_two_k(h, MOMENT_BUDGET)
        return Fraction(gaussian_moment(h))
    g = Fraction(1, 2 ** depth)
    return constrained_moment(g, 1 - g, h)


def moment_bounds(two_k: int) -> tuple[int, int, int]:
    """``(2**k C_k, 2**k (2k-1)!!, sum of 2**height)``, checked to be ordered."""
    k = _check_two_k(two_k, MOMENT_BUDGET)
    lower = 2 ** k * catalan(k)
    upper = 2 ** k * double_factorial(two_k - 1)
    value = height_moment(two_k)
    if not lower <= value <= upper:
        raise AssertionError(f"moment bound violated at 2k={two_k}: {lower} <= {value} <= {upper}")
    return lower, upper, value


@dataclass(frozen=True)
class MomentRow:
    two_k: int
    value: Fraction
    provenance: str

    @property
    def float_value(self) -> float:
        return float(self.value)


@dataclass
class MomentTable:
    name: str
    rows: list[MomentRow] = field(default_factory=list)

    def csv_rows(self) -> list[list]:
        return [[r.two_k, r.value.numerator, r.value.denominator, repr(r.float_value)] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["two_k", "exact_num", "exact_den", "float"])
        writer.writerows(self.csv_rows())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "rows": [
                {"two_k": r.two_k, "exact_num": r.value.numerator, "exact_den": r.value.denominator,
                 "float": r.float_value, "provenance": r.provenance}
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def moment_table(series: str, orders, depth: int = 1) -> MomentTable:
    """Exact moments for ``series`` in ``{"semicircle", "gaussian", "disco", "height"}``."""
    rows = []
    for two_k in orders:
        k = _check_two_k(two_k, MOMENT_BUDGET)
        if series == "semicircle":
            rows.append(MomentRow(two_k, Fraction(catalan(k)), "closed-form"))
        elif series == "gaussian":
            rows.append(MomentRow(two_k, Fraction(gaussian_moment(two_k)), "closed-form"))
        elif series == "disco":
            rows.append(MomentRow(two_k, limit_moment_disco(depth, two_k), "exact-enumeration"))
        elif series == "height":
            rows.append(MomentRow(two_k, Fraction(height_moment(two_k)), "height-formula"))
        else:
            raise ValueError(f"unknown moment series {series!r}")
    name = f"disco_d{depth}" if series == "disco" else series
    return MomentTable(name, rows)
