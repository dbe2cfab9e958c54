"""Fat Cantor set built by removing centered gaps from [-a, a].

Level-n intervals are indexed by binary words.  Word w keeps the interval
I_w; the closed gap removed from its middle has length gap(n)/2^n where
n is the word length, and the right and left remainders become I_{w0}
and I_{w1}.  With gap lengths gap(n) = 2b/(n+1)^p, p > 1, the removed
total 2b*zeta(p) stays below 2a exactly when zeta(p) < a/b, and the
limit set keeps measure 2a - 2b*zeta(p) > 0.  Consecutive gap ratios
((n+1)/(n+2))^p increase to 1, which is what lets the downstream surgery
approach slope 2 uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DomainError, FeasibilityError, InvalidParameterError, SizeGuardError
from .lorenz import LorenzBranchMap

__all__ = [
    "GapLengthSequence",
    "CantorConstruction",
    "Address",
    "zeta_value",
    "make_construction",
]

LEVEL_MEASURE_CAP = 30


def zeta_value(p: float, terms: int = 200_000) -> float:
    """zeta(p) for p > 1 by partial sum plus an Euler-Maclaurin remainder.

    The correction integral term M^{1-p}/(p-1) - M^{-p}/2 + p M^{-p-1}/12
    bounds the truncation error by O(M^{-p-3}), far below double rounding
    for the default number of terms.
    """
    if p <= 1.0:
        raise InvalidParameterError(f"gap exponent must exceed 1 for a summable series, got {p}")
    partial = math.fsum(m ** -p for m in range(1, terms + 1))
    m = float(terms)
    remainder = m ** (1.0 - p) / (p - 1.0) - 0.5 * m ** -p + p / 12.0 * m ** (-p - 1.0)
    return partial + remainder


@dataclass(frozen=True)
class GapLengthSequence:
    """Removed-gap lengths gap(n) = first_length / (n+1)^p."""

    first_length: float
    exponent: float

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise InvalidParameterError(
                f"gap exponent must exceed 1, got {self.exponent} (series diverges)"
            )
        if self.first_length <= 0.0:
            raise InvalidParameterError("first gap length must be positive")

    def length(self, n: int) -> float:
        return self.first_length / (n + 1.0) ** self.exponent

    def partial_sum(self, count: int) -> float:
        return math.fsum(self.length(n) for n in range(count))

    def total(self) -> float:
        return self.first_length * zeta_value(self.exponent)

    def ratio(self, n: int) -> float:
        """gap(n+1)/gap(n) = ((n+1)/(n+2))^p, increasing to 1."""
        return ((n + 1.0) / (n + 2.0)) ** self.exponent


class Address(NamedTuple):
    kind: str  # "interval" or "gap"
    word: str


def _check_word(word: str) -> None:
    if any(ch not in "01" for ch in word):
        raise DomainError(f"word must be a 0/1 string, got {word!r}")


@dataclass
class CantorConstruction:
    """Word-indexed interval tree on [-a, a] with centered gaps removed.

    The interval cache is append-only and keyed by word; repopulation is
    idempotent (a word always resolves to the same endpoints), so shared
    concurrent use is safe.
    """

    half_width: float
    gaps: GapLengthSequence
    source_map: LorenzBranchMap
    _cache: dict[str, tuple[float, float]] = field(default_factory=dict, repr=False)

    def interval(self, word: str) -> tuple[float, float]:
        """Endpoints of I_word; the empty word gives [-a, a]."""
        _check_word(word)
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        if word == "":
            result = (-self.half_width, self.half_width)
        else:
            parent_lo, parent_hi = self.interval(word[:-1])
            gap_lo, gap_hi = self._gap_from(parent_lo, parent_hi, len(word) - 1)
            result = (gap_hi, parent_hi) if word[-1] == "0" else (parent_lo, gap_lo)
        self._cache[word] = result
        return result

    def _gap_from(self, lo: float, hi: float, level: int) -> tuple[float, float]:
        center = 0.5 * (lo + hi)
        half = 0.5 * self.gaps.length(level) / 2.0 ** level
        return center - half, center + half

    def gap(self, word: str) -> tuple[float, float]:
        """The closed centered gap removed from I_word."""
        lo, hi = self.interval(word)
        return self._gap_from(lo, hi, len(word))

    def level_interval_length(self, n: int) -> float:
        """Closed form (2a - sum of gap lengths below n) / 2^n."""
        return (2.0 * self.half_width - self.gaps.partial_sum(n)) / 2.0 ** n

    def level_measure(self, n: int) -> float:
        """Total length of the 2^n level-n intervals.

        All intervals at one level share one length, so the sum reduces to
        the per-level length recursion; the closed form above is the
        cross-check, not the implementation.
        """
        if n < 0:
            raise DomainError("level must be nonnegative")
        if n > LEVEL_MEASURE_CAP:
            raise SizeGuardError(f"level {n} exceeds the guard {LEVEL_MEASURE_CAP}")
        length = 2.0 * self.half_width
        for j in range(n):
            length = (length - self.gaps.length(j) / 2.0 ** j) / 2.0
        return 2.0 ** n * length

    def limit_measure(self) -> float:
        return 2.0 * self.half_width - self.gaps.total()

    def locate(self, x: float, depth: int) -> Address:
        """Descend the tree at x down to the given depth.

        Returns the first gap word whose closed gap contains x, or the
        depth-length interval word otherwise.  Gaps are closed and share
        endpoints with their neighbor intervals; the tie goes to the gap.
        """
        if depth < 1:
            raise DomainError("depth must be at least 1")
        if not -self.half_width <= x <= self.half_width:
            raise DomainError(f"x = {x} outside [-a, a]")
        word = ""
        while len(word) < depth:
            gap_lo, gap_hi = self.gap(word)
            if gap_lo <= x <= gap_hi:
                return Address("gap", word)
            word += "0" if x > gap_hi else "1"
        return Address("interval", word)

    def subtree_cover_length(self, word: str, level: int) -> float:
        """Length of the absolute level-`level` cover inside I_word."""
        n = len(word)
        if level < n:
            raise DomainError("cover level must be at least the word length")
        lo, hi = self.interval(word)
        removed = math.fsum(self.gaps.length(j) / 2.0 ** n for j in range(n, level))
        return (hi - lo) - removed

    def to_tree_json(self, depth: int) -> dict:
        """Words, interval endpoints and gaps down to a fixed depth."""
        if depth < 0:
            raise DomainError("depth must be nonnegative")
        if depth > 12:
            raise SizeGuardError("tree dump limited to depth 12")
        words = [""]
        for _ in range(depth):
            words = [w + ch for w in words for ch in "01"]
        nodes = {}
        frontier = [""]
        while frontier:
            w = frontier.pop()
            lo, hi = self.interval(w)
            glo, ghi = self.gap(w)
            nodes[w] = {"interval": [lo, hi], "gap": [glo, ghi]}
            if len(w) < depth:
                frontier.extend((w + "0", w + "1"))
        return {
            "half_width": self.half_width,
            "exponent": self.gaps.exponent,
            "depth": depth,
            "nodes": dict(sorted(nodes.items())),
        }


def make_construction(m: LorenzBranchMap, p: float) -> CantorConstruction:
    """Build the construction for a branch map: a is the half-width and
    the first removed gap is exactly [-b, b].

    Raises FeasibilityError when the gap series would exceed the ambient
    length, i.e. unless zeta(p) < a/b.
    """
    z = zeta_value(p)
    ratio = m.a / m.b
    if z >= ratio:
        raise FeasibilityError(
            f"gap series too long: zeta({p}) = {z:.6f} >= a/b = {ratio:.6f}; "
            f"the construction needs zeta(p) < a/b"
        )
    gaps = GapLengthSequence(first_length=2.0 * m.b, exponent=p)
    return CantorConstruction(half_width=m.a, gaps=gaps, source_map=m)
