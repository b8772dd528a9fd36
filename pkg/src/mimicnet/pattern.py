"""Matching patterns: families of covered terminal subsets.

Subsets are stored as bitmasks over terminal indices (bit ``i`` set means
terminal ``i`` of the ordered terminal list is covered).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class MatchingPattern:
    terminal_count: int
    subsets: tuple[int, ...]

    def __post_init__(self) -> None:
        limit = 1 << self.terminal_count
        if any(not 0 <= s < limit for s in self.subsets):
            raise ValueError("subset mask outside the terminal range")
        if list(self.subsets) != sorted(set(self.subsets)):
            raise ValueError("subsets must be sorted and distinct")

    @classmethod
    def of(cls, k: int, masks: Iterable[int]) -> "MatchingPattern":
        return cls(k, tuple(sorted(set(masks))))

    @classmethod
    def from_sets(cls, k: int, sets: Iterable[Iterable[int]]) -> "MatchingPattern":
        return cls.of(k, (sum(1 << i for i in s) for s in sets))

    @property
    def is_empty(self) -> bool:
        return not self.subsets

    def parity(self) -> int | None:
        if not self.subsets:
            return None
        return bin(self.subsets[0]).count("1") & 1

    def parity_consistent(self) -> bool:
        return len({bin(s).count("1") & 1 for s in self.subsets}) <= 1

    def as_sets(self) -> list[tuple[int, ...]]:
        return [tuple(i for i in range(self.terminal_count) if s >> i & 1) for s in self.subsets]

    def permuted(self, perm: Sequence[int]) -> "MatchingPattern":
        """Relabel terminal ``i`` as ``perm[i]``."""
        return MatchingPattern.of(self.terminal_count, (permute_mask(s, perm) for s in self.subsets))

    def __contains__(self, mask: object) -> bool:
        return mask in self.subsets

    def __len__(self) -> int:
        return len(self.subsets)


def permute_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for i, j in enumerate(perm):
        if mask >> i & 1:
            out |= 1 << j
    return out


def canonical_pattern(p: MatchingPattern) -> tuple[MatchingPattern, tuple[int, ...]]:
    """Lexicographically least relabelling of ``p`` and the permutation used.

    The permutation maps original terminal index ``i`` to canonical index
    ``perm[i]``.  Among permutations reaching the minimum, the
    lexicographically least permutation is returned.
    """
    best = None
    best_perm: tuple[int, ...] = ()
    for perm in permutations(range(p.terminal_count)):
        cand = tuple(sorted(permute_mask(s, perm) for s in p.subsets))
        if best is None or cand < best:
            best, best_perm = cand, perm
    return MatchingPattern(p.terminal_count, best if best is not None else ()), best_perm


def invert_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)
