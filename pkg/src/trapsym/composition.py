"""Compositions: unordered multisets of one-particle state labels."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Hashable, Sequence

_SUPERSCRIPT = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


@dataclass(frozen=True)
class Composition:
    """A multiset of state labels, stored sorted.

    ``energy`` is optional and excluded from equality and hashing so that the
    same multiset built from different spectra compares equal.
    """

    labels: tuple
    energy: float | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(sorted(self.labels)))

    @classmethod
    def of(cls, labels: Sequence[Hashable], sigma1: Sequence[float] | None = None) -> "Composition":
        labels = tuple(sorted(labels))
        energy = None if sigma1 is None else float(sum(sigma1[i] for i in labels))
        return cls(labels, energy)

    @property
    def N(self) -> int:
        return len(self.labels)

    @property
    def multiplicities(self) -> dict:
        """Label -> count, in ascending label order."""
        return dict(sorted(Counter(self.labels).items()))

    @property
    def distinct(self) -> tuple:
        return tuple(self.multiplicities)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(sorted(self.multiplicities.values(), reverse=True))

    @property
    def degeneracy(self) -> int:
        d = math.factorial(self.N)
        for m in self.multiplicities.values():
            d //= math.factorial(m)
        return d

    def sequences(self) -> list[tuple]:
        """Distinct orderings of the labels, lexicographically sorted."""
        return sorted(set(permutations(self.labels)))

    def shifted(self, by: Sequence[int]) -> "Composition":
        return Composition(tuple(a + b for a, b in zip(self.labels, by)))

    def text(self) -> str:
        """Compact label like ``⌊0²1⌋``."""
        parts = []
        for lab, m in self.multiplicities.items():
            parts.append(f"{lab}" + (str(m).translate(_SUPERSCRIPT) if m > 1 else ""))
        sep = "," if any(len(str(lab)) > 1 for lab in self.distinct) else ""
        return "⌊" + sep.join(parts) + "⌋"

    def __str__(self) -> str:
        return self.text()
