"""Permutations of {0, ..., q-1} and their cycle decompositions.

Composition order is a classic trap in this domain, so it is fixed once:
``compose(g, h)`` and ``g * h`` mean "apply h first, then g", matching
ordinary function composition g(h(x)).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["Permutation", "CycleDecomposition", "compose"]

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Permutation:
    """A bijection of {0, ..., q-1}, stored as the tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"images {images} are not a permutation of 0..{len(images) - 1}")
        self.images = images

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(range(size))

    @classmethod
    def from_cycles(cls, size: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        """Build from disjoint cycles; symbols not mentioned are fixed."""
        images = list(range(size))
        seen: set[int] = set()
        for cycle in cycles:
            cycle = [int(c) for c in cycle]
            for c in cycle:
                if not 0 <= c < size:
                    raise ValueError(f"cycle entry {c} out of range 0..{size - 1}")
                if c in seen:
                    raise ValueError(f"symbol {c} appears in more than one cycle")
                seen.add(c)
            for a, b in zip(cycle, cycle[1:]):
                images[a] = b
            if cycle:
                images[cycle[-1]] = cycle[0]
        return cls(images)

    @classmethod
    def parse(cls, text: str, size: int) -> "Permutation":
        """Parse either comma-separated images ("3,1,2,0") or cycles ("(0 3)")."""
        text = text.strip()
        if not text:
            raise ValueError("empty permutation")
        if "(" in text:
            stripped = _CYCLE_RE.sub("", text).strip()
            if stripped:
                raise ValueError(f"unexpected text {stripped!r} outside cycles in {text!r}")
            cycles = []
            for body in _CYCLE_RE.findall(text):
                entries = [e for e in re.split(r"[,\s]+", body.strip()) if e]
                try:
                    cycles.append([int(e) for e in entries])
                except ValueError:
                    raise ValueError(f"non-integer entry in cycle ({body})") from None
            return cls.from_cycles(size, cycles)
        try:
            images = [int(e) for e in text.split(",")]
        except ValueError:
            raise ValueError(f"cannot parse permutation {text!r}") from None
        if len(images) != size:
            raise ValueError(f"expected {size} images, got {len(images)}")
        return cls(images)

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """self composed after other (other applied first)."""
        if self.size != other.size:
            raise ValueError(f"size mismatch: {self.size} vs {other.size}")
        return Permutation(self.images[j] for j in other.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycle_decomposition(self) -> "CycleDecomposition":
        seen: set[int] = set()
        cycles = []
        for start in range(self.size):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cycle.append(j)
                seen.add(j)
                j = self.images[j]
            cycles.append(tuple(cycle))
        return CycleDecomposition(tuple(cycles))

    def is_transitive(self) -> bool:
        return len(self.cycle_decomposition().cycles) == 1

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycle_decomposition().cycles))

    def images_string(self) -> str:
        return ",".join(map(str, self.images))

    def cycle_string(self) -> str:
        return str(self.cycle_decomposition())

    def __eq__(self, other):
        if isinstance(other, Permutation):
            return self.images == other.images
        return NotImplemented

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({self.cycle_string()})"


def compose(g: Permutation, h: Permutation) -> Permutation:
    """g after h (h applied first)."""
    return g * h


@dataclass(frozen=True)
class CycleDecomposition:
    """Disjoint cycles partitioning the symbols, fixed points included.

    Each cycle is listed in application order (the image of entry j is
    entry j+1, cyclically) and starts at its smallest symbol; cycles are
    sorted by that smallest symbol.
    """

    cycles: tuple[tuple[int, ...], ...]

    def cycle_containing(self, symbol: int) -> tuple[int, ...]:
        for cycle in self.cycles:
            if symbol in cycle:
                return cycle
        raise ValueError(f"symbol {symbol} not covered by {self}")

    def period_of(self, symbol: int) -> int:
        return len(self.cycle_containing(symbol))

    def __str__(self):
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles)
