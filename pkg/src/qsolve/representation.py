"""Partitions, Young diagrams and the degree table of the Q-functions.

Coordinates: a box is ``(a, s)`` with row ``a >= 1`` counted upward from the
bottom and column ``s >= 1`` counted rightward.  A vertex ``(a, s)`` with
``a, s >= 0`` is a lattice point; ``(0, 0)`` is the outer corner and box
``(a, s)`` has upper-right vertex ``(a, s)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod
from typing import Iterator

from .errors import BadPartition


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise BadPartition(f"parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise BadPartition(f"parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip().strip("()")
        if not text:
            return cls(())
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip()))
        except ValueError as exc:
            raise BadPartition(f"cannot parse partition {text!r}") from exc

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def rows(self) -> int:
        return len(self.parts)

    def row(self, a: int) -> int:
        """Length of row ``a`` (1-based); zero beyond the diagram."""
        return self.parts[a - 1] if 1 <= a <= len(self.parts) else 0

    def __contains__(self, box) -> bool:
        a, s = box
        return a >= 1 and s >= 1 and s <= self.row(a)

    def boxes(self) -> Iterator[tuple[int, int]]:
        for a, length in enumerate(self.parts, start=1):
            for s in range(1, length + 1):
                yield (a, s)

    def __str__(self) -> str:
        return ",".join(map(str, self.parts)) if self.parts else "()"


@dataclass(frozen=True)
class FatHook:
    N: int
    M: int

    @classmethod
    def parse(cls, text: str) -> "FatHook":
        try:
            n, m = (int(x) for x in text.replace("|", ",").split(","))
        except ValueError as exc:
            raise BadPartition(f"cannot parse fat hook {text!r}") from exc
        return cls(n, m)


def transpose(lam: Partition) -> Partition:
    if not lam.parts:
        return lam
    return Partition(tuple(sum(1 for p in lam.parts if p >= s) for s in range(1, lam.parts[0] + 1)))


def hook_lengths(lam: Partition) -> dict[tuple[int, int], int]:
    cols = transpose(lam)
    return {(a, s): (lam.row(a) - s) + (cols.row(s) - a) + 1 for a, s in lam.boxes()}


def multiplicity(lam: Partition) -> int:
    """Number of standard tableaux, ``L! / prod(hooks)``."""
    hooks = prod(hook_lengths(lam).values())
    return factorial(lam.weight) // hooks


def fits_fat_hook(lam: Partition, hook: FatHook) -> bool:
    return all(p <= hook.M for p in lam.parts[hook.N:])


def minimal_symmetric_hook(lam: Partition) -> int:
    n = 0
    while not fits_fat_hook(lam, FatHook(n, n)):
        n += 1
    return n


def degree(lam: Partition, a: int, s: int) -> int:
    """``M_{a,s}``: boxes strictly above row ``a`` and right of column ``s``."""
    cols = transpose(lam)
    return lam.weight - sum(lam.parts[:a]) - sum(cols.parts[:s]) + a * s


def in_region(lam: Partition, a: int, s: int) -> bool:
    """Whether vertex ``(a, s)`` lies on or inside the diagram."""
    if a < 0 or s < 0:
        return False
    if a == 0:
        return s <= lam.row(1)
    if s == 0:
        return a <= lam.rows
    return s <= lam.row(a)


def vertices(lam: Partition) -> list[tuple[int, int]]:
    out = [(0, s) for s in range(lam.row(1) + 1)]
    for a in range(1, lam.rows + 1):
        out.extend((a, s) for s in range(lam.row(a) + 1))
    return out


def degree_table(lam: Partition) -> dict[tuple[int, int], int]:
    return {v: degree(lam, *v) for v in vertices(lam)}


def boundary(lam: Partition) -> list[tuple[int, int]]:
    """Vertices where the degree drops to zero (box to the upper right absent)."""
    return [(a, s) for a, s in vertices(lam) if (a + 1, s + 1) not in lam]


def enumerate_partitions(L: int, hook: FatHook | None = None) -> list[Partition]:
    """All partitions of ``L`` in descending lexicographic order."""

    def rec(rest: int, cap: int):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in rec(rest - first, first):
                yield (first,) + tail

    out = [Partition(p) for p in rec(L, L)]
    if hook is not None:
        out = [p for p in out if fits_fat_hook(p, hook)]
    return out


def two_row(L: int, M: int) -> Partition:
    """The SU(2) diagram ``(L-M, M)`` for ``M`` magnons."""
    if not 0 <= 2 * M <= L:
        raise BadPartition(f"need 0 <= M <= L/2, got L={L}, M={M}")
    return Partition((L - M, M) if M else ((L,) if L else ()))
