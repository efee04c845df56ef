"""Subsets of the chain ``[n] = {1, ..., n}`` and their connectivity structure."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True, order=True)
class SubsystemMask:
    """A nonempty set of sites ``A`` in a chain of ``n`` sites (1-based, ascending).

    Bit ``i - 1`` of :attr:`bits` is set iff site ``i`` is in ``A``.
    """

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        if not members:
            raise ParameterError("a subsystem must contain at least one site")
        if members[0] < 1 or members[-1] > self.n:
            raise ParameterError(f"sites must lie in [1, {self.n}], got {members}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, n: int, sites: Iterable[int]) -> "SubsystemMask":
        return cls(n, tuple(sites))

    @classmethod
    def from_bits(cls, n: int, bits: int) -> "SubsystemMask":
        return cls(n, tuple(i + 1 for i in range(n) if bits >> i & 1))

    @classmethod
    def full(cls, n: int) -> "SubsystemMask":
        return cls(n, tuple(range(1, n + 1)))

    @property
    def bits(self) -> int:
        return sum(1 << (i - 1) for i in self.members)

    @property
    def complement(self) -> tuple[int, ...]:
        """Sites of ``[n] - A``; may be empty."""
        s = set(self.members)
        return tuple(i for i in range(1, self.n + 1) if i not in s)

    @property
    def index(self) -> np.ndarray:
        """0-based positions of the members, for slicing matrices."""
        return np.asarray(self.members, dtype=int) - 1

    @property
    def complement_index(self) -> np.ndarray:
        return np.asarray(self.complement, dtype=int) - 1

    def is_full(self) -> bool:
        return len(self.members) == self.n

    def reflect(self) -> "SubsystemMask":
        """Parity dual ``{n + 1 - i : i in A}``."""
        return SubsystemMask(self.n, tuple(self.n + 1 - i for i in self.members))

    def without(self, site: int) -> "SubsystemMask | None":
        rest = tuple(i for i in self.members if i != site)
        return SubsystemMask(self.n, rest) if rest else None

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, site: object) -> bool:
        return site in self.members


@dataclass(frozen=True)
class ConnectivityProfile:
    """Maximal runs of consecutive sites of a subsystem and their separations.

    ``distances[a, b]`` is the minimal chain distance between components ``a`` and
    ``b`` (zero on the diagonal); adjacent runs separated by one empty site are at
    distance 2.
    """

    components: tuple[tuple[int, ...], ...]
    distances: np.ndarray

    @property
    def left(self) -> tuple[int, ...]:
        return self.components[0]

    @property
    def right(self) -> tuple[int, ...]:
        return self.components[-1]

    def nearest_distance(self, k: int) -> float:
        """Distance from component ``k`` to the closest other component (inf if alone)."""
        others = np.delete(self.distances[k], k)
        return float(others.min()) if others.size else float("inf")


def connectivity(a: SubsystemMask) -> ConnectivityProfile:
    comps: list[list[int]] = []
    for i in a.members:
        if comps and i == comps[-1][-1] + 1:
            comps[-1].append(i)
        else:
            comps.append([i])
    k = len(comps)
    d = np.zeros((k, k), dtype=int)
    for x, y in itertools.combinations(range(k), 2):
        # components are sorted, so the gap is between the end of x and start of y
        d[x, y] = d[y, x] = comps[y][0] - comps[x][-1]
    return ConnectivityProfile(tuple(tuple(c) for c in comps), d)


def all_subsystems(n: int) -> Iterator[SubsystemMask]:
    """Every nonempty subset of ``[n]`` in increasing bitmask order."""
    for bits in range(1, 1 << n):
        yield SubsystemMask.from_bits(n, bits)


def connected_subsystems(n: int) -> Iterator[SubsystemMask]:
    masks = [SubsystemMask(n, tuple(range(i, j + 1))) for i in range(1, n + 1) for j in range(i, n + 1)]
    return iter(sorted(masks, key=lambda s: s.bits))


def parity_symmetric_subsystems(n: int) -> Iterator[SubsystemMask]:
    half = (n + 1) // 2
    out = []
    for bits in range(1, 1 << half):
        left = [i + 1 for i in range(half) if bits >> i & 1]
        out.append(SubsystemMask(n, tuple(left) + tuple(n + 1 - i for i in left)))
    return iter(sorted(out, key=lambda s: s.bits))
