"""Finitely supported sequences under the sup norm."""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Mapping


@dataclass(frozen=True, eq=False)
class SparseNonnegativeSequence:
    """Element of c0+ with finite support; absent coordinates are zero.

    Zero entries are dropped on construction so the stored support is exact.
    """

    entries: Mapping[Hashable, float]

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.entries).items():
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"coordinate {k!r} has invalid value {v!r}")
            if v > 0:
                clean[k] = v
        object.__setattr__(self, "entries", MappingProxyType(clean))

    def __getitem__(self, key) -> float:
        return self.entries.get(key, 0.0)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseNonnegativeSequence):
            return NotImplemented
        return dict(self.entries) == dict(other.entries)

    @property
    def support(self) -> frozenset:
        return frozenset(self.entries)

    def norm(self) -> float:
        return max(self.entries.values(), default=0.0)

    def distance(self, other: "SparseNonnegativeSequence") -> float:
        return sup_distance(self.entries, other.entries)


def sup_distance(f: Mapping[Hashable, float], g: Mapping[Hashable, float]) -> float:
    """||f - g||_inf for finitely supported (possibly signed) sequences."""
    keys = set(f) | set(g)
    return max((abs(f.get(k, 0.0) - g.get(k, 0.0)) for k in keys), default=0.0)


def fold_to_positive(f: Mapping[int, float]) -> SparseNonnegativeSequence:
    """Split a signed sequence into positive and negative parts on interleaved coordinates.

    Coordinate k goes to 2k (positive part) and 2k+1 (negative part). For any
    f, h: ||f-h||/2 <= ||g_f - g_h|| <= ||f-h||.
    """
    out: dict[int, float] = {}
    for k, v in f.items():
        k = int(k)
        if v > 0:
            out[2 * k] = float(v)
        elif v < 0:
            out[2 * k + 1] = float(-v)
    return SparseNonnegativeSequence(out)
