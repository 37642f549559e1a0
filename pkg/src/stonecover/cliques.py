"""Maximal clique enumeration on threshold graphs of a distance matrix.

Graphs are lists of Python-int bitsets (bit j of ``adj[i]`` set iff i~j).
Enumeration is Bron-Kerbosch with Tomita pivoting, seeded by a degeneracy
ordering of the vertices, and is capped to make exponential blow-up explicit.
"""
from __future__ import annotations

import os
from typing import Iterator

import numpy as np

from .errors import CliqueCapExceeded

DEFAULT_CLIQUE_CAP = 10**6


def clique_cap() -> int:
    """Cap on enumerated cliques; ``STONE_CLIQUE_CAP`` overrides the default."""
    raw = os.environ.get("STONE_CLIQUE_CAP")
    return int(raw) if raw else DEFAULT_CLIQUE_CAP


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def threshold_graph(dist: np.ndarray, value: float, strict: bool) -> list[int]:
    """Adjacency bitsets of {i ~ j : d(i,j) < value} (or <= when not strict)."""
    n = dist.shape[0]
    rel = dist < value if strict else dist <= value
    rel = rel & ~np.eye(n, dtype=bool)
    packed = np.packbits(rel, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def degeneracy_order(adj: list[int]) -> list[int]:
    n = len(adj)
    deg = [bin(a).count("1") for a in adj]
    remaining = (1 << n) - 1
    order = []
    for _ in range(n):
        v = min(bits(remaining), key=lambda u: (deg[u], u))
        order.append(v)
        remaining &= ~(1 << v)
        for u in bits(adj[v] & remaining):
            deg[u] -= 1
    return order


def iter_maximal_cliques(adj: list[int], cap: int | None = None) -> Iterator[int]:
    """Yield every maximal clique (as a bitset) exactly once.

    Isolated vertices come out as singleton cliques. Raises
    :class:`CliqueCapExceeded` once more than ``cap`` cliques were produced.
    """
    cap = clique_cap() if cap is None else cap
    count = 0

    def expand(r: int, p: int, x: int) -> Iterator[int]:
        nonlocal count
        if not p and not x:
            count += 1
            if count > cap:
                raise CliqueCapExceeded(cap)
            yield r
            return
        # Tomita pivot: maximise |P & N(u)| over u in P | X
        pivot = max(bits(p | x), key=lambda u: bin(p & adj[u]).count("1"))
        for v in bits(p & ~adj[pivot]):
            vb = 1 << v
            yield from expand(r | vb, p & adj[v], x & adj[v])
            p &= ~vb
            x |= vb

    earlier = 0
    for v in degeneracy_order(adj):
        later = adj[v] & ~earlier
        yield from expand(1 << v, later, adj[v] & earlier)
        earlier |= 1 << v


def maximal_cliques(adj: list[int], cap: int | None = None) -> list[int]:
    """All maximal cliques, sorted lexicographically by their member indices."""
    out = list(iter_maximal_cliques(adj, cap))
    out.sort(key=lambda m: sorted(bits(m)))
    return out
