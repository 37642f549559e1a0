"""Covers of finite metric spaces and their diameter, Lebesgue number and multiplicity."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .cliques import bits, iter_maximal_cliques, mask_of, threshold_graph
from .errors import BadParams, NotACover, NotVectorSpace
from .metric import FiniteMetricSpace, map_moduli
from .serialize import encode_value


@dataclass(frozen=True, eq=False)
class Cover:
    """A finite family of nonempty point sets whose union is the whole space.

    Members are normalised to sorted index tuples and duplicates are collapsed
    on construction (the first occurrence, and its label, wins).
    """

    space: FiniteMetricSpace
    members: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.space.n
        raw = list(self.members)
        labels = None if self.labels is None else list(self.labels)
        if labels is not None and len(labels) != len(raw):
            raise BadParams("member labels must match members one-to-one")
        seen: set[tuple[int, ...]] = set()
        members, kept_labels = [], []
        for k, m in enumerate(raw):
            m = tuple(sorted({int(i) for i in m}))
            if not m:
                raise NotACover(f"member {k} is empty")
            if m[0] < 0 or m[-1] >= n:
                raise NotACover(f"member {k} refers to a point outside the space")
            if m in seen:
                continue
            seen.add(m)
            members.append(m)
            if labels is not None:
                kept_labels.append(str(labels[k]))
        covered = set().union(*members) if members else set()
        if len(covered) != n:
            missing = sorted(set(range(n)) - covered)
            raise NotACover(f"points {missing} are not covered", uncovered=missing)
        object.__setattr__(self, "members", tuple(members))
        object.__setattr__(self, "labels", None if labels is None else tuple(kept_labels))

    def __len__(self) -> int:
        return len(self.members)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(m) for m in self.members)

    @cached_property
    def _mask_set(self) -> frozenset[int]:
        return frozenset(self.masks)

    @cached_property
    def _by_point(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.space.n)]
        for m, mask in zip(self.members, self.masks):
            for i in m:
                out[i].append(mask)
        return out

    @property
    def has_whole_space(self) -> bool:
        return ((1 << self.space.n) - 1) in self._mask_set

    def contains_set(self, subset: int | Iterable[int]) -> bool:
        """True iff some member contains the given point set (bitset or iterable)."""
        mask = subset if isinstance(subset, int) else mask_of(subset)
        if mask == 0 or mask in self._mask_set:
            return True
        low = (mask & -mask).bit_length() - 1
        return any(mask & ~m == 0 for m in self._by_point[low])

    def same_members(self, other: "Cover") -> bool:
        return set(self.members) == set(other.members)

    @cached_property
    def metrics(self) -> "CoverMetrics":
        return CoverMetrics(cover_diameter(self), lebesgue_number(self), max_multiplicity(self))


@dataclass(frozen=True)
class CoverMetrics:
    diameter: float
    lebesgue: float
    max_multiplicity: int

    def to_json(self) -> dict:
        return {
            "diameter": encode_value(self.diameter),
            "lebesgue": encode_value(self.lebesgue),
            "max_multiplicity": self.max_multiplicity,
        }


def cover_diameter(cover: Cover) -> float:
    d = cover.space.dist
    best = 0.0
    for m in cover.members:
        if len(m) > 1:
            idx = np.asarray(m)
            best = max(best, float(d[np.ix_(idx, idx)].max()))
    return best


def _uncovered_clique(cover: Cover, value: float, strict: bool) -> int | None:
    adj = threshold_graph(cover.space.dist, value, strict)
    for clique in iter_maximal_cliques(adj):
        if not cover.contains_set(clique):
            return clique
    return None


def lebesgue_number(cover: Cover) -> float:
    """Exact Lebesgue number: least diameter of a point set lying in no member.

    A set of diameter <= v is a clique of the graph {d <= v}, and it lies in a
    member as soon as a maximal clique containing it does; the failure
    predicate is monotone in v, so the first failing distance value is found
    by bisection over the distinct distances.
    """
    if cover.has_whole_space:
        return math.inf
    values = cover.space.distinct_distances
    lo, hi = 0, len(values)
    while lo < hi:
        mid = (lo + hi) // 2
        if _uncovered_clique(cover, float(values[mid]), strict=False) is not None:
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo]) if lo < len(values) else math.inf


def lebesgue_at_least(cover: Cover, bound: float) -> bool:
    """Decide L(cover) >= bound with a single clique enumeration."""
    if math.isinf(bound):
        return cover.has_whole_space
    return _uncovered_clique(cover, bound, strict=True) is None


def uncovered_witness(cover: Cover, bound: float) -> tuple[int, ...] | None:
    """A set of diameter < bound contained in no member, if one exists."""
    c = _uncovered_clique(cover, bound, strict=True)
    return None if c is None else tuple(bits(c))


def multiplicities(cover: Cover) -> np.ndarray:
    counts = np.zeros(cover.space.n, dtype=int)
    for m in cover.members:
        counts[list(m)] += 1
    return counts


def max_multiplicity(cover: Cover) -> int:
    return int(multiplicities(cover).max())


def threshold_clique_cover(space: FiniteMetricSpace, value: float, strict: bool = True) -> Cover:
    """Maximal cliques of {d < value} (``strict``) or {d <= value} as a cover."""
    adj = threshold_graph(space.dist, value, strict)
    members = sorted(tuple(bits(c)) for c in iter_maximal_cliques(adj))
    return Cover(space, tuple(members))


def pullback_cover(f: Sequence[int] | Mapping[int, int], source: FiniteMetricSpace, target_cover: Cover) -> Cover:
    """Cover of ``source`` by the nonempty preimages f^{-1}(V), V in the target cover."""
    m = target_cover.space.n
    try:
        img = [int(f[i]) for i in range(source.n)]
    except (KeyError, IndexError) as exc:
        raise NotACover(f"map is not total on the source: missing {exc}") from exc
    bad = [i for i, y in enumerate(img) if not 0 <= y < m]
    if bad:
        raise NotACover(f"map sends {bad} outside the target space", uncovered=bad)
    members = []
    for v in target_cover.members:
        vs = set(v)
        pre = tuple(i for i, y in enumerate(img) if y in vs)
        if pre:
            members.append(pre)
    return Cover(source, tuple(members))


@dataclass(frozen=True)
class PullbackBounds:
    lebesgue_lower: float
    diameter_upper: float


def pullback_bounds(f, source: FiniteMetricSpace, target_cover: Cover) -> PullbackBounds:
    """Guaranteed bounds on the pulled-back cover from the map's moduli alone.

    L(pullback) >= sup{t : omega_f(t) < L(target)} and
    diam(pullback) <= sup{t : rho_f(t) <= diam(target)}.
    """
    mod = map_moduli(source, target_cover.space, f)
    return PullbackBounds(
        mod.omega_sup_below(lebesgue_number(target_cover)),
        mod.rho_sup_within(cover_diameter(target_cover)),
    )


def density_radius(space: FiniteMetricSpace, subset: Iterable[int]) -> float:
    """max over points x of d(x, subset)."""
    idx = sorted(set(int(i) for i in subset))
    if not idx:
        raise BadParams("dense subset must be nonempty")
    return float(space.dist[:, idx].min(axis=1).max())


def prune_cover(cover: Cover, dense_subset: Iterable[int]) -> Cover:
    """Keep only members meeting ``dense_subset``.

    If b = max_x d(x, dense_subset) then L(pruned) >= L(cover) - b. When the
    retained members stop covering the space :class:`NotACover` is raised with
    the uncovered points; the family is reported, not repaired.
    """
    dense = set(int(i) for i in dense_subset)
    if not dense:
        raise BadParams("dense subset must be nonempty")
    kept = [(m, None if cover.labels is None else cover.labels[k])
            for k, m in enumerate(cover.members) if dense.intersection(m)]
    covered = set().union(*(m for m, _ in kept)) if kept else set()
    if len(covered) != cover.space.n:
        missing = sorted(set(range(cover.space.n)) - covered)
        raise NotACover(f"pruned family misses points {missing}", uncovered=missing)
    labels = None if cover.labels is None else tuple(lab for _, lab in kept)
    return Cover(cover.space, tuple(m for m, _ in kept), labels)


def scale_space(space: FiniteMetricSpace, factor: float) -> FiniteMetricSpace:
    if not space.is_vector_space:
        raise NotVectorSpace("scaling needs a space generated from coordinate vectors")
    if not factor > 0:
        raise BadParams("scale factor must be positive")
    # norm homogeneity; scaling the matrix keeps power-of-two factors exact
    return FiniteMetricSpace(space.labels, space.dist * factor, space.points * factor, space.p)


def scale_cover(cover: Cover, factor: float) -> Cover:
    return Cover(scale_space(cover.space, factor), cover.members, cover.labels)


# -- JSON ---------------------------------------------------------------------

def cover_to_json(cover: Cover) -> dict[str, Any]:
    out: dict[str, Any] = {"members": [list(m) for m in cover.members]}
    if cover.labels is not None:
        out["labels"] = list(cover.labels)
    return out


def cover_from_json(obj: Mapping[str, Any], space: FiniteMetricSpace) -> Cover:
    labels = obj.get("labels")
    return Cover(space, tuple(tuple(m) for m in obj["members"]), None if labels is None else tuple(labels))
