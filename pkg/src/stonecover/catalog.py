"""Explicit cover constructions and the c0 lower-bound witness family.

Finite constructions return :class:`~stonecover.covers.Cover` objects. Covers
of infinite ambient spaces (the l_inf^N grid and the c0+ grid) are exposed as
membership tests, locators and multiplicity counts instead of member lists.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .covers import Cover, cover_diameter, lebesgue_at_least, max_multiplicity, threshold_clique_cover
from .errors import BadParams, BadTree
from .metric import FiniteMetricSpace, _tree_adjacency, validate_space
from .sequences import SparseNonnegativeSequence, sup_distance


@dataclass(frozen=True)
class CoverGuarantee:
    """Bounds a construction promises; ``None`` means no promise."""

    lebesgue_min: float | None = None
    diameter_max: float | None = None
    multiplicity_max: int | None = None


def check_guarantee(cover: Cover, g: CoverGuarantee, tol: float = 1e-12) -> dict[str, Any]:
    """Recompute the cover invariants and compare them with the promised bounds."""
    out: dict[str, Any] = {}
    if g.lebesgue_min is not None:
        out["lebesgue_min"] = g.lebesgue_min
        out["lebesgue_ok"] = lebesgue_at_least(cover, g.lebesgue_min)
    if g.diameter_max is not None:
        diam = cover_diameter(cover)
        out["diameter"] = diam
        out["diameter_max"] = g.diameter_max
        out["diameter_ok"] = diam <= g.diameter_max + tol
    if g.multiplicity_max is not None:
        mult = max_multiplicity(cover)
        out["max_multiplicity"] = mult
        out["multiplicity_max"] = g.multiplicity_max
        out["multiplicity_ok"] = mult <= g.multiplicity_max
    out["pass"] = all(v for k, v in out.items() if k.endswith("_ok"))
    return out


# -- locally finite: all sets of diameter < R ---------------------------------

def clique_cover(space: FiniteMetricSpace, R: float) -> Cover:
    """Maximal elements of {U : diam(U) < R}, i.e. maximal cliques of {d < R}."""
    if not R > 0:
        raise BadParams("R must be positive")
    return threshold_clique_cover(space, R, strict=True)


def clique_guarantee(R: float) -> CoverGuarantee:
    return CoverGuarantee(lebesgue_min=R, diameter_max=R)


# -- separable: greedy balls minus earlier eps-balls --------------------------

def greedy_separable_cover(space: FiniteMetricSpace, r: float, eps: float,
                           enumeration: Sequence[int] | None = None) -> Cover:
    """U_j = B_{r/2}(x_j) minus the eps-balls of x_1..x_{j-1}, empty U_j dropped.

    Member labels record the enumeration position j (0-based) of each member.
    """
    if not (0 < eps < r / 2):
        raise BadParams(f"need 0 < eps < r/2, got r={r}, eps={eps}")
    order = list(range(space.n)) if enumeration is None else [int(i) for i in enumeration]
    if sorted(order) != list(range(space.n)):
        raise BadParams("enumeration must be a permutation of the points")
    d = space.dist
    removed = np.zeros(space.n, dtype=bool)
    members, labels = [], []
    for j, x in enumerate(order):
        u = np.flatnonzero((d[x] < r / 2) & ~removed)
        if len(u):
            members.append(tuple(int(i) for i in u))
            labels.append(str(j))
        removed |= d[x] < eps
    return Cover(space, tuple(members), tuple(labels))


def greedy_guarantee(r: float, eps: float) -> CoverGuarantee:
    return CoverGuarantee(lebesgue_min=r / 2 - eps, diameter_max=r)


def greedy_membership_violations(cover: Cover, eps: float, enumeration: Sequence[int] | None = None) -> list[tuple[int, int, int]]:
    """Triples (x, j, n) with x in U_j although j > n = first position with d(x, x_n) < eps."""
    space = cover.space
    order = list(range(space.n)) if enumeration is None else list(enumeration)
    d = space.dist
    first = {}
    for x in range(space.n):
        first[x] = next(k for k, xn in enumerate(order) if d[x, xn] < eps)
    bad = []
    for m, lab in zip(cover.members, cover.labels):
        j = int(lab)
        bad.extend((x, j, first[x]) for x in m if j > first[x])
    return bad


# -- l_inf^N grid ---------------------------------------------------------------

def _floor_div(v: float, n: int) -> int:
    """Largest integer m with m/n <= v, robust to rounding in n*v."""
    m = math.floor(n * v)
    while (m + 1) / n <= v:
        m += 1
    while m / n > v:
        m -= 1
    return m


def midpoint_center(points: Sequence[Sequence[float]]) -> np.ndarray:
    """Coordinatewise (sup + inf)/2; every point lies within diam/2 of it.

    The half-width (sup - inf)/2 would not do: for the single point 3 it gives
    centre 0, whose unit ball misses 3.
    """
    a = np.asarray(points, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    return (a.max(axis=0) + a.min(axis=0)) / 2


@dataclass(frozen=True)
class LinfGridCover:
    """U_x = {f : f_j in x_j/n + (-1, 1 + 1/n) for all j}, x in Z^N."""

    N: int
    n: int

    def __post_init__(self):
        if self.N < 1 or self.n < 1:
            raise BadParams("need N >= 1 and n >= 1")

    @property
    def diameter(self) -> float:
        return 2 + 1 / self.n

    @property
    def multiplicity_bound(self) -> int:
        return (2 * self.n + 1) ** self.N

    def _check(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float).reshape(-1)
        if len(f) != self.N:
            raise BadParams(f"point has {len(f)} coordinates, expected {self.N}")
        return f

    def contains(self, f, x) -> bool:
        f = self._check(f)
        lo = np.asarray(x, dtype=float) / self.n
        return bool(np.all((f > lo - 1) & (f < lo + 1 + 1 / self.n)))

    def locate(self, f) -> tuple[int, ...]:
        """x with B_1(f) inside U_x: x_j = floor(n f_j)."""
        return tuple(_floor_div(v, self.n) for v in self._check(f))

    def locate_set(self, points: Sequence[Sequence[float]]) -> tuple[int, ...]:
        """Member containing a set of diameter < 2, via its midpoint ball of radius 1."""
        return self.locate(midpoint_center(points))

    def containing_indices(self, f) -> list[tuple[int, ...]]:
        f = self._check(f)
        n = self.n
        ranges = []
        for v in f:
            lo = math.floor(n * v - n - 1) - 1
            hi = math.ceil(n * v + n) + 1
            ok = [x for x in range(lo, hi + 1) if x / n - 1 < v < x / n + 1 + 1 / n]
            ranges.append(ok)
        return list(itertools.product(*ranges))

    def multiplicity(self, f) -> int:
        return len(self.containing_indices(f))


# -- c0+ grid -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridCellIndex:
    """Index (M, x) of a c0+ grid cell: support M and nonnegative offsets on M."""

    offsets: Mapping[Hashable, int]

    def __post_init__(self):
        offs = {k: int(v) for k, v in dict(self.offsets).items()}
        if any(v < 0 for v in offs.values()):
            raise BadParams("c0+ grid offsets must be nonnegative")
        object.__setattr__(self, "offsets", offs)

    @property
    def support(self) -> frozenset:
        return frozenset(self.offsets)

    def get(self, key, default: int = 0) -> int:
        return self.offsets.get(key, default)

    def canonical(self) -> "GridCellIndex":
        """Same cell with zero offsets dropped (U_{M,x} only sees nonzero offsets)."""
        return GridCellIndex({k: v for k, v in self.offsets.items() if v})

    def key(self) -> tuple:
        return tuple(sorted(self.offsets.items(), key=lambda kv: repr(kv[0])))

    def __eq__(self, other) -> bool:
        return isinstance(other, GridCellIndex) and self.offsets == other.offsets

    def __hash__(self) -> int:
        return hash(self.key())


def _as_entries(f) -> dict:
    if isinstance(f, SparseNonnegativeSequence):
        return dict(f.entries)
    return {k: float(v) for k, v in dict(f).items() if v}


@dataclass(frozen=True)
class C0PlusGridCover:
    """U_{M,x} = {f in c0+ : f(k) in x_k/n + [0, 2R + 1/n) for every k}, x_k = 0 off M."""

    R: float
    n: int

    def __post_init__(self):
        if not self.R >= 0 or self.n < 1:
            raise BadParams("need R >= 0 and n >= 1")

    @property
    def width(self) -> float:
        return 2 * self.R + 1 / self.n

    @property
    def diameter_bound(self) -> float:
        return self.width

    def multiplicity_bound(self, support_size: int) -> int:
        return (2 * self.n * math.ceil(self.R) + 1) ** support_size

    def contains(self, f, idx: GridCellIndex) -> bool:
        e = _as_entries(f)
        for k in set(e) | set(idx.offsets):
            v, lo = e.get(k, 0.0), idx.get(k) / self.n
            if not (lo <= v < lo + self.width):
                return False
        return True

    def locate(self, f) -> GridCellIndex:
        """(M, x) with B_R(f) inside U_{M,x}.

        M = {k : f(k) >= 1/n}, x_k = floor(n (f(k) - R)) clamped at 0; the
        clamp is harmless since coordinates of c0+ are nonnegative.
        """
        e = _as_entries(f)
        return GridCellIndex({k: max(0, _floor_div(v - self.R, self.n))
                              for k, v in e.items() if v >= 1 / self.n})

    def containing_indices(self, f, support: Iterable[Hashable]) -> list[GridCellIndex]:
        """All x in N^M (M = ``support``) with f in U_{M,x}."""
        e = _as_entries(f)
        M = list(support)
        if any(not (v < self.width) for k, v in e.items() if k not in M):
            return []
        n = self.n
        ranges = []
        for k in M:
            v = e.get(k, 0.0)
            lo = max(0, math.floor(n * (v - self.width)) - 1)
            hi = math.floor(n * v) + 1
            ranges.append([x for x in range(lo, hi + 1) if x / n <= v < x / n + self.width])
        return [GridCellIndex(dict(zip(M, xs))) for xs in itertools.product(*ranges)]

    def canonical_containing(self, f) -> set[GridCellIndex]:
        """Every distinct cell containing f, in canonical form.

        A nonzero offset at k forces f(k) >= 1/n, so canonical supports lie in
        {k : f(k) >= 1/n}: the family is finite for each f.
        """
        e = _as_entries(f)
        M = [k for k, v in e.items() if v >= 1 / self.n]
        return {idx.canonical() for idx in self.containing_indices(e, M)}

    def locate_set(self, points: Sequence) -> GridCellIndex:
        """Cell containing a set of diameter < 2R, via its coordinatewise midpoint."""
        return self.locate(c0_midpoint(points))


def c0_midpoint(points: Sequence) -> dict:
    es = [_as_entries(p) for p in points]
    keys = set().union(*es) if es else set()
    return {k: (max(e.get(k, 0.0) for e in es) + min(e.get(k, 0.0) for e in es)) / 2 for k in keys}


# -- rooted trees ---------------------------------------------------------------

@dataclass(frozen=True)
class TreePoint:
    """Point at depth ``depth`` on the root path to ``vertex``.

    It lies on the edge (parent(vertex), vertex]; the root is (root, 0).
    """

    vertex: Any
    depth: float


@dataclass(frozen=True, eq=False)
class RootedTree:
    edges: tuple[tuple[Any, Any, float], ...]
    root: Any

    def __post_init__(self):
        edges = tuple((u, v, float(w)) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        order, adj = _tree_adjacency(edges, self.root)
        if self.root not in adj:
            raise BadTree(f"root {self.root!r} is not a vertex")
        parent: dict[Any, Any] = {self.root: None}
        depth: dict[Any, float] = {self.root: 0.0}
        bfs = [self.root]
        for u in bfs:
            for v, w in adj[u]:
                if v not in parent:
                    parent[v] = u
                    depth[v] = depth[u] + w
                    bfs.append(v)
        object.__setattr__(self, "_order", tuple(order))
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "_bfs", tuple(bfs))

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "RootedTree":
        t = obj.get("tree", obj)
        edges = [tuple(e) for e in t["edges"]]
        root = t.get("root")
        if root is None:
            if not edges:
                raise BadTree("single-vertex tree needs an explicit root")
            root = edges[0][0]
        return cls(tuple(edges), root)

    @property
    def vertices(self) -> tuple:
        return self._order

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self._order)}

    @cached_property
    def children(self) -> dict:
        ch: dict[Any, list] = {v: [] for v in self._order}
        for v in self._bfs[1:]:
            ch[self.parent[v]].append(v)
        return ch

    def ancestors(self, v) -> list:
        """v, parent(v), ..., root."""
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def lca(self, u, v):
        anc = set(self.ancestors(u))
        return next(a for a in self.ancestors(v) if a in anc)

    def distance(self, u, v) -> float:
        return self.depth[u] + self.depth[v] - 2 * self.depth[self.lca(u, v)]

    @cached_property
    def subtree(self) -> dict:
        sub: dict[Any, set] = {v: {v} for v in self._order}
        for v in reversed(self._bfs[1:]):
            sub[self.parent[v]] |= sub[v]
        return {v: frozenset(s) for v, s in sub.items()}

    def to_space(self) -> FiniteMetricSpace:
        vs = self._order
        d = np.array([[self.distance(u, v) if u != v else 0.0 for v in vs] for u in vs])
        return validate_space(d, labels=[str(v) for v in vs])


def last_common_ancestor(tree: RootedTree, subset: Iterable) -> TreePoint:
    vs = list(subset)
    if not vs:
        raise BadParams("subset must be nonempty")
    a = vs[0]
    for v in vs[1:]:
        a = tree.lca(a, v)
    return TreePoint(a, tree.depth[a])


def snap_to_grid(tree: RootedTree, point: TreePoint, n: int) -> TreePoint:
    """Move up the root path to the deepest point at depth m/n (m integer)."""
    m = _floor_div(point.depth, n)
    h = m / n
    w = point.vertex
    while tree.parent[w] is not None and tree.depth[tree.parent[w]] >= h:
        w = tree.parent[w]
    if tree.parent[w] is None:
        return TreePoint(w, 0.0)
    return TreePoint(w, h)


def tree_anchors(tree: RootedTree, n: int) -> list[TreePoint]:
    """All points at depth m/n on the tree, as edge subdivision points."""
    out = [TreePoint(tree.root, 0.0)]
    for w in tree._bfs[1:]:
        top = tree.depth[tree.parent[w]]
        m = _floor_div(top, n) + 1
        while m / n <= tree.depth[w]:
            out.append(TreePoint(w, m / n))
            m += 1
    return out


def anchor_member(tree: RootedTree, anchor: TreePoint, R: float, n: int) -> list:
    """Vertices s below the anchor with d(anchor, s) <= R + 1/n."""
    reach = R + 1 / n
    return [s for s in tree.subtree[anchor.vertex] if tree.depth[s] - anchor.depth <= reach]


def tree_cover(tree: RootedTree, R: float, n: int) -> Cover:
    """Cover of the vertex set by U_t for anchors t at depths m/n, empty members dropped.

    Member labels name the anchor as ``"vertex@depth"``.
    """
    if not R > 0 or n < 1:
        raise BadParams("need R > 0 and n >= 1")
    space = tree.to_space()
    members, labels = [], []
    for a in tree_anchors(tree, n):
        mem = anchor_member(tree, a, R, n)
        if mem:
            members.append(tuple(tree.index[s] for s in mem))
            labels.append(f"{a.vertex}@{a.depth!r}")
    return Cover(space, tuple(members), tuple(labels))


def tree_guarantee(R: float, n: int) -> CoverGuarantee:
    return CoverGuarantee(lebesgue_min=R, diameter_max=2 * (R + 1 / n), multiplicity_max=n * math.ceil(R) + 1)


def tree_member_for_set(tree: RootedTree, subset: Iterable, R: float, n: int) -> list:
    """The member anchored at the grid-snapped last common ancestor of ``subset``."""
    return anchor_member(tree, snap_to_grid(tree, last_common_ancestor(tree, subset), n), R, n)


# -- c0 lower-bound witnesses ---------------------------------------------------

@dataclass
class WitnessFamily:
    """Sign-pattern families A_{M,e} with 0 and one extremal point each.

    Coordinates of A_{M,e} satisfy e_k C_k in (lo, hi) with
    lo = D0/8 - R/4 and hi = D0/4 + R/2; the extremal point has
    C_k = e_k (hi - eta).
    """

    M_size: int
    R: float
    D0: float
    eta: float
    interval: tuple[float, float]
    sign_patterns: list[tuple[int, ...]]
    families: list[list[dict[int, float]]] = field(repr=False)
    family_diameter: float = 0.0
    realized_family_diameter: float = 0.0
    min_union_diameter: float = math.inf
    eta_threshold: float = 0.0

    @property
    def contains_zero(self) -> bool:
        lo, hi = self.interval
        return lo < 0 < hi and all(any(not p for p in fam) for fam in self.families)

    @property
    def families_small(self) -> bool:
        return self.family_diameter < self.R and self.realized_family_diameter < self.R

    @property
    def separated(self) -> bool:
        return self.min_union_diameter > self.D0


def c0_lower_bound_witness(M_size: int, R: float, D0: float, eta: float) -> WitnessFamily:
    if M_size < 1:
        raise BadParams("M_size must be at least 1")
    if not (0 < D0 < 2 * R):
        raise BadParams("need 0 < D0 < 2R")
    lo, hi = D0 / 8 - R / 4, D0 / 4 + R / 2
    if not (0 < eta < hi):
        raise BadParams(f"need 0 < eta < {hi}")
    patterns = list(itertools.product((-1, 1), repeat=M_size))
    families = [[{}, {k: s * (hi - eta) for k, s in enumerate(p)}] for p in patterns]
    realized = max(sup_distance(a, b) for fam in families for a in fam for b in fam)
    min_union = math.inf
    for f1, f2 in itertools.combinations(families, 2):
        union = f1 + f2
        min_union = min(min_union, max(sup_distance(a, b) for a in union for b in union))
    return WitnessFamily(
        M_size, R, D0, eta, (lo, hi), patterns, families,
        family_diameter=hi - lo,
        realized_family_diameter=realized,
        min_union_diameter=min_union,
        eta_threshold=(2 * R - D0) / 4,
    )
