"""Finite metric spaces: validation, generators, balls, skeletons and map moduli."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    AsymmetricMatrix,
    BadParams,
    BadTree,
    DegenerateDistance,
    InvalidMatrix,
    NegativeDistance,
    TriangleViolation,
)
from .serialize import decode_value

TRIANGLE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with a distance matrix.

    ``points``/``p`` are set only for spaces generated from coordinate
    vectors under an l_p norm; they enable scaling of covers.
    Construct through :func:`validate_space` unless the matrix is known good.
    """

    labels: tuple[str, ...]
    dist: np.ndarray
    points: np.ndarray | None = None
    p: float | None = None

    def __post_init__(self):
        dist = np.array(self.dist, dtype=float)
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if self.points is not None:
            pts = np.array(self.points, dtype=float)
            if pts.ndim == 1:
                pts = pts[:, None]
            pts.setflags(write=False)
            object.__setattr__(self, "points", pts)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InvalidMatrix(f"distance matrix must be square, got shape {dist.shape}")
        if len(self.labels) != dist.shape[0]:
            raise InvalidMatrix("number of labels does not match the matrix size")

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __len__(self) -> int:
        return self.n

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    @cached_property
    def distinct_distances(self) -> np.ndarray:
        """Sorted distinct positive distances."""
        iu = np.triu_indices(self.n, k=1)
        return np.unique(self.dist[iu])

    @property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n else 0.0

    @property
    def min_positive_distance(self) -> float:
        dd = self.distinct_distances
        return float(dd[0]) if len(dd) else math.inf

    @property
    def is_vector_space(self) -> bool:
        return self.points is not None and self.p is not None

    def subset_diameter(self, subset) -> float:
        idx = np.fromiter(subset, dtype=int)
        if len(idx) < 2:
            return 0.0
        return float(self.dist[np.ix_(idx, idx)].max())

    def index(self, label: str) -> int:
        return self.labels.index(str(label))


@dataclass(frozen=True)
class SkeletonParams:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise BadParams("skeleton radii must be positive")


# -- validation ---------------------------------------------------------------

def validate_space(
    matrix,
    labels: Sequence[str] | None = None,
    tol: float = TRIANGLE_TOL,
    points=None,
    p: float | None = None,
) -> FiniteMetricSpace:
    """Check the metric axioms and return a :class:`FiniteMetricSpace`.

    The triangle inequality is tested with a tolerance relative to the larger
    side; the first violating triple in lexicographic (i, k, j) order is
    reported.
    """
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidMatrix(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] == 0:
        raise InvalidMatrix("a metric space needs at least one point")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise InvalidMatrix(f"dist[{i}][{j}] is not finite")
    n = d.shape[0]
    neg = np.argwhere(d < 0)
    if len(neg):
        i, j = (int(v) for v in neg[0])
        raise NegativeDistance(i, j, float(d[i, j]))
    asym = np.argwhere(d != d.T)
    if len(asym):
        i, j = (int(v) for v in asym[0])
        raise AsymmetricMatrix(i, j, float(d[i, j]), float(d[j, i]))
    diag = np.flatnonzero(np.diag(d) != 0)
    if len(diag):
        i = int(diag[0])
        raise DegenerateDistance(i, i, float(d[i, i]))
    off = d + np.eye(n)
    zero = np.argwhere(off == 0)
    if len(zero):
        i, j = (int(v) for v in zero[0])
        raise DegenerateDistance(i, j, 0.0)

    # worst[i, k] over intermediates j, vectorised one j at a time
    best_excess = 0.0
    witness = None
    for j in range(n):
        via = d[:, j, None] + d[None, j, :]
        excess = d - via
        scale = np.maximum(d, via)
        bad = excess > tol * scale
        if bad.any():
            rel = np.where(bad, excess / np.where(scale > 0, scale, 1.0), -np.inf)
            i, k = np.unravel_index(int(np.argmax(rel)), rel.shape)
            if witness is None or excess[i, k] > best_excess:
                best_excess = float(excess[i, k])
                witness = (int(i), j, int(k))
    if witness is not None:
        # report the violated pair in ascending order
        i, j, k = witness
        i, k = min(i, k), max(i, k)
        raise TriangleViolation(i, j, k, best_excess)

    if labels is None:
        labels = [str(i) for i in range(n)]
    return FiniteMetricSpace(tuple(labels), d, points=points, p=p)


# -- builders -----------------------------------------------------------------

def _parse_p(p) -> float:
    if isinstance(p, str):
        p = decode_value(p)
    p = float(p)
    if not p >= 1:
        raise BadParams(f"l_p exponent must lie in [1, inf], got {p}")
    return p


def lp_distance_matrix(points, p: float) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff = np.abs(pts[:, None, :] - pts[None, :, :])
    if math.isinf(p):
        return diff.max(axis=2) if pts.shape[1] else np.zeros((len(pts), len(pts)))
    if p == 1:
        return diff.sum(axis=2)
    return (diff ** p).sum(axis=2) ** (1.0 / p)


def lp_space(points, p: float | str = 2.0, labels=None) -> FiniteMetricSpace:
    p = _parse_p(p)
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return validate_space(lp_distance_matrix(pts, p), labels=labels, points=pts, p=p)


def line_space(xs: Sequence[float]) -> FiniteMetricSpace:
    """Points of the real line; labels are the coordinates themselves."""
    labels = [f"{x:g}" for x in xs]
    return lp_space(np.asarray(xs, dtype=float)[:, None], p=1.0, labels=labels)


def equilateral_space(n: int, d: float = 1.0) -> FiniteMetricSpace:
    return validate_space(d * (1.0 - np.eye(n)))


def tree_space(edges: Sequence[Sequence[Any]], root=None) -> FiniteMetricSpace:
    """Shortest-path metric of a weighted tree given as ``[u, v, length]`` edges."""
    order, adj = _tree_adjacency(edges, root)
    index = {v: i for i, v in enumerate(order)}
    n = len(order)
    d = np.zeros((n, n))
    for s in order:
        seen = {s: 0.0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, w in adj[u]:
                if v not in seen:
                    seen[v] = seen[u] + w
                    queue.append(v)
        for v, dv in seen.items():
            d[index[s], index[v]] = dv
    # BFS sums along the unique path are order-dependent in the last ulp
    d = np.minimum(d, d.T)
    return validate_space(d, labels=[str(v) for v in order])


def _tree_adjacency(edges, root):
    adj: dict[Any, list[tuple[Any, float]]] = {}
    order: list[Any] = []

    def add(v):
        if v not in adj:
            adj[v] = []
            order.append(v)

    if root is not None:
        add(root)
    for e in edges:
        if len(e) != 3:
            raise BadTree(f"edge {e!r} is not [u, v, length]")
        u, v, w = e
        w = float(w)
        if not (w > 0 and math.isfinite(w)):
            raise BadTree(f"edge {u!r}-{v!r} has non-positive length {w}")
        if u == v:
            raise BadTree(f"self-loop at {u!r}")
        add(u)
        add(v)
        adj[u].append((v, w))
        adj[v].append((u, w))
    if not order:
        raise BadTree("empty tree")
    if len(edges) != len(order) - 1:
        raise BadTree(f"{len(edges)} edges on {len(order)} vertices is not a tree")
    seen = {order[0]}
    stack = [order[0]]
    while stack:
        u = stack.pop()
        for v, _ in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if len(seen) != len(order):
        raise BadTree("tree is disconnected")
    return order, adj


def _floyd_warshall(d: np.ndarray) -> np.ndarray:
    d = d.copy()
    for k in range(d.shape[0]):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


def generate_space(kind: str, params: Mapping[str, Any] | None = None, seed: int = 0) -> FiniteMetricSpace:
    """Build a space from a named generator; equal seeds give identical spaces.

    kinds:
      ``random-integer``  n, low=1, high=10; random integer weights closed
                          under shortest paths (always a metric).
      ``lp-point-cloud``  points=[[...]] or n, dim=2, scale=1; p (default 2,
                          ``"inf"`` allowed); random points are uniform in the cube.
      ``weighted-tree``   edges=[[u,v,len],...], root; or n, max_length=1,
                          integer=False for a random recursive tree.
      ``grid-net``        dim, radius, step, p: lattice points of step*Z^dim
                          inside the closed l_p ball.
    """
    params = dict(params or {})
    rng = np.random.default_rng(int(seed))
    try:
        if kind == "random-integer":
            n = int(params.get("n", 8))
            low, high = int(params.get("low", 1)), int(params.get("high", 10))
            if n < 1 or low < 1 or high < low:
                raise BadParams("random-integer needs n >= 1 and 1 <= low <= high")
            w = rng.integers(low, high + 1, size=(n, n)).astype(float)
            w = np.triu(w, 1)
            w = w + w.T
            return validate_space(_floyd_warshall(w))
        if kind == "lp-point-cloud":
            p = params.get("p", 2.0)
            if "points" in params:
                pts = np.asarray(params["points"], dtype=float)
            else:
                n = int(params.get("n", 10))
                dim = int(params.get("dim", 2))
                if n < 1 or dim < 1:
                    raise BadParams("lp-point-cloud needs n >= 1 and dim >= 1")
                pts = rng.uniform(0.0, float(params.get("scale", 1.0)), size=(n, dim))
            if len(np.unique(pts, axis=0)) != len(pts):
                raise BadParams("point cloud has repeated points")
            return lp_space(pts, p)
        if kind == "weighted-tree":
            if "edges" in params:
                return tree_space(params["edges"], params.get("root"))
            n = int(params.get("n", 8))
            if n < 1:
                raise BadParams("weighted-tree needs n >= 1")
            edges = random_tree_edges(
                n, rng, float(params.get("max_length", 1.0)), bool(params.get("integer", False))
            )
            return tree_space(edges, root=0)
        if kind == "grid-net":
            dim = int(params.get("dim", 2))
            radius = float(params.get("radius", 2.0))
            step = float(params.get("step", 1.0))
            p = _parse_p(params.get("p", 2.0))
            if dim < 1 or radius < 0 or step <= 0:
                raise BadParams("grid-net needs dim >= 1, radius >= 0, step > 0")
            m = int(math.floor(radius / step))
            axis = np.arange(-m, m + 1) * step
            mesh = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
            norms = np.abs(mesh).max(axis=1) if math.isinf(p) else (np.abs(mesh) ** p).sum(axis=1) ** (1 / p)
            pts = mesh[norms <= radius * (1 + 1e-12)]
            return lp_space(pts, p)
    except (KeyError, TypeError) as exc:
        raise BadParams(f"bad parameters for {kind}: {exc}") from exc
    raise BadParams(f"unknown space kind {kind!r}")


def random_tree_edges(n: int, rng: np.random.Generator, max_length: float = 1.0, integer: bool = False):
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        if integer:
            w = float(rng.integers(1, max(1, int(max_length)) + 1))
        else:
            w = float(rng.uniform(0.05, 1.0) * max_length)
        edges.append([u, v, w])
    return edges


# -- JSON ---------------------------------------------------------------------

def space_from_json(obj: Mapping[str, Any]) -> FiniteMetricSpace:
    if "dist" in obj:
        return validate_space(obj["dist"], labels=obj.get("labels"))
    if "points" in obj:
        return lp_space(obj["points"], obj.get("p", 2.0), labels=obj.get("labels"))
    if "tree" in obj:
        t = obj["tree"]
        return tree_space(t["edges"], t.get("root"))
    raise InvalidMatrix("space JSON needs one of 'dist', 'points' or 'tree'")


def space_to_json(space: FiniteMetricSpace) -> dict:
    out: dict[str, Any] = {"labels": list(space.labels), "dist": space.dist.tolist()}
    if space.is_vector_space:
        out["points"] = space.points.tolist()
        out["p"] = space.p
    return out


# -- basic geometry -----------------------------------------------------------

def ball(space: FiniteMetricSpace, center: int, r: float) -> frozenset[int]:
    """Open ball: points at distance strictly less than ``r``."""
    return frozenset(int(i) for i in np.flatnonzero(space.dist[center] < r))


def greedy_skeleton(space: FiniteMetricSpace, a: float, order: Sequence[int] | None = None) -> tuple[int, ...]:
    """Maximal a-separated subset built greedily over ``order``.

    Maximality makes it a-dense as well, so the result is an (a, a)-skeleton.
    """
    if not a > 0:
        raise BadParams("separation radius must be positive")
    order = range(space.n) if order is None else order
    chosen: list[int] = []
    for i in order:
        if all(space.dist[i, s] >= a for s in chosen):
            chosen.append(int(i))
    return tuple(chosen)


def nearest_point_reduction(space: FiniteMetricSpace, skeleton: Sequence[int]) -> dict[int, int]:
    if not len(skeleton):
        raise BadParams("skeleton must be nonempty")
    sk = np.array(sorted(set(int(s) for s in skeleton)))
    # argmin returns the first minimum, i.e. the lowest index on ties
    nearest = sk[np.argmin(space.dist[:, sk], axis=1)]
    return {i: int(nearest[i]) for i in range(space.n)}


# -- moduli of maps -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MapModuli:
    """Step functions t -> omega_f(t), t -> rho_f(t) of a map between finite spaces.

    ``arguments`` are the distinct source distances (0 included). ``omega[k]``
    is the largest image distance over pairs with source distance <= arguments[k];
    ``rho[k]`` the smallest image distance over pairs with source distance
    >= arguments[k].
    """

    arguments: np.ndarray
    omega_values: np.ndarray
    rho_values: np.ndarray

    def omega(self, t: float) -> float:
        k = int(np.searchsorted(self.arguments, t, side="right")) - 1
        return 0.0 if k < 0 else float(self.omega_values[k])

    def rho(self, t: float) -> float:
        k = int(np.searchsorted(self.arguments, t, side="left"))
        return math.inf if k >= len(self.arguments) else float(self.rho_values[k])

    def omega_sup_below(self, v: float) -> float:
        """sup{t >= 0 : omega(t) < v}; +inf when omega never reaches v."""
        if not v > 0:
            return 0.0
        hit = np.flatnonzero(self.omega_values >= v)
        return math.inf if not len(hit) else float(self.arguments[hit[0]])

    def rho_sup_within(self, bound: float) -> float:
        """sup{t >= 0 : rho(t) <= bound}, capped at the largest source distance."""
        ok = np.flatnonzero(self.rho_values <= bound)
        if not len(ok):
            return 0.0
        return float(self.arguments[ok[-1]])


def map_moduli(source: FiniteMetricSpace, target: FiniteMetricSpace, f: Sequence[int] | Mapping[int, int]) -> MapModuli:
    img = np.array([f[i] for i in range(source.n)], dtype=int)
    iu = np.triu_indices(source.n, k=1)
    ds = np.concatenate([[0.0], source.dist[iu]])
    dt = np.concatenate([[0.0], target.dist[img[iu[0]], img[iu[1]]]])
    args, inv = np.unique(ds, return_inverse=True)
    per_max = np.full(len(args), -np.inf)
    per_min = np.full(len(args), np.inf)
    np.maximum.at(per_max, inv, dt)
    np.minimum.at(per_min, inv, dt)
    omega = np.maximum.accumulate(per_max)
    rho = np.minimum.accumulate(per_min[::-1])[::-1]
    for arr in (args, omega, rho):
        arr.setflags(write=False)
    return MapModuli(args, omega, rho)


def check_metric_axioms(space: FiniteMetricSpace, tol: float = TRIANGLE_TOL) -> bool:
    """Re-run all validations on an existing space."""
    validate_space(space.dist, tol=tol)
    return True
