"""Coarse-Lipschitz embedding of a finite metric space into c0+.

For each scale n there is a cover U_n with Lebesgue number >= t^n and
diameter <= (C + lambda) t^n. Every member U_{n,k} contributes the coordinate

    f_{n,k}(x) = K * min(d(x, complement of V_{n,k}), t^n / 2),
    V_{n,k}    = U_{n,k} minus the open ball of radius (C - 1 + lambda) t^n / 2 around O,
    K          = 2 t (C + lambda) / (1 - eps).

Each coordinate is K-Lipschitz, and any pair with (C+lambda) t^n < d(x,y)
has a scale-n coordinate that is >= K (1-eps) t^n / 2 at the point farther
from O and 0 at the other, which gives d(x,y) - L <= ||f(x)-f(y)|| <= K d(x,y).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .catalog import RootedTree, clique_cover, greedy_separable_cover, tree_cover
from .covers import Cover, cover_diameter, lebesgue_at_least
from .errors import BadParams, UncertifiableScale
from .metric import FiniteMetricSpace
from .sequences import SparseNonnegativeSequence, fold_to_positive

__all__ = [
    "CoordinateId", "EmbeddingConfig", "ScaleFamily", "DistortionReport", "Embedding",
    "SparseNonnegativeSequence", "fold_to_positive", "build_scale_family", "embed",
    "certify_distortion", "default_scale_range", "embedding_to_json", "embed_space",
    "coordinate_lipschitz", "points_from_json", "truncation_L", "Witness",
]


class CoordinateId(NamedTuple):
    scale: int
    member: int

    def __str__(self) -> str:
        return f"{self.scale}:{self.member}"

    @classmethod
    def parse(cls, s: str) -> "CoordinateId":
        a, b = s.split(":")
        return cls(int(a), int(b))


@dataclass(frozen=True)
class EmbeddingConfig:
    """Parameters of the construction.

    ``C=None`` lets :func:`build_scale_family` derive C from the covers;
    ``scale_range=None`` picks scales spanning the distance range of the space.
    """

    t: float = 1.5
    eps: float = 0.25
    lam: float = 0.25
    base_point: int = 0
    C: float | None = None
    D: float = 0.0
    scale_range: tuple[int, int] | None = None
    cover_kind: str = "clique"

    def __post_init__(self):
        if not self.t > 1:
            raise BadParams("t must exceed 1")
        if not 0 < self.eps < 1:
            raise BadParams("eps must lie in (0, 1)")
        if not self.lam > 0:
            raise BadParams("lambda must be positive")
        if self.C is not None and not self.C >= 1:
            raise BadParams("C must be at least 1")
        if not self.D >= 0:
            raise BadParams("D must be nonnegative")
        if self.scale_range is not None:
            lo, hi = self.scale_range
            if lo > hi:
                raise BadParams("scale range is empty")
            if not self.t ** lo > self.D / self.lam:
                raise BadParams(f"scale {lo} violates t^n > D/lambda")
        if self.cover_kind not in ("clique", "greedy", "tree"):
            raise BadParams(f"unknown cover kind {self.cover_kind!r}")

    def K(self, C: float) -> float:
        return 2 * self.t * (C + self.lam) / (1 - self.eps)


@dataclass(frozen=True, eq=False)
class ScaleFamily:
    space: FiniteMetricSpace
    covers: Mapping[int, Cover]
    C: float
    t: float
    lam: float
    ratios: Mapping[int, float]

    @property
    def scales(self) -> list[int]:
        return sorted(self.covers)

    @property
    def scale_range(self) -> tuple[int, int]:
        s = self.scales
        return s[0], s[-1]


def default_scale_range(space: FiniteMetricSpace, t: float, C: float, lam: float, D: float = 0.0) -> tuple[int, int]:
    """[floor(log_t(d_min/(C+lam))) - 1, ceil(log_t(diam/(C+lam)))], raised to satisfy t^n > D/lam."""
    if space.n < 2:
        lo = hi = 0
    else:
        lo = math.floor(math.log(space.min_positive_distance / (C + lam), t)) - 1
        hi = math.ceil(math.log(space.diameter / (C + lam), t))
    while not t ** lo > D / lam:
        lo += 1
    return lo, max(lo, hi)


def _scale_cover(space: FiniteMetricSpace, scale_value: float, kind: str, tree: RootedTree | None,
                 greedy_slack: float) -> Cover:
    if kind == "clique":
        return clique_cover(space, scale_value)
    if kind == "greedy":
        # L >= r/2 - eps' = scale_value with eps' = greedy_slack * scale_value
        eps = greedy_slack * scale_value
        return greedy_separable_cover(space, 2 * (scale_value + eps), eps)
    if kind == "tree":
        if tree is None:
            raise BadParams("tree covers need the tree structure")
        sub = max(1, math.ceil(4 / scale_value))
        cov = tree_cover(tree, scale_value, sub)
        # tree_cover works on the tree's own vertex order
        if tuple(cov.space.labels) != tuple(space.labels):
            raise BadParams("tree vertex labels do not match the space")
        return Cover(space, cov.members, cov.labels)
    raise BadParams(f"unknown cover kind {kind!r}")


def build_scale_family(space: FiniteMetricSpace, config: EmbeddingConfig, tree: RootedTree | None = None,
                       greedy_slack: float = 0.1) -> ScaleFamily:
    """Build and certify U_n for every scale, deriving C from the covers.

    C is max(1, sup_n diam(U_n)/t^n) unless the configured C already admits
    every cover (diam(U_n) <= (C + lam) t^n); the default scale range is
    recomputed whenever C changes.
    """
    t, lam = config.t, config.lam
    C = 1.0 if config.C is None else config.C
    covers: dict[int, Cover] = {}
    for _ in range(8):
        lo, hi = config.scale_range or default_scale_range(space, t, C, lam, config.D)
        ratios = {}
        for n in range(lo, hi + 1):
            if n not in covers:
                value = t ** n
                cov = _scale_cover(space, value, config.cover_kind, tree, greedy_slack)
                if not lebesgue_at_least(cov, value):
                    raise UncertifiableScale(n, f"Lebesgue number below t^n = {value}")
                covers[n] = cov
            ratios[n] = cover_diameter(covers[n]) / t ** n
        covers = {n: covers[n] for n in range(lo, hi + 1)}
        worst = max(ratios.values())
        if config.C is None:
            newC = max(1.0, worst)
        else:
            newC = C if worst <= C + lam else max(1.0, worst)
        if newC == C:
            break
        C = newC
    for n, cov in covers.items():
        if not cover_diameter(cov) <= (C + lam) * t ** n:
            raise UncertifiableScale(n, "diameter exceeds (C + lambda) t^n")
    return ScaleFamily(space, covers, C, t, lam, ratios)


@dataclass
class DistortionReport:
    K: float
    L: float
    pairs: int = 0
    passed: bool = True
    worst_upper_slack: float = -math.inf
    worst_lower_slack: float = -math.inf
    lipschitz: float = 0.0
    inverse_lipschitz: float = 0.0
    distortion: float = math.nan
    non_injective: bool = False
    support_min: int = 0
    support_mean: float = 0.0
    support_max: int = 0
    violations: list[dict] = field(default_factory=list)
    tol: float = 1e-9

    def to_json(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        for k in ("distortion",):
            if math.isnan(out[k]):
                out[k] = None
        return out


def _image_distances(images: Sequence[SparseNonnegativeSequence]) -> np.ndarray:
    keys = sorted(set().union(*(im.support for im in images)), key=repr) if images else []
    col = {k: j for j, k in enumerate(keys)}
    F = np.zeros((len(images), max(1, len(keys))))
    for i, im in enumerate(images):
        for k, v in im.entries.items():
            F[i, col[k]] = v
    out = np.zeros((len(images), len(images)))
    for i in range(len(images)):
        out[i] = np.abs(F - F[i]).max(axis=1)
    return out


def certify_distortion(point_map: Mapping[int, object], space: FiniteMetricSpace, K: float, L: float,
                       metric: Callable[[object, object], float] | None = None, tol: float = 1e-9) -> DistortionReport:
    """Exhaustive pair check of d - L <= |f(x) - f(y)| <= K d, plus empirical Lip, Lip^-1, distortion.

    Images are compared with the sup norm unless ``metric`` is given.
    Non-injective maps are flagged; their distortion is left undefined.
    """
    n = space.n
    images = [point_map[i] for i in range(n)]
    if metric is None:
        img_d = _image_distances(images)
    else:
        img_d = np.array([[metric(images[i], images[j]) for j in range(n)] for i in range(n)])
    rep = DistortionReport(K=K, L=L, tol=tol)
    iu = np.triu_indices(n, k=1)
    d = space.dist[iu]
    e = img_d[iu]
    rep.pairs = len(d)
    if len(d):
        upper = e - K * d
        lower = d - L - e
        rep.worst_upper_slack = float(upper.max())
        rep.worst_lower_slack = float(lower.max())
        rep.lipschitz = float((e / d).max())
        rep.non_injective = bool((e == 0).any())
        if rep.non_injective:
            rep.inverse_lipschitz = math.inf
        else:
            rep.inverse_lipschitz = float((d / e).max())
            rep.distortion = rep.lipschitz * rep.inverse_lipschitz
        for k in np.flatnonzero((upper > tol) | (lower > tol))[:50]:
            i, j = int(iu[0][k]), int(iu[1][k])
            rep.violations.append({
                "pair": [i, j], "d": float(d[k]), "image_d": float(e[k]),
                "bound": "upper" if upper[k] > tol else "lower",
            })
        rep.passed = not rep.violations
    else:
        rep.worst_upper_slack = rep.worst_lower_slack = 0.0
    if images and isinstance(images[0], SparseNonnegativeSequence):
        sizes = [len(im) for im in images]
        rep.support_min, rep.support_max = min(sizes), max(sizes)
        rep.support_mean = float(np.mean(sizes))
    return rep


class Witness(NamedTuple):
    scale: int
    coordinate: CoordinateId
    far: int
    near: int
    far_value: float
    near_value: float
    threshold: float


@dataclass(eq=False)
class Embedding:
    space: FiniteMetricSpace
    config: EmbeddingConfig
    family: ScaleFamily
    K: float
    L: float
    points: dict[int, SparseNonnegativeSequence]
    report: DistortionReport | None = None

    @property
    def C(self) -> float:
        return self.family.C

    @property
    def floor(self) -> float:
        """(C + lam) * t^{n_min}: pairs farther apart than this get a lower-bound witness."""
        lo, _ = self.family.scale_range
        return (self.C + self.config.lam) * self.config.t ** lo

    def coordinate(self, key: CoordinateId) -> np.ndarray:
        return np.array([self.points[i][key] for i in range(self.space.n)])

    def witness_scale(self, x: int, y: int) -> int | None:
        """n with (C+lam) t^n < d(x,y) <= (C+lam) t^{n+1}, if it is a built scale."""
        d = self.space.dist[x, y]
        a = self.C + self.config.lam
        for n in self.family.scales:
            if a * self.config.t ** n < d <= a * self.config.t ** (n + 1):
                return n
        return None

    def lower_bound_witness(self, x: int, y: int) -> Witness | None:
        """Coordinate at the bracketing scale that is large at the point farther from O and 0 at the other."""
        O = self.config.base_point
        far, near = (x, y) if self.space.dist[x, O] >= self.space.dist[y, O] else (y, x)
        n = self.witness_scale(x, y)
        if n is None:
            return None
        thr = self.K * (1 - self.config.eps) * self.config.t ** n / 2
        fx, fy = self.points[far], self.points[near]
        best = None
        for key, v in fx.entries.items():
            if key.scale == n and v >= thr and fy[key] == 0:
                if best is None or v > best[1]:
                    best = (key, v)
        if best is None:
            return None
        return Witness(n, best[0], far, near, best[1], 0.0, thr)


def embed(space: FiniteMetricSpace, family: ScaleFamily, config: EmbeddingConfig, certify: bool = True,
          tol: float = 1e-9) -> Embedding:
    C, t, lam = family.C, config.t, config.lam
    O = config.base_point
    if not 0 <= O < space.n:
        raise BadParams(f"base point {O} is not a point of the space")
    K = config.K(C)
    d = space.dist
    entries: list[dict[CoordinateId, float]] = [{} for _ in range(space.n)]
    for n in family.scales:
        tn = t ** n
        excluded = d[O] < (C - 1 + lam) * tn / 2
        for k, member in enumerate(family.covers[n].members):
            in_v = np.zeros(space.n, dtype=bool)
            in_v[list(member)] = True
            in_v &= ~excluded
            rows = np.flatnonzero(in_v)
            if not len(rows):
                continue
            outside = ~in_v
            if outside.any():
                dist_out = d[np.ix_(rows, np.flatnonzero(outside))].min(axis=1)
            else:
                dist_out = np.full(len(rows), math.inf)
            vals = K * np.minimum(dist_out, tn / 2)
            key = CoordinateId(n, k)
            for i, v in zip(rows, vals):
                if v > 0:
                    entries[int(i)][key] = float(v)
    points = {i: SparseNonnegativeSequence(e) for i, e in enumerate(entries)}
    emb = Embedding(space, config, family, K, 0.0, points)
    emb.L = truncation_L(space, emb.floor)
    if certify:
        emb.report = certify_distortion(points, space, K, emb.L, tol=tol)
    return emb


def truncation_L(space: FiniteMetricSpace, floor: float) -> float:
    """Additive constant under scale truncation: 0 when every pair lies above the floor."""
    return 0.0 if floor < space.min_positive_distance else max(0.0, floor)


def coordinate_lipschitz(emb: Embedding) -> float:
    """Largest pairwise slope of any single coordinate."""
    n = emb.space.n
    if n < 2:
        return 0.0
    keys = sorted(set().union(*(p.support for p in emb.points.values())))
    iu = np.triu_indices(n, k=1)
    d = emb.space.dist[iu]
    worst = 0.0
    for key in keys:
        col = emb.coordinate(key)
        worst = max(worst, float((np.abs(col[iu[0]] - col[iu[1]]) / d).max()))
    return worst


def embed_space(space: FiniteMetricSpace, config: EmbeddingConfig | None = None,
                tree: RootedTree | None = None) -> Embedding:
    """build_scale_family followed by embed and certification."""
    config = config or EmbeddingConfig()
    family = build_scale_family(space, config, tree=tree)
    return embed(space, family, config)


def embedding_to_json(emb: Embedding) -> dict:
    cfg = asdict(emb.config)
    cfg["C"] = emb.C
    cfg["scale_range"] = list(emb.family.scale_range)
    return {
        "K": emb.K,
        "L": emb.L,
        "config": cfg,
        "points": {
            emb.space.labels[i]: {str(k): v for k, v in seq.entries.items()}
            for i, seq in emb.points.items()
        },
        "report": emb.report.to_json() if emb.report else None,
    }


def points_from_json(obj: Mapping[str, Mapping[str, float]]) -> dict[str, SparseNonnegativeSequence]:
    return {lab: SparseNonnegativeSequence({CoordinateId.parse(k): v for k, v in e.items()})
            for lab, e in obj.items()}
