"""Covering moduli of finite spaces.

``delta_coarse(R)`` is the least diameter of a cover with Lebesgue number at
least ``R``; ``delta_uniform(r)`` the largest Lebesgue number of a cover with
diameter at most ``r``. On a finite space every cover is point-finite, so both
are exact optima over all covers, computed here from clique covers of
threshold graphs and cross-checked by an exhaustive search on tiny spaces.
"""
from __future__ import annotations

import csv
import io
import math
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .covers import cover_diameter, lebesgue_number, threshold_clique_cover
from .errors import BadParams, MonotonicityViolation, TooLarge
from .metric import FiniteMetricSpace
from .serialize import decode_value, encode_value, format_float

COARSE = "coarse"
UNIFORM = "uniform"
ORACLE_MAX_POINTS = 4


def _kind(kind: str) -> str:
    k = kind.lower()
    if k in ("coarse", "c", "delta_c"):
        return COARSE
    if k in ("uniform", "u", "delta_u"):
        return UNIFORM
    raise BadParams(f"unknown modulus kind {kind!r}")


_COARSE_MEMO: "weakref.WeakKeyDictionary[FiniteMetricSpace, dict[float, float]]" = weakref.WeakKeyDictionary()


def _coarse_memo(space: FiniteMetricSpace, R: float) -> float:
    """delta_coarse with a per-space cache; parameter sweeps revisit the same arguments."""
    memo = _COARSE_MEMO.setdefault(space, {})
    if R not in memo:
        memo[R] = delta_coarse(space, R)
    return memo[R]


def delta_coarse(space: FiniteMetricSpace, R: float) -> float:
    """Least cover diameter subject to Lebesgue number >= R.

    Every set of diameter < R must sit inside a member, in particular every
    maximal clique of {d < R}; the cover by exactly those cliques is feasible,
    hence optimal.
    """
    if not R >= 0:
        raise BadParams(f"R must be nonnegative, got {R}")
    if R <= space.min_positive_distance:
        return 0.0
    return cover_diameter(threshold_clique_cover(space, R, strict=True))


def delta_uniform(space: FiniteMetricSpace, r: float, method: str = "closed") -> float:
    """Largest Lebesgue number of a cover of diameter <= r.

    ``closed``: the least distance exceeding r (inf when r >= diam).
    ``cover``: Lebesgue number of the maximal-clique cover of {d <= r}.
    """
    if not r >= 0:
        raise BadParams(f"r must be nonnegative, got {r}")
    if method == "cover":
        return lebesgue_number(threshold_clique_cover(space, r, strict=False))
    if method != "closed":
        raise BadParams(f"unknown method {method!r}")
    if r >= space.diameter:
        return math.inf
    dd = space.distinct_distances
    return float(dd[np.searchsorted(dd, r, side="right")])


def delta(space: FiniteMetricSpace, kind: str, argument: float) -> float:
    return delta_coarse(space, argument) if _kind(kind) == COARSE else delta_uniform(space, argument)


# -- exhaustive oracle --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OracleTable:
    """Diameter and Lebesgue number of every cover of a tiny space."""

    diameters: np.ndarray
    lebesgues: np.ndarray

    def coarse(self, R: float) -> float:
        ok = self.lebesgues >= R
        return float(self.diameters[ok].min())

    def uniform(self, r: float) -> float:
        ok = self.diameters <= r
        return float(self.lebesgues[ok].max())


def oracle_table(space: FiniteMetricSpace) -> OracleTable:
    """Enumerate every family of nonempty subsets that covers the space.

    Subsets are bitmasks 1..2^n-1; a family is a bitmask over those subsets.
    For each family the Lebesgue number is computed straight from the
    definition: the least diameter of a subset contained in no member.
    """
    n = space.n
    if n > ORACLE_MAX_POINTS:
        raise TooLarge(f"exhaustive oracle is limited to {ORACLE_MAX_POINTS} points, got {n}")
    subsets = list(range(1, 1 << n))
    members_of = [[i for i in range(n) if s >> i & 1] for s in subsets]
    sub_diam = np.array([
        max((space.dist[i, j] for i in m for j in m), default=0.0) for m in members_of
    ])
    fam = np.arange(1, 1 << len(subsets), dtype=np.int64)

    def supersets_mask(s: int) -> int:
        return sum(1 << k for k, u in enumerate(subsets) if s & ~u == 0)

    is_cover = np.ones(len(fam), dtype=bool)
    for i in range(n):
        is_cover &= (fam & supersets_mask(1 << i)) != 0
    leb = np.full(len(fam), np.inf)
    for k, s in enumerate(subsets):
        if bin(s).count("1") >= 2:
            uncovered = (fam & supersets_mask(s)) == 0
            leb = np.where(uncovered, np.minimum(leb, sub_diam[k]), leb)
    diam = np.zeros(len(fam))
    for k in range(len(subsets)):
        diam = np.where((fam >> k) & 1 == 1, np.maximum(diam, sub_diam[k]), diam)
    return OracleTable(diam[is_cover], leb[is_cover])


def delta_oracle(space: FiniteMetricSpace, kind: str, argument: float) -> float:
    table = oracle_table(space)
    return table.coarse(argument) if _kind(kind) == COARSE else table.uniform(argument)


# -- curves -------------------------------------------------------------------

def default_grid(space: FiniteMetricSpace) -> list[float]:
    """Arguments around every distinct distance: the value itself, one ulp on
    each side, the midpoints between consecutive values, plus points below the
    smallest and beyond the largest distance."""
    dd = [float(v) for v in space.distinct_distances]
    if not dd:
        return [0.5, 1.0]
    pts = {dd[0] / 2, dd[-1] * 1.5, dd[-1] + 1.0}
    for v in dd:
        pts.update((v, math.nextafter(v, math.inf), math.nextafter(v, 0.0)))
    for a, b in zip(dd, dd[1:]):
        pts.add((a + b) / 2)
    return sorted(x for x in pts if x > 0)


@dataclass(frozen=True, eq=False)
class ModulusCurve:
    kind: str
    samples: tuple[tuple[float, float], ...]
    space: FiniteMetricSpace | None = None

    @property
    def arguments(self) -> list[float]:
        return [a for a, _ in self.samples]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.samples]

    def monotonicity_violations(self) -> list[tuple[float, float]]:
        return [(a0, a1) for (a0, v0), (a1, v1) in zip(self.samples, self.samples[1:]) if v1 < v0]

    @property
    def is_monotone(self) -> bool:
        return not self.monotonicity_violations()


def modulus_curve(space: FiniteMetricSpace, kind: str, grid: Iterable[float] | None = None,
                  include_default: bool = True) -> ModulusCurve:
    kind = _kind(kind)
    args = set(float(g) for g in grid) if grid is not None else set()
    if include_default or not args:
        args.update(default_grid(space))
    samples = tuple((a, delta(space, kind, a)) for a in sorted(args))
    curve = ModulusCurve(kind, samples, space)
    bad = curve.monotonicity_violations()
    if bad:
        raise MonotonicityViolation(f"{kind} modulus decreases between arguments {bad[0]}")
    return curve


def curves_to_csv(curves: Sequence[ModulusCurve], oracle: Sequence[ModulusCurve] | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["kind", "argument", "value"] + (["oracle"] if oracle is not None else [])
    w.writerow(header)
    for k, c in enumerate(curves):
        for j, (a, v) in enumerate(c.samples):
            row = [c.kind, format_float(a), format_float(v)]
            if oracle is not None:
                row.append(format_float(oracle[k].samples[j][1]))
            w.writerow(row)
    return buf.getvalue()


def curves_from_csv(text: str) -> list[ModulusCurve]:
    rows = list(csv.DictReader(io.StringIO(text)))
    by_kind: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        by_kind.setdefault(r["kind"], []).append((decode_value(r["argument"]), decode_value(r["value"])))
    return [ModulusCurve(k, tuple(s)) for k, s in by_kind.items()]


def coarse_ratios(space: FiniteMetricSpace, grid: Iterable[float] | None = None) -> list[tuple[float, float]]:
    """(R, delta_coarse(R)/R) pairs; exploratory only, no threshold is asserted."""
    grid = default_grid(space) if grid is None else grid
    return [(R, delta_coarse(space, R) / R) for R in grid if R > 0]


# -- inequality checks ------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    passed: bool = True
    checks: int = 0
    violations: list[dict] = field(default_factory=list)
    facts: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def record(self, ok: bool, **witness) -> None:
        self.checks += 1
        if not ok:
            self.passed = False
            self.violations.append({k: encode_value(v) if isinstance(v, float) else v for k, v in witness.items()})

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "checks": self.checks,
            "violations": self.violations,
            "facts": {k: encode_value(v) if isinstance(v, float) else v for k, v in self.facts.items()},
            "notes": self.notes,
        }


def check_duality(space: FiniteMetricSpace, grid: Iterable[float], epsilons: Iterable[float]) -> CheckReport:
    """Monotonicity of both moduli and the two transfer inequalities

    (ii)  delta_u(delta_c(R) + eps) >= R           when delta_c(R) < inf
    (iii) delta_c(delta_u(r) - eps) <= r           for 0 < eps < delta_u(r)
    at every positive grid argument.
    """
    grid = sorted(float(g) for g in grid if g > 0)
    epsilons = [float(e) for e in epsilons]
    if any(e <= 0 for e in epsilons):
        raise BadParams("epsilons must be positive")
    rep = CheckReport("duality")
    coarse = [delta_coarse(space, a) for a in grid]
    uniform = [delta_uniform(space, a) for a in grid]
    for vals, kind in ((coarse, COARSE), (uniform, UNIFORM)):
        for k in range(1, len(grid)):
            rep.record(vals[k] >= vals[k - 1], check="i", kind=kind, lo=grid[k - 1], hi=grid[k])
    for R, c in zip(grid, coarse):
        if math.isinf(c):
            continue
        for e in epsilons:
            u = delta_uniform(space, c + e)
            rep.record(u >= R, check="ii", R=R, eps=e, value=u)
    for r, u in zip(grid, uniform):
        if not u > 0:
            continue
        for e in epsilons:
            if not e < u:
                continue
            c = delta_coarse(space, u - e)
            rep.record(c <= r, check="iii", r=r, eps=e, value=c)
    return rep


def _extended_grid(space: FiniteMetricSpace, grid: Iterable[float] | None, extra: Iterable[float] = ()) -> list[float]:
    pts = set(default_grid(space))
    if grid is not None:
        pts.update(float(g) for g in grid)
    pts.update(float(x) for x in extra)
    return sorted(x for x in pts if x >= 0 and math.isfinite(x))


def check_small_c(space: FiniteMetricSpace, C: float, D: float, grid: Iterable[float] | None = None,
                  tol: float = 1e-9) -> CheckReport:
    """If delta_c(R) <= C R + D on the whole grid (C < 1), then diam <= D/(1-C).

    The grid is extended with the default arguments (which include points just
    above the diameter) and with points beyond D/(1-C).
    """
    if not (0 <= C < 1) or not D >= 0:
        raise BadParams("need 0 <= C < 1 and D >= 0")
    bound = D / (1 - C)
    args = _extended_grid(space, grid, (bound, math.nextafter(bound, math.inf), 2 * bound + 1,
                                        2 * space.diameter + 1))
    rep = CheckReport("small_c")
    failing = [R for R in args if _coarse_memo(space, R) > C * R + D]
    hyp = not failing
    concl = space.diameter <= bound + tol
    rep.facts.update(C=C, D=D, bound=bound, diameter=space.diameter,
                     hypothesis_holds=hyp, conclusion_holds=concl, grid_size=len(args))
    if failing:
        rep.facts["hypothesis_fails_at"] = failing[0]
    rep.record(not hyp or concl, check="C<1", diameter=space.diameter, bound=bound)
    return rep


def check_linear_type(space: FiniteMetricSpace, C: float, grid: Iterable[float] | None = None) -> CheckReport:
    """Compare 'delta_c(R) <= C R for all R' with 'delta_u(r) >= r / C for all r > 0' on a grid.

    Agreement on a finite grid is necessary for the equivalence but only
    sampled; the default arguments bracket every distance by one ulp so the
    first failure of either side is found when it exists.
    """
    if not C > 0:
        raise BadParams("C must be positive")
    args = _extended_grid(space, grid)
    lhs_fail = [R for R in args if delta_coarse(space, R) > C * R]
    rhs_fail = [r for r in args if r > 0 and delta_uniform(space, r) < r / C]
    rep = CheckReport("linear_type")
    lhs, rhs = not lhs_fail, not rhs_fail
    rep.facts.update(C=C, lhs_holds=lhs, rhs_holds=rhs, grid_size=len(args))
    if lhs_fail:
        rep.facts["lhs_fails_at"] = lhs_fail[0]
    if rhs_fail:
        rep.facts["rhs_fails_at"] = rhs_fail[0]
    rep.notes.append("equivalence checked on sampled arguments only")
    rep.record(lhs == rhs, check="iff", lhs=lhs, rhs=rhs)
    return rep
