"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as a script with
``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import sys
import time

import numpy as np

from oracles import all_three_point_spaces, random_integer_metric
from stonecover.catalog import (
    C0PlusGridCover, LinfGridCover, RootedTree, c0_lower_bound_witness, check_guarantee,
    greedy_guarantee, greedy_membership_violations, greedy_separable_cover, tree_cover, tree_guarantee,
)
from stonecover.embedding import EmbeddingConfig, embed_space
from stonecover.metric import generate_space, lp_space, random_tree_edges, validate_space
from stonecover.moduli import (
    check_duality, check_small_c, coarse_ratios, default_grid, delta_coarse, delta_uniform, oracle_table,
)
from stonecover.sequences import fold_to_positive, sup_distance

EMBED_TOL = 1e-9
LINES: list[str] = []


def report(capsys, number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    LINES.append(line)
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


# -- shared inputs --------------------------------------------------------------

def embedding_spaces():
    """50 random 50-point spaces: l_p clouds for p in {1, 2, inf} and integer metrics."""
    out = []
    for seed in range(50):
        kind = seed % 4
        if kind == 3:
            rng = np.random.default_rng(1000 + seed)
            out.append(validate_space(random_integer_metric(50, rng, 1, 20)))
        else:
            p = (1.0, 2.0, math.inf)[kind]
            out.append(generate_space("lp-point-cloud", {"n": 50, "p": p, "scale": 10}, seed))
    return out


_EMBED_CACHE: dict = {}


def embedding_runs():
    if "runs" not in _EMBED_CACHE:
        t0 = time.perf_counter()
        conf = EmbeddingConfig(t=1.5, eps=0.25, lam=0.25, D=0.0)
        _EMBED_CACHE["runs"] = [embed_space(sp, conf) for sp in embedding_spaces()]
        _EMBED_CACHE["seconds"] = time.perf_counter() - t0
    return _EMBED_CACHE["runs"], _EMBED_CACHE["seconds"]


# -- criteria ---------------------------------------------------------------------

def test_c1_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    spaces = [validate_space(random_integer_metric(4, np.random.default_rng(s), 1, 6)) for s in range(100)]
    spaces += [validate_space(d) for d in all_three_point_spaces((1, 2, 3))]
    mismatches = checks = 0
    for sp in spaces:
        table = oracle_table(sp)
        for a in default_grid(sp):
            checks += 2
            mismatches += delta_coarse(sp, a) != table.coarse(a)
            mismatches += delta_uniform(sp, a) != table.uniform(a)
    secs = time.perf_counter() - t0
    ok = mismatches == 0 and secs < 60
    report(capsys, 1, ok, f"{len(spaces)} spaces, {checks} exact comparisons, {mismatches} mismatches, {secs:.1f}s (< 60s)")
    assert ok


def test_c2_coarse_below_identity(capsys):
    violations = samples = 0
    for s in range(100):
        sp = generate_space("lp-point-cloud", {"n": 10, "p": (1, 2, "inf")[s % 3]}, 200 + s) if s % 2 else \
            validate_space(random_integer_metric(10, np.random.default_rng(200 + s), 1, 9))
        for R in default_grid(sp):
            samples += 1
            violations += delta_coarse(sp, R) > R
    ok = violations == 0
    report(capsys, 2, ok, f"100 ten-point spaces, {samples} samples, {violations} violations of delta_c(R) <= R")
    assert ok


def test_c3_duality(capsys):
    t0 = time.perf_counter()
    violations = checks = 0
    for s in range(100):
        rng = np.random.default_rng(300 + s)
        sp = validate_space(random_integer_metric(8, rng, 1, 9)) if s % 2 else \
            lp_space(rng.uniform(0, 5, size=(8, 2)), (1, 2, math.inf)[s % 3])
        grid = sorted(rng.uniform(0.01, 1.2 * sp.diameter, size=20))
        rep = check_duality(sp, grid, [0.1, 0.01])
        checks += rep.checks
        violations += len(rep.violations)
    secs = time.perf_counter() - t0
    ok = violations == 0 and secs < 120
    report(capsys, 3, ok, f"100 eight-point spaces x 20 arguments, {checks} checks, {violations} violations, {secs:.1f}s (< 120s)")
    assert ok


def test_c4_small_c(capsys):
    bad = held = 0
    for s in range(50):
        rng = np.random.default_rng(400 + s)
        sp = validate_space(random_integer_metric(8, rng, 1, 9)) if s % 2 else lp_space(rng.uniform(0, 5, size=(8, 2)), 2)
        for C in np.linspace(0.0, 0.9, 10):
            for D in np.linspace(0.0, 1.2 * sp.diameter, 10):
                rep = check_small_c(sp, float(C), float(D))
                held += rep.facts["hypothesis_holds"]
                bad += not rep.passed
    ok = bad == 0
    report(capsys, 4, ok, f"50 spaces x 10x10 (C, D), hypothesis held in {held} instances, {bad} with diam > D/(1-C) + 1e-9")
    assert ok


def test_c5_embedding_bilipschitz(capsys):
    runs, secs = embedding_runs()
    failed = [k for k, e in enumerate(runs) if not (e.report.passed and e.L == 0)]
    worst_up = max(e.report.worst_upper_slack for e in runs)
    worst_lo = max(e.report.worst_lower_slack for e in runs)
    K_range = (min(e.K for e in runs), max(e.K for e in runs))
    ok = not failed and secs < 300 and worst_up <= EMBED_TOL and worst_lo <= EMBED_TOL
    report(capsys, 5, ok, f"50 fifty-point spaces, L=0, K in [{K_range[0]:.3f}, {K_range[1]:.3f}], "
                          f"worst upper slack {worst_up:.2e}, worst lower slack {worst_lo:.2e}, "
                          f"{len(failed)} failing runs, {secs:.1f}s (< 300s)")
    assert ok


def test_c6_lower_bound_witnesses(capsys):
    runs, _ = embedding_runs()
    pairs = missing = wrong = 0
    for e in runs:
        n = e.space.n
        for x in range(n):
            for y in range(x + 1, n):
                pairs += 1
                w = e.lower_bound_witness(x, y)
                if w is None:
                    missing += 1
                    continue
                t = e.config.t
                if not (e.points[w.far][w.coordinate] >= e.K * (1 - e.config.eps) * t**w.scale / 2
                        and e.points[w.near][w.coordinate] == 0
                        and e.space.dist[w.far, e.config.base_point] >= e.space.dist[w.near, e.config.base_point]):
                    wrong += 1
    ok = missing == wrong == 0
    report(capsys, 6, ok, f"{pairs} pairs, {missing} without witness, {wrong} witnesses failing the value check")
    assert ok


def _sample_linf_ball(rng, f, radius, count):
    f = np.asarray(f, dtype=float)
    pts = f + rng.uniform(-radius, radius, size=(count, len(f)))
    # push some samples to the open boundary
    edge = rng.random((count, len(f))) < 0.1
    sign = rng.choice([-1.0, 1.0], size=(count, len(f)))
    near = f + sign * np.nextafter(radius, 0)
    return np.where(edge, near, pts)


def _sample_c0_ball(rng, f: dict, R, count, extra_keys):
    """Points g >= 0 with |g(k) - f(k)| < R on f's support and on ``extra_keys``."""
    keys = list(f) + list(extra_keys)
    out = []
    for _ in range(count):
        g = {}
        for k in keys:
            v = f.get(k, 0.0)
            lo, hi = max(0.0, v - R), v + R
            x = rng.uniform(lo, hi)
            if rng.random() < 0.1:
                # push to the boundary, keeping only values that stay inside the open ball
                edge = float(np.nextafter(hi, lo)) if rng.random() < 0.5 else (lo if lo == 0 else float(np.nextafter(lo, hi)))
                x = edge if abs(edge - v) < R else x
            while not abs(x - v) < R:
                x = rng.uniform(lo, hi)
            g[k] = float(x)
        out.append(g)
    return out


def test_c7_catalog_certificates(capsys):
    rng = np.random.default_rng(7)
    fails = {"greedy": 0, "tree": 0, "linf": 0, "c0": 0}
    # greedy: diam <= r, L >= r/2 - eps, membership rule
    for k in range(100):
        sp = generate_space("lp-point-cloud", {"n": int(rng.integers(5, 30)), "p": (1, 2, "inf")[k % 3], "scale": 5}, 700 + k)
        r = float(rng.uniform(0.5, 4))
        eps = float(rng.uniform(0.01, 0.49)) * r
        order = list(rng.permutation(sp.n))
        c = greedy_separable_cover(sp, r, eps, order)
        fails["greedy"] += not check_guarantee(c, greedy_guarantee(r, eps))["pass"]
        fails["greedy"] += bool(greedy_membership_violations(c, eps, order))
    # tree: L >= R, diam <= 2(R + 1/n), multiplicity <= n ceil(R) + 1
    for k in range(100):
        edges = random_tree_edges(int(rng.integers(2, 25)), rng, float(rng.uniform(0.3, 2)))
        tree = RootedTree(tuple(tuple(e) for e in edges), 0)
        R, n = float(rng.uniform(0.1, 3)), int(rng.integers(1, 5))
        fails["tree"] += not check_guarantee(tree_cover(tree, R, n), tree_guarantee(R, n))["pass"]
    # l_inf^N grid: multiplicity bound, locator containment on 1000 ball points
    g1 = LinfGridCover(1, 1)
    interior_count = g1.multiplicity([0.5])
    for k in range(100):
        N, n = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        g = LinfGridCover(N, n)
        f = rng.uniform(-5, 5, size=N)
        fails["linf"] += g.multiplicity(f) > g.multiplicity_bound
        x = g.locate(f)
        fails["linf"] += not all(g.contains(p, x) for p in _sample_linf_ball(rng, f, 1.0, 1000))
    # c0+ grid: locator containment on 1000 ball points
    for k in range(100):
        R, n = float(rng.uniform(0.1, 3)), int(rng.integers(1, 5))
        g = C0PlusGridCover(R, n)
        f = {j: float(rng.uniform(0, 6)) for j in range(int(rng.integers(0, 5)))}
        idx = g.locate(f)
        fails["c0"] += not all(g.contains(p, idx) for p in _sample_c0_ball(rng, f, R, 1000, ["z1", "z2"]))
    ok = not any(fails.values()) and interior_count == 3
    report(capsys, 7, ok, f"100 instances per construction; failures {fails}; "
                          f"l_inf N=1 n=1 interior point count {interior_count} (bound 3)")
    assert ok


def test_c8_folding_map(capsys):
    rng = np.random.default_rng(8)
    bad = 0
    for _ in range(10_000):
        f = {int(k): float(v) for k, v in zip(rng.integers(0, 20, size=rng.integers(0, 8)), rng.normal(0, 10, size=8))}
        h = {int(k): float(v) for k, v in zip(rng.integers(0, 20, size=rng.integers(0, 8)), rng.normal(0, 10, size=8))}
        d = sup_distance(f, h)
        g = fold_to_positive(f).distance(fold_to_positive(h))
        bad += not (d / 2 <= g <= d)
    ratio = fold_to_positive({0: 1.0}).distance(fold_to_positive({0: -1.0})) / sup_distance({0: 1.0}, {0: -1.0})
    ok = bad == 0 and ratio == 0.5
    report(capsys, 8, ok, f"10^4 random sparse pairs, {bad} violations; +1/-1 witness ratio {ratio}")
    assert ok


def test_c9_witness_family(capsys):
    problems = []
    for m in range(1, 7):
        w = c0_lower_bound_witness(m, 1.0, 1.9, 0.01)
        if len(w.families) != 2**m:
            problems.append((m, "count"))
        if not w.contains_zero:
            problems.append((m, "zero"))
        if not w.families_small:
            problems.append((m, "diameter"))
        if not w.separated:
            problems.append((m, "union"))
    ok = not problems
    report(capsys, 9, ok, f"M_size 1..6: 2^M families, each with 0 and diameter < 1, unions > 1.9; problems {problems}")
    assert ok


def test_c10_one_sided_checks(capsys):
    rng = np.random.default_rng(10)
    bad = 0
    for _ in range(100):
        R, n = float(rng.uniform(0.1, 3)), int(rng.integers(1, 6))
        g = C0PlusGridCover(R, n)
        # distance between two members of a cell is < width = 2R + 1/n
        idx = g.locate({0: float(rng.uniform(0, 5))})
        lo = idx.get(0) / n
        a, b = {0: lo}, {0: float(np.nextafter(lo + g.width, lo))}
        bad += not (g.contains(a, idx) and g.contains(b, idx) and sup_distance(a, b) <= 2 * R + 1 / n)
        bad += g.diameter_bound > 2 * R + 1 / n
        bad += LinfGridCover(2, n).diameter > 2 + 1 / n
    ratios = {}
    for p in (1, 2, "inf"):
        net = generate_space("grid-net", {"dim": 2, "radius": 2, "step": 1, "p": p})
        ratios[p] = max(r for _, r in coarse_ratios(net, (1.25, 1.5, 2.5, 3.5)))
    ok = bad == 0
    report(capsys, 10, ok, f"grid diameters within 2R+1/n ({bad} violations); exploratory max delta_c(R)/R on "
                           f"l_p nets: " + ", ".join(f"p={p}: {v:.3f}" for p, v in ratios.items()) + " (no threshold)")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn(None)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
