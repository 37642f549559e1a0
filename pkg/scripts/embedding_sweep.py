"""Sweep (t, lambda, eps) over random spaces and tabulate K, empirical distortion and support size."""
from __future__ import annotations

import argparse
import csv
import itertools
import sys
import time
from dataclasses import dataclass

from stonecover.embedding import EmbeddingConfig, embed_space
from stonecover.metric import generate_space


@dataclass(frozen=True)
class SweepConfig:
    n: int = 40
    seeds: int = 5
    kinds: tuple = ("lp-point-cloud", "random-integer", "weighted-tree")
    ts: tuple = (1.5, 2.0, 3.0)
    lams: tuple = (0.1, 0.25, 1.0)
    eps: tuple = (0.25,)


def run(cfg: SweepConfig, out=sys.stdout) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "seed", "t", "lambda", "eps", "C", "K", "distortion", "support_max", "pass", "seconds"])
    for kind, seed in itertools.product(cfg.kinds, range(cfg.seeds)):
        space = generate_space(kind, {"n": cfg.n}, seed)
        for t, lam, eps in itertools.product(cfg.ts, cfg.lams, cfg.eps):
            t0 = time.perf_counter()
            emb = embed_space(space, EmbeddingConfig(t=t, lam=lam, eps=eps))
            r = emb.report
            w.writerow([kind, seed, t, lam, eps, emb.C, f"{emb.K:.6g}", f"{r.distortion:.6g}",
                        r.support_max, r.passed, f"{time.perf_counter() - t0:.3f}"])


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=40)
    ap.add_argument("--seeds", type=int, default=5)
    a = ap.parse_args(argv)
    run(SweepConfig(n=a.n, seeds=a.seeds))


if __name__ == "__main__":
    main()
