"""Exploratory: sup_R delta_c(R)/R on finite l_p lattice nets.

Finite nets only; nothing here is compared with an asymptotic constant.
Writes CSV rows (p, radius, points, R, ratio) to stdout.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from stonecover.metric import generate_space
from stonecover.moduli import delta_coarse
from stonecover.serialize import format_float


@dataclass(frozen=True)
class NetConfig:
    dim: int = 2
    radius: float = 3.0
    step: float = 1.0
    ps: tuple = (1.0, 2.0, 3.0, "inf")
    arguments: tuple = (1.25, 1.5, 2.0, 2.5, 3.0, 4.0)


def run(cfg: NetConfig, out=sys.stdout) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["p", "radius", "points", "R", "ratio"])
    for p in cfg.ps:
        net = generate_space("grid-net", {"dim": cfg.dim, "radius": cfg.radius, "step": cfg.step, "p": p})
        for R in cfg.arguments:
            w.writerow([p, cfg.radius, net.n, R, format_float(delta_coarse(net, R) / R)])


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--radius", type=float, default=3.0)
    ap.add_argument("--step", type=float, default=1.0)
    a = ap.parse_args(argv)
    run(NetConfig(dim=a.dim, radius=a.radius, step=a.step))


if __name__ == "__main__":
    main()
