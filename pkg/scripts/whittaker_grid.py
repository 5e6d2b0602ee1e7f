"""Maximal-parabolic Whittaker values next to the rank-one Bessel closed form.

For rank 1 the table carries the closed form and the relative gap; for
higher rank only the quadrature value and its error estimate.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from gkz.integral import QuadratureConfig
from gkz.whittaker import bessel_k_oracle, eval_whittaker_max


@dataclass(frozen=True)
class GridConfig:
    rank: int = 1
    lam: tuple[float, ...] = (0.6, 1.1)
    lo: float = -3.0
    hi: float = 3.0
    n: int = 13
    points: int = 96


def closed_form(lam, x):
    l1, l2 = lam
    return 2 * math.exp(x * (l1 + l2) / 2) * bessel_k_oracle(l1 - l2, 2 * math.exp(x / 2))


def run(cfg: GridConfig, out=sys.stdout) -> None:
    quad = QuadratureConfig(points_per_dim=cfg.points)
    print("x,value,err,closed_form,rel_gap", file=out)
    for x in np.linspace(cfg.lo, cfg.hi, cfg.n):
        v, err = eval_whittaker_max(cfg.rank, cfg.lam, x, quad, with_error=True)
        if cfg.rank == 1:
            ref = closed_form(cfg.lam, x)
            print(f"{x:.6g},{v.real:.17g},{err:.3e},{ref:.17g},{abs(v - ref) / abs(ref):.3e}", file=out)
        else:
            print(f"{x:.6g},{v.real:.17g},{err:.3e},,", file=out)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--lambda", dest="lam", default="0.6,1.1")
    p.add_argument("--range", default="-3:3:13", help="lo:hi:n; write --range=-1:1:5 for a negative start")
    p.add_argument("--points", type=int, default=96)
    a = p.parse_args()
    lo, hi, n = a.range.split(":")
    lam = tuple(float(v) for v in a.lam.split(","))
    run(GridConfig(rank=a.rank, lam=lam, lo=float(lo), hi=float(hi), n=int(n), points=a.points))


if __name__ == "__main__":
    main()
