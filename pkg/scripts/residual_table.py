"""Residual table for the full equation system on a preset, at two steps.

    python3 scripts/residual_table.py --preset gz-2 --points 48
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from gkz.equations import verify_all
from gkz.integral import QuadratureConfig
from gkz.presets import PRESETS


@dataclass(frozen=True)
class ResidualTableConfig:
    preset: str = "gz-2"
    points: int = 48
    step: float = 1e-3
    seed: int = 0
    gamma_range: tuple[float, float] = (0.8, 1.8)
    log_u_range: tuple[float, float] = (-0.3, 0.3)


def run(cfg: ResidualTableConfig, out=sys.stdout) -> None:
    data = PRESETS[cfg.preset].data
    rng = np.random.default_rng(cfg.seed)
    gamma = rng.uniform(*cfg.gamma_range, data.N)
    u = np.exp(rng.uniform(*cfg.log_u_range, data.N))
    quad = QuadratureConfig(points_per_dim=cfg.points)
    coarse = verify_all(data, gamma, u, cfg.step, quad)
    fine = verify_all(data, gamma, u, cfg.step / 2, quad)
    writer = csv.writer(out)
    writer.writerow(["equation", "params", "rel_h", "rel_h_half", "ratio"])
    for a, b in zip(coarse, fine):
        ratio = a.relative_residual / b.relative_residual if b.relative_residual else float("inf")
        writer.writerow([a.equation_id, " ".join(map(str, a.parameters)),
                         f"{a.relative_residual:.3e}", f"{b.relative_residual:.3e}", f"{ratio:.2f}"])


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--preset", default="gz-2", choices=sorted(PRESETS))
    p.add_argument("--points", type=int, default=48)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    run(ResidualTableConfig(preset=a.preset, points=a.points, step=a.step, seed=a.seed))


if __name__ == "__main__":
    main()
