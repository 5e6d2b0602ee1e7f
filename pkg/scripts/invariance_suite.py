"""Randomised pivot, basis and gauge invariance trials with a summary per preset."""
from __future__ import annotations

import argparse
import json
from dataclasses import dataclass

import numpy as np

from gkz.integral import QuadratureConfig, evaluate_gkz, pivot_sets
from gkz.lattice import random_unimodular
from gkz.model import SpectralVector, change_lattice_basis, gauge_shift
from gkz.presets import PRESETS


@dataclass(frozen=True)
class InvarianceConfig:
    trials: int = 10
    points: int = 32
    seed: int = 1
    max_m: int = 3


def _rel(a, b):
    return abs(a - b) / abs(b)


def run(cfg: InvarianceConfig) -> dict[str, dict[str, float]]:
    rng = np.random.default_rng(cfg.seed)
    quad = QuadratureConfig(points_per_dim=cfg.points)
    summary = {}
    for name, preset in sorted(PRESETS.items()):
        data = preset.data
        if data.m > cfg.max_m:
            continue
        worst = {"pivot": 0.0, "basis": 0.0, "gauge": 0.0}
        sets = pivot_sets(data.M)
        for _ in range(cfg.trials):
            g = rng.uniform(0.8, 2.0, data.N)
            u = np.exp(rng.uniform(-0.5, 0.5, data.N))
            ref = evaluate_gkz(data, g, u, quad)
            p = sets[rng.integers(len(sets))]
            worst["pivot"] = max(worst["pivot"], _rel(evaluate_gkz(data, g, u, quad, pivots=p), ref))
            if data.lattice_rank == 0:
                continue
            other = change_lattice_basis(data, random_unimodular(data.lattice_rank, int(rng.integers(1 << 30))))
            worst["basis"] = max(worst["basis"], _rel(evaluate_gkz(other, g, u, quad), ref))
            xi = rng.uniform(-0.25, 0.25, data.lattice_rank)
            shifted = gauge_shift(SpectralVector.of(g), data, xi)
            if shifted.convergent:
                worst["gauge"] = max(worst["gauge"], _rel(evaluate_gkz(data, shifted, u, quad), ref))
        summary[name] = worst
    return summary


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--points", type=int, default=32)
    p.add_argument("--seed", type=int, default=1)
    a = p.parse_args()
    print(json.dumps(run(InvarianceConfig(a.trials, a.points, a.seed)), indent=2))


if __name__ == "__main__":
    main()
