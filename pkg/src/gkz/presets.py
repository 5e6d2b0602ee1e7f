"""Named data sets used by the test suites, the scripts and the CLI."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .model import GkzData, exponential_data, gamma_data
from .whittaker import build_extended_data, build_gz_data, build_max_parabolic_data

__all__ = ["Preset", "PRESETS", "get_preset"]


@dataclass(frozen=True)
class Preset:
    name: str
    build: Callable[[], GkzData]

    @property
    def data(self) -> GkzData:
        return self.build()


def _gz(ell: int) -> GkzData:
    return build_gz_data(ell).data


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("gamma", gamma_data),
        Preset("exponential", exponential_data),
        Preset("gz-1", lambda: _gz(1)),
        Preset("gz-2", lambda: _gz(2)),
        Preset("max-parabolic-1", lambda: build_max_parabolic_data(1)),
        Preset("max-parabolic-2", lambda: build_max_parabolic_data(2)),
        Preset("extended-1", lambda: build_extended_data(1)),
        Preset("extended-2", lambda: build_extended_data(2)),
    )
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
