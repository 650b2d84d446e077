"""Named presets with default parameters and initial centers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .fermion import FermiPP
from .presets import CubicPP3, GatedPP, QuadraticPP

__all__ = ["PresetInfo", "PRESETS", "ALIASES", "lookup_preset"]


@dataclass(frozen=True)
class PresetInfo:
    name: str
    kind: str
    formula: str
    factory: Callable[..., Any]
    params: dict = field(default_factory=dict)
    centers: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)

    def make(self, **overrides):
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise KeyError(f"unknown parameter(s) for {self.name}: {sorted(unknown)}")
        return self.factory(**{**self.params, **overrides})


def _cubic(Omega1=None, Omega2=None, omega1=3.5, omega2=0.5, omega3=1.0, lam1=2.0, lam2=1.0):
    if Omega1 is not None or Omega2 is not None:
        if Omega1 is None or Omega2 is None:
            raise KeyError("give both Omega1 and Omega2, or neither")
        return CubicPP3.from_frequencies(Omega1, Omega2, lam1, lam2, omega3)
    return CubicPP3(omega1, omega2, omega3, lam1, lam2)


PRESETS: dict[str, PresetInfo] = {
    "quadratic-pp": PresetInfo(
        "quadratic-pp", "quadratic",
        "w1 x1 + w3 x3 + lam (T1^-1 T3 + T3^-1 T1)",
        QuadraticPP, {"omega1": 3.0, "omega3": 1.0, "lam": 3.0}, {1: 1.0, 3: 4.0}),
    "cubic-pp3": PresetInfo(
        "cubic-pp3", "cubic",
        "w1 x1 + w2 x2 + w3 x3 + T1^-1 (lam1 T2 + lam2 T2^-1) T3 + h.c.",
        _cubic,
        {"Omega1": None, "Omega2": None, "omega1": 3.5, "omega2": 0.5, "omega3": 1.0,
         "lam1": 2.0, "lam2": 1.0},
        {1: 4.0, 2: 3.0, 3: 3.0},
        # three modes: coarser cells, smaller extent and Krylov steps keep the run near 10^6 cells
        {"half_width": 10.0, "cells_per_unit": 4, "integrator": "krylov", "dt": 0.25,
         "krylov_dim": 30}),
    "gated-pp": PresetInfo(
        "gated-pp", "gated",
        "w1 x1 + w3 x3 + lam (x1 T1^-1 T3 + T1 T3^-1 x1)",
        GatedPP, {"omega1": 2.0, "omega3": 1.0, "lam": 0.1}, {1: 2.0, 3: 3.0}),
    "fermi-pp": PresetInfo(
        "fermi-pp", "fermi",
        "w1 n1 + w3 n3 + lam (b1^+ b3 + b3^+ b1), 4x4 fermionic baseline",
        FermiPP, {"omega1": 2.0, "omega3": 1.0, "lam": 0.5, "n1": 1, "n3": 0}, {}),
    "free": PresetInfo(
        "free", "quadratic",
        "w1 x1 + w3 x3 (no interaction)",
        QuadraticPP, {"omega1": 3.0, "omega3": 1.0, "lam": 0.0}, {1: 1.0, 3: 4.0}),
}

# the same mathematics read as a two-person affair (1 = Alice's interest, 3 = Bob's)
ALIASES: dict[str, str] = {
    "love-affair-quadratic": "quadratic-pp",
    "love-affair-cubic": "cubic-pp3",
    "love-affair-gated": "gated-pp",
    "love-affair-fermi": "fermi-pp",
}


def lookup_preset(name: str) -> PresetInfo:
    key = ALIASES.get(name, name)
    try:
        return PRESETS[key]
    except KeyError:
        known = sorted(PRESETS) + sorted(ALIASES)
        raise KeyError(f"unknown model {name!r}; known: {', '.join(known)}") from None
