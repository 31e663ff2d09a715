"""Weighted Lebesgue, weak-Lebesgue, and normalized cube averages.

The weak quasi-norm sup_l l * u({|f| > l})^(1/q) is computed exactly on
finite data: the supremum is attained as l approaches a distinct value of
|f| from below, so it equals max over distinct values v of
v * u({|f| >= v})^(1/q).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .lattice import Cube, Grid, GridFunction
from .orlicz import YoungFunction, luxemburg_average

__all__ = ["WeightedMeasure", "lp_norm", "weak_norm", "x_average", "SpaceTag", "L1", "Lr", "Orlicz"]


@dataclass(frozen=True)
class WeightedMeasure:
    """Set measure u(E) = h^n * sum_E u for a nonnegative density u."""

    u: GridFunction

    def of(self, mask: np.ndarray) -> float:
        return float(self.u.values[mask].sum()) * self.u.grid.cell_volume()

    def total(self) -> float:
        return self.u.total_integral()


def _weight_values(f: GridFunction, u: Optional[GridFunction]) -> np.ndarray:
    if u is None:
        return np.ones_like(f.values)
    if u.grid != f.grid:
        raise ValueError("weight lives on a different grid")
    return u.values


def lp_norm(f: GridFunction, p: float, u: Optional[GridFunction] = None) -> float:
    """(h^n sum |f|^p u)^(1/p); unweighted when u is None."""
    if not p > 0:
        raise ValueError("exponent p must be positive")
    w = _weight_values(f, u)
    s = float((np.abs(f.values) ** p * w).sum()) * f.grid.cell_volume()
    return s ** (1.0 / p)


def weak_norm(f: GridFunction, q: float, u: Optional[GridFunction] = None) -> float:
    """sup_l l * u({|f| > l})^(1/q), exact via the level sets {|f| >= v}."""
    if not q > 0:
        raise ValueError("exponent q must be positive")
    w = _weight_values(f, u).ravel()
    v = np.abs(f.values).ravel()
    order = np.argsort(v, kind="stable")
    v_sorted = v[order]
    w_sorted = w[order]
    # mass of {|f| >= v_sorted[i]} = suffix sum from i
    suffix = np.cumsum(w_sorted[::-1])[::-1] * f.grid.cell_volume()
    vals, first_idx = np.unique(v_sorted, return_index=True)
    if vals[0] == 0.0:
        vals, first_idx = vals[1:], first_idx[1:]
    if len(vals) == 0:
        return 0.0
    return float(np.max(vals * suffix[first_idx] ** (1.0 / q)))


# ---------------------------------------------------------------------------
# Space tags for generalized cube averages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceTag:
    """Average flavor on a cube: plain mean, power mean, or Orlicz average."""

    kind: str  # "L1" | "Lr" | "orlicz"
    r: float = 1.0
    B: Optional[YoungFunction] = None

    def label(self) -> str:
        if self.kind == "L1":
            return "L1"
        if self.kind == "Lr":
            return f"L{self.r:g}"
        return self.B.label


L1 = SpaceTag("L1")


def Lr(r: float) -> SpaceTag:
    if r < 1:
        raise ValueError("power-mean tag needs r >= 1")
    return SpaceTag("Lr", r=r)


def Orlicz(B: YoungFunction) -> SpaceTag:
    return SpaceTag("orlicz", B=B)


def x_average(f: GridFunction, Q: Cube, tag: Union[SpaceTag, YoungFunction]) -> float:
    """Normalized average of f over Q in the flavor given by the tag."""
    if isinstance(tag, YoungFunction):
        tag = Orlicz(tag)
    if tag.kind == "L1":
        block = np.abs(f.values[Q.slices()])
        return float(block.mean())
    if tag.kind == "Lr":
        block = np.abs(f.values[Q.slices()])
        return float((block**tag.r).mean() ** (1.0 / tag.r))
    return luxemburg_average(tag.B, f, Q)
