"""Recipe strings for fields and the seeded instance catalog.

A recipe is ``kind:arg1,arg2,...`` with parentheses for nested recipes, e.g.
``mg_negpow:(bump:0.1,0.3),0.5``.  Every draw is analytic in box coordinates
so a recipe evaluated on a refined grid is the same function; empirical
constants across grid sizes therefore compare the same instance.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from .lattice import Grid, GridFunction

__all__ = ["parse_recipe", "resolve_field", "draw_functions", "draw_weight", "FieldLike"]

FieldLike = Union[str, tuple, GridFunction]


def _split_args(s: str) -> list:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    args = []
    for a in out:
        a = a.strip()
        if a.startswith("(") and a.endswith(")"):
            a = a[1:-1].strip()
        if a:
            args.append(a)
    return args


def parse_recipe(recipe: str) -> tuple:
    """Split ``kind:a,b,...`` into (kind, [args]); args may be nested recipes."""
    recipe = recipe.strip()
    if ":" not in recipe:
        return recipe, []
    kind, _, rest = recipe.partition(":")
    return kind.strip(), _split_args(rest)


def resolve_field(spec: FieldLike, grid: Grid) -> GridFunction:
    """Materialize a recipe string / (kind, params) pair / grid function."""
    from .weights import build_weight

    if isinstance(spec, GridFunction):
        if spec.grid != grid:
            raise ValueError("field lives on a different grid")
        return spec
    if isinstance(spec, tuple):
        kind, params = spec
        return build_weight(kind, list(params), grid)
    kind, params = parse_recipe(str(spec))
    return build_weight(kind, params, grid)


# ---------------------------------------------------------------------------
# Seeded instance draws for the verification suite
# ---------------------------------------------------------------------------


def _bump_mixture(grid: Grid, rng: np.random.Generator, allow_zero_tail: bool = True) -> GridFunction:
    """Nonnegative mixture of 2..4 Gaussian bumps; may vanish away from them."""
    pts = grid.cell_centers() / grid.L
    vals = np.zeros(pts.shape[0])
    for _ in range(int(rng.integers(2, 5))):
        c = rng.uniform(0.08, 0.92, size=grid.n)
        width = rng.uniform(0.04, 0.22)
        amp = rng.uniform(0.25, 2.5)
        vals += amp * np.exp(-0.5 * ((pts - c) ** 2).sum(-1) / width**2)
    if not allow_zero_tail:
        vals += 1e-3
    return GridFunction(grid, vals.reshape(grid.shape), nonnegative=True)


def _log_fourier(grid: Grid, rng: np.random.Generator, log_amp: float = 0.55,
                 kmax: int = 3) -> GridFunction:
    """Strictly positive lognormal of a random low-frequency Fourier series."""
    pts = grid.cell_centers() / grid.L
    field = np.zeros(pts.shape[0])
    for _ in range(2 * kmax):
        k = rng.integers(1, kmax + 1, size=grid.n)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        amp = rng.normal(0.0, 1.0) / math.sqrt(2.0 * kmax)
        field += amp * np.cos(2.0 * math.pi * (pts * k).sum(-1) + phase)
    return GridFunction(grid, np.exp(log_amp * field).reshape(grid.shape), nonnegative=True)


def draw_functions(grid: Grid, m: int, rng: np.random.Generator,
                   style: str = "bumps") -> list:
    """Draw m nonnegative operator inputs from the catalog.

    styles: "bumps" (compactly concentrated mixtures, may vanish),
    "positive" (strictly positive lognormal), "indicator" (random boxes,
    drawn in box coordinates so refinements see the same set), "zero".
    """
    out = []
    for _ in range(m):
        if style == "positive":
            out.append(_log_fourier(grid, rng))
        elif style == "indicator":
            lo = rng.uniform(0.0, 0.5, size=grid.n)
            width = rng.uniform(0.15, 0.5, size=grid.n)
            pts = grid.cell_centers() / grid.L
            inside = np.all((pts >= lo) & (pts < lo + width), axis=-1)
            out.append(GridFunction(grid, inside.astype(float).reshape(grid.shape),
                                    nonnegative=True))
        elif style == "zero":
            out.append(GridFunction.constant(grid, 0.0))
        else:
            out.append(_bump_mixture(grid, rng))
    return out


def draw_weight(grid: Grid, rng: np.random.Generator, style: str = "smooth") -> GridFunction:
    """Draw one strictly positive weight.

    styles: "smooth" (lognormal Fourier, moderate range), "rough" (wider
    dynamic range), "powerlike" (an integrable power singularity at a random
    center, floored at cell resolution).
    """
    if style == "rough":
        return _log_fourier(grid, rng, log_amp=1.1, kmax=5)
    if style == "powerlike":
        from .weights import build_weight

        a = rng.uniform(0.2, 0.45)
        c = rng.uniform(0.2, 0.8)
        return build_weight("power", [a, c], grid)
    return _log_fourier(grid, rng, log_amp=0.55, kmax=3)
