"""Weight classes, exponent bookkeeping, and named weight constructors.

Class constants are suprema over a cube family of normalized-average
expressions; essential infima and suprema on discrete data are plain min
and max over cells.  Every constructor returns a strictly positive grid
function (floored at 1e-300 with a flag where the formula can vanish), since
the class constants divide by averages.

Random recipes are analytic in the box coordinates (random bump or Fourier
data drawn from the seed), so the same recipe sampled on a refined grid is
the same function: refinement studies compare like with like.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .lattice import ALL, CubeFamily, Grid, GridFunction, family_sides, load_grid_function
from .operators import FunctionVector, fractional_maximal, hardy_littlewood, orlicz_maximal
from .orlicz import young_llogl

__all__ = [
    "WeightVector",
    "ExponentSystem",
    "exponents",
    "ap_constant",
    "multilinear_ap_constant",
    "apq_constant",
    "rh_constant",
    "build_weight",
    "random_field",
    "POSITIVITY_FLOOR",
]

POSITIVITY_FLOOR = 1e-300


class WeightVector(FunctionVector):
    """Strictly positive components; carries the derived product weights."""

    def __init__(self, components):
        super().__init__(components)
        for c in self.components:
            if np.any(c.values <= 0):
                raise ValueError("weight components must be strictly positive")

    def product_power(self, expos: Sequence[float]) -> GridFunction:
        """prod_i w_i^expos[i] as a grid function."""
        vals = np.ones(self.grid.shape)
        for c, e in zip(self.components, expos):
            vals = vals * c.values**e
        return GridFunction(self.grid, vals, nonnegative=True)

    def nu(self) -> GridFunction:
        return self.product_power([1.0] * self.m)

    def geometric_mean(self) -> GridFunction:
        return self.product_power([1.0 / self.m] * self.m)


def _prime(p: float) -> float:
    return math.inf if p == 1.0 else p / (p - 1.0)


@dataclass(frozen=True)
class ExponentSystem:
    """The tuple (n, m, alpha, p_i) with every derived exponent.

    q_i shifts each slot by alpha/(nm); s_i = (1 - alpha/(nm)) q_i; the
    scalars p, q, s are harmonic sums of the respective tuples; r and its
    conjugate split off the alpha fraction (r = nm/(nm - alpha)).
    """

    n: int
    m: int
    alpha: float
    p_vec: tuple
    q_vec: tuple
    s_vec: tuple
    p: float
    q: float
    s: float
    r: float
    r_prime: float

    def p_prime(self, i: int) -> float:
        return _prime(self.p_vec[i])

    def s_prime(self, i: int) -> float:
        return _prime(self.s_vec[i])

    def describe(self) -> str:
        ps = ",".join(f"{v:g}" for v in self.p_vec)
        return f"n={self.n} m={self.m} alpha={self.alpha:g} p=({ps}) q={self.q:g}"


def exponents(n: int, m: int, alpha: float, p_vec: Sequence[float]) -> ExponentSystem:
    """Derive (q_i, s_i, p, q, s, r, r') and assert the defining identities."""
    p_vec = tuple(float(v) for v in p_vec)
    if len(p_vec) != m:
        raise ValueError(f"need {m} slot exponents, got {len(p_vec)}")
    nm = n * m
    if not 0 <= alpha < nm:
        raise ValueError(f"alpha={alpha} violates 0 <= alpha < n*m = {nm}")
    cap = math.inf if alpha == 0 else nm / alpha
    for v in p_vec:
        if not 1 <= v < cap:
            raise ValueError(f"slot exponent p_i={v} violates 1 <= p_i < nm/alpha = {cap:g}")
    frac = alpha / nm
    q_vec = tuple(1.0 / (1.0 / v - frac) for v in p_vec)
    s_vec = tuple((1.0 - frac) * qi for qi in q_vec)
    p = 1.0 / sum(1.0 / v for v in p_vec)
    q = 1.0 / sum(1.0 / v for v in q_vec)
    s = 1.0 / sum(1.0 / v for v in s_vec)
    r = 1.0 / (1.0 - frac)
    r_prime = math.inf if alpha == 0 else nm / alpha
    if alpha > 0:
        for pi, qi, si in zip(p_vec, q_vec, s_vec):
            uno = (qi / pi - 1.0) * nm / alpha
            dos = (si / pi + frac - 1.0) * nm / alpha
            if abs(uno - qi) > 1e-12 * max(1.0, qi) or abs(dos - si) > 1e-12 * max(1.0, si):
                raise AssertionError("exponent identities violated (derivation bug)")
        if abs(1.0 / q - (1.0 / p - alpha / n)) > 1e-12:
            raise AssertionError("1/q = 1/p - alpha/n violated")
    return ExponentSystem(n, m, alpha, p_vec, q_vec, s_vec, p, q, s, r, r_prime)


# ---------------------------------------------------------------------------
# Class constants
# ---------------------------------------------------------------------------


def _side_reduce(vals: np.ndarray, side: int, stride: int, op: str) -> np.ndarray:
    n = vals.ndim
    N = vals.shape[0]
    if stride == side:
        shape = []
        for _ in range(n):
            shape += [N // side, side]
        v = vals.reshape(shape)
        perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
        blocks = v.transpose(perm).reshape((N // side,) * n + (-1,))
    else:
        w = sliding_window_view(vals, (side,) * n)
        blocks = w.reshape((N - side + 1,) * n + (-1,))
    if op == "mean":
        return blocks.mean(axis=-1)
    if op == "min":
        return blocks.min(axis=-1)
    return blocks.max(axis=-1)


def _assert_at_least_one(c: float, what: str) -> float:
    if np.isfinite(c) and c < 1.0 - 1e-9:
        raise RuntimeError(f"{what} computed below 1 ({c!r}); averaging bug")
    return float(c)


def ap_constant(w: GridFunction, p: float, family: CubeFamily = ALL) -> float:
    """sup over cubes of (mean w) (mean w^(1-p'))^(p-1); p > 1."""
    if not p > 1:
        raise ValueError("Muckenhoupt constant needs p > 1")
    pp = _prime(p)
    wv = w.values
    with np.errstate(over="ignore", divide="ignore"):
        dual = wv ** (1.0 - pp)
    best = -math.inf
    for side, stride in family_sides(w.grid, family):
        m1 = _side_reduce(wv, side, stride, "mean")
        m2 = _side_reduce(dual, side, stride, "mean")
        with np.errstate(over="ignore", invalid="ignore"):
            c = m1 * m2 ** (p - 1.0)
        best = max(best, float(np.max(c)))
    return _assert_at_least_one(best, "A_p constant")


def multilinear_ap_constant(W: WeightVector, p_vec: Sequence[float],
                            family: CubeFamily = ALL) -> float:
    """sup over cubes of (mean prod w_i^(p/p_i))^(1/p) prod (mean w_i^(1-p_i'))^(1/p_i').

    A slot with p_i = 1 contributes (min over the cube of w_i)^(-1).
    """
    p_vec = tuple(float(v) for v in p_vec)
    if any(v < 1 for v in p_vec):
        raise ValueError("slot exponents must satisfy p_i >= 1")
    p = 1.0 / sum(1.0 / v for v in p_vec)
    prod_vals = np.ones(W.grid.shape)
    for wi, pi in zip(W, p_vec):
        prod_vals = prod_vals * wi.values ** (p / pi)
    duals = []
    for wi, pi in zip(W, p_vec):
        if pi == 1.0:
            duals.append(("min", wi.values))
        else:
            with np.errstate(over="ignore", divide="ignore"):
                duals.append(("mean", wi.values ** (1.0 - _prime(pi))))
    best = -math.inf
    for side, stride in family_sides(W.grid, family):
        c = _side_reduce(prod_vals, side, stride, "mean") ** (1.0 / p)
        for (op, dv), pi in zip(duals, p_vec):
            red = _side_reduce(dv, side, stride, op)
            with np.errstate(over="ignore", invalid="ignore"):
                c = c * (1.0 / red if pi == 1.0 else red ** (1.0 / _prime(pi)))
        best = max(best, float(np.max(c)))
    return _assert_at_least_one(best, "multilinear A_P constant")


def apq_constant(W: WeightVector, sys: ExponentSystem, family: CubeFamily = ALL) -> float:
    """Shifted-class constant: the multilinear constant of (w_i^(q_i)) at (s_i)."""
    powered = WeightVector(
        [GridFunction(W.grid, wi.values**qi, nonnegative=True)
         for wi, qi in zip(W, sys.q_vec)]
    )
    return multilinear_ap_constant(powered, sys.s_vec, family=family)


def rh_constant(w: GridFunction, s: float, family: CubeFamily = ALL) -> float:
    """Reverse-Holder constant: sup (mean w^s)^(1/s) / (mean w), or with the
    cube max in place of the s-mean when s = inf."""
    if not (s > 1 or math.isinf(s)):
        raise ValueError("reverse-Holder exponent must exceed 1 (or be inf)")
    wv = w.values
    best = -math.inf
    for side, stride in family_sides(w.grid, family):
        m1 = _side_reduce(wv, side, stride, "mean")
        if math.isinf(s):
            num = _side_reduce(wv, side, stride, "max")
        else:
            with np.errstate(over="ignore"):
                num = _side_reduce(wv**s, side, stride, "mean") ** (1.0 / s)
        best = max(best, float(np.max(num / m1)))
    return _assert_at_least_one(best, "reverse-Holder constant")


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _floor_positive(vals: np.ndarray) -> tuple:
    hit = bool(np.any(vals < POSITIVITY_FLOOR))
    return np.maximum(vals, POSITIVITY_FLOOR), hit


def random_field(grid: Grid, seed: int, smoothness: float = 3.0,
                 log_amp: float = 0.6, nonneg_bumps: bool = False) -> GridFunction:
    """Analytic random field from a seed, identical across grid refinements.

    Either a lognormal of a random low-frequency Fourier series (default) or
    a nonnegative mixture of Gaussian bumps.  ``smoothness`` caps the wave
    number / inverse bump width.
    """
    rng = np.random.default_rng(int(seed))
    pts = grid.cell_centers() / grid.L  # box coordinates in [0,1)^n
    if nonneg_bumps:
        nb = int(rng.integers(2, 5))
        vals = np.zeros(pts.shape[0])
        for _ in range(nb):
            c = rng.uniform(0.1, 0.9, size=grid.n)
            width = rng.uniform(0.05, 0.05 * max(smoothness, 1.0))
            amp = rng.uniform(0.3, 2.0)
            vals += amp * np.exp(-0.5 * ((pts - c) ** 2).sum(-1) / width**2)
        return GridFunction(grid, vals.reshape(grid.shape), nonnegative=True)
    kmax = max(1, int(smoothness))
    field = np.zeros(pts.shape[0])
    for _ in range(2 * kmax):
        k = rng.integers(1, kmax + 1, size=grid.n)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        amp = rng.normal(0.0, 1.0) / math.sqrt(2.0 * kmax)
        field += amp * np.cos(2.0 * math.pi * (pts * k).sum(-1) + phase)
    vals = np.exp(log_amp * field)
    return GridFunction(grid, vals.reshape(grid.shape), nonnegative=True)


def _power_weight(grid: Grid, a: float, center) -> np.ndarray:
    pts = grid.cell_centers()
    c = np.full(grid.n, float(center)) if np.isscalar(center) else np.asarray(center, float)
    d = np.sqrt(((pts - c * grid.L) ** 2).sum(-1))
    with np.errstate(divide="ignore"):
        vals = d**a
    # the singular cell takes its center value; exact hits are floored below
    return vals.reshape(grid.shape)


def build_weight(kind: str, params: Sequence, grid: Grid) -> GridFunction:
    """Named weight constructors addressable from configuration.

    kinds: power(a, center) | bump(sigma, center) | random(seed, smoothness)
         | spike(center) | constant(c) | m_power(base, delta)
         | mg_negpow(base, beta) | m_frac(base, alpha) | m_llogl(base, delta)
         | file(path)
    A ``base`` parameter is itself a (kind, params) pair or recipe string.
    """
    from .recipes import resolve_field  # cycle-free: recipes imports only lattice

    def as_field(x) -> GridFunction:
        return resolve_field(x, grid)

    if kind == "power":
        a = float(params[0])
        center = params[1] if len(params) > 1 else 0.5
        vals = _power_weight(grid, a, center)
    elif kind == "bump":
        sigma = float(params[0]) if params else 0.15
        center = params[1] if len(params) > 1 else 0.5
        pts = grid.cell_centers()
        c = np.full(grid.n, float(center)) if np.isscalar(center) else np.asarray(center, float)
        d2 = ((pts - c * grid.L) ** 2).sum(-1)
        vals = np.exp(-0.5 * d2 / float(sigma) ** 2).reshape(grid.shape)
    elif kind == "random":
        seed = int(params[0]) if params else 0
        smooth = float(params[1]) if len(params) > 1 else 3.0
        vals = random_field(grid, seed, smooth).values
    elif kind == "spike":
        center = params[0] if params else 0.5
        vals = np.full(grid.shape, 1e-3)
        vals[grid.cell_of_point(np.full(grid.n, float(center)) * grid.L)] = 1.0
    elif kind == "constant":
        vals = np.full(grid.shape, float(params[0]) if params else 1.0)
    elif kind == "m_power":
        base = as_field(params[0])
        delta = float(params[1]) if len(params) > 1 else 1.0
        vals = hardy_littlewood(base).values ** delta
    elif kind == "mg_negpow":
        base = as_field(params[0])
        beta = float(params[1]) if len(params) > 1 else 0.5
        vals = hardy_littlewood(base).values ** (-beta)
    elif kind == "m_frac":
        base = as_field(params[0])
        a2 = float(params[1]) if len(params) > 1 else 0.5
        vals = fractional_maximal(base, a2).values
    elif kind == "m_llogl":
        base = as_field(params[0])
        delta = float(params[1]) if len(params) > 1 else 1.0
        vals = orlicz_maximal(base, young_llogl(delta)).values
    elif kind == "file":
        return load_grid_function(str(params[0]))
    else:
        raise ValueError(f"unresolvable weight recipe kind {kind!r}")
    vals, _hit = _floor_positive(np.asarray(vals, dtype=float))
    return GridFunction(grid, vals, nonnegative=True)
