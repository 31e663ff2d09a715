"""Discrete substrate: uniform grids on a box, grid functions, lattice cubes.

Functions live at cell centers of a uniform lattice over the box [0, L)^n
with zero extension outside (no periodic wrap).  Cubes are lattice-aligned
axis-parallel cubes given by an anchor cell and an integer side; every cube
lies entirely inside the box.  These objects carry the operator and weight
machinery of the rest of the package.

All types are immutable after construction and all operations are pure, so
evaluation may be parallelised freely over cells without changing results.
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "Grid",
    "GridFunction",
    "Cube",
    "FamilyKind",
    "CubeFamily",
    "ALL",
    "DYADIC",
    "truncated",
    "integrate",
    "average",
    "cubes_containing",
    "iter_cubes",
    "family_sides",
    "translate",
    "CZDecomposition",
    "czd_decompose",
    "save_grid_function",
    "load_grid_function",
]


def _is_power_of_two(k: int) -> bool:
    return k >= 1 and (k & (k - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Uniform lattice over the box [0, L)^n with N cells per side.

    N must be a power of two so that every dyadic generation down to single
    cells exists and h = L/N is exact in binary floating point for the
    default L = 1.
    """

    n: int
    N: int
    L: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n <= 3:
            raise ValueError(f"dimension n must be 1..3, got {self.n}")
        if not _is_power_of_two(self.N) or self.N < 2:
            raise ValueError(f"cells-per-side N must be a power of two >= 2, got {self.N}")
        if not self.L > 0:
            raise ValueError("box extent L must be positive")

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def ncells(self) -> int:
        return self.N**self.n

    def cell_volume(self) -> float:
        return self.h**self.n

    def cell_centers(self) -> np.ndarray:
        """Coordinates of all cell centers, shape (N^n, n), C-order."""
        axis = (np.arange(self.N) + 0.5) * self.h
        grids = np.meshgrid(*([axis] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def cell_of_point(self, x) -> tuple:
        """Multi-index of the cell containing the point x (componentwise)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        idx = np.floor(x / self.h).astype(int)
        idx = np.clip(idx, 0, self.N - 1)
        return tuple(int(i) for i in idx)


class GridFunction:
    """Real samples at the cell centers of a Grid.

    ``nonnegative`` records the sign class; construction verifies it.  The
    value array is frozen (read-only) once built.
    """

    __slots__ = ("grid", "values", "nonnegative")

    def __init__(self, grid: Grid, values, nonnegative: bool = False):
        arr = np.asarray(values, dtype=float)
        if arr.shape == (grid.ncells,):
            arr = arr.reshape(grid.shape)
        if arr.shape != grid.shape:
            raise ValueError(f"values shape {arr.shape} does not match grid shape {grid.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid function values must be finite")
        if nonnegative and np.any(arr < 0):
            raise ValueError("sign class is nonnegative but negative values present")
        arr = arr.copy()
        arr.setflags(write=False)
        self.grid = grid
        self.values = arr
        self.nonnegative = bool(nonnegative)

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)), nonnegative=c >= 0)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable, nonnegative: bool = False) -> "GridFunction":
        """Sample ``fn`` at cell centers; fn takes an (..., n) coordinate array."""
        pts = grid.cell_centers()
        vals = np.asarray(fn(pts), dtype=float).reshape(grid.shape)
        return cls(grid, vals, nonnegative=nonnegative)

    def with_values(self, values, nonnegative: bool = False) -> "GridFunction":
        return GridFunction(self.grid, values, nonnegative=nonnegative)

    def abs(self) -> "GridFunction":
        return GridFunction(self.grid, np.abs(self.values), nonnegative=True)

    def __pow__(self, expo: float) -> "GridFunction":
        return GridFunction(self.grid, self.values**expo, nonnegative=self.nonnegative)

    def __mul__(self, other) -> "GridFunction":
        if isinstance(other, GridFunction):
            return GridFunction(self.grid, self.values * other.values)
        return GridFunction(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def total_integral(self) -> float:
        return float(self.values.sum()) * self.grid.cell_volume()

    def __repr__(self):
        return f"GridFunction(n={self.grid.n}, N={self.grid.N}, sign={'>=0' if self.nonnegative else 'any'})"


@dataclass(frozen=True)
class Cube:
    """Lattice-aligned cube: anchor cell multi-index plus side length in cells."""

    anchor: tuple
    side: int

    def slices(self) -> tuple:
        return tuple(slice(a, a + self.side) for a in self.anchor)

    def measure(self, grid: Grid) -> float:
        return (self.side * grid.h) ** grid.n

    def contains_cell(self, cell: tuple) -> bool:
        return all(a <= c < a + self.side for a, c in zip(self.anchor, cell))

    def inside(self, grid: Grid) -> bool:
        return all(0 <= a and a + self.side <= grid.N for a in self.anchor)

    def dilate_clipped(self, factor: int, grid: Grid) -> tuple:
        """Slices of the factor-dilate (same center cube family) clipped to the box.

        For factor 3 this is the usual 3Q: one side length added on each
        side, truncated at the box boundary.
        """
        ext = (factor - 1) // 2 * self.side
        return tuple(
            slice(max(0, a - ext), min(grid.N, a + self.side + ext)) for a in self.anchor
        )


class FamilyKind(Enum):
    ALL = "all"
    DYADIC = "dyadic"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class CubeFamily:
    """A deterministic enumeration of lattice cubes.

    ALL: every in-box cube of every integer side 1..N.
    DYADIC: sides N/2^j with anchors at multiples of the side.
    TRUNCATED(max_len): like ALL but physical side length capped at max_len.
    """

    kind: FamilyKind
    max_side_len: float | None = None  # physical cap, TRUNCATED only

    def sides(self, grid: Grid) -> list:
        if self.kind == FamilyKind.DYADIC:
            s, out = grid.N, []
            while s >= 1:
                out.append(s)
                s //= 2
            return sorted(out)
        cap = grid.N
        if self.kind == FamilyKind.TRUNCATED:
            if self.max_side_len is None:
                raise ValueError("TRUNCATED family needs max_side_len")
            cap = min(grid.N, int(math.floor(self.max_side_len / grid.h + 1e-12)))
            if cap < 1:
                raise ValueError("truncation cap below one cell")
        return list(range(1, cap + 1))

    def anchor_stride(self, side: int) -> int:
        return side if self.kind == FamilyKind.DYADIC else 1


ALL = CubeFamily(FamilyKind.ALL)
DYADIC = CubeFamily(FamilyKind.DYADIC)


def truncated(max_side_len: float) -> CubeFamily:
    return CubeFamily(FamilyKind.TRUNCATED, max_side_len)


def family_sides(grid: Grid, family: CubeFamily) -> Iterator[tuple]:
    """Yield (side, stride) pairs in increasing side order."""
    for s in family.sides(grid):
        yield s, family.anchor_stride(s)


def iter_cubes(grid: Grid, family: CubeFamily = ALL) -> Iterator[Cube]:
    """Enumerate the family, anchors in C-order within each side."""
    for side, stride in family_sides(grid, family):
        ranges = [range(0, grid.N - side + 1, stride)] * grid.n
        for anchor in itertools.product(*ranges):
            yield Cube(anchor, side)


def cubes_containing(grid: Grid, cell: tuple, family: CubeFamily = ALL) -> list:
    """All family members containing the given cell, anchor-major then side."""
    cell = tuple(int(c) for c in cell)
    if not all(0 <= c < grid.N for c in cell):
        raise ValueError(f"cell {cell} outside grid")
    out = []
    for side, stride in family_sides(grid, family):
        per_axis = []
        for c in cell:
            lo = max(0, c - side + 1)
            hi = min(c, grid.N - side)
            vals = [a for a in range(lo, hi + 1) if a % stride == 0]
            per_axis.append(vals)
        for anchor in itertools.product(*per_axis):
            out.append(Cube(anchor, side))
    out.sort(key=lambda q: (q.anchor, q.side))
    return out


def _check_cube(f: GridFunction, Q: Cube):
    if not Q.inside(f.grid):
        raise ValueError(f"cube {Q} not inside the box (N={f.grid.N})")


def integrate(f: GridFunction, Q: Cube) -> float:
    """h^n times the sum of f over the cells of Q (exact for the model)."""
    _check_cube(f, Q)
    return float(f.values[Q.slices()].sum()) * f.grid.cell_volume()


def average(f: GridFunction, Q: Cube) -> float:
    """Mean of |f| over Q: integrate(|f|, Q) / |Q|."""
    _check_cube(f, Q)
    block = f.values[Q.slices()]
    return float(np.abs(block).mean())


def translate(f: GridFunction, t) -> GridFunction:
    """Shift by t cells; cells shifted outside the box read as zero."""
    t = np.atleast_1d(np.asarray(t, dtype=int))
    if t.shape != (f.grid.n,):
        raise ValueError(f"offset must have {f.grid.n} components")
    out = np.zeros_like(f.values)
    src, dst = [], []
    for off, N in zip(t, f.grid.shape):
        if abs(off) >= N:
            return GridFunction(f.grid, out, nonnegative=f.nonnegative)
        if off >= 0:
            src.append(slice(0, N - off))
            dst.append(slice(off, N))
        else:
            src.append(slice(-off, N))
            dst.append(slice(0, N + off))
    out[tuple(dst)] = f.values[tuple(src)]
    return GridFunction(f.grid, out, nonnegative=f.nonnegative)


# ---------------------------------------------------------------------------
# Dyadic level-set decomposition
# ---------------------------------------------------------------------------


@dataclass
class CZDecomposition:
    """Level-set selection of maximal dyadic cubes.

    For each level k, ``cubes[k]`` are the maximal dyadic cubes whose cube
    functional exceeds a^k, ``omega[k]`` is their union as a cell mask, and
    ``carved[k]`` holds, cube by cube, the part of each selected cube not
    covered by the next level up (the pairwise disjoint sets).  ``beta``
    reports the worst measured ratio |Q| / |carved part| (inf when a carved
    part is empty).
    """

    grid: Grid
    a: float
    levels: list = field(default_factory=list)  # sorted level indices k
    cubes: dict = field(default_factory=dict)  # k -> list[Cube]
    values: dict = field(default_factory=dict)  # k -> list[float] functional values
    omega: dict = field(default_factory=dict)  # k -> bool mask
    carved: dict = field(default_factory=dict)  # k -> list[bool mask]

    @property
    def beta(self) -> float:
        worst = 1.0
        for k in self.levels:
            for Q, E in zip(self.cubes[k], self.carved[k]):
                cells_E = int(E.sum())
                if cells_E == 0:
                    return math.inf
                worst = max(worst, Q.side**self.grid.n / cells_E)
        return worst

    def selected(self) -> Iterator[tuple]:
        """Yield (k, cube, functional value, carved mask) over all levels."""
        for k in self.levels:
            yield from zip(
                itertools.repeat(k), self.cubes[k], self.values[k], self.carved[k]
            )


def _dyadic_mask(grid: Grid, cube: Cube) -> np.ndarray:
    m = np.zeros(grid.shape, dtype=bool)
    m[cube.slices()] = True
    return m


def czd_decompose(
    grid: Grid,
    cube_values: dict,
    a: float,
    m: int,
    k_range: tuple | None = None,
) -> CZDecomposition:
    """Select maximal dyadic cubes above geometric thresholds a^k.

    ``cube_values`` maps dyadic side -> array of per-anchor functional values
    (shape (N/side,)*n).  ``a`` must exceed 2^(m*n), the per-generation growth
    factor of the cube functional, so that selected cubes obey the two-sided
    bound a^k < value <= 2^(m*n) a^k.  Levels default to the full range on
    which maximal cubes have proper parents: a^k >= value(whole box) at the
    bottom, up to the largest k with a nonempty level set.
    """
    doubling = 2.0 ** (m * grid.n)
    if not a > doubling:
        raise ValueError(f"threshold base a={a} must exceed 2^(m n)={doubling}")
    sides = sorted(cube_values.keys(), reverse=True)  # largest cube first
    if sides[0] != grid.N:
        raise ValueError("cube_values must include the whole-box cube")
    vmax = max(float(np.max(cube_values[s])) for s in sides)
    dec = CZDecomposition(grid=grid, a=a)
    if vmax <= 0:
        return dec

    if k_range is None:
        # cover every cell whose level function is positive: the unique level
        # of a cell with value v is the k with a^k < v <= a^(k+1)
        level = np.full(grid.shape, -np.inf)
        for s in sides:
            exp = np.asarray(cube_values[s])
            for ax in range(grid.n):
                exp = np.repeat(exp, s, axis=ax)
            level = np.maximum(level, exp)
        pos = level[level > 0]
        vmin = float(pos.min())
        k_lo = math.ceil(math.log(vmin) / math.log(a) - 1e-12) - 1
        k_hi = math.ceil(math.log(vmax) / math.log(a) - 1e-12) - 1
    else:
        k_lo, k_hi = k_range
    if k_hi < k_lo:
        return dec

    for k in range(k_lo, k_hi + 1):
        thr = a**k
        taken = np.zeros(grid.shape, dtype=bool)
        picked: list = []
        vals: list = []
        for side in sides:
            arr = np.asarray(cube_values[side])
            hit = np.argwhere(arr > thr)
            for idx in hit:
                anchor = tuple(int(i) * side for i in idx)
                if taken[anchor]:  # an ancestor already selected
                    continue
                Q = Cube(anchor, side)
                taken[Q.slices()] = True
                picked.append(Q)
                vals.append(float(arr[tuple(idx)]))
        if not picked:
            continue
        dec.levels.append(k)
        dec.cubes[k] = picked
        dec.values[k] = vals
        dec.omega[k] = taken

    # carve each level against the next finer one
    for i, k in enumerate(dec.levels):
        nxt = None
        if i + 1 < len(dec.levels) and dec.levels[i + 1] == k + 1:
            nxt = dec.omega[k + 1]
        masks = []
        for Q in dec.cubes[k]:
            m_q = _dyadic_mask(grid, Q)
            if nxt is not None:
                m_q &= ~nxt
            masks.append(m_q)
        dec.carved[k] = masks
    return dec


# ---------------------------------------------------------------------------
# Fixture serialization: header (n, N, L) then row-major values
# ---------------------------------------------------------------------------

_BIN_MAGIC = b"GFN1"


def save_grid_function(path: str, f: GridFunction):
    """Write a grid function; .csv for text, anything else as flat binary."""
    path = str(path)
    if path.endswith(".csv"):
        with open(path, "w") as fh:
            fh.write(f"{f.grid.n},{f.grid.N},{float(f.grid.L)!r}\n")
            for v in f.values.ravel():
                fh.write(f"{float(v)!r}\n")
    else:
        with open(path, "wb") as fh:
            fh.write(_BIN_MAGIC)
            fh.write(struct.pack("<iid", f.grid.n, f.grid.N, f.grid.L))
            fh.write(f.values.ravel().astype("<f8").tobytes())


def load_grid_function(path: str) -> GridFunction:
    path = str(path)
    if path.endswith(".csv"):
        with open(path) as fh:
            head = fh.readline().strip().split(",")
            n, N, L = int(head[0]), int(head[1]), float(head[2])
            vals = np.array([float(line) for line in fh if line.strip()])
    else:
        with open(path, "rb") as fh:
            if fh.read(4) != _BIN_MAGIC:
                raise ValueError(f"{path}: not a grid-function fixture")
            n, N, L = struct.unpack("<iid", fh.read(16))
            vals = np.frombuffer(fh.read(), dtype="<f8").copy()
    grid = Grid(n=n, N=N, L=L)
    return GridFunction(grid, vals.reshape(grid.shape))
