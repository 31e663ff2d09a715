"""Young-function calculus and Luxemburg averages over cubes.

A Young function B is convex, increasing, B(0) = 0, B(t) -> inf, with B(t)/t
nondecreasing.  The normalized B-average of f over a cube Q is the smallest
lambda with mean_Q B(|f|/lambda) <= 1; for B(t) = t it reduces to the plain
mean, for B(t) = t^p to the p-th power mean, and otherwise is found by
bracketing plus bisection to 1e-12 relative tolerance.

Besides evaluation and (numeric) inverses this module builds derived
functions: the convex conjugate via a numeric Legendre transform, the
gamma-power composite B(t^g)^(1/g), and the structural probes the rest of
the package gates on (sub-multiplicative splitting ratio, tail
integrability, doubling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "YoungFunction",
    "PhiFunction",
    "young_power",
    "young_llogl",
    "young_esssup",
    "make_psi",
    "complementary",
    "young_from_callables",
    "validate_young",
    "luxemburg_average",
    "luxemburg_batch",
    "check_condi1",
    "check_Br",
    "doubling_constant",
    "sandwich_gap",
    "holder_pair_slack",
    "generalized_holder_check",
    "inverse_product_ratio",
    "parse_young_label",
    "LuxemburgError",
]

_PROBE = np.logspace(-8, 10, 512)
_REL_TOL = 1e-12
_MAX_ITER = 200


class LuxemburgError(RuntimeError):
    """Bisection failed to converge; never silently truncated."""


@dataclass(frozen=True)
class YoungFunction:
    """Evaluable Young function with inverse and optional density.

    ``power`` marks the exact power functions t^p (closed-form averages and
    conjugates); ``esssup`` marks the degenerate conjugate of t (whose
    B-average is the max over the cube).
    """

    label: str
    fn: Callable[[np.ndarray], np.ndarray]
    inv: Callable[[np.ndarray], np.ndarray]
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    power: Optional[float] = None
    esssup: bool = False

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def inverse(self, s):
        return self.inv(np.asarray(s, dtype=float))

    def __repr__(self):
        return f"YoungFunction({self.label})"


@dataclass(frozen=True)
class PhiFunction:
    """Cube-measure weight phi(|Q|), essentially nondecreasing with factor rho.

    ``decays`` records whether phi(t)/t -> 0 held on the probe grid; a pure
    power t^a with a >= 1 fails the decay probe but is still accepted (the
    maximal operator only needs essential monotonicity), with the flag kept
    for reporting.
    """

    label: str
    fn: Callable[[np.ndarray], np.ndarray]
    rho: float = 1.0
    decays: bool = True

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


def validate_phi(phi: PhiFunction, probe: np.ndarray | None = None) -> tuple:
    """Probe essential monotonicity and decay of a cube-measure weight.

    Returns (ok, worst_ratio, decays): worst_ratio is the largest observed
    phi(t)/phi(s) over t <= s on a log-spaced grid, which must not exceed
    the declared factor rho; decays reports whether phi(t)/t shrank across
    the top decades of the probe range.
    """
    t = np.logspace(-9, 4, 256) if probe is None else probe
    v = np.asarray(phi(t), dtype=float)
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        return False, math.inf, False
    running = np.maximum.accumulate(v)
    worst = float(np.max(running / v))
    ok = worst <= phi.rho * (1.0 + 1e-9)
    slope = v / t
    decays = bool(slope[-1] < 0.5 * slope[len(t) // 2])
    return ok, worst, decays


def _bisect_inverse(fn, s, lo_guess=1e-320, hi_guess=1e300):
    """Monotone inverse by vectorized bisection: largest t with fn(t) <= s."""
    s = np.asarray(s, dtype=float)
    lo = np.full(s.shape, 0.0)
    hi = np.full(s.shape, 1.0)
    # grow hi until fn(hi) >= s
    for _ in range(1100):
        need = fn(hi) < s
        if not need.any():
            break
        hi = np.where(need, hi * 2.0, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = fn(mid) < s
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def young_power(p: float) -> YoungFunction:
    """B(t) = t^p, p >= 1."""
    if p < 1:
        raise ValueError("power Young function needs p >= 1")

    def fn(t):
        return t**p

    def inv(s):
        return s ** (1.0 / p)

    def dens(t):
        return p * t ** (p - 1.0)

    return YoungFunction(f"power:{p:g}", fn, inv, density=dens, power=p)


def young_llogl(k: float) -> YoungFunction:
    """B(t) = t (1 + log+ t)^k; log+ is max(0, ln)."""
    if k < 0:
        raise ValueError("llogl exponent must be >= 0")

    def fn(t):
        tt = np.maximum(t, 1.0)
        return np.where(t > 1.0, t * (1.0 + np.log(tt)) ** k, t)

    def inv(s):
        out = _bisect_inverse(fn, np.where(np.asarray(s, float) > 1.0, s, 0.0))
        return np.where(np.asarray(s, float) > 1.0, out, s)

    def dens(t):
        tt = np.maximum(t, 1.0)
        lg = 1.0 + np.log(tt)
        return np.where(t > 1.0, lg ** (k - 1.0) * (lg + k), 1.0)

    return YoungFunction(f"llogl:{k:g}", fn, inv, density=dens)


def young_esssup() -> YoungFunction:
    """Degenerate conjugate of t: 0 on [0,1], +inf beyond; average = max."""

    def fn(t):
        return np.where(t <= 1.0, 0.0, np.inf)

    def inv(s):
        return np.ones_like(np.asarray(s, dtype=float))

    return YoungFunction("esssup", fn, inv, esssup=True)


def young_from_callables(label, fn, inv=None, density=None) -> YoungFunction:
    if inv is None:
        inv = lambda s: _bisect_inverse(fn, s)
    return YoungFunction(label, fn, inv, density=density)


def make_psi(B: YoungFunction, n: int, m: int, alpha: float) -> YoungFunction:
    """Composite B(t^g)^(1/g) with g = 1 - alpha/(n m); a Young function again.

    For B(t) = t^p the composite collapses back to t^p.
    """
    if not 0 < alpha < n * m:
        raise ValueError(f"alpha must lie in (0, {n * m}), got {alpha}")
    g = 1.0 - alpha / (n * m)
    if B.power is not None:
        return young_power(B.power)

    def fn(t):
        return B.fn(t**g) ** (1.0 / g)

    def inv(s):
        return B.inv(np.asarray(s, dtype=float) ** g) ** (1.0 / g)

    dens = None
    if B.density is not None:
        bd = B.density

        def dens(t):
            tg = t**g
            base = B.fn(tg)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(tg > 0, base / np.where(tg > 0, tg, 1.0), 0.0)
            return bd(tg) * ratio ** (1.0 / g - 1.0)

    psi = YoungFunction(f"psi({B.label};g={g:g})", fn, inv, density=dens)
    ok, msg = validate_young(psi)
    if not ok:
        raise ValueError(f"psi construction failed Young probe: {msg}")
    return psi


def validate_young(B: YoungFunction, probe: np.ndarray | None = None) -> tuple:
    """Probe-grid check of the Young invariants; returns (ok, message)."""
    t = _PROBE if probe is None else probe
    if B.esssup:
        return True, "esssup tag"
    v = B(t)
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        return False, "nonfinite or negative values"
    if float(B(np.array(0.0))) != 0.0:
        return False, "B(0) != 0"
    if np.any(np.diff(v) < -1e-12 * np.maximum(v[1:], 1e-300)):
        return False, "not nondecreasing"
    ratio = v / t
    if np.any(np.diff(ratio) < -1e-9 * np.maximum(ratio[1:], 1e-300)):
        return False, "B(t)/t not nondecreasing"
    # convexity: difference quotients nondecreasing on a uniform grid
    u = np.linspace(0.0, 8.0, 257)
    q = np.diff(B(u)) / np.diff(u)
    if np.any(np.diff(q) < -1e-8 * np.maximum(np.abs(q[1:]), 1e-300)):
        return False, "difference quotients decrease (not convex)"
    if not B(np.array(1e12)) > 1e6:
        return False, "does not grow to infinity"
    return True, "ok"


# ---------------------------------------------------------------------------
# Luxemburg averages
# ---------------------------------------------------------------------------


def luxemburg_batch(B: YoungFunction, windows: np.ndarray, method: str = "auto") -> np.ndarray:
    """Normalized B-averages of |values| for a batch of equal-size cubes.

    ``windows`` has shape (batch, cells).  Identically-zero windows give 0.
    Closed forms are used for power functions unless method='bisect'.
    """
    W = np.abs(np.asarray(windows, dtype=float))
    if W.ndim == 1:
        W = W[None, :]
    if B.esssup:
        return W.max(axis=1)
    if method == "auto" and B.power is not None:
        return (W ** B.power).mean(axis=1) ** (1.0 / B.power)

    mx = W.max(axis=1)
    alive = mx > 0
    out = np.zeros(W.shape[0])
    if not alive.any():
        return out
    Wa = W[alive]
    lam0 = Wa.mean(axis=1) + Wa.max(axis=1)

    def functional(lam):
        return B.fn(Wa / lam[:, None]).mean(axis=1)

    hi = lam0.copy()
    for _ in range(_MAX_ITER):
        over = functional(hi) > 1.0
        if not over.any():
            break
        hi = np.where(over, hi * 2.0, hi)
    else:
        raise LuxemburgError("no upper bracket for the B-average after 200 doublings")
    lo = hi / 2.0
    for _ in range(_MAX_ITER):
        under = functional(lo) <= 1.0
        if not under.any():
            break
        lo = np.where(under, lo / 2.0, lo)
    else:
        raise LuxemburgError("no lower bracket for the B-average after 200 halvings")

    for _ in range(_MAX_ITER):
        if np.all(hi - lo <= _REL_TOL * hi):
            break
        mid = 0.5 * (lo + hi)
        le = functional(mid) <= 1.0
        hi = np.where(le, mid, hi)
        lo = np.where(le, lo, mid)
    else:
        raise LuxemburgError(
            f"B-average bisection did not reach rel. tol {_REL_TOL} in {_MAX_ITER} iterations"
        )
    out[alive] = hi
    return out


def luxemburg_average(B: YoungFunction, f, Q, method: str = "auto") -> float:
    """Smallest lambda with mean_Q B(|f|/lambda) <= 1 (0 for f == 0 on Q)."""
    from .lattice import Cube, GridFunction  # local to avoid cycle

    if isinstance(f, GridFunction) and isinstance(Q, Cube):
        if not Q.inside(f.grid):
            raise ValueError(f"cube {Q} outside the box")
        block = f.values[Q.slices()].ravel()
    else:
        block = np.asarray(f, dtype=float).ravel()
    return float(luxemburg_batch(B, block[None, :], method=method)[0])


# ---------------------------------------------------------------------------
# Conjugates and structural probes
# ---------------------------------------------------------------------------


_CONJ_CACHE: dict = {}


def complementary(B: YoungFunction, tol: float = 1e-6) -> YoungFunction:
    """Convex conjugate sup_t (s t - B(t)), numerically when no closed form.

    The pair is validated against t <= B^-1(t) Bt^-1(t) <= 2t on a probe
    grid; a violation beyond ``tol`` relative signals a malformed B.
    Results are cached per label (numeric transforms are not cheap).
    """
    cached = _CONJ_CACHE.get(B.label)
    if cached is not None:
        return cached
    if B.esssup:
        return young_power(1.0)
    if B.power is not None:
        p = B.power
        if p == 1.0:
            conj = young_esssup()
        else:
            pp = p / (p - 1.0)
            c = (p - 1.0) * p**-pp

            def fn(s):
                return c * s**pp

            def inv(s):
                return (s / c) ** (1.0 / pp)

            conj = YoungFunction(f"conj(power:{p:g})", fn, inv)
    else:
        fn = _legendre_eval(B)
        conj = YoungFunction(f"conj({B.label})", fn, _conj_inverse(B, fn))
    gap = sandwich_gap(B, conj)
    if gap > tol:
        raise ValueError(f"complementary sandwich violated by {gap:.2e} (bad Young function?)")
    _CONJ_CACHE[B.label] = conj
    return conj


def _conj_inverse(B: YoungFunction, conj_fn):
    """Generalized inverse sup{t : conj(t) <= s}, bracketed via the sandwich
    property (the inverse lies within a factor of s / B^-1(s))."""

    def inv(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        binv = np.asarray(B.inverse(s), dtype=float)
        scale = np.where(binv > 0, s / np.maximum(binv, 1e-300), 1.0)
        lo = 0.25 * scale
        hi = 4.0 * scale
        for _ in range(80):
            bad = conj_fn(lo) > s
            if not bad.any():
                break
            lo = np.where(bad, lo * 0.5, lo)
        for _ in range(80):
            bad = conj_fn(hi) < s
            if not bad.any():
                break
            hi = np.where(bad, hi * 2.0, hi)
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            below = conj_fn(mid) < s
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        return 0.5 * (lo + hi)

    return inv


def _legendre_eval(B: YoungFunction, grid_pts: int = 512):
    """Vectorized sup_t (s t - B(t)): coarse log-grid argmax + golden refine."""
    tg = np.concatenate([[0.0], np.logspace(-14, 14, grid_pts)])
    Btg = B(tg)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def fn(s):
        s = np.asarray(s, dtype=float)
        shape = s.shape
        sv = np.atleast_1d(s).ravel().astype(float)
        vals = sv[:, None] * tg[None, :] - Btg[None, :]
        idx = np.argmax(vals, axis=1)
        lo = tg[np.maximum(idx - 1, 0)]
        hi = tg[np.minimum(idx + 1, len(tg) - 1)]
        # golden-section maximization of s*t - B(t) on [lo, hi]
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc = sv * c - B(c)
        fd = sv * d - B(d)
        for _ in range(80):
            take = fc < fd
            lo = np.where(take, c, lo)
            hi = np.where(take, hi, d)
            c = hi - invphi * (hi - lo)
            d = lo + invphi * (hi - lo)
            fc = sv * c - B(c)
            fd = sv * d - B(d)
        t_star = 0.5 * (lo + hi)
        out = np.maximum(sv * t_star - B(t_star), 0.0)
        return out.reshape(shape)

    return fn


def sandwich_gap(B: YoungFunction, Bc: YoungFunction, probe: np.ndarray | None = None) -> float:
    """Worst relative violation of t <= B^-1(t) Bc^-1(t) <= 2t on the probe grid."""
    t = _PROBE if probe is None else probe
    prod = np.asarray(B.inverse(t)) * np.asarray(Bc.inverse(t))
    low = np.maximum((t - prod) / t, 0.0)
    high = np.maximum((prod - 2.0 * t) / t, 0.0)
    return float(np.max(np.concatenate([low, high])))


def inverse_product_ratio(A: YoungFunction, C: YoungFunction, B: YoungFunction,
                          probe: np.ndarray | None = None) -> float:
    """sup over the probe grid of A^-1(t) C^-1(t) / B^-1(t)."""
    t = _PROBE if probe is None else probe
    num = np.asarray(A.inverse(t)) * np.asarray(C.inverse(t))
    den = np.asarray(B.inverse(t))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(den > 0, num / den, np.inf)
    return float(np.max(r))


def check_condi1(B: YoungFunction, n: int, m: int, alpha: float,
                 t_lo: float = 1e-6, t_hi: float = 1e8, pts: int = 400) -> tuple:
    """Splitting-ratio probe: rho(t) = t^(a) B^-1(t^(1-a)) / B^-1(t), a = alpha/(nm).

    Returns (passed, sup_ratio).  The ratio equals 1 identically for B(t)=t
    and is >= 1 for every convex B at t >= 1, so the usable criterion is a
    bounded ratio: pass when the tail of rho is flat (log-log slope below
    0.02 over the last two decades), fail when it keeps growing (powers
    t^p with p>1, exponentials).  sup_ratio is the measured splitting
    constant used downstream.
    """
    a = alpha / (n * m)
    if not 0 <= a < 1:
        raise ValueError("alpha/(n m) must lie in [0, 1)")
    t = np.logspace(math.log10(t_lo), math.log10(t_hi), pts)
    lhs = t**a * np.asarray(B.inverse(t ** (1.0 - a)))
    rhs = np.asarray(B.inverse(t))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, 1.0)
    sup = float(np.nanmax(ratio))
    if not np.isfinite(sup):
        return False, sup
    # tail slope over the last two decades of the probe range
    decades = math.log10(t_hi / t_lo)
    i_hi = pts - 1
    i_lo = int(round((decades - 2.0) / decades * (pts - 1)))
    r_hi, r_lo = ratio[i_hi], ratio[i_lo]
    if r_lo <= 0 or r_hi <= 0:
        return False, sup
    slope = math.log(r_hi / r_lo) / (math.log(t[i_hi] / t[i_lo]))
    return bool(slope < 0.02), sup


def check_Br(B: YoungFunction, r: float, c: float = 1.0) -> tuple:
    """Tail integrability of B(t)/t^r dt/t on (c, inf).

    Integrates decade by decade on a log grid until the running tail drops
    below 1e-8 of the total (converged) or fails to decrease for several
    decades (diverging).  Returns (converges, integral value or inf).
    """
    if r <= 1:
        raise ValueError("tail exponent r must exceed 1")
    total = 0.0
    prev = None
    nondecreasing = 0
    for j in range(60):
        lo, hi = c * 10.0**j, c * 10.0 ** (j + 1)
        u = np.linspace(math.log(lo), math.log(hi), 129)
        t = np.exp(u)
        trapezoid = getattr(np, "trapezoid", None) or np.trapz
        seg = float(trapezoid(B(t) * t**-r, u))  # dt/t = du
        total += seg
        if prev is not None and seg >= prev * 0.999:
            nondecreasing += 1
            if nondecreasing >= 3:
                return False, math.inf
        else:
            nondecreasing = 0
        if total > 0 and seg < 1e-8 * total:
            return True, total
        if not math.isfinite(total):
            return False, math.inf
        prev = seg
    return False, math.inf


def doubling_constant(B: YoungFunction, probe: np.ndarray | None = None) -> float:
    """sup B(2t)/B(t) on the probe grid (inf when not doubling)."""
    t = _PROBE if probe is None else probe
    v, v2 = np.asarray(B(t)), np.asarray(B(2.0 * t))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(v > 0, v2 / v, 1.0)
    return float(np.max(r))


# ---------------------------------------------------------------------------
# Holder-type inequalities on a cube
# ---------------------------------------------------------------------------


def holder_pair_slack(B: YoungFunction, Bc: YoungFunction, f, g, Q) -> tuple:
    """Slack of mean_Q |fg| <= 2 ||f||_B,Q ||g||_Bc,Q; returns (lhs, rhs).

    The factor 2 is the sharp constant for a Legendre-normalized conjugate
    pair under the Luxemburg normalization (constants f = g = 1 with
    B(t) = t^2 attain it).
    """
    from .lattice import average

    prodfn = f.with_values(np.abs(f.values) * np.abs(g.values), nonnegative=True)
    lhs = average(prodfn, Q)
    rhs = 2.0 * luxemburg_average(B, f, Q) * luxemburg_average(Bc, g, Q)
    return lhs, rhs


def generalized_holder_check(A: YoungFunction, B: YoungFunction, C: YoungFunction,
                             f, g, Q) -> tuple:
    """Three-function Holder ||fg||_C,Q <= 2 ||f||_A,Q ||g||_B,Q.

    Requires the inverse-product hypothesis A^-1 B^-1 <= C^-1 on the probe
    grid (up to 1e-9 relative); raises if the hypothesis probe fails so the
    caller can skip with a diagnostic.
    """
    rho = inverse_product_ratio(A, B, C)
    if not rho <= 1.0 + 1e-9:
        raise ValueError(f"inverse-product hypothesis fails: sup A^-1 B^-1 / C^-1 = {rho:.6g}")
    prodfn = f.with_values(np.abs(f.values) * np.abs(g.values), nonnegative=True)
    lhs = luxemburg_average(C, prodfn, Q)
    rhs = 2.0 * luxemburg_average(A, f, Q) * luxemburg_average(B, g, Q)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Label parsing for CLI configuration
# ---------------------------------------------------------------------------


def _split_args(s: str) -> list:
    """Split on top-level commas, respecting parentheses."""
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
    return [a.strip() for a in out if a.strip()]


def parse_young_label(label: str) -> YoungFunction:
    """Resolve labels like power:2, llogl:1, psi:(llogl:1,1,2,1.0), complementary:(power:2)."""
    label = label.strip()
    if label in ("t", "id", "power:1"):
        return young_power(1.0)
    if ":" not in label:
        raise ValueError(f"unresolvable Young-function label {label!r}")
    kind, _, rest = label.partition(":")
    rest = rest.strip()
    if rest.startswith("(") and rest.endswith(")"):
        rest = rest[1:-1]
    kind = kind.strip().lower()
    if kind == "power":
        return young_power(float(rest))
    if kind == "llogl":
        return young_llogl(float(rest))
    if kind == "psi":
        args = _split_args(rest)
        if len(args) != 4:
            raise ValueError("psi label needs (base,n,m,alpha)")
        return make_psi(parse_young_label(args[0]), int(args[1]), int(args[2]), float(args[3]))
    if kind == "complementary":
        return complementary(parse_young_label(rest))
    raise ValueError(f"unresolvable Young-function label {label!r}")
