"""Multilinear relaxation machinery: exact and sampled extension values,
gradients, the conditional-gradient ascent, and pipage rounding.

The exact paths tabulate the oracle once (2^n values, n <= 20) and afterwards
work purely on numpy arrays; the sampled paths draw membership sets from the
coordinates' Bernoulli distribution and reuse one common batch of draws across
coupled evaluations to cut variance.  Per-step sampling streams are derived
from (seed, step), so results do not depend on how work is scheduled.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import GroundSetTooLargeError, Subset, ValueOracle, tabulate
from .matroids import PartitionMatroid, as_partition


def _check_membership(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"membership vector must have shape ({n},)")
    if (x < -1e-12).any() or (x > 1.0 + 1e-12).any():
        raise ValueError("membership entries must lie in [0, 1]")
    return np.clip(x, 0.0, 1.0)


@dataclass(frozen=True)
class MatroidPolytope:
    """Box constraints plus per-block sum caps; the continuous relaxation of a
    partition matroid's independent sets."""

    matroid: PartitionMatroid

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.matroid.n,):
            return False
        if (x < -tol).any() or (x > 1.0 + tol).any():
            return False
        for block, kappa in zip(self.matroid.blocks, self.matroid.kappas):
            if x[list(block)].sum() > kappa + tol:
                return False
        return True

    def block_sums(self, x) -> tuple:
        x = np.asarray(x, dtype=float)
        return tuple(float(x[list(block)].sum()) for block in self.matroid.blocks)


def _bernoulli_weights(x: np.ndarray) -> np.ndarray:
    """w[mask] = prod_{p in mask} x_p * prod_{p not in mask} (1 - x_p)."""
    w = np.ones(1)
    for xp in x:
        w = np.concatenate((w * (1.0 - xp), w * xp))
    return w


def multilinear_exact(f: ValueOracle, x, table: np.ndarray | None = None) -> float:
    """Expected value of f on the random set that includes element p with
    probability x_p, computed by full enumeration (n <= 20)."""
    x = _check_membership(x, f.n)
    if table is None:
        table = tabulate(f)
    return float(_bernoulli_weights(x) @ table)


def _sample_masks(x: np.ndarray, k: int, rng: np.random.Generator) -> list:
    n = len(x)
    draws = rng.random((k, n)) < x
    if n <= 62:
        powers = 1 << np.arange(n, dtype=np.int64)
        return [int(m) for m in (draws * powers).sum(axis=1)]
    return [sum(1 << i for i in range(n) if row[i]) for row in draws]


def _value_range_bound(f: ValueOracle) -> float:
    """Upper bound on f used for interval half-widths: oracle metadata when
    present, otherwise the singleton sum (valid for normal submodular f)."""
    if f.value_bound is not None:
        return float(f.value_bound)
    return float(sum(f.value_of_mask(1 << p) for p in range(f.n)))


def multilinear_estimate(f: ValueOracle, x, k: int, rng: np.random.Generator, *,
                         confidence: float = 0.99) -> tuple[float, float]:
    """Sample mean of f over k membership draws plus a distribution-free
    (Hoeffding) half-width at the requested confidence."""
    if k < 1:
        raise ValueError("need at least one sample")
    x = _check_membership(x, f.n)
    masks = _sample_masks(x, k, rng)
    mean = float(np.mean([f.value_of_mask(m) for m in masks]))
    bound = _value_range_bound(f)
    half = bound * math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * k))
    return mean, half


def grad_exact(f: ValueOracle, x, table: np.ndarray | None = None) -> np.ndarray:
    """Exact extension gradient; component p is the expected gap between
    including and excluding p, i.e. F at x with x_p pinned to 1 minus F with
    x_p pinned to 0."""
    x = _check_membership(x, f.n)
    if table is None:
        table = tabulate(f)
    grad = np.empty(f.n)
    for p in range(f.n):
        hi = x.copy()
        hi[p] = 1.0
        lo = x.copy()
        lo[p] = 0.0
        grad[p] = _bernoulli_weights(hi) @ table - _bernoulli_weights(lo) @ table
    return grad


def cross_partial(f: ValueOracle, x, p: int, q: int,
                  table: np.ndarray | None = None) -> float:
    """Second mixed partial of the extension along coordinates p and q;
    nonpositive for submodular f."""
    if p == q:
        raise ValueError("cross partial needs two distinct coordinates")
    x = _check_membership(x, f.n)
    if table is None:
        table = tabulate(f)
    corners = []
    for bp, bq in ((1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)):
        y = x.copy()
        y[p], y[q] = bp, bq
        corners.append(float(_bernoulli_weights(y) @ table))
    return corners[0] - corners[1] - corners[2] + corners[3]


def grad_estimate(f: ValueOracle, x, k: int, rng: np.random.Generator) -> np.ndarray:
    """Monte-Carlo gradient using one shared batch of k membership draws; the
    inclusion/exclusion pair for each coordinate reuses the same draw."""
    if k < 1:
        raise ValueError("need at least one sample")
    x = _check_membership(x, f.n)
    masks = _sample_masks(x, k, rng)
    cache: dict[int, float] = {}

    def value(mask: int) -> float:
        if mask not in cache:
            cache[mask] = f.value_of_mask(mask)
        return cache[mask]

    grad = np.zeros(f.n)
    for mask in masks:
        for p in range(f.n):
            bit = 1 << p
            grad[p] += value(mask | bit) - value(mask & ~bit)
    return grad / k


def conditional_gradient_direction(g, matroid: PartitionMatroid) -> np.ndarray:
    """Vertex of the polytope maximizing the inner product with g: per block,
    the indicator of the budget-many largest components (ties to the lowest
    index).  Components must be nonnegative."""
    matroid = as_partition(matroid)
    g = np.asarray(g, dtype=float)
    if g.shape != (matroid.n,):
        raise ValueError(f"gradient must have shape ({matroid.n},)")
    if (g < -1e-12).any():
        raise ValueError("direction selection requires nonnegative components")
    v = np.zeros(matroid.n)
    for block, kappa in zip(matroid.blocks, matroid.kappas):
        ranked = sorted(block, key=lambda p: (-g[p], p))
        v[ranked[:kappa]] = 1.0
    return v


@dataclass(frozen=True)
class CGParams:
    """Step count T, samples-per-gradient K, base seed, and gradient mode."""

    T: int
    K: int = 1
    seed: int = 0
    mode: str = "exact"

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("need at least one step")
        if self.K < 1:
            raise ValueError("need at least one sample per gradient")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class AscentStep:
    """One trajectory record: step index, per-block coordinate sums, and the
    extension value (exact, or the sample mean in sampled mode)."""

    t: int
    block_sums: tuple
    value: float


def continuous_greedy(f: ValueOracle, matroid, params: CGParams):
    """Discretized conditional-gradient ascent of the multilinear extension.

    Starts at 0 and takes T steps of length 1/T toward the best polytope
    vertex for the current gradient; the result lands on the polytope
    boundary (per-block sums equal to the budgets).  Returns (x, trajectory).
    """
    matroid = as_partition(matroid)
    if matroid.n != f.n:
        raise ValueError("matroid and oracle ground sets differ")
    polytope = MatroidPolytope(matroid)
    table = tabulate(f) if params.mode == "exact" else None
    x = np.zeros(f.n)
    trajectory = []
    for t in range(params.T):
        if params.mode == "exact":
            g = grad_exact(f, x, table=table)
            g = np.maximum(g, 0.0)  # exact gradients of monotone f; clears -0.0 noise
        else:
            rng = np.random.default_rng([params.seed, t])
            g = np.maximum(grad_estimate(f, x, params.K, rng), 0.0)
        v = conditional_gradient_direction(g, matroid)
        x = np.minimum(x + v / params.T, 1.0)
        if params.mode == "exact":
            value = float(_bernoulli_weights(x) @ table)
        else:
            rng = np.random.default_rng([params.seed, params.T + t])
            value, _ = multilinear_estimate(f, x, params.K, rng)
        trajectory.append(AscentStep(t + 1, polytope.block_sums(x), value))
    return x, trajectory


def pipage_round(x, matroid, f: ValueOracle, *, exact: bool = True,
                 samples: int = 2000, rng: np.random.Generator | None = None,
                 sum_tol: float = 1e-6) -> Subset:
    """Round a fractional point with integral block sums to an independent set
    without losing extension value.

    While a block holds two fractional coordinates, mass is shifted along
    their exchange direction to whichever endpoint has the larger extension
    value; the extension is convex along that line, so the better endpoint is
    at least as good as the interior point.  ``exact`` compares endpoints with
    the enumerated extension; otherwise endpoint values are estimated from
    ``samples`` draws (stochastic rounding).
    """
    matroid = as_partition(matroid)
    x = _check_membership(x, f.n)
    sums = MatroidPolytope(matroid).block_sums(x)
    for total, kappa in zip(sums, matroid.kappas):
        if abs(total - kappa) > sum_tol:
            raise ValueError(
                f"block sum {total} is not the integral budget {kappa}; "
                "lossless rounding needs boundary points")
    table = tabulate(f) if exact else None
    if rng is None:
        rng = np.random.default_rng(0)

    def extension(point: np.ndarray) -> float:
        if exact:
            return float(_bernoulli_weights(point) @ table)
        mean, _ = multilinear_estimate(f, point, samples, rng)
        return mean

    frac_tol = 1e-9
    x = x.copy()
    while True:
        moved = False
        for block in matroid.blocks:
            frac = [p for p in block if frac_tol < x[p] < 1.0 - frac_tol]
            if len(frac) < 2:
                continue
            p, q = frac[0], frac[1]
            up = x.copy()
            if 1.0 - x[p] <= x[q]:
                up[q] = x[q] - (1.0 - x[p])
                up[p] = 1.0
            else:
                up[p] = x[p] + x[q]
                up[q] = 0.0
            down = x.copy()
            if x[p] <= 1.0 - x[q]:
                down[q] = x[q] + x[p]
                down[p] = 0.0
            else:
                down[p] = x[p] - (1.0 - x[q])
                down[q] = 1.0
            x = up if extension(up) >= extension(down) else down
            moved = True
        if not moved:
            break
    support = []
    for p in range(f.n):
        if x[p] > 0.5:
            support.append(p)
        if min(x[p], 1.0 - x[p]) > sum_tol:
            raise ValueError("rounding left a fractional coordinate; "
                             "block sums were not integral enough")
    return Subset.of(f.n, support)


def chernoff_success_probability(T: int, n: int, K: int) -> float:
    """Reported lower bound on the chance that K-sample gradient estimates
    keep the discretized ascent's guarantee: max(0, 1 - 2 T n e^{-K/(8 T^2)})."""
    if T < 1 or n < 1 or K < 0:
        raise ValueError("T and n must be positive, K nonnegative")
    return max(0.0, 1.0 - 2.0 * T * n * math.exp(-K / (8.0 * T * T)))
