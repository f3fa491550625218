"""Ground sets, bit-vector subsets, value oracles, and brute-force property checkers.

Subsets are immutable bit masks over an indexed universe {0, ..., n-1}; all set
algebra is exact integer arithmetic.  Oracles are pure (equal subsets give
equal values, no side effects), so they are safe to call from concurrent
workers, and the exhaustive checkers below may enumerate subsets in any order.
"""

import math
from dataclasses import dataclass

import numpy as np

EPS_VAL = 1e-9
N_MAX_EXHAUSTIVE = 14


class GroundSetTooLargeError(ValueError):
    """Exhaustive enumeration refused; pass an explicit sample budget instead."""


class GroundSetMismatchError(ValueError):
    """A subset's width disagrees with the structure it is used with."""


@dataclass(frozen=True)
class GroundSet:
    """Indexed finite universe; elements are the integers 0..n-1."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set needs at least one element")

    def elements(self) -> range:
        return range(self.n)

    def empty(self) -> "Subset":
        return Subset(self.n, 0)

    def full(self) -> "Subset":
        return Subset(self.n, (1 << self.n) - 1)


def _check_element(p: int, n: int) -> None:
    if not 0 <= p < n:
        raise IndexError(f"element {p} outside ground set of size {n}")


@dataclass(frozen=True)
class Subset:
    """Subset of {0..n-1} stored as a bit mask (bit p set <=> p is a member).

    Immutable and hashable; union/intersection/difference return new subsets
    and require matching widths.  Iteration is in ascending element order,
    which downstream tie-breaking relies on.
    """

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("subset width must be at least 1")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} does not fit width {self.n}")

    @classmethod
    def of(cls, n: int, elements) -> "Subset":
        mask = 0
        for p in elements:
            _check_element(p, n)
            mask |= 1 << p
        return cls(n, mask)

    @classmethod
    def empty(cls, n: int) -> "Subset":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, (1 << n) - 1)

    def add(self, p: int) -> "Subset":
        _check_element(p, self.n)
        return Subset(self.n, self.mask | (1 << p))

    def remove(self, p: int) -> "Subset":
        _check_element(p, self.n)
        return Subset(self.n, self.mask & ~(1 << p))

    def _check_same_width(self, other: "Subset") -> None:
        if self.n != other.n:
            raise GroundSetMismatchError(f"widths differ: {self.n} vs {other.n}")

    def __or__(self, other: "Subset") -> "Subset":
        self._check_same_width(other)
        return Subset(self.n, self.mask | other.mask)

    def __and__(self, other: "Subset") -> "Subset":
        self._check_same_width(other)
        return Subset(self.n, self.mask & other.mask)

    def __sub__(self, other: "Subset") -> "Subset":
        self._check_same_width(other)
        return Subset(self.n, self.mask & ~other.mask)

    def issubset(self, other: "Subset") -> bool:
        self._check_same_width(other)
        return self.mask & ~other.mask == 0

    def __le__(self, other: "Subset") -> bool:
        return self.issubset(other)

    def __contains__(self, p: int) -> bool:
        _check_element(p, self.n)
        return bool(self.mask >> p & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self):
        m = self.mask
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def elements(self) -> tuple:
        return tuple(self)

    def complement(self) -> "Subset":
        return Subset(self.n, self.mask ^ ((1 << self.n) - 1))

    def __repr__(self):
        return f"Subset({self.n}, {{{', '.join(map(str, self))}}})"


class ValueOracle:
    """Black-box set function f: 2^P -> R, queried one subset at a time.

    Subclasses implement ``value_of_mask``.  Oracles must be pure.  Metadata:
    ``value_bound`` is an upper bound on f (used by the sampling estimators to
    size confidence intervals) and ``curvature_hint`` an optional known total
    curvature.
    """

    def __init__(self, n: int, name: str = "f", value_bound: float | None = None,
                 curvature_hint: float | None = None):
        if n < 1:
            raise ValueError("oracle needs a nonempty ground set")
        self.n = n
        self.name = name
        self.value_bound = value_bound
        self.curvature_hint = curvature_hint

    def value_of_mask(self, mask: int) -> float:
        raise NotImplementedError

    def evaluate(self, subset: Subset) -> float:
        if subset.n != self.n:
            raise GroundSetMismatchError(
                f"subset width {subset.n} does not match oracle ground set {self.n}")
        return self.value_of_mask(subset.mask)

    def __call__(self, subset: Subset) -> float:
        return self.evaluate(subset)


class CallCounter(ValueOracle):
    """Wrapper that counts oracle evaluations; used for trace accounting."""

    def __init__(self, inner: ValueOracle):
        super().__init__(inner.n, inner.name, inner.value_bound, inner.curvature_hint)
        self.inner = inner
        self.calls = 0

    def value_of_mask(self, mask: int) -> float:
        self.calls += 1
        return self.inner.value_of_mask(mask)


def marginal_gain(f: ValueOracle, p: int, subset: Subset) -> float:
    """Gain of adding element p to the subset: f(S + p) - f(S); 0 if p already in S."""
    _check_element(p, f.n)
    if p in subset:
        return 0.0
    return f(subset.add(p)) - f(subset)


def tabulate(f: ValueOracle, max_n: int = 20) -> np.ndarray:
    """Evaluate f on every subset of the ground set; index = bit mask."""
    if f.n > max_n:
        raise GroundSetTooLargeError(
            f"tabulating 2^{f.n} values exceeds the 2^{max_n} ceiling")
    out = np.empty(1 << f.n)
    for m in range(1 << f.n):
        out[m] = f.value_of_mask(m)
    return out


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a property check.

    ``witness`` is a (S, R, p) triple with None in unused slots; it is present
    whenever ``holds`` is False and can be re-verified with direct oracle
    calls.  ``exhaustive`` is False for Monte-Carlo ("sampled, not proven")
    checks on large ground sets.
    """

    holds: bool
    witness: tuple | None
    checks_performed: int
    exhaustive: bool = True

    def __bool__(self) -> bool:
        return self.holds


def _resolve_ground(f: ValueOracle, ground: GroundSet | None) -> int:
    if ground is not None and ground.n != f.n:
        raise GroundSetMismatchError(
            f"ground set size {ground.n} does not match oracle ground set {f.n}")
    return f.n


def _compressed_index(n: int, p: int) -> np.ndarray:
    """Full-width masks with bit p clear, indexed by the (n-1)-bit squeeze."""
    m = np.arange(1 << (n - 1), dtype=np.int64)
    return ((m >> p) << (p + 1)) | (m & ((1 << p) - 1))


def _subset_min(values: np.ndarray, bits: int) -> np.ndarray:
    """mins[R] = min over S subset of R of values[S], by in-place DP over bits."""
    mins = values.copy()
    idx = np.arange(len(values), dtype=np.int64)
    for q in range(bits):
        step = 1 << q
        sel = (idx & step) != 0
        mins[sel] = np.minimum(mins[sel], mins[idx[sel] ^ step])
    return mins


def _random_mask(n: int, rng: np.random.Generator) -> int:
    bits = rng.random(n) < 0.5
    return sum(1 << i for i in range(n) if bits[i])


def check_normal(f: ValueOracle, ground: GroundSet | None = None, *,
                 eps: float = EPS_VAL) -> PropertyReport:
    """Check f(empty) == 0 within tolerance."""
    n = _resolve_ground(f, ground)
    empty = Subset.empty(n)
    ok = abs(f(empty)) <= eps
    return PropertyReport(ok, None if ok else (empty, None, None), 1)


def check_monotone(f: ValueOracle, ground: GroundSet | None = None, *,
                   eps: float = EPS_VAL, samples: int | None = None,
                   seed: int = 0) -> PropertyReport:
    """Check f(S + p) >= f(S) for all S and p not in S.

    Exhaustive for n <= N_MAX_EXHAUSTIVE (the single-element form is
    equivalent to full monotonicity by chaining); larger ground sets need an
    explicit ``samples`` budget and yield a sampled, not proven, report.
    """
    n = _resolve_ground(f, ground)
    if n > N_MAX_EXHAUSTIVE:
        if samples is None:
            raise GroundSetTooLargeError(
                f"n={n} exceeds the exhaustive ceiling {N_MAX_EXHAUSTIVE}; "
                "pass samples= for a Monte-Carlo check")
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            mask = _random_mask(n, rng)
            p = int(rng.integers(n))
            mask &= ~(1 << p)
            s = Subset(n, mask)
            if f(s.add(p)) < f(s) - eps:
                return PropertyReport(False, (s, s.add(p), p), samples, exhaustive=False)
        return PropertyReport(True, None, samples, exhaustive=False)

    tab = tabulate(f)
    checks = n * (1 << (n - 1))
    for p in range(n):
        lo = _compressed_index(n, p)
        hi = lo | (1 << p)
        bad = tab[hi] < tab[lo] - eps
        if bad.any():
            at = int(np.argmax(bad))
            s = Subset(n, int(lo[at]))
            return PropertyReport(False, (s, s.add(p), p), checks)
    return PropertyReport(True, None, checks)


def check_submodular(f: ValueOracle, ground: GroundSet | None = None, *,
                     eps: float = EPS_VAL, samples: int | None = None,
                     seed: int = 0) -> PropertyReport:
    """Check the diminishing-returns inequality for every nested pair.

    Verifies gain(p | S) >= gain(p | R) - eps for all S subset of R and
    p outside R.  Exhaustive for n <= N_MAX_EXHAUSTIVE via a subset-min
    transform (no pair is skipped); sampled otherwise.
    """
    n = _resolve_ground(f, ground)
    if n > N_MAX_EXHAUSTIVE:
        if samples is None:
            raise GroundSetTooLargeError(
                f"n={n} exceeds the exhaustive ceiling {N_MAX_EXHAUSTIVE}; "
                "pass samples= for a Monte-Carlo check")
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            p = int(rng.integers(n))
            r_mask = _random_mask(n, rng) & ~(1 << p)
            keep = rng.random(n) < 0.5
            s_mask = sum(1 << i for i in range(n) if (r_mask >> i & 1) and keep[i])
            s, r = Subset(n, s_mask), Subset(n, r_mask)
            if marginal_gain(f, p, s) < marginal_gain(f, p, r) - eps:
                return PropertyReport(False, (s, r, p), samples, exhaustive=False)
        return PropertyReport(True, None, samples, exhaustive=False)

    tab = tabulate(f)
    checks = n * 3 ** (n - 1)  # nested pairs covered by the transform
    for p in range(n):
        lo = _compressed_index(n, p)
        gains = tab[lo | (1 << p)] - tab[lo]
        mins = _subset_min(gains, n - 1)
        bad = gains - mins > eps
        if bad.any():
            r_small = int(np.argmax(bad))
            target = mins[r_small]
            s_small = r_small
            sub = r_small
            while True:
                if gains[sub] == target:
                    s_small = sub
                if sub == 0:
                    break
                sub = (sub - 1) & r_small
            s = Subset(n, int(lo[s_small]))
            r = Subset(n, int(lo[r_small]))
            return PropertyReport(False, (s, r, p), checks)
    return PropertyReport(True, None, checks)


@dataclass(frozen=True)
class Curvature:
    """Total curvature measurement.

    ``value`` is 1 - min over (p, R) of gain(p|R)/gain(p|empty).  Elements
    whose singleton value is ~0 make that ratio 0/0; they are listed in
    ``zero_value_singletons`` and force the conservative value 1.  ``witness``
    is a (p, R) pair attaining the minimum ratio when no element is flagged.
    """

    value: float
    zero_value_singletons: tuple
    witness: tuple | None

    def __float__(self) -> float:
        return self.value


def total_curvature(f: ValueOracle, ground: GroundSet | None = None, *,
                    eps: float = EPS_VAL) -> Curvature:
    """Measure total curvature by exhaustive enumeration (requires a normal,
    monotone, submodular oracle; behavior on other inputs is undefined)."""
    n = _resolve_ground(f, ground)
    if n > N_MAX_EXHAUSTIVE:
        raise GroundSetTooLargeError(
            f"n={n} exceeds the exhaustive ceiling {N_MAX_EXHAUSTIVE}")
    tab = tabulate(f)
    base = tab[0]
    flagged = []
    best_ratio = math.inf
    witness = None
    for p in range(n):
        denom = tab[1 << p] - base
        if denom <= eps:
            flagged.append(p)
            continue
        lo = _compressed_index(n, p)
        ratios = (tab[lo | (1 << p)] - tab[lo]) / denom
        at = int(np.argmin(ratios))
        if ratios[at] < best_ratio:
            best_ratio = float(ratios[at])
            witness = (p, Subset(n, int(lo[at])))
    if flagged:
        return Curvature(1.0, tuple(flagged), None)
    value = min(max(1.0 - best_ratio, 0.0), 1.0)
    return Curvature(value, (), witness)
