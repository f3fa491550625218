"""Independence oracles: uniform and partition matroids plus an axiom verifier.

Anything exposing ``n`` and ``is_independent(Subset) -> bool`` is accepted
wherever a matroid is expected; the two concrete classes get fast counting
paths.  Matroids are immutable after construction and independence checks are
pure.
"""

from dataclasses import dataclass, field

from .core import (
    N_MAX_EXHAUSTIVE,
    GroundSet,
    GroundSetMismatchError,
    GroundSetTooLargeError,
    PropertyReport,
    Subset,
)


def _check_width(matroid, subset: Subset) -> None:
    if subset.n != matroid.n:
        raise GroundSetMismatchError(
            f"subset width {subset.n} does not match matroid ground set {matroid.n}")


@dataclass(frozen=True)
class UniformMatroid:
    """All subsets of size at most kappa are independent."""

    n: int
    kappa: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ground set needs at least one element")
        if not 1 <= self.kappa <= self.n:
            raise ValueError(f"kappa must be in [1, {self.n}], got {self.kappa}")

    def is_independent(self, subset: Subset) -> bool:
        _check_width(self, subset)
        return len(subset) <= self.kappa

    def rank_ceiling(self) -> int:
        return self.kappa


@dataclass(frozen=True)
class PartitionMatroid:
    """Per-block budgets over a disjoint partition of the ground set.

    ``blocks`` must be pairwise disjoint and cover {0..n-1}; each budget
    satisfies 1 <= kappas[i] <= |blocks[i]|.
    """

    blocks: tuple
    kappas: tuple
    n: int = field(init=False)

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("partition needs at least one block")
        if len(self.blocks) != len(self.kappas):
            raise ValueError("one budget per block required")
        n = self.blocks[0].n
        union = 0
        for blk, kappa in zip(self.blocks, self.kappas):
            if blk.n != n:
                raise GroundSetMismatchError("blocks must share one ground set width")
            if union & blk.mask:
                raise ValueError("blocks must be pairwise disjoint")
            union |= blk.mask
            if not 1 <= kappa <= len(blk):
                raise ValueError(
                    f"budget {kappa} outside [1, {len(blk)}] for a block of size {len(blk)}")
        if union != (1 << n) - 1:
            raise ValueError("blocks must cover the whole ground set")
        object.__setattr__(self, "n", n)

    @classmethod
    def from_block_lists(cls, n: int, blocks, kappas) -> "PartitionMatroid":
        return cls(tuple(Subset.of(n, b) for b in blocks), tuple(int(k) for k in kappas))

    def is_independent(self, subset: Subset) -> bool:
        _check_width(self, subset)
        return all(
            (subset.mask & blk.mask).bit_count() <= kappa
            for blk, kappa in zip(self.blocks, self.kappas)
        )

    def rank_ceiling(self) -> int:
        return sum(self.kappas)

    def block_index_of(self, p: int) -> int:
        for i, blk in enumerate(self.blocks):
            if p in blk:
                return i
        raise IndexError(f"element {p} outside ground set of size {self.n}")


def as_partition(matroid) -> PartitionMatroid:
    """Lift a uniform matroid to its single-block partition form (identity on
    partition matroids)."""
    if isinstance(matroid, PartitionMatroid):
        return matroid
    if isinstance(matroid, UniformMatroid):
        return PartitionMatroid((Subset.full(matroid.n),), (matroid.kappa,))
    raise TypeError(f"cannot lift {type(matroid).__name__} to a partition matroid")


def is_independent(matroid, subset: Subset) -> bool:
    """Independence test through whatever oracle the structure provides."""
    return matroid.is_independent(subset)


def matroid_rank_ceiling(matroid) -> int:
    """Largest independent-set size: kappa for uniform, sum of budgets for
    partition, greedy augmentation for a generic independence oracle."""
    ceiling = getattr(matroid, "rank_ceiling", None)
    if ceiling is not None:
        return ceiling()
    current = Subset.empty(matroid.n)
    for p in range(matroid.n):
        grown = current.add(p)
        if matroid.is_independent(grown):
            current = grown
    return len(current)


@dataclass(frozen=True)
class ExcludedPairsFamily:
    """Downward-closed family: sets of size <= budget avoiding every excluded
    pair.  Not a matroid in general; serves as the verifier decoy."""

    n: int
    budget: int
    excluded_pairs: tuple

    def __post_init__(self):
        for a, b in self.excluded_pairs:
            if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"bad excluded pair ({a}, {b})")

    def is_independent(self, subset: Subset) -> bool:
        _check_width(self, subset)
        if len(subset) > self.budget:
            return False
        return not any(a in subset and b in subset for a, b in self.excluded_pairs)


def decoy_non_matroid(n: int = 4) -> ExcludedPairsFamily:
    """A planted non-matroid: size-2 family minus the pairs {0,1} and {0,2}.

    Removing a single pair leaves a genuine matroid (the two elements just
    become parallel), so the decoy removes two pairs sharing element 0, which
    breaks augmentation: {1,2} and {0} are both in the family but neither
    extension of {0} by 1 or 2 is.
    """
    if n < 3:
        raise ValueError("the decoy needs at least three elements")
    return ExcludedPairsFamily(n, 2, ((0, 1), (0, 2)))


def verify_matroid_axioms(matroid, ground: GroundSet | None = None) -> PropertyReport:
    """Exhaustively verify nonemptiness, downward closure, and augmentation.

    Witnesses: downward-closure failure gives (S, R, None) with S an
    independent R minus one element that the oracle rejects; augmentation
    failure gives (S, R, None) with |S| > |R| and no valid extension of R.
    """
    n = matroid.n
    if ground is not None and ground.n != n:
        raise GroundSetMismatchError("ground set does not match matroid")
    if n > N_MAX_EXHAUSTIVE:
        raise GroundSetTooLargeError(
            f"n={n} exceeds the exhaustive ceiling {N_MAX_EXHAUSTIVE}")

    full = 1 << n
    indep = [matroid.is_independent(Subset(n, m)) for m in range(full)]
    checks = full

    if not indep[0]:
        return PropertyReport(False, (Subset.empty(n), None, None), checks)

    # Downward closure via single-element removals (chains cover the rest).
    for m in range(full):
        if not indep[m]:
            continue
        rest = m
        while rest:
            low = rest & -rest
            rest ^= low
            checks += 1
            if not indep[m ^ low]:
                return PropertyReport(False, (Subset(n, m ^ low), Subset(n, m), None), checks)

    # Augmentation: group independent sets by size; ext[m] = elements whose
    # addition keeps m independent.
    by_size: dict[int, list[int]] = {}
    ext = {}
    for m in range(full):
        if not indep[m]:
            continue
        by_size.setdefault(m.bit_count(), []).append(m)
        grow = 0
        for p in range(n):
            bit = 1 << p
            if not m & bit and indep[m | bit]:
                grow |= bit
        ext[m] = grow
    sizes = sorted(by_size)
    for small_size in sizes:
        for big_size in sizes:
            if big_size <= small_size:
                continue
            for r in by_size[small_size]:
                grow = ext[r]
                for s in by_size[big_size]:
                    checks += 1
                    if s & ~r & grow == 0:
                        return PropertyReport(
                            False, (Subset(n, s), Subset(n, r), None), checks)
    return PropertyReport(True, None, checks)
