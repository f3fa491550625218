import numpy as np
import pytest

from submax import (
    GroundSetMismatchError,
    GroundSetTooLargeError,
    PartitionMatroid,
    Subset,
    UniformMatroid,
    as_partition,
    decoy_non_matroid,
    is_independent,
    matroid_rank_ceiling,
    random_partition_blocks,
    verify_matroid_axioms,
)
from conftest import ref_matroid_axioms


def test_uniform_independence_by_size():
    m = UniformMatroid(5, 2)
    assert m.is_independent(Subset.of(5, [0, 3]))
    assert not m.is_independent(Subset.of(5, [0, 1, 3]))
    assert m.is_independent(Subset.empty(5))


def test_partition_blocks_respected():
    m = PartitionMatroid.from_block_lists(4, [[0, 1], [2, 3]], [1, 1])
    assert not is_independent(m, Subset.of(4, [0, 1]))
    assert is_independent(m, Subset.of(4, [0, 2]))
    assert is_independent(m, Subset.empty(4))


def test_width_mismatch_rejected():
    with pytest.raises(GroundSetMismatchError):
        UniformMatroid(4, 2).is_independent(Subset.empty(5))


def test_constructor_validation():
    with pytest.raises(ValueError):
        UniformMatroid(3, 0)
    with pytest.raises(ValueError):
        UniformMatroid(3, 4)
    with pytest.raises(ValueError):
        PartitionMatroid.from_block_lists(4, [[0, 1], [1, 2, 3]], [1, 1])  # overlap
    with pytest.raises(ValueError):
        PartitionMatroid.from_block_lists(4, [[0, 1]], [1])  # does not cover
    with pytest.raises(ValueError):
        PartitionMatroid.from_block_lists(4, [[0, 1], [2, 3]], [3, 1])  # budget too big


def test_rank_ceilings():
    assert matroid_rank_ceiling(UniformMatroid(6, 3)) == 3
    m = PartitionMatroid.from_block_lists(6, [[0], [1, 2, 3], [4, 5]], [1, 2, 1])
    assert matroid_rank_ceiling(m) == 4
    single = PartitionMatroid.from_block_lists(3, [[0, 1, 2]], [3])
    assert matroid_rank_ceiling(single) == 3


def test_rank_ceiling_generic_oracle():
    class PairFree:
        n = 4

        def is_independent(self, s):
            return len(s) <= 2

    assert matroid_rank_ceiling(PairFree()) == 2


def test_uniform_equals_single_block_partition():
    for n, kappa in [(6, 2), (9, 4), (12, 5)]:
        uni = UniformMatroid(n, kappa)
        part = as_partition(uni)
        for mask in range(1 << n):
            s = Subset(n, mask)
            assert uni.is_independent(s) == part.is_independent(s)


def test_axioms_hold_for_uniform_and_partition():
    assert verify_matroid_axioms(UniformMatroid(4, 2)).holds
    m = PartitionMatroid.from_block_lists(4, [[0, 1], [2, 3]], [1, 1])
    assert verify_matroid_axioms(m).holds


def test_axioms_match_reference_on_random_matroids():
    rng = np.random.default_rng(17)
    for _ in range(10):
        n = int(rng.integers(3, 8))
        n_blocks = int(rng.integers(1, min(3, n) + 1))
        blocks, kappas = random_partition_blocks(n, n_blocks, rng)
        m = PartitionMatroid.from_block_lists(n, blocks, kappas)
        assert verify_matroid_axioms(m).holds == ref_matroid_axioms(m)


def test_decoy_caught_with_witness():
    decoy = decoy_non_matroid(4)
    report = verify_matroid_axioms(decoy)
    assert not report.holds
    s, r, _ = report.witness
    # Recheck the augmentation failure directly.
    assert decoy.is_independent(s) and decoy.is_independent(r)
    assert len(s) > len(r)
    for p in s - r:
        assert not decoy.is_independent(r.add(p))
    assert not ref_matroid_axioms(decoy)


def test_single_excluded_pair_is_a_matroid():
    # Dropping one pair only makes its endpoints parallel; the verifier must
    # accept it, which is why the decoy needs two overlapping exclusions.
    from submax import ExcludedPairsFamily
    family = ExcludedPairsFamily(4, 2, ((0, 1),))
    assert verify_matroid_axioms(family).holds
    assert ref_matroid_axioms(family)


def test_axioms_size_guard():
    with pytest.raises(GroundSetTooLargeError):
        verify_matroid_axioms(UniformMatroid(15, 3))


def test_downward_closure_violation_detected():
    class HoleFamily:
        n = 3

        def is_independent(self, s):
            # {0,1} independent but {0} missing: not downward closed.
            return s.mask in (0b000, 0b010, 0b011, 0b100)

    report = verify_matroid_axioms(HoleFamily())
    assert not report.holds
    s, r, _ = report.witness
    assert s <= r
