"""
Tests for the closure order on nilpotent orbits
"""

import itertools

import pytest

from app.core.exceptions import (
    InvalidPartition,
    KTooLarge,
    NotComparable,
    PartsAbsent,
    SizeMismatch,
)
from app.services.jordan_core import JordanNormalForm, Partition, partitions
from app.services.nilpotent_orbits import (
    PaddedPartition,
    SLOperation,
    adjacency_chain,
    apply_sl,
    bump_smallest,
    closure_leq,
    common_padding,
    dominates,
    is_subordinate,
    rank_sequence,
    replay,
)


def comparable_pairs(n):
    parts = list(partitions(n))
    for p1, p2 in itertools.product(parts, parts):
        if closure_leq(p1, p2):
            yield p1, p2


def operations(p):
    """Every (s, l) applicable to p"""
    distinct = sorted(set(p), reverse=True)
    for s in distinct:
        for l in distinct:  # noqa: E741
            if l > s or (l == s and list(p).count(s) < 2):
                continue
            yield SLOperation(s, l)


class TestRankSequence:
    """Ranks of powers of a nilpotent matrix"""

    def test_examples(self):
        assert rank_sequence(Partition.of(3, 1)) == [2, 1, 0]
        assert rank_sequence(Partition.of(1, 1, 1, 1)) == [0]
        assert rank_sequence(Partition.of(4)) == [3, 2, 1, 0]

    def test_zero_padding_is_invisible(self):
        assert rank_sequence(PaddedPartition.of(3, 1, 0, 0)) == rank_sequence(Partition.of(3, 1))


class TestClosureOrder:
    """closure_leq and the dominance order"""

    def test_examples(self):
        assert closure_leq(Partition.of(2, 2), Partition.of(3, 1))
        assert not closure_leq(Partition.of(3, 1), Partition.of(2, 2))
        assert closure_leq(Partition.of(2, 1, 1), Partition.of(2, 1, 1))

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            closure_leq(Partition.of(2), Partition.of(2, 1))

    def test_matches_dominance(self):
        """Rank sequences and partial sums give the same order"""
        for n in range(1, 11):
            parts = list(partitions(n))
            for p1, p2 in itertools.product(parts, parts):
                assert closure_leq(p1, p2) == dominates(p2, p1)

    def test_partial_order(self):
        """Reflexive, antisymmetric and transitive"""
        for n in range(1, 13):
            parts = list(partitions(n))
            leq = {(a, b): closure_leq(a, b) for a, b in itertools.product(parts, parts)}
            for a in parts:
                assert leq[(a, a)]
            for a, b in itertools.product(parts, parts):
                if a != b and leq[(a, b)]:
                    assert not leq[(b, a)]
            for a, b, c in itertools.product(parts, parts, parts):
                if leq[(a, b)] and leq[(b, c)]:
                    assert leq[(a, c)]


class TestApplySL:
    """The elementary operation (s, l)"""

    def test_examples(self):
        assert apply_sl(Partition.of(2, 2), SLOperation(2, 2)) == PaddedPartition.of(3, 1)
        assert apply_sl(Partition.of(2, 1, 1), SLOperation(2, 1)) == PaddedPartition.of(3, 1)
        assert apply_sl(Partition.of(3, 1, 1), SLOperation(3, 1)) == PaddedPartition.of(4, 1)

    def test_keep_zero(self):
        """The emptied block stays as an explicit zero on request"""
        image = apply_sl(Partition.of(2, 1), SLOperation(2, 1), keep_zero=True)
        assert image == PaddedPartition.of(3, 0)

    def test_absent_parts(self):
        with pytest.raises(PartsAbsent):
            apply_sl(Partition.of(3, 1), SLOperation(2, 1))
        with pytest.raises(PartsAbsent):
            apply_sl(Partition.of(2, 1), SLOperation(2, 2))

    def test_invalid_operation(self):
        with pytest.raises(InvalidPartition):
            SLOperation(1, 2)

    def test_strictly_increases(self):
        """Every operation moves strictly up in the closure order"""
        for n in range(2, 11):
            for p in partitions(n):
                for op in operations(p):
                    image = apply_sl(p, op).to_partition()
                    assert closure_leq(p, image)
                    assert image != p


class TestAdjacencyChain:
    """Chains of operations between comparable orbits"""

    def test_examples(self):
        chain = adjacency_chain(Partition.of(1, 1, 1, 1), Partition.of(4))
        assert [op.as_tuple() for op in chain] == [(1, 1), (2, 1), (3, 1)]
        chain = adjacency_chain(Partition.of(2, 2), Partition.of(3, 1))
        assert [op.as_tuple() for op in chain] == [(2, 2)]
        assert adjacency_chain(Partition.of(3, 2), Partition.of(3, 2)) == []

    def test_not_comparable(self):
        with pytest.raises(NotComparable):
            adjacency_chain(Partition.of(3, 1), Partition.of(2, 2))

    def test_replay_exhaustive(self):
        """Chains replay to the target and stay below it"""
        for n in range(1, 11):
            for p1, p2 in comparable_pairs(n):
                visited = replay(p1, adjacency_chain(p1, p2))
                assert visited[-1].positive == p2.parts
                for step in visited:
                    assert closure_leq(step, p2)


class TestBumpSmallest:
    """Increasing the k smallest blocks"""

    def test_examples(self):
        assert bump_smallest(PaddedPartition.of(2, 2, 1, 1), 3) == PaddedPartition.of(3, 2, 2, 2)
        assert bump_smallest(PaddedPartition.of(2, 0, 0), 2) == PaddedPartition.of(2, 1, 1)
        assert bump_smallest(PaddedPartition.of(4, 1), 0) == PaddedPartition.of(4, 1)

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            bump_smallest(PaddedPartition.of(2, 1), 3)

    def test_size_grows_by_k(self):
        bumped = bump_smallest(PaddedPartition.of(3, 3, 1, 0), 2)
        assert bumped.size == 9

    def test_monotone(self):
        """Bumping preserves the closure order of commonly padded partitions"""
        for n in range(1, 11):
            for p1, p2 in comparable_pairs(n):
                for k in range(0, 5):
                    a, b = common_padding(p1, p2, extra=k)
                    assert closure_leq(bump_smallest(a, k), bump_smallest(b, k))


class TestSubordinate:
    """Closure of conjugacy classes with several eigenvalues"""

    def test_blockwise(self):
        j1 = JordanNormalForm.from_partitions([[1, 1], [2, 2]])
        j2 = JordanNormalForm.from_partitions([[2], [3, 1]])
        assert is_subordinate(j1, j2)
        assert not is_subordinate(j2, j1)
        assert is_subordinate(j2, j2)
        assert not is_subordinate(j2, j2, strict=True)

    def test_different_multiplicities(self):
        j1 = JordanNormalForm.from_partitions([[1, 1], [1]])
        j2 = JordanNormalForm.from_partitions([[1], [1, 1]])
        assert not is_subordinate(j1, j2)
