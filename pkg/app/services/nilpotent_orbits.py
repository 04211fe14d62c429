"""
Closure order of nilpotent orbits, the (s, l) operation and adjacency chains
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate, zip_longest
from typing import Iterable, Iterator, List, Tuple

from app.core.exceptions import (
    InvalidPartition,
    KTooLarge,
    NotComparable,
    PartsAbsent,
    SizeMismatch,
)
from app.core.logging import get_logger
from app.services.jordan_core import JordanNormalForm, Partition

logger = get_logger(__name__)


@dataclass(frozen=True)
class PaddedPartition:
    """Weakly decreasing non-negative parts; zero blocks are explicit"""

    parts: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in parts):
            raise InvalidPartition(f"parts must be non-negative: {parts}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @classmethod
    def of(cls, *parts: int) -> "PaddedPartition":
        return cls(tuple(parts))

    @classmethod
    def from_partition(cls, p: Partition, zeros: int = 0) -> "PaddedPartition":
        return cls(tuple(p.parts) + (0,) * zeros)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def block_count(self) -> int:
        return len(self.parts)

    @property
    def positive(self) -> Tuple[int, ...]:
        return tuple(p for p in self.parts if p > 0)

    def padded_to(self, blocks: int) -> "PaddedPartition":
        if blocks < self.block_count:
            raise KTooLarge(f"cannot pad {self.block_count} blocks down to {blocks}")
        return PaddedPartition(self.parts + (0,) * (blocks - self.block_count))

    def to_partition(self) -> Partition:
        return Partition(self.positive)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __repr__(self) -> str:
        return f"PaddedPartition{self.parts}"


@dataclass(frozen=True)
class SLOperation:
    """Replace blocks s and l by s+1 and l-1"""

    s: int
    l: int  # noqa: E741

    def __post_init__(self) -> None:
        if self.l < 1 or self.s < self.l:
            raise InvalidPartition(f"operation needs s >= l >= 1, got ({self.s},{self.l})")

    def as_tuple(self) -> Tuple[int, int]:
        return (self.s, self.l)


def _padded(p) -> PaddedPartition:
    if isinstance(p, PaddedPartition):
        return p
    if isinstance(p, Partition):
        return PaddedPartition.from_partition(p)
    return PaddedPartition(tuple(p))


def rank_sequence(p) -> List[int]:
    """Ranks of the powers D, D^2, ... of a nilpotent matrix with these blocks"""
    parts = _padded(p).parts
    ranks = []
    i = 1
    while True:
        rho = sum(max(b - i, 0) for b in parts)
        ranks.append(rho)
        if rho == 0:
            return ranks
        i += 1


def closure_leq(p1, p2) -> bool:
    """True iff the orbit of p1 lies in the closure of the orbit of p2"""
    a, b = _padded(p1), _padded(p2)
    if a.size != b.size:
        raise SizeMismatch(f"sizes differ: {a.size} vs {b.size}")
    return all(x <= y for x, y in zip_longest(rank_sequence(a), rank_sequence(b), fillvalue=0))


def dominates(p2, p1) -> bool:
    """Partial sums of p2 bound those of p1 (the dominance order)"""
    a, b = _padded(p1).positive, _padded(p2).positive
    if sum(a) != sum(b):
        raise SizeMismatch(f"sizes differ: {sum(a)} vs {sum(b)}")
    return all(
        x <= y
        for x, y in zip_longest(accumulate(a), accumulate(b), fillvalue=sum(a))
    )


def apply_sl(p, op: SLOperation, keep_zero: bool = False) -> PaddedPartition:
    parts = list(_padded(p).parts)
    try:
        i = parts.index(op.s)
        parts.pop(i)
        parts.remove(op.l)
    except ValueError:
        raise PartsAbsent(f"{tuple(_padded(p).parts)} does not contain blocks {op.s} and {op.l}")
    parts.append(op.s + 1)
    if op.l > 1 or keep_zero:
        parts.append(op.l - 1)
    return PaddedPartition(tuple(parts))


def _strip_common_largest(a: List[int], b: List[int]) -> Tuple[List[int], List[int]]:
    while a and b and a[0] == b[0]:
        a, b = a[1:], b[1:]
    return a, b


def _next_operation(current: List[int], target: List[int]) -> SLOperation:
    h1 = current[0]
    h = current[1]
    preferred = SLOperation(h1, h)
    if closure_leq(apply_sl(current, preferred), target):
        return preferred
    # any covering move that stays below the target
    distinct = sorted(set(current), reverse=True)
    for s in distinct:
        for l in distinct:  # noqa: E741
            if l > s or (l == s and current.count(s) < 2):
                continue
            op = SLOperation(s, l)
            if closure_leq(apply_sl(current, op), target):
                return op
    raise NotComparable(f"no operation leads from {tuple(current)} towards {tuple(target)}")


def adjacency_chain(p1, p2) -> List[SLOperation]:
    """
    Operations (s, l) leading from p1 up to p2 in the closure order.

    Common largest blocks are set aside; otherwise the largest block h1 and
    the second largest h of the current partition are merged by (h1, h).
    If that overshoots p2, the first other operation staying below p2 is
    taken. Chains are not minimal.
    """
    a, b = _padded(p1), _padded(p2)
    if not closure_leq(a, b):
        raise NotComparable(f"{a.positive} is not below {b.positive} in the closure order")
    current = list(a.positive)
    steps: List[SLOperation] = []
    while True:
        rest, target = _strip_common_largest(current, list(b.positive))
        if not rest:
            break
        op = _next_operation(rest, target)
        steps.append(op)
        current = list(apply_sl(current, op).positive)
    logger.debug(f"Chain {a.positive} -> {b.positive}: {[s.as_tuple() for s in steps]}")
    return steps


def replay(p, steps: Iterable[SLOperation]) -> List[PaddedPartition]:
    """Successive partitions visited by a chain, starting with p"""
    visited = [_padded(p)]
    for op in steps:
        visited.append(apply_sl(visited[-1], op))
    return visited


def bump_smallest(p, k: int) -> PaddedPartition:
    """Increase by one the k smallest parts, later positions first"""
    padded = _padded(p)
    if k < 0 or k > padded.block_count:
        raise KTooLarge(f"k={k} exceeds the {padded.block_count} blocks available")
    parts = list(padded.parts)
    for i in range(len(parts) - k, len(parts)):
        parts[i] += 1
    return PaddedPartition(tuple(parts))


def is_subordinate(j1: JordanNormalForm, j2: JordanNormalForm, strict: bool = False) -> bool:
    """
    j1 lies in the closure of the conjugacy class of j2: same labels with the
    same total multiplicity, and the blocks of every label are closure-below.
    """
    if j1.labels != j2.labels:
        return False
    for label in j1.labels:
        b1, b2 = j1.blocks(label), j2.blocks(label)
        if b1.size != b2.size or not closure_leq(b1, b2):
            return False
    return not strict or j1 != j2


def common_padding(p1, p2, extra: int = 0) -> Tuple[PaddedPartition, PaddedPartition]:
    """Pad both partitions with zero blocks to a common block count"""
    a, b = _padded(p1), _padded(p2)
    blocks = max(a.block_count, b.block_count) + extra
    return a.padded_to(blocks), b.padded_to(blocks)
