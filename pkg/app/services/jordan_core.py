"""
Partitions, Jordan normal forms and the correspondence between them

Eigenvalue labels are opaque integers; values are bound only through an
EigenvalueAssignment (label k of form j <-> k-th eigenvalue of matrix j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import TYPE_CHECKING, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from app.core.exceptions import InvalidPartition, InvalidTuple, SizeMismatch
from app.schemas.common import Flavor, JordanBlockEntry, JordanFormModel

if TYPE_CHECKING:
    from app.services.genericity import EigenvalueAssignment


@dataclass(frozen=True, eq=False)
class Partition:
    """Weakly decreasing positive integers"""

    parts: Tuple[int, ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(self.parts)

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise InvalidPartition(f"parts must be positive: {parts}")
        object.__setattr__(self, "parts", tuple(sorted(parts, reverse=True)))

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i]

    def __repr__(self) -> str:
        return f"Partition{self.parts}"


@dataclass(frozen=True, eq=False, repr=False)
class MultiplicityVector(Partition):
    """Eigenvalue multiplicities of a diagonalizable class"""

    @property
    def components(self) -> Tuple[int, ...]:
        return self.parts

    @property
    def length(self) -> int:
        return self.size

    def as_form(self) -> "JordanNormalForm":
        return JordanNormalForm.diagonal(self)

    def __repr__(self) -> str:
        return f"MV{self.parts}"


@dataclass(frozen=True)
class JordanNormalForm:
    """Size n plus block partitions per eigenvalue label"""

    n: int
    entries: Tuple[Tuple[int, Partition], ...]

    def __post_init__(self) -> None:
        entries = tuple(
            sorted(
                (
                    (int(label), blocks if isinstance(blocks, Partition) else Partition(tuple(blocks)))
                    for label, blocks in self.entries
                ),
                key=lambda entry: entry[0],
            )
        )
        labels = [label for label, _ in entries]
        if len(set(labels)) != len(labels):
            raise InvalidTuple(f"eigenvalue labels must be distinct: {labels}")
        if any(len(blocks) == 0 for _, blocks in entries):
            raise InvalidTuple("every label needs at least one block")
        total = sum(blocks.size for _, blocks in entries)
        if total != self.n:
            raise SizeMismatch(f"blocks sum to {total}, expected n={self.n}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_blocks(cls, blocks: Mapping[int, Iterable[int]]) -> "JordanNormalForm":
        entries = tuple((label, Partition(tuple(b))) for label, b in blocks.items())
        return cls(sum(p.size for _, p in entries), entries)

    @classmethod
    def from_partitions(cls, partitions: Sequence[Iterable[int]]) -> "JordanNormalForm":
        """Labels 0..k-1 in the given order"""
        return cls.from_blocks({k: p for k, p in enumerate(partitions)})

    @classmethod
    def diagonal(cls, multiplicities: Iterable[int]) -> "JordanNormalForm":
        return cls.from_partitions([[1] * m for m in multiplicities])

    @property
    def labels(self) -> List[int]:
        return [label for label, _ in self.entries]

    @property
    def is_diagonal(self) -> bool:
        return all(b == 1 for _, blocks in self.entries for b in blocks)

    def blocks(self, label: int) -> Partition:
        for lab, blocks in self.entries:
            if lab == label:
                return blocks
        return Partition()

    def block_counts(self) -> Dict[int, int]:
        return {label: len(blocks) for label, blocks in self.entries}

    def to_model(self) -> JordanFormModel:
        return JordanFormModel(
            n=self.n,
            entries=[
                JordanBlockEntry(label=label, blocks=list(blocks.parts))
                for label, blocks in self.entries
            ],
        )

    @classmethod
    def from_model(cls, model: JordanFormModel) -> "JordanNormalForm":
        return cls(model.n, tuple((e.label, Partition(tuple(e.blocks))) for e in model.entries))


@dataclass(frozen=True)
class ClassTuple:
    """(p+1)-tuple of Jordan normal forms of equal size"""

    flavor: Flavor
    forms: Tuple[JordanNormalForm, ...]
    eigenvalues: Optional["EigenvalueAssignment"] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        forms = tuple(self.forms)
        object.__setattr__(self, "forms", forms)
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if len(forms) < 2:
            raise InvalidTuple("a class tuple needs at least two forms")
        sizes = {f.n for f in forms}
        if len(sizes) != 1:
            raise SizeMismatch(f"forms have different sizes: {sorted(sizes)}")
        if self.eigenvalues is not None:
            self._check_binding()

    def _check_binding(self) -> None:
        a = self.eigenvalues
        if a.flavor != self.flavor:
            raise InvalidTuple("eigenvalue flavor differs from tuple flavor")
        if len(a.values) != len(self.forms) or a.n != self.n:
            raise InvalidTuple("eigenvalue assignment does not fit the forms")
        for j, form in enumerate(self.forms):
            mults = a.multiplicities(j)
            if sorted(form.labels) != list(range(len(mults))):
                raise InvalidTuple(f"form {j}: labels must be 0..{len(mults) - 1}")
            for label, m in enumerate(mults):
                if form.blocks(label).size != m:
                    raise InvalidTuple(
                        f"form {j}, label {label}: blocks sum to "
                        f"{form.blocks(label).size}, multiplicity is {m}"
                    )

    @property
    def n(self) -> int:
        return self.forms[0].n

    @property
    def p_plus_1(self) -> int:
        return len(self.forms)

    def with_eigenvalues(self, eigenvalues: Optional["EigenvalueAssignment"]) -> "ClassTuple":
        return ClassTuple(self.flavor, self.forms, eigenvalues)


def partitions(n: int, largest: Optional[int] = None) -> Iterator[Partition]:
    """All partitions of n, reverse lexicographic"""
    if n == 0:
        yield Partition()
        return
    top = n if largest is None else min(n, largest)
    for first in range(top, 0, -1):
        for rest in partitions(n - first, first):
            yield Partition((first,) + rest.parts)


def dual_partition(p: Partition) -> Partition:
    """q_k = #{j : p_j >= k}"""
    if not p.parts:
        return Partition()
    return Partition(tuple(sum(1 for part in p if part >= k) for k in range(1, p[0] + 1)))


def to_diagonal(j: JordanNormalForm) -> MultiplicityVector:
    """Disjoint sum of the dual partitions of every label"""
    components: List[int] = []
    for _, blocks in j.entries:
        components.extend(dual_partition(blocks).parts)
    return MultiplicityVector(tuple(components))


def to_single_eigenvalue(j: JordanNormalForm) -> Partition:
    """k-th part is the sum over labels of the k-th largest block"""
    depth = max(len(blocks) for _, blocks in j.entries)
    parts = [0] * depth
    for _, blocks in j.entries:
        for k, b in enumerate(blocks):
            parts[k] += b
    return Partition(tuple(parts))


def rank_defect(j: JordanNormalForm) -> int:
    """r(J) = n minus the largest number of blocks of one eigenvalue"""
    return j.n - max(len(blocks) for _, blocks in j.entries)


def orbit_dimension(j: JordanNormalForm) -> int:
    """d(J) = n^2 minus the centralizer dimension"""
    centralizer = 0
    for _, blocks in j.entries:
        centralizer += sum((2 * i + 1) * b for i, b in enumerate(blocks))
    return j.n * j.n - centralizer


def diagonal_pmv(forms: Sequence[JordanNormalForm]) -> List[MultiplicityVector]:
    return [to_diagonal(f) for f in forms]


def eigenvalue_pmv(forms: Sequence[JordanNormalForm]) -> List[MultiplicityVector]:
    """Total multiplicity of every label, per form"""
    return [MultiplicityVector(tuple(blocks.size for _, blocks in f.entries)) for f in forms]


def pmv_gcd(pmv: Sequence[Partition]) -> int:
    components = [c for mv in pmv for c in mv if c]
    return reduce(gcd, components, 0)


def block_count_gcd(t: ClassTuple) -> int:
    """The number d: gcd of the counts of blocks per (matrix, label, size)"""
    counts: List[int] = []
    for form in t.forms:
        for _, blocks in form.entries:
            for size in set(blocks):
                counts.append(sum(1 for b in blocks if b == size))
    return reduce(gcd, counts, 0)
