"""
Exact eigenvalue assignments and the non-genericity relations between them
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import settings
from app.core.exceptions import BudgetExceeded, InvalidTuple, NonSimplePMV, RetriesExhausted
from app.core.logging import get_logger
from app.schemas.common import Flavor
from app.schemas.genericity import GenericityClass, RelationWitness
from app.services.jordan_core import Partition, pmv_gcd

logger = get_logger(__name__)

_RATIONAL = r"[+-]?\d+(?:/\d+)?"
_COMPLEX_RE = re.compile(rf"^\s*({_RATIONAL})?\s*(?:([+-])\s*(\d+(?:/\d+)?)?\s*i)?\s*$")

Number = Union[int, Fraction, "ExactComplexRational"]


@dataclass(frozen=True)
class ExactComplexRational:
    """Gaussian rational re + im*i with exact arithmetic"""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, value: Number) -> "ExactComplexRational":
        if isinstance(value, ExactComplexRational):
            return value
        return cls(Fraction(value))

    @classmethod
    def parse(cls, text: str) -> "ExactComplexRational":
        """Accepts 'p/q', 'p/q+r/s i', 'r/s i'"""
        cleaned = text.strip()
        if cleaned.endswith("i") and not re.search(r"[+-]", cleaned.lstrip("+-")):
            imag = cleaned[:-1].strip() or "1"
            if imag in ("+", "-"):
                imag += "1"
            return cls(Fraction(0), Fraction(imag))
        match = _COMPLEX_RE.match(cleaned)
        if not match or not (match.group(1) or match.group(2)):
            raise InvalidTuple(f"cannot parse exact value {text!r}")
        real = Fraction(match.group(1)) if match.group(1) else Fraction(0)
        imag = Fraction(0)
        if match.group(2):
            imag = Fraction(match.group(3) or "1")
            if match.group(2) == "-":
                imag = -imag
        return cls(real, imag)

    def __add__(self, other: Number) -> "ExactComplexRational":
        o = self.coerce(other)
        return ExactComplexRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "ExactComplexRational":
        return ExactComplexRational(-self.re, -self.im)

    def __sub__(self, other: Number) -> "ExactComplexRational":
        return self + (-self.coerce(other))

    def __rsub__(self, other: Number) -> "ExactComplexRational":
        return self.coerce(other) - self

    def __mul__(self, other: Number) -> "ExactComplexRational":
        o = self.coerce(other)
        return ExactComplexRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Union[int, Fraction]) -> "ExactComplexRational":
        return ExactComplexRational(self.re / other, self.im / other)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def mod_one(self) -> "ExactComplexRational":
        """Representative modulo Z (real part in [0, 1))"""
        return ExactComplexRational(self.re % 1, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        real = str(self.re)
        if self.im == 0:
            return real
        sign = "-" if self.im < 0 else "+"
        return f"{real}{sign}{abs(self.im)} i"


@dataclass(frozen=True)
class EigenvalueAssignment:
    """
    Exact eigenvalues with multiplicities per matrix index.

    For the multiplicative flavor the stored values are exponents mu with
    sigma = exp(2 pi i mu); the identity eigenvalue is exponent 0.
    """

    flavor: Flavor
    values: Tuple[Tuple[Tuple[ExactComplexRational, int], ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        values = tuple(
            tuple((ExactComplexRational.coerce(v), int(m)) for v, m in entry)
            for entry in self.values
        )
        object.__setattr__(self, "values", values)
        if not values:
            raise InvalidTuple("assignment needs at least one matrix")
        sizes = {sum(m for _, m in entry) for entry in values}
        if len(sizes) != 1:
            raise InvalidTuple(f"multiplicities differ between matrices: {sorted(sizes)}")
        for j, entry in enumerate(values):
            if any(m < 1 for _, m in entry):
                raise InvalidTuple(f"matrix {j}: multiplicities must be positive")
            # multiplicative values are exponents, distinct modulo Z
            keys = [self._key(v) for v, _ in entry]
            if len(set(keys)) != len(keys):
                raise InvalidTuple(f"matrix {j}: eigenvalues must be pairwise distinct")

    def _key(self, value: ExactComplexRational) -> ExactComplexRational:
        return value.mod_one() if self.flavor == Flavor.MULTIPLICATIVE else value

    @property
    def n(self) -> int:
        return sum(m for _, m in self.values[0])

    def multiplicities(self, j: int) -> List[int]:
        return [m for _, m in self.values[j]]

    def eigenvalues(self, j: int) -> List[ExactComplexRational]:
        return [v for v, _ in self.values[j]]

    def pmv(self) -> List[Partition]:
        return [Partition(tuple(self.multiplicities(j))) for j in range(len(self.values))]

    def total(self) -> ExactComplexRational:
        """Weighted sum of all eigenvalues (exponents)"""
        acc = ExactComplexRational()
        for entry in self.values:
            for v, m in entry:
                acc = acc + v * m
        return acc

    def complex_values(self, j: int) -> List[complex]:
        """Numerical eigenvalues; exp(2 pi i mu) for the multiplicative flavor"""
        if self.flavor == Flavor.MULTIPLICATIVE:
            return [complex(np.exp(2j * np.pi * complex(v))) for v in self.eigenvalues(j)]
        return [complex(v) for v in self.eigenvalues(j)]

    def scaled(self, c: Union[int, Fraction]) -> "EigenvalueAssignment":
        return EigenvalueAssignment(
            self.flavor, tuple(tuple((v * c, m) for v, m in entry) for entry in self.values)
        )


def check_sum_condition(a: EigenvalueAssignment) -> bool:
    """Sum of eigenvalues is 0, resp. the exponent sum is an integer"""
    total = a.total()
    if a.flavor == Flavor.MULTIPLICATIVE:
        return total.is_integer()
    return total.is_zero()


def default_s_range(n: int, strict: bool = False) -> Tuple[int, int]:
    """1..n-1 by default, 2..n-1 for the literal 1 < s < n"""
    return (2 if strict else 1, n - 1)


def _sub_multiplicities(mults: Sequence[int], s: int) -> Iterator[Tuple[int, ...]]:
    if not mults:
        if s == 0:
            yield ()
        return
    head, rest = mults[0], mults[1:]
    capacity = sum(rest)
    for c in range(min(head, s), -1, -1):
        if s - c <= capacity:
            for tail in _sub_multiplicities(rest, s - c):
                yield (c,) + tail


def _choice_sum(values: Sequence[ExactComplexRational], choice: Sequence[int]) -> ExactComplexRational:
    acc = ExactComplexRational()
    for v, c in zip(values, choice):
        if c:
            acc = acc + v * c
    return acc


def enumeration_count(a: EigenvalueAssignment, s_min: int, s_max: int) -> int:
    """Number of candidate relations the enumeration would visit"""
    total = 0
    for s in range(s_min, s_max + 1):
        total += prod(
            sum(1 for _ in _sub_multiplicities(a.multiplicities(j), s))
            for j in range(len(a.values))
        )
    return total


def violated_relations(
    a: EigenvalueAssignment,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    modulo_integers: Optional[bool] = None,
    budget: Optional[int] = None,
    limit: Optional[int] = None,
) -> List[RelationWitness]:
    """
    All relations (gamma) that hold, for subset sizes s_min..s_max.

    Choices are sub-multiplicity vectors per matrix (equal eigenvalues are
    interchangeable). The test is an exact zero sum, or an integer sum when
    ``modulo_integers`` (the default for the multiplicative flavor).
    """
    n = a.n
    lo, hi = default_s_range(n)
    s_min = lo if s_min is None else s_min
    s_max = hi if s_max is None else s_max
    if n == 1 or s_max < s_min:
        return []
    if not 1 <= s_min <= s_max <= n - 1:
        raise InvalidTuple(f"subset sizes must satisfy 1 <= {s_min} <= {s_max} <= {n - 1}")
    if modulo_integers is None:
        modulo_integers = a.flavor == Flavor.MULTIPLICATIVE
    budget = settings.ENUMERATION_BUDGET if budget is None else budget

    count = enumeration_count(a, s_min, s_max)
    if count > budget:
        logger.warning(f"Refusing enumeration of {count} relations (budget {budget})")
        raise BudgetExceeded(
            f"{count} candidate relations exceed the budget of {budget}",
            details={"count": count, "budget": budget},
        )

    def key(x: ExactComplexRational) -> ExactComplexRational:
        return x.mod_one() if modulo_integers else x

    witnesses: List[RelationWitness] = []
    p_plus_1 = len(a.values)
    for s in range(s_min, s_max + 1):
        per_matrix = []
        for j in range(p_plus_1):
            values = a.eigenvalues(j)
            per_matrix.append(
                [(c, _choice_sum(values, c)) for c in _sub_multiplicities(a.multiplicities(j), s)]
            )
        # the last matrix is matched through a table of partial sums
        table: Dict[ExactComplexRational, List[Tuple[Tuple[int, ...], ExactComplexRational]]] = defaultdict(list)
        for choice, total in per_matrix[-1]:
            table[key(total)].append((choice, total))
        for combo in itertools.product(*per_matrix[:-1]):
            partial = ExactComplexRational()
            for _, total in combo:
                partial = partial + total
            for choice, total in table.get(key(-partial), ()):
                witnesses.append(
                    RelationWitness(
                        s=s,
                        choices=[list(c) for c, _ in combo] + [list(choice)],
                        total=str(partial + total),
                    )
                )
                if limit is not None and len(witnesses) >= limit:
                    return witnesses
    logger.debug(f"Enumerated {count} candidate relations, {len(witnesses)} hold")
    return witnesses


def complement(witness: RelationWitness, a: EigenvalueAssignment) -> RelationWitness:
    """Replace every chosen set by its complement"""
    choices = [
        [m - c for m, c in zip(a.multiplicities(j), choice)]
        for j, choice in enumerate(witness.choices)
    ]
    total = ExactComplexRational()
    for j, choice in enumerate(choices):
        total = total + _choice_sum(a.eigenvalues(j), choice)
    return RelationWitness(s=a.n - witness.s, choices=choices, total=str(total))


def is_non_resonant(a: EigenvalueAssignment) -> bool:
    """No two eigenvalues of one matrix differ by a non-zero integer"""
    for j in range(len(a.values)):
        for u, v in itertools.combinations(a.eigenvalues(j), 2):
            if (u - v).is_integer():
                return False
    return True


def classify(
    a: EigenvalueAssignment,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    budget: Optional[int] = None,
) -> GenericityClass:
    """Generic / strongly generic / non-resonant flags"""
    generic = not violated_relations(a, s_min, s_max, budget=budget, limit=1)
    if a.flavor == Flavor.MULTIPLICATIVE:
        return GenericityClass(generic=generic)
    strongly = not violated_relations(
        a, s_min, s_max, modulo_integers=True, budget=budget, limit=1
    )
    return GenericityClass(
        generic=generic, strongly_generic=strongly, non_resonant=is_non_resonant(a)
    )


def _primes_between(lo: int, hi: int) -> List[int]:
    sieve = np.ones(hi + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(hi ** 0.5) + 1):
        if sieve[k]:
            sieve[k * k :: k] = False
    return [int(p) for p in np.nonzero(sieve)[0] if p >= lo]


def sample_generic(
    pmv: Sequence[Partition],
    flavor: Flavor = Flavor.ADDITIVE,
    seed: int = 0,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    exponent_sum: int = 1,
    max_retries: Optional[int] = None,
    budget: Optional[int] = None,
) -> EigenvalueAssignment:
    """
    Random exact eigenvalues with the given multiplicities, verified generic.

    Values are p/q with q a random prime above SAMPLER_MIN_PRIME; the last
    eigenvalue of the last matrix is solved for so that the sum condition
    holds (exponent sum ``exponent_sum`` for the multiplicative flavor).
    """
    flavor = Flavor(flavor)
    mults = [list(mv) for mv in pmv]
    if len({sum(m) for m in mults}) != 1:
        raise InvalidTuple("multiplicity vectors must have a common length")
    if flavor == Flavor.ADDITIVE and pmv_gcd(pmv) > 1:
        raise NonSimplePMV(
            f"gcd {pmv_gcd(pmv)} of the multiplicities: no generic eigenvalues exist"
        )
    retries = settings.SAMPLER_MAX_RETRIES if max_retries is None else max_retries
    primes = _primes_between(settings.SAMPLER_MIN_PRIME, settings.SAMPLER_MAX_PRIME)
    rng = np.random.default_rng(seed)

    def draw() -> Fraction:
        q = primes[int(rng.integers(len(primes)))]
        if flavor == Flavor.MULTIPLICATIVE:
            return Fraction(int(rng.integers(1, q)), q)
        return Fraction(int(rng.integers(-q, q + 1)), q)

    for attempt in range(retries):
        values = [[draw() for _ in m] for m in mults]
        rest = sum(
            (v * m for j, row in enumerate(values) for k, (v, m) in enumerate(zip(row, mults[j]))
             if (j, k) != (len(mults) - 1, len(mults[-1]) - 1)),
            Fraction(0),
        )
        target = Fraction(exponent_sum) if flavor == Flavor.MULTIPLICATIVE else Fraction(0)
        values[-1][-1] = (target - rest) / mults[-1][-1]
        try:
            candidate = EigenvalueAssignment(
                flavor,
                tuple(tuple(zip(row, m)) for row, m in zip(values, mults)),
            )
        except InvalidTuple:
            continue
        if not check_sum_condition(candidate):
            continue
        if violated_relations(candidate, s_min, s_max, budget=budget, limit=1):
            logger.debug(f"Sample attempt {attempt} hit a relation, retrying")
            continue
        logger.info(f"Sampled generic eigenvalues after {attempt + 1} attempt(s)")
        return candidate
    raise RetriesExhausted(f"no generic assignment found in {retries} attempts")
