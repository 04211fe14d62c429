"""
Builders for assignments, class tuples and random Jordan data
"""

from fractions import Fraction

from app.schemas.common import Flavor
from app.services.genericity import EigenvalueAssignment
from app.services.jordan_core import ClassTuple, JordanNormalForm

# rigid hypergeometric shape, generic values summing to zero
HYPERGEOMETRIC_VALUES = [
    ["1", "-1/3"],
    ["1/5", "-1/7"],
    ["-1/2", "-47/210"],
]


def diagonal_class(values, mults=None):
    mults = mults or [1] * len(values)
    return {"eigenvalues": [{"value": v, "mult": m} for v, m in zip(values, mults)]}


def assignment(flavor, rows):
    """rows: per matrix a list of (value, multiplicity)"""
    return EigenvalueAssignment(
        Flavor(flavor),
        tuple(tuple((Fraction(v), m) for v, m in row) for row in rows),
    )


def diagonal_tuple(flavor, rows):
    a = assignment(flavor, rows)
    forms = tuple(JordanNormalForm.diagonal([m for _, m in row]) for row in rows)
    return ClassTuple(Flavor(flavor), forms, a)


def hypergeometric_tuple(flavor="additive"):
    return diagonal_tuple(flavor, [[(v, 1) for v in values] for values in HYPERGEOMETRIC_VALUES])


def mv_forms(*mvs):
    return [JordanNormalForm.diagonal(mv) for mv in mvs]


def random_partition(rng, n):
    """Random composition of n, sorted"""
    parts = []
    rest = n
    while rest:
        part = int(rng.integers(1, rest + 1))
        parts.append(part)
        rest -= part
    return sorted(parts, reverse=True)


def random_form(rng, n):
    """Random multiplicities, random blocks per label"""
    mults = random_partition(rng, n)
    return JordanNormalForm.from_partitions([random_partition(rng, m) for m in mults])
