"""
Problem files: conversion to class tuples with eigenvalues, and the report
builders shared by the command line and the HTTP routes
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import ValidationError

from app.core.exceptions import InvalidTuple
from app.schemas.common import Mode
from app.schemas.decision import Decision
from app.schemas.genericity import GenericityReport
from app.schemas.orbits import OrbitChainResponse, SLStep
from app.schemas.problem import (
    ClassEntry,
    ComplexValue,
    EigenvalueEntry,
    ProblemFile,
    SolverOptions,
)
from app.services.dsp_decider import nice_nilpotent_exists, shifted_rank_bound
from app.services.genericity import (
    EigenvalueAssignment,
    ExactComplexRational,
    check_sum_condition,
    classify,
    default_s_range,
    violated_relations,
)
from app.services.jordan_core import ClassTuple, JordanNormalForm, Partition
from app.services.nilpotent_orbits import adjacency_chain, closure_leq, replay


def load_problem(source: Union[str, Path]) -> ProblemFile:
    """Parse a problem file; malformed JSON or schema errors become InvalidTuple"""
    try:
        text = Path(source).read_text()
        return ProblemFile.model_validate_json(text)
    except (OSError, ValidationError) as e:
        raise InvalidTuple(f"cannot read problem {source}: {e}")


def parse_value(value: Union[str, ComplexValue]) -> ExactComplexRational:
    try:
        if isinstance(value, ComplexValue):
            return ExactComplexRational(Fraction(value.re), Fraction(value.im))
        return ExactComplexRational.parse(value)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidTuple(f"invalid exact value {value!r}: {e}")


def value_to_wire(value: ExactComplexRational) -> Union[str, ComplexValue]:
    if value.im == 0:
        return str(value.re)
    return ComplexValue(re=str(value.re), im=str(value.im))


def to_assignment(problem: ProblemFile) -> EigenvalueAssignment:
    return EigenvalueAssignment(
        problem.flavor,
        tuple(
            tuple((parse_value(ev.value), ev.mult) for ev in entry.eigenvalues)
            for entry in problem.classes
        ),
    )


def to_forms(problem: ProblemFile) -> List[JordanNormalForm]:
    """Label k of class j is the k-th listed eigenvalue"""
    return [
        JordanNormalForm(
            problem.n,
            tuple((k, Partition(tuple(ev.blocks))) for k, ev in enumerate(entry.eigenvalues)),
        )
        for entry in problem.classes
    ]


def to_class_tuple(problem: ProblemFile) -> ClassTuple:
    return ClassTuple(problem.flavor, tuple(to_forms(problem)), to_assignment(problem))


def from_assignment(
    a: EigenvalueAssignment,
    forms: Optional[Sequence[JordanNormalForm]] = None,
    mode: Mode = Mode.GENERIC,
    solver: Optional[SolverOptions] = None,
) -> ProblemFile:
    """Problem file for an assignment; diagonal classes unless forms are given"""
    classes = []
    for j, entry in enumerate(a.values):
        eigenvalues = []
        for k, (value, mult) in enumerate(entry):
            blocks = list(forms[j].blocks(k)) if forms is not None else [1] * mult
            eigenvalues.append(
                EigenvalueEntry(value=value_to_wire(value), mult=mult, blocks=blocks)
            )
        classes.append(ClassEntry(eigenvalues=eigenvalues))
    return ProblemFile(flavor=a.flavor, n=a.n, classes=classes, mode=mode, solver=solver)


def dump_json(model, pretty: bool = False) -> str:
    """Deterministic JSON for a pydantic model"""
    data = model.model_dump(mode="json")
    if pretty:
        return json.dumps(data, indent=2, sort_keys=True)
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def check_generic(
    problem: ProblemFile,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    limit: Optional[int] = None,
) -> GenericityReport:
    """Sum condition, classification, witnesses and the shifted rank bound"""
    t = to_class_tuple(problem)
    a = t.eigenvalues
    lo, hi = default_s_range(a.n)
    s_min = lo if s_min is None else s_min
    s_max = hi if s_max is None else s_max
    return GenericityReport(
        sum_condition=check_sum_condition(a),
        s_min=s_min,
        s_max=s_max,
        classification=classify(a, s_min, s_max),
        witnesses=violated_relations(a, s_min, s_max, limit=limit),
        rank_bound=shifted_rank_bound(t),
    )


def orbit_chain(source: Sequence[int], target: Sequence[int]) -> OrbitChainResponse:
    p1, p2 = Partition(tuple(source)), Partition(tuple(target))
    if not closure_leq(p1, p2):
        return OrbitChainResponse(
            source=list(p1.parts), target=list(p2.parts), comparable=False, steps=[]
        )
    steps = adjacency_chain(p1, p2)
    visited = replay(p1, steps)[1:]
    return OrbitChainResponse(
        source=list(p1.parts),
        target=list(p2.parts),
        comparable=True,
        steps=[
            SLStep(s=op.s, l=op.l, result=list(p.positive)) for op, p in zip(steps, visited)
        ],
    )


def nilpotent_check(n: int, partitions: Sequence[Sequence[int]]) -> Decision:
    return nice_nilpotent_exists([Partition(tuple(p)) for p in partitions], n)
