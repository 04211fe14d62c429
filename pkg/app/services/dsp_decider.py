"""
Decision engine: conditions (alpha), (beta), (omega), the reduction chain
and the verdicts of the solvability theorems
"""

import itertools
from typing import List, Optional, Sequence, Tuple

from app.core.exceptions import (
    BudgetExceeded,
    InvalidTuple,
    MissingEigenvalues,
    PsiUndefined,
)
from app.core.logging import get_logger
from app.schemas.common import Flavor, Mode, StopReason, Verdict
from app.schemas.decision import (
    ConditionsReport,
    Decision,
    PsiStage,
    PsiTrace,
    ShiftedRankBound,
)
from app.services.genericity import ExactComplexRational, classify
from app.services.jordan_core import (
    ClassTuple,
    JordanNormalForm,
    Partition,
    block_count_gcd,
    eigenvalue_pmv,
    orbit_dimension,
    pmv_gcd,
    rank_defect,
)

logger = get_logger(__name__)

NILPOTENT_COUNTEREXAMPLE_NOTE = (
    "alpha holds as an equality: weak solvability is not decided by the criterion "
    "(for n=2, p=2 and three nilpotent classes of rank 1 the triple is upper-triangular "
    "and its centralizer is spanned by I and the nilpotent (0 1 / 0 0))"
)

# (p, sorted block sizes, base size) of the nice-tuple exceptions, n = base * k with k > 1
NILPOTENT_EXCEPTIONS: Tuple[Tuple[int, Tuple[int, ...], int], ...] = (
    (3, (2, 2, 2, 2), 2),
    (2, (3, 3, 3), 3),
    (2, (4, 4, 2), 4),
    (2, (6, 3, 2), 6),
)


def evaluate_conditions(forms: Sequence[JordanNormalForm]) -> ConditionsReport:
    sizes = {f.n for f in forms}
    if len(sizes) != 1:
        raise InvalidTuple(f"forms have different sizes: {sorted(sizes)}")
    n = forms[0].n
    r = [rank_defect(f) for f in forms]
    d = [orbit_dimension(f) for f in forms]
    bound = 2 * n * n - 2
    kappa = 2 * n * n - sum(d)
    return ConditionsReport(
        n=n,
        r=r,
        d=d,
        alpha_holds=sum(d) >= bound,
        alpha_strict=sum(d) > bound,
        beta_holds=sum(r) - max(r) >= n,
        omega_holds=sum(r) >= 2 * n,
        kappa=kappa,
        rigid=kappa == 2,
    )


def _max_count_labels(form: JordanNormalForm) -> List[int]:
    counts = form.block_counts()
    top = max(counts.values())
    return sorted(label for label, c in counts.items() if c == top)


def _shrink(form: JordanNormalForm, label: int, count: int, n1: int) -> JordanNormalForm:
    blocks = list(form.blocks(label))
    # smallest blocks sit at the end; ties resolve to the later positions
    for i in range(len(blocks) - count, len(blocks)):
        blocks[i] -= 1
    blocks = [b for b in blocks if b > 0]
    entries = [(lab, b) for lab, b in form.entries if lab != label]
    if blocks:
        entries.append((label, Partition(tuple(blocks))))
    return JordanNormalForm(n1, tuple(entries))


def psi_step(
    forms: Sequence[JordanNormalForm], choices: Optional[Sequence[int]] = None
) -> Tuple[List[JordanNormalForm], int]:
    """
    One application of the reduction map.

    ``choices`` optionally fixes, per form, which maximal-block-count label
    shrinks; the default is the lowest such label.
    """
    report = evaluate_conditions(forms)
    n = report.n
    if n == 1 or report.omega_holds or not report.beta_holds:
        raise PsiUndefined(
            f"reduction undefined at n={n} (beta={report.beta_holds}, omega={report.omega_holds})"
        )
    n1 = sum(report.r) - n
    shrink = n - n1
    images = []
    for j, form in enumerate(forms):
        candidates = _max_count_labels(form)
        label = candidates[0] if choices is None else choices[j]
        if label not in candidates:
            raise PsiUndefined(f"form {j}: label {label} does not have the maximal block count")
        images.append(_shrink(form, label, shrink, n1))
    return images, n1


def psi_chain(forms: Sequence[JordanNormalForm]) -> PsiTrace:
    """Iterate the reduction until omega holds, beta fails or n = 1"""
    stages: List[PsiStage] = []
    current = list(forms)
    while True:
        report = evaluate_conditions(current)
        stages.append(
            PsiStage(n=report.n, forms=[f.to_model() for f in current], report=report)
        )
        if stages[0].report.kappa != report.kappa:
            raise RuntimeError(
                f"index of rigidity changed along the chain: "
                f"{stages[0].report.kappa} -> {report.kappa}"
            )
        if report.n == 1:
            stop = StopReason.SIZE_ONE
            break
        if report.omega_holds:
            stop = StopReason.OMEGA_HOLDS
            break
        if not report.beta_holds:
            stop = StopReason.BETA_FAILS
            break
        current, _ = psi_step(current)

    trace = PsiTrace(stages=stages, stop_reason=stop)
    if trace.criterion_holds:
        _check_rigidity(trace)
    logger.debug(
        f"Reduction chain {[s.n for s in stages]} stopped: {stop.value}"
    )
    return trace


def _check_rigidity(trace: PsiTrace) -> None:
    # n_s = 1 <=> alpha is an equality at the start
    first = trace.stages[0].report
    if trace.stop_reason == StopReason.SIZE_ONE and first.alpha_strict:
        raise RuntimeError("chain reached n=1 although alpha is strict")
    if trace.stop_reason == StopReason.OMEGA_HOLDS and not first.alpha_strict:
        raise RuntimeError(f"chain stopped at n={trace.n_s} > 1 although alpha is not strict")


def _criterion_notes(trace: PsiTrace) -> List[str]:
    first = trace.stages[0].report
    notes = []
    if not first.beta_holds:
        notes.append(f"beta fails at n={first.n}")
    elif trace.stop_reason == StopReason.BETA_FAILS:
        notes.append(f"chain stops at n_s={trace.n_s}: beta fails and omega fails there")
    elif trace.stop_reason == StopReason.OMEGA_HOLDS:
        notes.append(f"omega holds at n_s={trace.n_s}")
    else:
        notes.append("chain reaches n_s=1 (rigid)")
    return notes


def _by_criterion(trace: PsiTrace, yes: Verdict, no: Verdict) -> Verdict:
    return yes if trace.criterion_holds else no


def decide(
    t: ClassTuple,
    mode: Mode = Mode.GENERIC,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    budget: Optional[int] = None,
) -> Decision:
    """
    Verdict for the class tuple.

    In generic mode the verdict concerns generic eigenvalues with the given
    Jordan data; attached eigenvalues are checked and a note is added when
    they are not generic.
    """
    mode = Mode(mode)
    if not isinstance(t, ClassTuple):
        raise InvalidTuple("decide expects a ClassTuple")
    trace = psi_chain(t.forms)
    logger.info(
        f"Deciding n={t.n}, p+1={t.p_plus_1}, flavor={t.flavor.value}, mode={mode.value}"
    )

    if t.n == 1:
        return Decision(
            verdict=Verdict.SOLVABLE,
            theorem_used="size_one",
            trace=trace,
            notes=["every 1x1 tuple satisfying the constraint is irreducible"],
        )
    if mode == Mode.GENERIC:
        decision = _decide_generic(t, trace)
        if t.eigenvalues is not None:
            _attach_genericity(decision, t, s_min, s_max, budget)
        return decision
    return _decide_any_weak(t, trace)


def _decide_generic(t: ClassTuple, trace: PsiTrace) -> Decision:
    simple = pmv_gcd(eigenvalue_pmv(t.forms)) == 1
    if simple:
        verdict = _by_criterion(trace, Verdict.SOLVABLE, Verdict.NOT_SOLVABLE)
        return Decision(
            verdict=verdict, theorem_used="generic", trace=trace, notes=_criterion_notes(trace)
        )
    if t.flavor == Flavor.ADDITIVE:
        return Decision(
            verdict=Verdict.NOT_SOLVABLE,
            theorem_used="generic",
            trace=trace,
            notes=["no generic eigenvalues exist: the PMV is not simple"],
        )
    d = block_count_gcd(t)
    if d == 1:
        verdict = _by_criterion(trace, Verdict.SOLVABLE, Verdict.NOT_SOLVABLE)
        return Decision(
            verdict=verdict,
            theorem_used="genericbis",
            trace=trace,
            notes=["non-simple PMV with d=1"] + _criterion_notes(trace),
        )
    return Decision(
        verdict=Verdict.OUT_OF_THEOREM_SCOPE,
        theorem_used="genericbis",
        trace=trace,
        notes=[f"multiplicative generic tuple with d={d} > 1 is not covered"],
    )


def _decide_any_weak(t: ClassTuple, trace: PsiTrace) -> Decision:
    report = trace.stages[0].report
    if t.flavor == Flavor.MULTIPLICATIVE:
        return Decision(
            verdict=Verdict.OUT_OF_THEOREM_SCOPE,
            theorem_used="nongenericevs",
            trace=trace,
            notes=["weak solvability for arbitrary eigenvalues is covered for sums only"],
        )
    d = block_count_gcd(t)
    if d > 1:
        return Decision(
            verdict=Verdict.OUT_OF_THEOREM_SCOPE,
            theorem_used="nongenericevs",
            trace=trace,
            notes=[f"d={d} > 1"],
        )
    if not report.alpha_holds:
        return Decision(
            verdict=Verdict.NOT_WEAKLY_SOLVABLE,
            theorem_used="nongenericevs",
            trace=trace,
            notes=["alpha fails; it is necessary for a trivial centralizer"],
        )
    if not report.alpha_strict:
        return Decision(
            verdict=Verdict.OUT_OF_THEOREM_SCOPE,
            theorem_used="nongenericevs",
            trace=trace,
            notes=[NILPOTENT_COUNTEREXAMPLE_NOTE],
        )
    verdict = _by_criterion(trace, Verdict.WEAKLY_SOLVABLE, Verdict.NOT_WEAKLY_SOLVABLE)
    return Decision(
        verdict=verdict,
        theorem_used="nongenericevs",
        trace=trace,
        notes=_criterion_notes(trace),
    )


def _attach_genericity(
    decision: Decision,
    t: ClassTuple,
    s_min: Optional[int],
    s_max: Optional[int],
    budget: Optional[int],
) -> None:
    try:
        generic = classify(t.eigenvalues, s_min, s_max, budget=budget).generic
    except BudgetExceeded as e:
        decision.notes.append(f"genericity of the attached eigenvalues not checked: {e.message}")
        return
    decision.eigenvalues_generic = generic
    if not generic:
        decision.notes.append(
            "attached eigenvalues are not generic; the verdict concerns generic "
            "eigenvalues with the same Jordan data"
        )


def _blocks_at(t: ClassTuple, j: int, value: ExactComplexRational) -> int:
    """Number of Jordan blocks of matrix j with eigenvalue ``value``"""
    a = t.eigenvalues
    multiplicative = t.flavor == Flavor.MULTIPLICATIVE
    for label, v in enumerate(a.eigenvalues(j)):
        hit = (v - value).is_integer() if multiplicative else v == value
        if hit:
            return len(t.forms[j].blocks(label))
    return 0


def shifted_rank_bound(t: ClassTuple) -> ShiftedRankBound:
    """
    Minimum of sum_j rank(A_j - b_j I) over shifts with sum b_j = 0.

    At least p of the minimizing shifts are eigenvalues, so every slot but
    one ranges over the eigenvalues of its class and the free slot takes the
    balancing value. For the multiplicative flavor b_j = exp(-2 pi i beta_j)
    is handled through exponents and rank(b M - I) counts blocks with
    eigenvalue exponent congruent to beta_j; the witness lists those
    exponents.
    """
    a = t.eigenvalues
    if a is None:
        raise MissingEigenvalues("shifted rank bound needs attached eigenvalues")
    n = t.n
    slots = range(t.p_plus_1)
    best: Optional[Tuple[int, List[ExactComplexRational]]] = None
    for free in slots:
        others = [j for j in slots if j != free]
        for picks in itertools.product(*(a.eigenvalues(j) for j in others)):
            shifts: List[Optional[ExactComplexRational]] = [None] * t.p_plus_1
            for j, v in zip(others, picks):
                shifts[j] = v
            balance = ExactComplexRational()
            for v in picks:
                balance = balance + v
            shifts[free] = -balance
            if t.flavor == Flavor.MULTIPLICATIVE:
                shifts[free] = shifts[free].mod_one()
            total = sum(n - _blocks_at(t, j, shifts[j]) for j in slots)
            if best is None or total < best[0]:
                best = (total, list(shifts))
    min_value, witness = best
    return ShiftedRankBound(
        min_value=min_value,
        witness=[str(b) for b in witness],
        necessary_condition_holds=min_value >= 2 * n,
    )


def _single_size(p: Partition) -> Optional[int]:
    sizes = set(p)
    return sizes.pop() if len(sizes) == 1 else None


def nilpotent_exception(partitions: Sequence[Partition], n: int) -> Optional[int]:
    """Index (1-4) of the equal-block-size exception the tuple falls into"""
    p = len(partitions) - 1
    sizes = [_single_size(part) for part in partitions]
    if any(s is None for s in sizes):
        return None
    for case, (case_p, case_sizes, base) in enumerate(NILPOTENT_EXCEPTIONS, start=1):
        if p == case_p and tuple(sorted(sizes, reverse=True)) == case_sizes:
            if n % base == 0 and n // base > 1:
                return case
    return None


def nice_nilpotent_exists(partitions: Sequence[Partition], n: int) -> Decision:
    """Nice tuples of nilpotent (or unipotent) classes with the given block partitions"""
    parts = [p if isinstance(p, Partition) else Partition(tuple(p)) for p in partitions]
    if len(parts) < 2:
        raise InvalidTuple("at least two classes are needed")
    for j, p in enumerate(parts):
        if p.size != n:
            raise InvalidTuple(f"partition {j} has size {p.size}, expected {n}")
    forms = [JordanNormalForm.from_partitions([p]) for p in parts]
    trace = psi_chain(forms)
    report = trace.stages[0].report
    if not report.omega_holds:
        return Decision(
            verdict=Verdict.NOT_SOLVABLE,
            theorem_used="nilpunip",
            trace=trace,
            notes=[f"omega fails: sum r = {sum(report.r)} < {2 * n}"],
        )
    case = nilpotent_exception(parts, n)
    if case is not None:
        return Decision(
            verdict=Verdict.OUT_OF_THEOREM_SCOPE,
            theorem_used="nilpunip",
            trace=trace,
            notes=[f"exceptional case {case}: equal block sizes {NILPOTENT_EXCEPTIONS[case - 1][1]}"],
        )
    return Decision(
        verdict=Verdict.SOLVABLE,
        theorem_used="nilpunip",
        trace=trace,
        notes=["omega holds; nice tuples exist"],
    )
