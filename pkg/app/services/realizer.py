"""
Numerical witnesses for solvable class tuples and the deformation tool

Matrices are parametrized as A_j = Q_j D_j Q_j^-1 with D_j a fixed Jordan
matrix of class j, so the Jordan structure is exact and only the constraint
(sum zero, resp. product identity) is solved for.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    CentralizerNotTrivial,
    ContinuationDiverged,
    DecidedUnsolvable,
    InvalidTuple,
    MissingEigenvalues,
    SizeMismatch,
    SolverFailed,
    SpectrumMismatch,
)
from app.core.logging import get_logger
from app.schemas.common import Flavor, Mode, Verdict
from app.schemas.problem import SolverOptions
from app.schemas.verification import (
    DiagonalLimitEntry,
    DiagonalLimitReport,
    MatrixTupleDocument,
    VerificationReport,
)
from app.services.dsp_decider import decide
from app.services.genericity import EigenvalueAssignment, check_sum_condition
from app.services.jordan_core import ClassTuple, JordanNormalForm, dual_partition
from app.services.verify import (
    centralizer_dimension,
    constraint_residual,
    identify_jnf,
    jordan_matrix,
    verify_tuple,
)

logger = get_logger(__name__)

RESCALE_EVERY = 10
MAX_STEP_NORM = 0.5
MIN_STEP_FRACTION = 2.0 ** -20
CORRECTOR_ITERS = 25


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """Matrices of a tuple with their declared classes; residual is recomputed"""

    flavor: Flavor
    matrices: Tuple[np.ndarray, ...]
    declared_classes: ClassTuple
    conjugators: Optional[Tuple[np.ndarray, ...]] = None
    history: Tuple[float, ...] = ()
    residual: float = field(init=False, default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        mats = tuple(np.array(m, dtype=complex) for m in self.matrices)
        classes = self.declared_classes
        if len(mats) != classes.p_plus_1:
            raise InvalidTuple(f"{len(mats)} matrices for {classes.p_plus_1} classes")
        if any(m.shape != (classes.n, classes.n) for m in mats):
            raise SizeMismatch(f"matrices must be {classes.n}x{classes.n}")
        object.__setattr__(self, "matrices", mats)
        if self.conjugators is not None:
            qs = tuple(np.array(q, dtype=complex) for q in self.conjugators)
            if len(qs) != len(mats):
                raise InvalidTuple("one conjugator per matrix is required")
            object.__setattr__(self, "conjugators", qs)
        object.__setattr__(self, "history", tuple(float(h) for h in self.history))
        object.__setattr__(self, "residual", constraint_residual(self.flavor, mats))

    @property
    def n(self) -> int:
        return self.declared_classes.n

    @property
    def p_plus_1(self) -> int:
        return len(self.matrices)

    def to_document(self, report: Optional[VerificationReport] = None) -> MatrixTupleDocument:
        return MatrixTupleDocument(
            flavor=self.flavor,
            n=self.n,
            matrices=[
                [[(float(z.real), float(z.imag)) for z in row] for row in m]
                for m in self.matrices
            ],
            residual=self.residual,
            report=report,
        )

    @classmethod
    def from_document(cls, doc: MatrixTupleDocument, classes: ClassTuple) -> "MatrixTuple":
        if doc.flavor != classes.flavor or doc.n != classes.n:
            raise InvalidTuple("tuple document does not match the declared classes")
        mats = [
            np.array([[complex(re, im) for re, im in row] for row in m], dtype=complex)
            for m in doc.matrices
        ]
        return cls(doc.flavor, tuple(mats), classes)


def _target_matrices(classes: ClassTuple, values: Sequence[Sequence[complex]]) -> List[np.ndarray]:
    return [jordan_matrix(form, v) for form, v in zip(classes.forms, values)]


def _assemble(conjugators: Sequence[np.ndarray], targets: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [q @ d @ np.linalg.inv(q) for q, d in zip(conjugators, targets)]


def _residual_vector(flavor: Flavor, matrices: Sequence[np.ndarray]) -> np.ndarray:
    if flavor == Flavor.MULTIPLICATIVE:
        product = reduce(np.matmul, matrices)
        return (product - np.eye(product.shape[0])).reshape(-1)
    return sum(matrices).reshape(-1)


def constraint_jacobian(matrices: Sequence[np.ndarray], flavor: Flavor) -> np.ndarray:
    """
    Derivative of the constraint under A_j -> (I + X_j) A_j (I + X_j)^-1,
    acting on the row-major vec of (X_1, ..., X_m).

    Additive: sum_j [X_j, A_j]. Multiplicative: sum_j L_j [X_j, M_j] R_j with
    L_j = M_1...M_{j-1} and R_j = M_{j+1}...M_m.
    """
    mats = [np.asarray(a, dtype=complex) for a in matrices]
    n = mats[0].shape[0]
    eye = np.eye(n)
    blocks = []
    if Flavor(flavor) == Flavor.MULTIPLICATIVE:
        for j, m in enumerate(mats):
            left = reduce(np.matmul, mats[:j], eye)
            right = reduce(np.matmul, mats[j + 1:], eye)
            blocks.append(np.kron(left, (m @ right).T) - np.kron(left @ m, right.T))
    else:
        for a in mats:
            blocks.append(np.kron(eye, a.T) - np.kron(a, eye))
    return np.hstack(blocks)


@dataclass
class _Solve:
    conjugators: List[np.ndarray]
    residual: float
    iterations: int
    converged: bool
    reason: str = ""


def _gauss_newton(
    flavor: Flavor,
    conjugators: List[np.ndarray],
    targets: Sequence[np.ndarray],
    residual_target: float,
    max_iters: int,
) -> _Solve:
    n = targets[0].shape[0]
    eye = np.eye(n)
    qs = [q.copy() for q in conjugators]
    mats = _assemble(qs, targets)
    res = constraint_residual(flavor, mats)
    for it in range(max_iters):
        if res <= residual_target:
            return _Solve(qs, res, it, True)
        jac = constraint_jacobian(mats, flavor)
        rhs = -_residual_vector(flavor, mats)
        x = np.linalg.lstsq(jac, rhs, rcond=None)[0]
        steps = [x[j * n * n:(j + 1) * n * n].reshape(n, n) for j in range(len(qs))]
        largest = max(np.linalg.norm(s, 2) for s in steps)
        if largest > MAX_STEP_NORM:
            steps = [s * (MAX_STEP_NORM / largest) for s in steps]

        length = 1.0
        while length >= 2.0 ** -10:
            trial = [(eye + length * s) @ q for s, q in zip(steps, qs)]
            trial_mats = _assemble(trial, targets)
            trial_res = constraint_residual(flavor, trial_mats)
            if trial_res < res:
                qs, mats, res = trial, trial_mats, trial_res
                break
            length /= 2
        else:
            return _Solve(qs, res, it, False, "line search stalled")

        if (it + 1) % RESCALE_EVERY == 0:
            qs = [q / np.linalg.norm(q) for q in qs]
            worst = max(np.linalg.cond(q) for q in qs)
            if worst > settings.CONDITION_CAP:
                return _Solve(qs, res, it, False, f"conjugator condition {worst:.2e}")
        logger.debug(f"Iteration {it}: residual {res:.3e}")
    return _Solve(qs, res, max_iters, res <= residual_target, "iteration limit")


def _complex_values(a: EigenvalueAssignment) -> List[List[complex]]:
    return [a.complex_values(j) for j in range(len(a.values))]


def _attempt(
    t: ClassTuple, targets: Sequence[np.ndarray], opts: SolverOptions, index: int
) -> Tuple[Optional[MatrixTuple], str]:
    rng = np.random.default_rng([opts.seed, index])
    n = t.n
    start = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in targets]
    target = opts.target_for(t.flavor)
    solve = _gauss_newton(t.flavor, start, targets, target, opts.max_newton_iters)
    if not solve.converged:
        return None, f"residual {solve.residual:.2e} ({solve.reason})"
    candidate = MatrixTuple(
        t.flavor,
        tuple(_assemble(solve.conjugators, targets)),
        t,
        conjugators=tuple(solve.conjugators),
    )
    report = verify_tuple(candidate, opts.rank_tolerance)
    if not (report.irreducible and report.trivial_centralizer and report.forms_match):
        return None, (
            f"converged but algebra={report.algebra_dimension}, "
            f"centralizer={report.centralizer_dimension}, forms_match={report.forms_match}"
        )
    return candidate, f"verified after {solve.iterations} iterations"


def build_tuple(
    t: ClassTuple, opts: Optional[SolverOptions] = None, force: bool = False
) -> MatrixTuple:
    """
    Witness tuple for the classes of t with its attached eigenvalues.

    Restarts are seeded from (seed, restart index) and run in batches of
    ``threads``; the lowest verified index wins.
    """
    opts = opts or SolverOptions()
    if t.eigenvalues is None:
        raise MissingEigenvalues("build_tuple needs attached eigenvalues")
    if t.n > settings.REALIZER_MAX_SIZE:
        raise InvalidTuple(f"n={t.n} exceeds the realizer cap {settings.REALIZER_MAX_SIZE}")
    decision = decide(t, Mode.GENERIC)
    refusal = None
    if decision.verdict != Verdict.SOLVABLE:
        refusal = f"decision is {decision.verdict.value} ({decision.theorem_used})"
    elif decision.eigenvalues_generic is False:
        refusal = "attached eigenvalues are not generic"
    if refusal is not None:
        if not force:
            raise DecidedUnsolvable(refusal, details={"notes": decision.notes})
        logger.warning(f"Forcing the solver: {refusal}")

    targets = _target_matrices(t, _complex_values(t.eigenvalues))
    threads = settings.get_threads(opts.threads)
    logger.info(
        f"Realizing n={t.n}, p+1={t.p_plus_1} ({t.flavor.value}) with up to "
        f"{opts.max_restarts} restarts on {threads} thread(s)"
    )
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for first in range(0, opts.max_restarts, threads):
            batch = range(first, min(first + threads, opts.max_restarts))
            outcomes = list(pool.map(lambda i: _attempt(t, targets, opts, i), batch))
            for index, (candidate, message) in zip(batch, outcomes):
                logger.info(f"Restart {index}: {message}")
                if candidate is not None:
                    return candidate
    raise SolverFailed(
        f"no witness found in {opts.max_restarts} restarts (this is not a non-existence claim)"
    )


def _recover_conjugators(start: MatrixTuple) -> Tuple[np.ndarray, ...]:
    classes = start.declared_classes
    if not all(f.is_diagonal for f in classes.forms):
        raise InvalidTuple("conjugators are required to deform non-diagonalizable classes")
    qs = []
    for j, m in enumerate(start.matrices):
        cands = np.asarray(classes.eigenvalues.complex_values(j))
        w, v = np.linalg.eig(m)
        labels = np.argmin(np.abs(w[:, None] - cands[None, :]), axis=1)
        counts = np.bincount(labels, minlength=len(cands))
        if [int(c) for c in counts] != classes.eigenvalues.multiplicities(j):
            raise SpectrumMismatch(f"matrix {j}: eigenvalue multiplicities do not match")
        qs.append(v[:, np.argsort(labels, kind="stable")])
    return tuple(qs)


def _path_values(
    a0: EigenvalueAssignment, a1: EigenvalueAssignment, eps: float
) -> List[List[complex]]:
    rows = []
    for j in range(len(a0.values)):
        mixed = [
            (1.0 - eps) * complex(u) + eps * complex(v)
            for u, v in zip(a0.eigenvalues(j), a1.eigenvalues(j))
        ]
        if a0.flavor == Flavor.MULTIPLICATIVE:
            mixed = [complex(np.exp(2j * np.pi * z)) for z in mixed]
        rows.append(mixed)
    return rows


def _check_endpoint(start: MatrixTuple, target: EigenvalueAssignment) -> EigenvalueAssignment:
    a0 = start.declared_classes.eigenvalues
    if a0 is None:
        raise MissingEigenvalues("the start tuple carries no eigenvalues")
    if target.flavor != a0.flavor:
        raise InvalidTuple("endpoint flavor differs from the start tuple")
    for j in range(len(a0.values)):
        if target.multiplicities(j) != a0.multiplicities(j):
            raise InvalidTuple(f"matrix {j}: endpoint multiplicities differ")
    if not check_sum_condition(target):
        raise InvalidTuple("endpoint eigenvalues violate the sum condition")
    if a0.flavor == Flavor.MULTIPLICATIVE and target.total() != a0.total():
        raise InvalidTuple("exponent sums of start and endpoint differ")
    return a0


def deform(
    start: MatrixTuple, target: EigenvalueAssignment, opts: Optional[SolverOptions] = None
) -> MatrixTuple:
    """
    Move the eigenvalues of a tuple with trivial centralizer along the straight
    line to ``target`` keeping the Jordan structure.

    Each step shifts the Jordan parts (Q_j D_j(eps) Q_j^-1, i.e. the diagonal
    perturbation conjugated by Q_j), then Newton-corrects the constraint. A
    failing step is halved down to 2^-20 of the nominal length.
    """
    opts = opts or SolverOptions()
    n = start.n
    dim = centralizer_dimension(start.matrices, opts.rank_tolerance)
    if dim != 1:
        raise CentralizerNotTrivial(f"centralizer of the start tuple has dimension {dim}")
    a0 = _check_endpoint(start, target)
    if target == a0:
        return start

    qs = list(start.conjugators or _recover_conjugators(start))
    classes = start.declared_classes
    residual_target = opts.target_for(start.flavor)
    nominal = 1.0 / opts.continuation_steps
    eps, step = 0.0, nominal
    history = [start.residual]
    while eps < 1.0:
        nxt = min(1.0, eps + step)
        targets = _target_matrices(classes, _path_values(a0, target, nxt))
        solve = _gauss_newton(start.flavor, qs, targets, residual_target, CORRECTOR_ITERS)
        if solve.converged:
            qs, eps = solve.conjugators, nxt
            history.append(solve.residual)
            logger.debug(f"Continuation accepted eps={eps:.4f}, residual {solve.residual:.2e}")
            step = min(nominal, step * 2)
            continue
        step /= 2
        logger.info(f"Halving continuation step at eps={eps:.4f} to {step:.3e}")
        if step < nominal * MIN_STEP_FRACTION:
            raise ContinuationDiverged(f"continuation stalled at eps={eps:.6f}")

    end_classes = classes.with_eigenvalues(target)
    targets = _target_matrices(end_classes, _complex_values(target))
    result = MatrixTuple(
        start.flavor,
        tuple(_assemble(qs, targets)),
        end_classes,
        conjugators=tuple(qs),
        history=tuple(history),
    )
    for j, (m, form) in enumerate(zip(result.matrices, end_classes.forms)):
        if identify_jnf(m, target.complex_values(j), opts.rank_tolerance) != form:
            raise ContinuationDiverged(f"matrix {j} changed its Jordan structure")
    logger.info(f"Deformed n={n} tuple in {len(history) - 1} steps, residual {result.residual:.2e}")
    return result


def _limit_layout(g0: JordanNormalForm) -> Tuple[List[float], List[List[int]]]:
    """Default eigenvalue per label and the G1 value h for (label, q)"""
    spread = float(g0.n + 1)
    values = [spread * i for i in range(len(g0.entries))]
    dual_lengths = [len(dual_partition(blocks)) for _, blocks in g0.entries]
    h = [[q + 1 + i * (max(dual_lengths) + 1) for q in range(dual_lengths[i])] for i in range(len(g0.entries))]
    return values, h


def _g1_matrix(g0: JordanNormalForm, h: List[List[int]]) -> np.ndarray:
    diagonal = []
    for i, (_, blocks) in enumerate(g0.entries):
        for b in blocks:
            # position b-1-q of a block carries h_q
            diagonal.extend(h[i][b - 1 - pos] for pos in range(b))
    return np.diag(np.asarray(diagonal, dtype=complex))


def diagonal_limit_check(
    g0: JordanNormalForm,
    epsilons: Sequence[float],
    values: Optional[Sequence[complex]] = None,
    tol: Optional[float] = None,
) -> DiagonalLimitReport:
    """
    For each eps, identify the Jordan form of G0 + eps G1 where G1 is the
    diagonal matrix whose entries are equal on the positions last-but-q of
    every block; nonzero eps must give the diagonal correspondent of g0.
    """
    default_values, h = _limit_layout(g0)
    values = list(values) if values is not None else default_values
    label_values = {label: values[i] for i, (label, _) in enumerate(g0.entries)}
    g0_matrix = jordan_matrix(g0, label_values)
    g1_matrix = _g1_matrix(g0, h)

    entries = []
    for eps in epsilons:
        if eps == 0:
            cands = values
            expected = JordanNormalForm.from_partitions([blocks for _, blocks in g0.entries])
        else:
            cands, mults = [], []
            for i, (_, blocks) in enumerate(g0.entries):
                for q, m in enumerate(dual_partition(blocks)):
                    cands.append(values[i] + eps * h[i][q])
                    mults.append(m)
            expected = JordanNormalForm.from_partitions([[1] * m for m in mults])
        try:
            found = identify_jnf(g0_matrix + eps * g1_matrix, cands, tol)
        except SpectrumMismatch as e:
            entries.append(
                DiagonalLimitEntry(
                    epsilon=eps, expected=expected.to_model(), matches=False, error=e.message
                )
            )
            continue
        entries.append(
            DiagonalLimitEntry(
                epsilon=eps,
                identified=found.to_model(),
                expected=expected.to_model(),
                matches=found == expected,
            )
        )
    failures = sum(1 for e in entries if not e.matches)
    if failures:
        logger.warning(f"Diagonal limit check: {failures} of {len(entries)} epsilons failed")
    return DiagonalLimitReport(entries=entries, failures=failures)
