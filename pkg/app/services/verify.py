"""
Numerical oracles for matrix tuples: ranks, Jordan structure identification,
the Burnside span test, centralizers and constraint residuals
"""

from functools import reduce
from typing import TYPE_CHECKING, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from app.core.config import settings
from app.core.exceptions import MissingEigenvalues, SpectrumMismatch
from app.core.logging import get_logger
from app.schemas.common import Flavor, JordanFormModel
from app.schemas.verification import VerificationReport
from app.services.jordan_core import JordanNormalForm, Partition, dual_partition

if TYPE_CHECKING:
    from app.services.realizer import MatrixTuple

logger = get_logger(__name__)

Values = Union[Sequence[complex], Mapping[int, complex]]


def numeric_rank(m: np.ndarray, tol: Optional[float] = None, scale: Optional[float] = None) -> int:
    """Singular values above tol times ``scale`` (default: the largest one)"""
    tol = settings.RANK_TOLERANCE if tol is None else tol
    s = linalg.svdvals(np.atleast_2d(np.asarray(m, dtype=complex)))
    if s.size == 0 or s[0] == 0.0:
        return 0
    reference = s[0] if scale is None else scale
    return int(np.count_nonzero(s > tol * reference))


def jordan_matrix(form: JordanNormalForm, values: Values) -> np.ndarray:
    """Upper-triangular Jordan matrix, blocks ordered by label then size"""
    g = np.zeros((form.n, form.n), dtype=complex)
    pos = 0
    for label, blocks in form.entries:
        for b in blocks:
            for i in range(b):
                g[pos + i, pos + i] = values[label]
                if i + 1 < b:
                    g[pos + i, pos + i + 1] = 1.0
            pos += b
    return g


def identify_jnf(
    m: np.ndarray,
    candidates: Sequence[complex],
    tol: Optional[float] = None,
    spectrum_tol: Optional[float] = None,
) -> JordanNormalForm:
    """
    Jordan normal form of m with label k bound to candidates[k].

    Each eigenvalue is assigned to its nearest candidate; the generalized
    eigenspace of a candidate is split off by a sorted complex Schur form and
    the kernel increments of the powers of its nilpotent part give the dual
    of the block partition.
    """
    m = np.asarray(m, dtype=complex)
    cands = np.asarray(list(candidates), dtype=complex)
    n = m.shape[0]
    ref = max(1.0, float(np.linalg.norm(m, 2)))
    radius = (settings.SPECTRUM_TOLERANCE if spectrum_tol is None else spectrum_tol) * ref

    spectrum = np.linalg.eigvals(m)
    distance = np.abs(spectrum[:, None] - cands[None, :])
    nearest = distance.min(axis=1)
    if np.any(nearest > radius):
        worst = spectrum[int(np.argmax(nearest))]
        raise SpectrumMismatch(
            f"eigenvalue {worst:.6g} is {nearest.max():.3g} away from every candidate",
            details={"radius": radius},
        )

    entries: List[Tuple[int, Partition]] = []
    for k, lam in enumerate(cands):
        def belongs(x: complex, k: int = k) -> bool:
            return int(np.argmin(np.abs(x - cands))) == k

        t, _, sdim = linalg.schur(m, output="complex", sort=belongs)
        if sdim == 0:
            continue
        nilpotent = t[:sdim, :sdim] - lam * np.eye(sdim)
        kernels = [0]
        power = np.eye(sdim, dtype=complex)
        for i in range(1, sdim + 1):
            power = power @ nilpotent
            kernels.append(sdim - numeric_rank(power, tol, scale=ref ** i))
            if kernels[-1] == sdim:
                break
        if kernels[-1] != sdim:
            raise SpectrumMismatch(f"Jordan structure at {lam:.6g} not resolved")
        increments = [b - a for a, b in zip(kernels, kernels[1:]) if b > a]
        entries.append((k, dual_partition(Partition(tuple(increments)))))
    return JordanNormalForm(n, tuple(entries))


def _as_matrices(t) -> List[np.ndarray]:
    """Matrices of a MatrixTuple or of a plain sequence"""
    return [np.asarray(a, dtype=complex) for a in getattr(t, "matrices", t)]


def _orthonormal_extend(basis: List[np.ndarray], v: np.ndarray, tol: float) -> Optional[np.ndarray]:
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return None
    v = v / norm
    if basis:
        b = np.array(basis)
        # two passes of classical Gram-Schmidt
        for _ in range(2):
            v = v - b.T @ (b.conj() @ v)
    rest = np.linalg.norm(v)
    if rest <= tol:
        return None
    return v / rest


def algebra_dimension(
    matrices: Union["MatrixTuple", Sequence[np.ndarray]],
    tol: Optional[float] = None,
    word_length_cap: Optional[int] = None,
) -> int:
    """Dimension of the span of all words in the matrices and the identity"""
    tol = settings.RANK_TOLERANCE if tol is None else tol
    mats = _as_matrices(matrices)
    n = mats[0].shape[0]
    cap = 2 * n * n if word_length_cap is None else word_length_cap

    basis: List[np.ndarray] = []
    identity = np.eye(n, dtype=complex)
    basis.append(_orthonormal_extend(basis, identity.reshape(-1), tol))
    frontier = [identity]
    length = 0
    while frontier and len(basis) < n * n and length < cap:
        grown = []
        for word in frontier:
            for g in mats:
                product = word @ g
                scale = np.linalg.norm(product)
                if scale == 0.0:
                    continue
                product = product / scale
                v = _orthonormal_extend(basis, product.reshape(-1), tol)
                if v is not None:
                    basis.append(v)
                    grown.append(product)
                    if len(basis) == n * n:
                        break
            if len(basis) == n * n:
                break
        frontier = grown
        length += 1
    return len(basis)


def _commutator_operator(matrices: Sequence[np.ndarray]) -> np.ndarray:
    """Rows of X -> ([A_1, X], ..., [A_m, X]) on row-major vec(X)"""
    n = matrices[0].shape[0]
    eye = np.eye(n)
    return np.vstack([np.kron(a, eye) - np.kron(eye, a.T) for a in matrices])


def centralizer_spectrum(
    matrices: Union["MatrixTuple", Sequence[np.ndarray]], tol: Optional[float] = None
) -> Tuple[int, Optional[float]]:
    """Centralizer dimension and the singular-value ratio at the cut"""
    tol = settings.RANK_TOLERANCE if tol is None else tol
    mats = _as_matrices(matrices)
    n = mats[0].shape[0]
    s = linalg.svdvals(_commutator_operator(mats))
    if s[0] == 0.0:
        return n * n, None
    dim = int(np.count_nonzero(s <= tol * s[0]))
    cut = n * n - dim
    gap = None
    if 0 < cut < s.size and s[cut] > 0.0:
        gap = float(s[cut - 1] / s[cut])
    return dim, gap


def centralizer_dimension(
    matrices: Union["MatrixTuple", Sequence[np.ndarray]], tol: Optional[float] = None
) -> int:
    return centralizer_spectrum(matrices, tol)[0]


def constraint_residual(flavor: Flavor, matrices: Sequence[np.ndarray]) -> float:
    """||sum A_j|| or ||M_1 ... M_m - I|| in the Frobenius norm"""
    mats = [np.asarray(a, dtype=complex) for a in matrices]
    if Flavor(flavor) == Flavor.MULTIPLICATIVE:
        product = reduce(np.matmul, mats)
        return float(np.linalg.norm(product - np.eye(product.shape[0]), "fro"))
    return float(np.linalg.norm(sum(mats), "fro"))


def residual(t: "MatrixTuple") -> float:
    return constraint_residual(t.flavor, t.matrices)


def verify_tuple(t: "MatrixTuple", tol: Optional[float] = None) -> VerificationReport:
    classes = t.declared_classes
    if classes.eigenvalues is None:
        raise MissingEigenvalues("declared classes carry no eigenvalues to identify against")
    n = classes.n
    identified: List[Optional[JordanFormModel]] = []
    forms_match = True
    for j, (m, form) in enumerate(zip(t.matrices, classes.forms)):
        try:
            found = identify_jnf(m, classes.eigenvalues.complex_values(j), tol)
        except SpectrumMismatch as e:
            logger.warning(f"Matrix {j}: {e.message}")
            identified.append(None)
            forms_match = False
            continue
        identified.append(found.to_model())
        if found != form:
            forms_match = False

    algebra = algebra_dimension(t.matrices, tol)
    centralizer, gap = centralizer_spectrum(t.matrices, tol)
    if algebra == n * n and centralizer != 1:
        logger.warning(
            f"Irreducible span but centralizer dimension {centralizer}; tolerance {tol} is borderline"
        )
    report = VerificationReport(
        residual=residual(t),
        identified_forms=identified,
        algebra_dimension=algebra,
        centralizer_dimension=centralizer,
        irreducible=algebra == n * n,
        trivial_centralizer=centralizer == 1,
        forms_match=forms_match,
        centralizer_gap=gap,
    )
    logger.info(
        f"Verified n={n}: residual={report.residual:.3e}, algebra={algebra}, "
        f"centralizer={centralizer}, forms_match={forms_match}"
    )
    return report
