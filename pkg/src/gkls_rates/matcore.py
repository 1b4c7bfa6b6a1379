"""Dense complex linear-algebra kernel.

Everything operates on plain ``numpy.ndarray`` matrices of complex doubles;
dimensions stay small (operators up to ~10, superoperators up to ~100), so
robustness is preferred over speed throughout.  Eigendecomposition routes
Hermitian inputs to the symmetric solver and otherwise uses the general
Hessenberg/shifted-QR path of LAPACK; the matrix exponential is
scaling-and-squaring with Pade approximants, which behaves uniformly on
defective inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    IterationLimitError,
    NonSquareError,
    RankDeficientError,
    ShapeMismatchError,
)

__all__ = [
    "DEFECT_THRESHOLD",
    "EigResult",
    "as_matrix",
    "eig",
    "expm",
    "hs_inner",
    "matrix_norm",
    "qr",
]

# eigenvector condition number above which a matrix is treated as defective;
# doubles carry ~16 digits, so 1e8 marks the point where biorthogonality
# cannot be trusted to 1e-8 any more
DEFECT_THRESHOLD = 1e8

_HERMITIAN_RTOL = 1e-12


def as_matrix(a, name="matrix"):
    """Coerce to a 2-d complex array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatchError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _require_square(m, op):
    if m.shape[0] != m.shape[1]:
        raise NonSquareError(f"{op} requires a square matrix, got shape {m.shape}")


def is_hermitian(m, rtol=_HERMITIAN_RTOL):
    scale = max(1.0, float(np.linalg.norm(m)))
    return float(np.linalg.norm(m - m.conj().T)) <= rtol * scale


@dataclass(frozen=True)
class EigResult:
    """Eigenvalues with matched right and left eigenvectors.

    Columns of ``right_vectors``/``left_vectors`` are paired so that, for
    well-conditioned inputs, <u_j, v_k> = delta_jk after normalization.
    ``vector_condition`` is the 2-norm condition number of the right-vector
    matrix; values at or above ``DEFECT_THRESHOLD`` flag a (near-)defective
    input whose eigenvectors should not be trusted.
    """

    values: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    vector_condition: float

    @property
    def is_defective(self):
        return self.vector_condition >= DEFECT_THRESHOLD


def _biorthogonalize(values, right, left):
    """Rescale left vectors so that left^dagger @ right = identity.

    Eigenvalues are grouped into near-degenerate clusters and each cluster
    block is corrected at once; cross terms between distinct eigenvalues are
    already small for well-conditioned inputs.
    """
    scale = max(1.0, float(np.max(np.abs(values))))
    ctol = 1e-6 * scale
    order = np.lexsort((values.imag, values.real))
    clusters = []
    current = [order[0]]
    for idx in order[1:]:
        if abs(values[idx] - values[current[-1]]) <= ctol:
            current.append(idx)
        else:
            clusters.append(current)
            current = [idx]
    clusters.append(current)

    fixed = left.copy()
    for cluster in clusters:
        cols = np.array(cluster)
        block = fixed[:, cols].conj().T @ right[:, cols]
        try:
            x = np.linalg.solve(block.conj().T, np.eye(len(cols)))
        except np.linalg.LinAlgError:
            continue  # leave this cluster unnormalized; condition flag covers it
        fixed[:, cols] = fixed[:, cols] @ x
    return fixed


def eig(m):
    """Full eigendecomposition with matched left/right vectors.

    Hermitian inputs (relative asymmetry below 1e-12) take the symmetric
    path and report a unit vector condition.  Defective inputs still return
    eigenvalues; the condition number flags that vectors are unreliable.
    """
    m = as_matrix(m)
    _require_square(m, "eig")

    if is_hermitian(m):
        w, v = np.linalg.eigh(m)
        return EigResult(
            values=w.astype(complex),
            right_vectors=v,
            left_vectors=v.copy(),
            vector_condition=1.0,
        )

    try:
        values, right = np.linalg.eig(m)
        lvalues, left = np.linalg.eig(m.conj().T)
    except np.linalg.LinAlgError as exc:
        raise IterationLimitError(f"eigenvalue iteration failed: {exc}") from exc

    cond = float(np.linalg.cond(right))
    if not np.isfinite(cond):
        cond = np.inf

    # pair each left column with the right column it overlaps most; the
    # left solve of the conjugate transpose returns eigenvalues conj(values)
    # in arbitrary order
    overlap = np.abs(left.conj().T @ right)
    rows, cols = linear_sum_assignment(-overlap)
    matched = np.empty_like(left)
    matched[:, cols] = left[:, rows]

    if cond < DEFECT_THRESHOLD:
        matched = _biorthogonalize(values, right, matched)

    return EigResult(
        values=values,
        right_vectors=right,
        left_vectors=matched,
        vector_condition=cond,
    )


def expm(m):
    """Matrix exponential (scaling-and-squaring, Pade order up to 13)."""
    m = as_matrix(m)
    _require_square(m, "expm")
    return scipy.linalg.expm(m)


def hs_inner(a, b):
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shapes {a.shape} and {b.shape} differ")
    return complex(np.vdot(a, b))


def matrix_norm(a, kind):
    """Induced/Frobenius matrix norms.

    kind: "one" (max column abs sum), "inf" (max row abs sum),
    "two" (largest singular value), "frobenius".
    """
    a = as_matrix(a)
    if kind == "one":
        return float(np.linalg.norm(a, 1))
    if kind == "inf":
        return float(np.linalg.norm(a, np.inf))
    if kind == "two":
        return float(np.linalg.norm(a, 2))
    if kind == "frobenius":
        return float(np.linalg.norm(a, "fro"))
    raise ValueError(f"unknown norm kind {kind!r}")


def qr(m):
    """QR factorization with strictly positive real diagonal of R.

    The phase freedom of the standard factorization is absorbed into Q so
    that R_ii > 0, which makes the factorization unique for full-rank input.
    """
    m = as_matrix(m)
    _require_square(m, "qr")
    q, r = np.linalg.qr(m)
    diag = np.diagonal(r).copy()
    tol = 1e-14 * float(np.linalg.norm(m))
    small = np.abs(diag) <= tol
    if np.any(small):
        raise RankDeficientError(
            f"R diagonal entries {np.flatnonzero(small).tolist()} below {tol:.3e}"
        )
    phases = diag / np.abs(diag)
    q = q * phases[np.newaxis, :]
    r = r * phases.conj()[:, np.newaxis]
    return q, r
