"""Classical Kolmogorov generators and the Lindblad-to-classical reduction.

A Kolmogorov generator is a real d x d matrix with nonnegative off-diagonal
entries and vanishing column sums; it generates a stochastic semigroup
exp(tK).  Unlike the quantum case there is no constraint among classical
relaxation rates: ``from_rates`` realizes any nonnegative list as the exact
spectrum of a valid generator.
"""

from dataclasses import dataclass

import numpy as np

from . import generator as genmod
from .errors import (
    ColumnSumError,
    NegativeOffDiagonalError,
    NegativeRateError,
    NonOrthonormalBasisError,
)

__all__ = [
    "KolmogorovGenerator",
    "validate",
    "from_rates",
    "lindblad_to_kolmogorov",
    "classical_spectrum",
]

OFFDIAG_TOL = 1e-12
COLSUM_TOL = 1e-12


@dataclass(frozen=True)
class KolmogorovGenerator:
    dim: int
    k: np.ndarray

    @property
    def rates_matrix(self):
        """Nonnegative transition rates R_ij = K_ij for i != j (diagonal zero)."""
        r = self.k.copy()
        np.fill_diagonal(r, 0.0)
        return r


def validate(k):
    """Check the sign and column-sum conditions and wrap the matrix."""
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError(f"expected a square real matrix, got shape {k.shape}")
    d = k.shape[0]
    scale = max(1.0, float(np.max(np.abs(k))) if k.size else 1.0)
    for j in range(d):
        for i in range(d):
            if i != j and k[i, j] < -OFFDIAG_TOL * scale:
                raise NegativeOffDiagonalError(i, j, float(k[i, j]))
    sums = k.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums) > COLSUM_TOL * scale)
    if bad.size:
        raise ColumnSumError(int(bad[0]), float(sums[bad[0]]))
    return KolmogorovGenerator(dim=d, k=k)


def from_rates(rates):
    """Generator with spectrum exactly {0, -r_1, ..., -r_{d-1}}.

    State i (2 <= i <= d-1) decays to state 1 at rate r_i and state 1
    decays to state d at rate r_1; the last column is zero.
    """
    rates = [float(r) for r in rates]
    if any(r < 0.0 for r in rates):
        raise NegativeRateError(f"rates must be nonnegative, got {rates}")
    d = len(rates) + 1
    k = np.zeros((d, d))
    k[0, 0] = -rates[0]
    k[d - 1, 0] = rates[0]
    for j in range(1, d - 1):
        k[0, j] = rates[j]
        k[j, j] = -rates[j]
    return validate(k)


def lindblad_to_kolmogorov(canonical, basis):
    """Populations-only reduction K_ij = <i| L(|j><j|) |i> in a fixed basis.

    Equals R_ij - delta_ij sum_k R_kj with R_ij = sum_n gamma_n |<i|L_n|j>|^2,
    and validates as a Kolmogorov generator for completely positive input.
    """
    gen = canonical.base
    d = gen.dim
    b = np.asarray(basis, dtype=complex)
    if b.shape != (d, d):
        raise NonOrthonormalBasisError(f"expected {d} basis vectors of length {d}")
    gram = b.conj().T @ b
    if float(np.max(np.abs(gram - np.eye(d)))) > 1e-10:
        raise NonOrthonormalBasisError("basis vectors are not orthonormal to 1e-10")

    k = np.zeros((d, d))
    for j in range(d):
        ket = b[:, j]
        proj = np.outer(ket, ket.conj())
        image = genmod.apply(gen, proj)
        for i in range(d):
            k[i, j] = float((b[:, i].conj() @ image @ b[:, i]).real)
    return validate(k)


def classical_spectrum(k):
    """Classical relaxation rates -Re(eigenvalues), sorted ascending.

    Complex pairs keep both members; nothing is deduplicated in the data.
    """
    ell = np.linalg.eigvals(k.k)
    return np.sort(-ell.real)
