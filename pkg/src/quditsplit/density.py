"""Reduced density matrices and the diagonal-marginal secrecy check.

Marginals are computed straight from the statevector (contracting the traced
qudits) so memory stays O(d^{2k}) for k kept qudits; the full d^n x d^n
density matrix is never formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .register import QuditRegister, SecretAmplitudes, index_of_digits

# Default tolerance for the off-diagonal secrecy check; the claim is exact
# in theory, so this is purely numerical slack.
DIAGONAL_TOL = 1e-12

# Loose construction guard; tests assert the tight 1e-12 bounds on the
# desk-scale grid, where accumulation error is far below it.
_GUARD_TOL = 1e-9


@dataclass(eq=False)
class DensityMatrix:
    """d^k x d^k positive-semidefinite matrix of unit trace over k qudits.

    Hermiticity and unit trace are validated on construction (eigenvalue
    nonnegativity is not: no check here needs it and it is numerically
    fragile).
    """

    d: int
    k: int
    entries: np.ndarray

    def __post_init__(self):
        if self.d < 2 or self.k < 1:
            raise ValueError(f"invalid shape d={self.d}, k={self.k}")
        dim = self.d**self.k
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix, got {entries.shape}")
        if np.max(np.abs(entries - entries.conj().T)) > _GUARD_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(entries) - 1.0) > _GUARD_TOL:
            raise ValueError(f"density matrix trace is {np.trace(entries)}, not 1")
        self.entries = entries

    @property
    def dim(self) -> int:
        return self.d**self.k

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def reduced_density(reg: QuditRegister, keep: Sequence[int]) -> DensityMatrix:
    """Partial trace over every qudit not in `keep`.

    The kept qudits appear in the order given by `keep`; keeping all of them
    yields the rank-1 projector onto the state.
    """
    keep = list(keep)
    if len(keep) == 0:
        raise ValueError("keep list must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"repeated position in {keep}")
    for pos in keep:
        if not 0 <= pos < reg.n:
            raise ValueError(f"position {pos} out of range for n={reg.n}")
    k = len(keep)
    moved = np.moveaxis(reg.tensor_view(), keep, range(k))
    mat = moved.reshape(reg.d**k, -1)
    rho = mat @ mat.conj().T
    return DensityMatrix(reg.d, k, rho)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace a density matrix down to the qudits in `keep` (indices relative
    to rho's own k qudits, kept in the given order)."""
    keep = list(keep)
    if len(keep) == 0:
        raise ValueError("keep list must be nonempty")
    if len(set(keep)) != len(keep):
        raise ValueError(f"repeated position in {keep}")
    for pos in keep:
        if not 0 <= pos < rho.k:
            raise ValueError(f"position {pos} out of range for k={rho.k}")
    s = len(keep)
    if s == rho.k:
        order = keep
    else:
        order = keep + [p for p in range(rho.k) if p not in keep]
    tensor = rho.entries.reshape([rho.d] * (2 * rho.k))
    row_perm = order
    col_perm = [rho.k + p for p in order]
    tensor = np.transpose(tensor, row_perm + col_perm)
    dim_keep = rho.d**s
    dim_rest = rho.d ** (rho.k - s)
    tensor = tensor.reshape(dim_keep, dim_rest, dim_keep, dim_rest)
    traced = np.einsum("itjt->ij", tensor)
    return DensityMatrix(rho.d, s, traced)


def is_diagonal(rho: DensityMatrix, tol: float = DIAGONAL_TOL) -> bool:
    """True iff every off-diagonal magnitude is at most tol."""
    off = rho.entries - np.diag(np.diag(rho.entries))
    return bool(np.max(np.abs(off)) <= tol)


def expected_marginal(alphas: SecretAmplitudes, copies: int = 1) -> DensityMatrix:
    """The marginal a subset of shares is supposed to carry: squared secret
    magnitudes on the all-equal-digit diagonal, zero everywhere else.

    copies=1 gives diag(|a_0|^2, ..., |a_{d-1}|^2); larger subsets put
    |a_k|^2 at the |k k ... k> diagonal entry.
    """
    if copies < 1:
        raise ValueError(f"copies must be >= 1, got {copies}")
    d = alphas.d
    dim = d**copies
    entries = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(d):
        idx = index_of_digits(d, [k] * copies)
        entries[idx, idx] = abs(alphas.alphas[k]) ** 2
    return DensityMatrix(d, copies, entries)
