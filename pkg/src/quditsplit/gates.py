"""Unitaries used by the splitting protocol.

The Fourier and XOR gates come in explicit matrix form (for embedding and
cross-checking); the four correction maps act directly on amplitude strides
as a basis relabeling plus a diagonal phase, which keeps them O(d^n) instead
of O(d^{n+1}).

Phase factors are always computed as exp(+-2*pi*i*(p mod d)/d) with the
integer exponent p reduced mod d before the division, so large products
never reach the trig functions and periodicity is exact.
"""

from __future__ import annotations

import numpy as np

from .register import Operator, QuditRegister


def unit_phase(d: int, exponent: int) -> complex:
    """exp(2*pi*i*exponent/d), with the exponent reduced mod d first."""
    return complex(np.exp(2j * np.pi * (exponent % d) / d))


def qft_operator(d: int) -> Operator:
    """Fourier gate on one qudit: |j> -> (1/sqrt(d)) sum_k w^{jk} |k>.

    Entry (k, j) is exp(2*pi*i*j*k/d)/sqrt(d); at d=2 this is the Hadamard.
    """
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got d={d}")
    grid = np.outer(np.arange(d), np.arange(d)) % d
    entries = np.exp(2j * np.pi * grid / d) / np.sqrt(d)
    return Operator(d, entries)


def xor_operator(d: int) -> Operator:
    """Two-qudit XOR as an explicit d^2 x d^2 matrix: |j>|k> -> |j>|k+j mod d>.

    The first tensor factor is the control. A pure basis permutation, so
    exactly unitary.
    """
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got d={d}")
    dim = d * d
    entries = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(d):
        for k in range(d):
            entries[j * d + (k + j) % d, j * d + k] = 1.0
    return Operator(dim, entries)


def xor_apply(reg: QuditRegister, control: int, target: int) -> QuditRegister:
    """Apply the XOR permutation in place of a matrix: target digit gains
    the control digit mod d. Control digits are untouched and the amplitude
    multiset is exactly preserved."""
    if control == target:
        raise ValueError("control and target must differ")
    for pos in (control, target):
        if not 0 <= pos < reg.n:
            raise ValueError(f"position {pos} out of range for n={reg.n}")
    moved = np.moveaxis(reg.tensor_view(), (control, target), (0, 1)).copy()
    for j in range(reg.d):
        # new target digit k+j comes from old digit k: a forward roll by j
        moved[j] = np.roll(moved[j], shift=j, axis=0)
    out = np.moveaxis(moved, (0, 1), (control, target))
    return QuditRegister(reg.d, reg.n, np.ascontiguousarray(out.reshape(-1)))


def _relabel_with_phase(
    reg: QuditRegister, target: int, source: np.ndarray, phases: np.ndarray
) -> QuditRegister:
    """Map the target qudit by new_amp[k] = phases[k] * old_amp[source[k]]."""
    if not 0 <= target < reg.n:
        raise ValueError(f"position {target} out of range for n={reg.n}")
    moved = np.moveaxis(reg.tensor_view(), target, 0)
    shape = (reg.d,) + (1,) * (reg.n - 1)
    out = moved[source] * phases.reshape(shape)
    out = np.moveaxis(out, 0, target)
    return QuditRegister(reg.d, reg.n, np.ascontiguousarray(out.reshape(-1)))


def _check_digit(d: int, value: int, name: str) -> None:
    if not 0 <= value < d:
        raise ValueError(f"{name}={value} out of range for d={d}")


def bob1_correction(
    reg: QuditRegister, target: int, l: int, m: int
) -> QuditRegister:
    """Recovery map of the first share-holder for split outcome (l, m).

    On the target qudit the basis state |r> is relabeled to |k> with
    k = (m - r) mod d and picks up the phase exp(-2*pi*i*k*l/d); a basis
    permutation times a diagonal phase, hence unitary.
    """
    d = reg.d
    _check_digit(d, l, "l")
    _check_digit(d, m, "m")
    ks = np.arange(d)
    source = (m - ks) % d
    phases = np.array([unit_phase(d, -(k * l)) for k in range(d)])
    return _relabel_with_phase(reg, target, source, phases)


def bob_mu_correction(reg: QuditRegister, target: int, m: int) -> QuditRegister:
    """Recovery map of every other share-holder: pure relabeling
    r -> (m - r) mod d, no phase."""
    return bob1_correction(reg, target, 0, m)


def phase_correction(reg: QuditRegister, target: int, k_out: int) -> QuditRegister:
    """Diagonal phase |j> -> exp(-2*pi*i*j*k_out/d) |j> on the target qudit,
    undoing the phase kicked back by one reconstruction measurement."""
    d = reg.d
    _check_digit(d, k_out, "k_out")
    source = np.arange(d)
    phases = np.array([unit_phase(d, -(j * k_out)) for j in range(d)])
    return _relabel_with_phase(reg, target, source, phases)


def aggregated_phase_correction(
    reg: QuditRegister, target: int, k_sum: int
) -> QuditRegister:
    """One-shot phase fix for the parallel reconstruction: |j> picks up
    exp(-2*pi*i*j*k_sum/d), where k_sum is the sum of all reported outcome
    digits (reduced mod d internally)."""
    if k_sum < 0:
        raise ValueError(f"k_sum must be nonnegative, got {k_sum}")
    d = reg.d
    source = np.arange(d)
    phases = np.array([unit_phase(d, -(j * k_sum)) for j in range(d)])
    return _relabel_with_phase(reg, target, source, phases)
