"""Dense statevector core for registers of n qudits of dimension d.

Amplitudes live in a flat complex vector indexed in mixed radix: position 0
is the most significant digit, so the product state |j_0 j_1 ... j_{n-1}>
sits at flat index j_0*d^{n-1} + j_1*d^{n-2} + ... + j_{n-1}.

Registers are value-semantic: every operation returns a fresh register and
never mutates its input, so independent runs can share inputs across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Hard ceiling on amplitude count; constructors take an overridable cap.
DEFAULT_SIZE_CAP = 2**20

# Entrywise tolerance for algebraic identities (unitarity, normalization).
ALGEBRAIC_TOL = 1e-12


class SizeCapError(ValueError):
    """Requested register would exceed the configured amplitude-count cap."""


def _checked_size(d: int, n: int, cap: int) -> int:
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got d={d}")
    if n < 1:
        raise ValueError(f"qudit count must be >= 1, got n={n}")
    size = d**n
    if size > cap:
        raise SizeCapError(
            f"register of {n} qudits with d={d} needs {size} amplitudes, "
            f"over the cap of {cap}"
        )
    return size


@dataclass(eq=False)
class QuditRegister:
    """Pure state of n qudits of dimension d as a dense amplitude vector.

    Direct construction trusts the caller to pass a normalized vector (all
    internal operations do); use :meth:`from_amplitudes` for raw user input,
    which normalizes and rejects the zero vector.
    """

    d: int
    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"qudit dimension must be >= 2, got d={self.d}")
        if self.n < 1:
            raise ValueError(f"qudit count must be >= 1, got n={self.n}")
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (self.d**self.n,):
            raise ValueError(
                f"expected {self.d**self.n} amplitudes for d={self.d}, "
                f"n={self.n}, got shape {amps.shape}"
            )
        self.amps = amps

    @classmethod
    def from_amplitudes(
        cls,
        d: int,
        n: int,
        values: Sequence[complex],
        cap: int = DEFAULT_SIZE_CAP,
    ) -> "QuditRegister":
        """Build a register from raw amplitudes, normalizing them."""
        _checked_size(d, n, cap)
        amps = np.asarray(values, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("the zero vector is not a state")
        return cls(d, n, amps / norm)

    @property
    def size(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "QuditRegister":
        return QuditRegister(self.d, self.n, self.amps.copy())

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to an n-axis tensor, one axis per qudit."""
        return self.amps.reshape([self.d] * self.n)


@dataclass(eq=False)
class Operator:
    """Dense complex square matrix acting on one or two qudits."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.shape != (self.dim, self.dim):
            raise ValueError(
                f"expected a {self.dim}x{self.dim} matrix, got {entries.shape}"
            )
        self.entries = entries

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(dim, np.eye(dim, dtype=np.complex128))

    def unitarity_defect(self) -> float:
        """Max-entry deviation of U†U from the identity."""
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(self.dim))))

    def is_unitary(self, tol: float = ALGEBRAIC_TOL) -> bool:
        return self.unitarity_defect() <= tol

    def dagger(self) -> "Operator":
        return Operator(self.dim, self.entries.conj().T)


@dataclass(eq=False)
class SecretAmplitudes:
    """Coefficients of the single-qudit secret state, normalized on build."""

    d: int
    alphas: np.ndarray

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"qudit dimension must be >= 2, got d={self.d}")
        alphas = np.asarray(self.alphas, dtype=np.complex128)
        if alphas.shape != (self.d,):
            raise ValueError(f"expected {self.d} coefficients, got {alphas.shape}")
        norm = np.linalg.norm(alphas)
        if norm == 0.0:
            raise ValueError("the zero vector is not a state")
        self.alphas = alphas / norm

    @classmethod
    def random(cls, d: int, rng: np.random.Generator) -> "SecretAmplitudes":
        """Draw a Haar-ish random secret (complex normal, then normalized)."""
        raw = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        return cls(d, raw)

    @classmethod
    def basis(cls, d: int, j: int) -> "SecretAmplitudes":
        alphas = np.zeros(d, dtype=np.complex128)
        alphas[j] = 1.0
        return cls(d, alphas)

    def register(self) -> QuditRegister:
        """The secret as a one-qudit register."""
        return QuditRegister(self.d, 1, self.alphas.copy())


# ---- Index arithmetic ----------------------------------------------------


def index_of_digits(d: int, digits: Sequence[int]) -> int:
    """Flat mixed-radix index of a digit string, digit 0 most significant."""
    if len(digits) == 0:
        raise ValueError("digit list must be nonempty")
    flat = 0
    for dig in digits:
        if not 0 <= dig < d:
            raise ValueError(f"digit {dig} out of range for d={d}")
        flat = flat * d + dig
    return flat


def digits_of_index(d: int, n: int, flat: int) -> list[int]:
    """Inverse of index_of_digits; round-trips exactly."""
    if d < 2 or n < 1:
        raise ValueError(f"invalid shape d={d}, n={n}")
    if not 0 <= flat < d**n:
        raise ValueError(f"flat index {flat} out of range for d={d}, n={n}")
    digits = [0] * n
    for pos in range(n - 1, -1, -1):
        flat, digits[pos] = divmod(flat, d)
    return digits


def basis_state(d: int, digits: Sequence[int], cap: int = DEFAULT_SIZE_CAP) -> QuditRegister:
    """Product basis state |digits[0] digits[1] ...> with unit amplitude."""
    n = len(digits)
    size = _checked_size(d, n, cap)
    amps = np.zeros(size, dtype=np.complex128)
    amps[index_of_digits(d, digits)] = 1.0
    return QuditRegister(d, n, amps)


def tensor(a: QuditRegister, b: QuditRegister) -> QuditRegister:
    """Tensor product, a's qudits first."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: d={a.d} vs d={b.d}")
    return QuditRegister(a.d, a.n + b.n, np.kron(a.amps, b.amps))


# ---- Inner products and fidelity -----------------------------------------


def _check_same_shape(a: QuditRegister, b: QuditRegister) -> None:
    if a.d != b.d or a.n != b.n:
        raise ValueError(
            f"register shape mismatch: (d={a.d}, n={a.n}) vs (d={b.d}, n={b.n})"
        )


def inner_product(a: QuditRegister, b: QuditRegister) -> complex:
    """<a|b> with conjugation on a."""
    _check_same_shape(a, b)
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: QuditRegister, b: QuditRegister) -> float:
    """|<a|b>|^2, insensitive to a global phase on either argument."""
    value = abs(inner_product(a, b)) ** 2
    return float(min(value, 1.0))


def align_phase(reference: np.ndarray, vec: np.ndarray, tol: float = ALGEBRAIC_TOL) -> np.ndarray:
    """Rotate vec by the global phase matching reference at the first
    amplitude where reference is nonzero.

    If vec vanishes there the two states differ beyond a phase and vec is
    returned unchanged; an entrywise comparison will then fail loudly.
    """
    nonzero = np.flatnonzero(np.abs(reference) > tol)
    if nonzero.size == 0:
        raise ValueError("reference vector is numerically zero")
    i = nonzero[0]
    if abs(vec[i]) <= tol:
        return np.array(vec, copy=True)
    phase = reference[i] / vec[i]
    return vec * (phase / abs(phase))


# ---- Local operator application -------------------------------------------


def apply_local(reg: QuditRegister, op: Operator, targets: Sequence[int]) -> QuditRegister:
    """Apply op to the given qudit positions, identity on the rest.

    The operator's tensor factors follow the order of targets: for a
    two-qudit op, its first factor acts on targets[0]. Only one- and
    two-qudit operators are supported.
    """
    t = len(targets)
    if t not in (1, 2):
        raise ValueError(f"apply_local supports 1 or 2 targets, got {t}")
    if len(set(targets)) != t:
        raise ValueError(f"repeated target in {list(targets)}")
    for pos in targets:
        if not 0 <= pos < reg.n:
            raise ValueError(f"target {pos} out of range for n={reg.n}")
    if op.dim != reg.d**t:
        raise ValueError(
            f"operator dimension {op.dim} does not match d^{t}={reg.d**t}"
        )
    moved = np.moveaxis(reg.tensor_view(), targets, range(t))
    mat = moved.reshape(op.dim, -1)
    out = op.entries @ mat
    out = out.reshape([reg.d] * reg.n)
    out = np.moveaxis(out, range(t), targets)
    return QuditRegister(reg.d, reg.n, np.ascontiguousarray(out.reshape(-1)))
