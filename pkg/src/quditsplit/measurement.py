"""Computational-basis measurement of any subset of qudits.

Provides the exact outcome distribution, seeded sampling with collapse,
forced collapse onto a chosen outcome, and exhaustive branch enumeration
(the workhorse of the verification sweeps).

Randomness contract: one deterministic 64-bit-seeded PCG64 generator per
trial, obtained from trial_stream(seed, trial) = default_rng(seed XOR trial),
so parallel trials reproduce independently of scheduling. No hidden global
state anywhere; every sampling function takes the generator explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .register import QuditRegister, digits_of_index, index_of_digits

# Outcomes below this probability are floating-point dust, not branches.
ZERO_PROB_THRESHOLD = 1e-14


class ZeroProbabilityError(ValueError):
    """A collapse was forced onto an outcome of (numerically) zero probability."""


@dataclass(frozen=True)
class MeasurementRecord:
    """Which qudits were measured, the digit string observed, and the
    probability of that branch."""

    targets: tuple[int, ...]
    outcome: tuple[int, ...]
    probability: float

    def __post_init__(self):
        if len(self.targets) != len(self.outcome):
            raise ValueError("outcome length must match target count")


def trial_stream(seed: int, trial: int = 0) -> np.random.Generator:
    """Deterministic per-trial generator: default_rng(seed XOR trial)."""
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if trial < 0:
        raise ValueError(f"trial index must be nonnegative, got {trial}")
    return np.random.default_rng(seed ^ trial)


def _validate_targets(reg: QuditRegister, targets: Sequence[int]) -> list[int]:
    targets = list(targets)
    if len(targets) == 0:
        raise ValueError("target list must be nonempty")
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target in {targets}")
    for pos in targets:
        if not 0 <= pos < reg.n:
            raise ValueError(f"target {pos} out of range for n={reg.n}")
    return targets


def _sliced(reg: QuditRegister, targets: list[int]) -> np.ndarray:
    """Amplitudes as a (d^t, d^{n-t}) matrix, row = flat outcome index.

    Untargeted qudits keep their relative order along the columns.
    """
    t = len(targets)
    moved = np.moveaxis(reg.tensor_view(), targets, range(t))
    return moved.reshape(reg.d**t, -1)


def _slice_probabilities(reg: QuditRegister, targets: list[int]) -> np.ndarray:
    mat = _sliced(reg, targets)
    return np.sum(np.abs(mat) ** 2, axis=1)


def outcome_distribution(
    reg: QuditRegister, targets: Sequence[int]
) -> dict[tuple[int, ...], float]:
    """Exact probability of every observable outcome, keyed by digit tuple.

    Outcomes below ZERO_PROB_THRESHOLD are omitted; the remaining
    probabilities sum to 1 within 1e-12.
    """
    targets = _validate_targets(reg, targets)
    probs = _slice_probabilities(reg, targets)
    t = len(targets)
    return {
        tuple(digits_of_index(reg.d, t, idx)): float(p)
        for idx, p in enumerate(probs)
        if p >= ZERO_PROB_THRESHOLD
    }


def collapse(
    reg: QuditRegister, targets: Sequence[int], outcome: Sequence[int]
) -> tuple[Optional[QuditRegister], float]:
    """Project onto the given outcome digits and renormalize the rest.

    Returns the register over the remaining qudits (None if every qudit was
    measured) and the branch probability. Forcing an outcome of zero
    probability raises ZeroProbabilityError.
    """
    targets = _validate_targets(reg, targets)
    outcome = list(outcome)
    if len(outcome) != len(targets):
        raise ValueError("outcome length must match target count")
    idx = index_of_digits(reg.d, outcome)
    mat = _sliced(reg, targets)
    row = mat[idx]
    prob = float(np.sum(np.abs(row) ** 2))
    if prob < ZERO_PROB_THRESHOLD:
        raise ZeroProbabilityError(
            f"outcome {tuple(outcome)} on qudits {tuple(targets)} has "
            f"probability {prob:.3e}"
        )
    remaining = reg.n - len(targets)
    if remaining == 0:
        return None, prob
    collapsed = QuditRegister(reg.d, remaining, row / np.sqrt(prob))
    return collapsed, prob


def _sample_indices(
    probs: np.ndarray, rng: np.random.Generator, count: int
) -> np.ndarray:
    """Draw `count` outcome indices from a probability vector.

    Sampling is by inverse CDF over the nonzero support, so zero-probability
    outcomes can never be produced and the draw sequence is reproducible for
    a given generator state.
    """
    support = np.flatnonzero(probs >= ZERO_PROB_THRESHOLD)
    if support.size == 0:
        raise ValueError("state has no outcome above the zero threshold")
    cum = np.cumsum(probs[support])
    u = rng.random(count) * cum[-1]
    picks = np.searchsorted(cum, u, side="right")
    return support[np.minimum(picks, support.size - 1)]


def measure(
    reg: QuditRegister, targets: Sequence[int], rng: np.random.Generator
) -> tuple[MeasurementRecord, Optional[QuditRegister]]:
    """Sample one outcome and collapse. Identical generator state gives an
    identical outcome sequence."""
    targets = _validate_targets(reg, targets)
    probs = _slice_probabilities(reg, targets)
    idx = int(_sample_indices(probs, rng, 1)[0])
    digits = digits_of_index(reg.d, len(targets), idx)
    collapsed, prob = collapse(reg, targets, digits)
    record = MeasurementRecord(tuple(targets), tuple(digits), prob)
    return record, collapsed


def sample_outcome_counts(
    reg: QuditRegister,
    targets: Sequence[int],
    rng: np.random.Generator,
    samples: int,
) -> np.ndarray:
    """Histogram of `samples` independent draws over all d^t outcomes,
    indexed by flat outcome index (no collapse; repeated preparation)."""
    targets = _validate_targets(reg, targets)
    if samples < 0:
        raise ValueError(f"sample count must be nonnegative, got {samples}")
    probs = _slice_probabilities(reg, targets)
    counts = np.zeros(probs.size, dtype=np.int64)
    if samples:
        picked = _sample_indices(probs, rng, samples)
        np.add.at(counts, picked, 1)
    return counts


def enumerate_branches(
    reg: QuditRegister, targets: Sequence[int]
) -> list[tuple[MeasurementRecord, Optional[QuditRegister]]]:
    """All nonzero-probability branches, lexicographic by outcome tuple.

    Probabilities over the returned list sum to 1 within 1e-12.
    """
    targets = _validate_targets(reg, targets)
    mat = _sliced(reg, targets)
    probs = np.sum(np.abs(mat) ** 2, axis=1)
    t = len(targets)
    remaining = reg.n - t
    branches = []
    for idx in range(probs.size):
        prob = float(probs[idx])
        if prob < ZERO_PROB_THRESHOLD:
            continue
        digits = tuple(digits_of_index(reg.d, t, idx))
        record = MeasurementRecord(tuple(targets), digits, prob)
        if remaining == 0:
            branches.append((record, None))
        else:
            state = QuditRegister(reg.d, remaining, mat[idx] / np.sqrt(prob))
            branches.append((record, state))
    return branches
