"""End-to-end orchestration of the d-dimensional information splitting run.

Party layout (fixed across the whole package): position 0 holds the sender's
secret qudit, positions 1..N the N share-holders ("bob1".."bobN"), and
position N+1 the sender's half of the entangled resource. Event positions in
transcripts always use these party labels, even after measured qudits have
been dropped from the working register.

A run has two phases:

* splitting: entangle the secret with the resource (XOR then Fourier on the
  sender's qudits), measure them, broadcast the outcome digits (l, m), and
  let every share-holder apply the local correction. All shares then hold
  the state sum_k alpha_k |k k ... k>, written qss_register(secret, N).
* reconstruction: share-holders 2..N Fourier-transform and measure their
  qudits, reporting the outcomes to share-holder 1, who undoes the phases
  either one step at a time (sequential) or in a single aggregated
  correction (parallel). Share-holder 1 ends up holding the secret.

Measurement outcomes come from an explicit rng stream or from forced
outcome digits; forcing is first-class so verification can sweep every
branch exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .gates import (
    aggregated_phase_correction,
    bob1_correction,
    bob_mu_correction,
    phase_correction,
    qft_operator,
    xor_apply,
)
from .measurement import MeasurementRecord, collapse, measure, trial_stream
from .register import (
    DEFAULT_SIZE_CAP,
    QuditRegister,
    SecretAmplitudes,
    _checked_size,
    apply_local,
    fidelity,
    index_of_digits,
    tensor,
)

SEQUENTIAL = "sequential"
PARALLEL = "parallel"
MODES = (SEQUENTIAL, PARALLEL)

# Final-state fidelity tolerance for end-to-end checks.
FIDELITY_TOL = 1e-9


# ---- Transcript events -----------------------------------------------------


@dataclass(frozen=True)
class PrepareEvent:
    name: str
    positions: tuple[int, ...]


@dataclass(frozen=True)
class GateEvent:
    name: str
    positions: tuple[int, ...]


@dataclass(frozen=True)
class MeasureEvent:
    positions: tuple[int, ...]
    outcome: tuple[int, ...]
    probability: float


@dataclass(frozen=True)
class MessageEvent:
    sender: str
    recipients: tuple[str, ...]
    payload: tuple[int, ...]


@dataclass(frozen=True)
class CorrectionEvent:
    name: str
    position: int
    params: tuple[int, ...]


Event = Union[PrepareEvent, GateEvent, MeasureEvent, MessageEvent, CorrectionEvent]


@dataclass
class ProtocolTranscript:
    """Ordered event log of one run, replayable given the seed."""

    d: int
    n_parties: int
    mode: str
    secret: SecretAmplitudes
    events: list[Event]
    final_fidelity: float
    seed: Optional[int] = None

    def measure_events(self) -> list[MeasureEvent]:
        return [ev for ev in self.events if isinstance(ev, MeasureEvent)]

    def split_outcome(self) -> tuple[int, int]:
        """(l, m) observed by the sender."""
        first = self.measure_events()[0]
        return first.outcome[0], first.outcome[1]

    def reconstruction_digits(self) -> list[int]:
        """Outcome digits of share-holders 2..N in party order."""
        digits = {}
        for ev in self.measure_events()[1:]:
            digits[ev.positions[0]] = ev.outcome[0]
        return [digits[party] for party in sorted(digits)]


def _bob(k: int) -> str:
    return f"bob{k}"


# ---- Resource and input preparation ----------------------------------------


def prepare_ghz(d: int, parties: int, cap: int = DEFAULT_SIZE_CAP) -> QuditRegister:
    """Maximally entangled resource over `parties` qudits:
    (1/sqrt(d)) sum_j |j j ... j>."""
    if parties < 2:
        raise ValueError(f"resource needs at least 2 qudits, got {parties}")
    size = _checked_size(d, parties, cap)
    amps = np.zeros(size, dtype=np.complex128)
    value = 1.0 / np.sqrt(d)
    for j in range(d):
        amps[index_of_digits(d, [j] * parties)] = value
    return QuditRegister(d, parties, amps)


def prepare_joint(
    secret: SecretAmplitudes, n_bobs: int, cap: int = DEFAULT_SIZE_CAP
) -> QuditRegister:
    """Secret qudit at position 0, entangled resource on positions 1..N+1."""
    if n_bobs < 1:
        raise ValueError(f"need at least one share-holder, got {n_bobs}")
    _checked_size(secret.d, n_bobs + 2, cap)
    ghz = prepare_ghz(secret.d, n_bobs + 1, cap)
    return tensor(secret.register(), ghz)


def qss_register(
    secret: SecretAmplitudes, parties: int, cap: int = DEFAULT_SIZE_CAP
) -> QuditRegister:
    """The shared post-splitting state sum_k alpha_k |k>^(x parties)."""
    if parties < 1:
        raise ValueError(f"need at least one party, got {parties}")
    if parties == 1:
        return secret.register()
    size = _checked_size(secret.d, parties, cap)
    amps = np.zeros(size, dtype=np.complex128)
    for k in range(secret.d):
        amps[index_of_digits(secret.d, [k] * parties)] = secret.alphas[k]
    return QuditRegister(secret.d, parties, amps)


# ---- Splitting --------------------------------------------------------------


def encode(joint: QuditRegister, n_bobs: int) -> tuple[QuditRegister, list[Event]]:
    """Sender's entangling step: XOR from the secret onto her resource
    qudit, then the Fourier gate on the secret."""
    if joint.n != n_bobs + 2:
        raise ValueError(
            f"joint register has {joint.n} qudits, expected {n_bobs + 2}"
        )
    reg = xor_apply(joint, 0, n_bobs + 1)
    reg = apply_local(reg, qft_operator(joint.d), [0])
    events: list[Event] = [
        GateEvent("xor", (0, n_bobs + 1)),
        GateEvent("qft", (0,)),
    ]
    return reg, events


def split(
    joint: QuditRegister,
    n_bobs: int,
    rng: Optional[np.random.Generator] = None,
    forced: Optional[Sequence[int]] = None,
) -> tuple[MeasurementRecord, QuditRegister, list[Event]]:
    """Encode, measure the sender's two qudits, and broadcast (l, m).

    Returns the measurement record, the N-qudit branch held by the
    share-holders, and the transcript fragment. Exactly one of rng / forced
    must drive the outcome.
    """
    encoded, events = encode(joint, n_bobs)
    targets = [0, n_bobs + 1]
    if forced is not None:
        branch, prob = collapse(encoded, targets, forced)
        record = MeasurementRecord(tuple(targets), tuple(forced), prob)
    else:
        if rng is None:
            raise ValueError("need an rng stream or a forced outcome")
        record, branch = measure(encoded, targets, rng)
    l, m = record.outcome
    events.append(MeasureEvent(record.targets, record.outcome, record.probability))
    events.append(MessageEvent("alice", (_bob(1),), (l, m)))
    if n_bobs >= 2:
        recipients = tuple(_bob(k) for k in range(2, n_bobs + 1))
        events.append(MessageEvent("alice", recipients, (m,)))
    return record, branch, events


def apply_corrections(branch: QuditRegister, l: int, m: int) -> QuditRegister:
    """Every share-holder's local recovery for split outcome (l, m); the
    result is the shared state sum_k alpha_k |k>^(x N)."""
    reg = bob1_correction(branch, 0, l, m)
    for mu in range(2, branch.n + 1):
        reg = bob_mu_correction(reg, mu - 1, m)
    return reg


def _correction_events(n_bobs: int, l: int, m: int) -> list[Event]:
    events: list[Event] = [CorrectionEvent("relabel_phase", 1, (l, m))]
    for mu in range(2, n_bobs + 1):
        events.append(CorrectionEvent("relabel", mu, (m,)))
    return events


# ---- Reconstruction ---------------------------------------------------------


def reconstruct_step(
    qss: QuditRegister,
    rng: Optional[np.random.Generator] = None,
    forced: Optional[int] = None,
) -> tuple[MeasurementRecord, QuditRegister, list[Event]]:
    """One hand-off: the highest-numbered remaining share-holder Fourier-
    transforms and measures his qudit, reports the digit, and share-holder 1
    undoes the resulting phase. K parties in, K-1 parties out."""
    k_parties = qss.n
    if k_parties < 2:
        raise ValueError("reconstruction step needs at least 2 parties")
    d = qss.d
    reg = apply_local(qss, qft_operator(d), [k_parties - 1])
    if forced is not None:
        collapsed, prob = collapse(reg, [k_parties - 1], [forced])
        record = MeasurementRecord((k_parties - 1,), (forced,), prob)
    else:
        if rng is None:
            raise ValueError("need an rng stream or a forced outcome")
        record, collapsed = measure(reg, [k_parties - 1], rng)
    digit = record.outcome[0]
    out = phase_correction(collapsed, 0, digit)
    events: list[Event] = [
        GateEvent("qft", (k_parties,)),
        MeasureEvent((k_parties,), (digit,), record.probability),
        MessageEvent(_bob(k_parties), (_bob(1),), (digit,)),
        CorrectionEvent("phase", 1, (digit,)),
    ]
    return record, out, events


def _check_forced_digits(
    d: int, n_bobs: int, forced: Optional[Sequence[int]]
) -> Optional[list[int]]:
    if forced is None:
        return None
    forced = list(forced)
    if len(forced) != n_bobs - 1:
        raise ValueError(
            f"expected {n_bobs - 1} forced digits for parties 2..{n_bobs}, "
            f"got {len(forced)}"
        )
    for digit in forced:
        if not 0 <= digit < d:
            raise ValueError(f"forced digit {digit} out of range for d={d}")
    return forced


def reconstruct_sequential(
    qss: QuditRegister,
    rng: Optional[np.random.Generator] = None,
    forced: Optional[Sequence[int]] = None,
) -> tuple[QuditRegister, list[MeasurementRecord], list[Event]]:
    """Chain of reconstruct_step from K=N down to K=2, ending with
    share-holder 1 alone holding the secret.

    forced, when given, lists the outcome digits of parties 2..N in party
    order; the chain consumes them from the end (party N measures first).
    """
    n_bobs = qss.n
    forced = _check_forced_digits(qss.d, n_bobs, forced)
    reg = qss
    records: list[MeasurementRecord] = []
    events: list[Event] = []
    for k_parties in range(n_bobs, 1, -1):
        digit = forced[k_parties - 2] if forced is not None else None
        record, reg, step_events = reconstruct_step(reg, rng, digit)
        records.append(record)
        events.extend(step_events)
    if reg is qss:
        reg = qss.copy()
    return reg, records, events


def reconstruct_parallel(
    qss: QuditRegister,
    rng: Optional[np.random.Generator] = None,
    forced: Optional[Sequence[int]] = None,
) -> tuple[QuditRegister, list[MeasurementRecord], list[Event]]:
    """All of parties 2..N Fourier-transform and measure; share-holder 1
    applies one aggregated phase correction with the digit sum.

    forced follows the same party-order convention as the sequential mode.
    """
    n_bobs = qss.n
    d = qss.d
    forced = _check_forced_digits(d, n_bobs, forced)
    if n_bobs == 1:
        return qss.copy(), [], []
    reg = qss
    events: list[Event] = []
    fourier = qft_operator(d)
    for party in range(2, n_bobs + 1):
        reg = apply_local(reg, fourier, [party - 1])
        events.append(GateEvent("qft", (party,)))
    records: list[MeasurementRecord] = []
    digits: list[int] = []
    # Parties 2..N all sit at register index 1 as their predecessors collapse.
    for party in range(2, n_bobs + 1):
        if forced is not None:
            collapsed, prob = collapse(reg, [1], [forced[party - 2]])
            record = MeasurementRecord((1,), (forced[party - 2],), prob)
        else:
            if rng is None:
                raise ValueError("need an rng stream or a forced outcome")
            record, collapsed = measure(reg, [1], rng)
        reg = collapsed
        digit = record.outcome[0]
        digits.append(digit)
        records.append(record)
        events.append(MeasureEvent((party,), (digit,), record.probability))
        events.append(MessageEvent(_bob(party), (_bob(1),), (digit,)))
    k_sum = sum(digits) % d
    reg = aggregated_phase_correction(reg, 0, k_sum)
    events.append(CorrectionEvent("aggregated_phase", 1, (k_sum,)))
    return reg, records, events


# ---- Full runs --------------------------------------------------------------


def run_protocol(
    secret: SecretAmplitudes,
    d: int,
    n_bobs: int,
    mode: str,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    forced_split: Optional[Sequence[int]] = None,
    forced_recon: Optional[Sequence[int]] = None,
    cap: int = DEFAULT_SIZE_CAP,
) -> ProtocolTranscript:
    """Run split + reconstruction end to end and log the transcript.

    Outcomes come from `rng` if given, else from a stream seeded with
    `seed`; forced outcome digits override sampling wherever supplied.
    """
    if secret.d != d:
        raise ValueError(f"secret has d={secret.d}, protocol asked for d={d}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if n_bobs < 1:
        raise ValueError(f"need at least one share-holder, got {n_bobs}")
    if rng is None and seed is not None:
        rng = trial_stream(seed)
    needs_rng = forced_split is None or (forced_recon is None and n_bobs >= 2)
    if rng is None and needs_rng:
        raise ValueError("need a seed/rng or a full set of forced outcomes")

    events: list[Event] = [
        PrepareEvent("ghz", tuple(range(1, n_bobs + 2))),
        PrepareEvent("secret", (0,)),
    ]
    joint = prepare_joint(secret, n_bobs, cap)
    record, branch, split_events = split(joint, n_bobs, rng, forced_split)
    events.extend(split_events)
    l, m = record.outcome
    qss = apply_corrections(branch, l, m)
    events.extend(_correction_events(n_bobs, l, m))

    if mode == SEQUENTIAL:
        final, _, recon_events = reconstruct_sequential(qss, rng, forced_recon)
    else:
        final, _, recon_events = reconstruct_parallel(qss, rng, forced_recon)
    events.extend(recon_events)

    final_fidelity = fidelity(final, secret.register())
    return ProtocolTranscript(
        d=d,
        n_parties=n_bobs,
        mode=mode,
        secret=secret,
        events=events,
        final_fidelity=final_fidelity,
        seed=seed,
    )
