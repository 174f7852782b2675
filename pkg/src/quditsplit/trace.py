"""Machine-readable run artifacts: JSON-lines traces and CSV summaries.

One JSON object per protocol run, schema:

    {version, d, n, mode, seed, trial, secret: [{re, im}, ...],
     events: [{type, ...}, ...], final_fidelity}

Event payloads: gate {name, positions}, measure {positions, outcome,
probability}, message {from, to, payload}, correction {name, position,
params}, prepare {name, positions}. Every float is written with 17
significant digits so doubles round-trip exactly and repeated runs produce
byte-identical files.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional

import numpy as np

from .protocol import (
    CorrectionEvent,
    Event,
    GateEvent,
    MeasureEvent,
    MessageEvent,
    PrepareEvent,
    ProtocolTranscript,
)

TRACE_VERSION = 1

SUMMARY_HEADER = "d,n,mode,trial,l,m,k_digits,final_fidelity"


def format_float(value: float) -> str:
    """Decimal form with 17 significant digits (exact double round-trip)."""
    return f"{value:.17g}"


def dumps(obj) -> str:
    """Compact JSON with deterministic key order and 17-digit floats."""
    parts: list[str] = []
    _emit(obj, parts)
    return "".join(parts)


def _emit(obj, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(format_float(float(obj)))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(",")
            _emit(item, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _emit(value, parts)
        parts.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def complex_pair(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def event_to_dict(event: Event) -> dict:
    if isinstance(event, PrepareEvent):
        return {
            "type": "prepare",
            "name": event.name,
            "positions": list(event.positions),
        }
    if isinstance(event, GateEvent):
        return {"type": "gate", "name": event.name, "positions": list(event.positions)}
    if isinstance(event, MeasureEvent):
        return {
            "type": "measure",
            "positions": list(event.positions),
            "outcome": list(event.outcome),
            "probability": float(event.probability),
        }
    if isinstance(event, MessageEvent):
        return {
            "type": "message",
            "from": event.sender,
            "to": list(event.recipients),
            "payload": list(event.payload),
        }
    if isinstance(event, CorrectionEvent):
        return {
            "type": "correction",
            "name": event.name,
            "position": event.position,
            "params": list(event.params),
        }
    raise TypeError(f"unknown event type {type(event).__name__}")


def transcript_to_trace(
    transcript: ProtocolTranscript, seed: Optional[int], trial: int
) -> dict:
    return {
        "version": TRACE_VERSION,
        "d": transcript.d,
        "n": transcript.n_parties,
        "mode": transcript.mode,
        "seed": seed,
        "trial": trial,
        "secret": [complex_pair(z) for z in transcript.secret.alphas],
        "events": [event_to_dict(ev) for ev in transcript.events],
        "final_fidelity": float(transcript.final_fidelity),
    }


def trace_line(transcript: ProtocolTranscript, seed: Optional[int], trial: int) -> str:
    return dumps(transcript_to_trace(transcript, seed, trial))


def summary_row(transcript: ProtocolTranscript, trial: int) -> str:
    l, m = transcript.split_outcome()
    k_digits = "-".join(str(k) for k in transcript.reconstruction_digits())
    return ",".join(
        [
            str(transcript.d),
            str(transcript.n_parties),
            transcript.mode,
            str(trial),
            str(l),
            str(m),
            k_digits,
            format_float(transcript.final_fidelity),
        ]
    )


def write_lines(path: str, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")
