"""Transcript files: one JSON header line, then one JSON line per event.

Header keys: ``format``, ``config``, ``strategy``, ``seed``, ``message``
(list of [re, im]), ``versions``, ``digest``.  Event lines carry, in this
order: ``seq, step, emitter, channel, scope, nbits, hex, tag`` where
``scope`` is ``"all"`` or the list of observing parties and ``hex`` holds
the ``nbits`` payload bits big-endian.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

import numpy as np

from ..network import Event, Transcript
from ..protocol import ProtocolConfig, run

FORMAT = "aqmt-transcript/1"


def encode_state(psi) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in np.asarray(psi, dtype=complex).reshape(-1)]


def decode_state(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data])


def header(config: ProtocolConfig, strategy: Optional[str], message, transcript: Transcript) -> dict:
    from .. import __version__

    return {
        "format": FORMAT,
        "config": config.to_dict(),
        "strategy": strategy,
        "seed": config.seed,
        "message": encode_state(message),
        "versions": {"aqmt": __version__, "numpy": np.__version__},
        "digest": transcript.digest(),
    }


def write(path, config: ProtocolConfig, strategy: Optional[str], message, transcript: Transcript) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    head = json.dumps(header(config, strategy, message, transcript), separators=(",", ":"))
    path.write_text("\n".join([head] + transcript.lines()) + "\n")
    return path


def read(path) -> tuple[dict, list[Event]]:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty transcript")
    head = json.loads(lines[0])
    if head.get("format") != FORMAT:
        raise ValueError(f"{path}: unsupported transcript format {head.get('format')!r}")
    return head, [Event.from_record(json.loads(line)) for line in lines[1:]]


def file_digest(path) -> str:
    """Digest of the event lines of a transcript file."""
    h = hashlib.sha256()
    for line in Path(path).read_text().splitlines()[1:]:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


def rerun(head: dict):
    from ..adversary import lookup

    config = ProtocolConfig.from_dict(head["config"])
    strategy = lookup(head["strategy"]) if head.get("strategy") else None
    return run(config, decode_state(head["message"]), strategy)


def replay(path) -> tuple[bool, str, str]:
    """Re-execute a transcript's run; returns (match, recorded digest, replayed digest)."""
    head, _ = read(path)
    recorded = file_digest(path)
    _, transcript = rerun(head)
    replayed = transcript.digest()
    return recorded == replayed and head.get("digest", recorded) == recorded, recorded, replayed
