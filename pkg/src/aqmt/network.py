"""Channels, transcript and the coalition's view.

Every classical message and every qubit hand-over is an :class:`Event`.
``scope`` is ``None`` for broadcasts, otherwise the tuple of parties that
observe the event (sender and recipient for a private message).  The
coalition's :class:`AdversaryView` receives exactly the events whose scope
includes a corrupt party.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .dcnet import BROADCAST, RoundContext, RoundResult

PUBLIC = -1  # emitter id for protocol-level public announcements (abort flags)

PAD = "pad"
DC = "dc"
DC_REFUSE = "dc-refuse"
DC_OUT = "dc-out"
BCAST = "bcast"
PRIVATE = "private"
QUBIT = "qubit"
ABORT = "abort"

FIELDS = ("seq", "step", "emitter", "channel", "scope", "nbits", "hex", "tag")


def bits_to_hex(bits: Sequence[int]) -> str:
    if not bits:
        return ""
    v = 0
    for b in bits:
        v = (v << 1) | (b & 1)
    return format(v, "0{}x".format((len(bits) + 3) // 4))


def hex_to_bits(h: str, nbits: int) -> list[int]:
    if nbits == 0:
        return []
    v = int(h, 16)
    return [(v >> (nbits - 1 - i)) & 1 for i in range(nbits)]


@dataclass(frozen=True, slots=True)
class Event:
    seq: int
    step: str
    emitter: int
    channel: str
    scope: Optional[tuple[int, ...]]
    bits: tuple[int, ...]
    tag: str

    def visible_to(self, parties: Iterable[int]) -> bool:
        return self.scope is None or any(p in self.scope for p in parties)

    def record(self) -> dict:
        return {
            "seq": self.seq,
            "step": self.step,
            "emitter": self.emitter,
            "channel": self.channel,
            "scope": "all" if self.scope is None else list(self.scope),
            "nbits": len(self.bits),
            "hex": bits_to_hex(self.bits),
            "tag": self.tag,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Event":
        scope = None if rec["scope"] == "all" else tuple(rec["scope"])
        return cls(
            rec["seq"], rec["step"], rec["emitter"], rec["channel"], scope,
            tuple(hex_to_bits(rec["hex"], rec["nbits"])), rec["tag"],
        )


class Transcript:
    def __init__(self) -> None:
        self.events: list[Event] = []

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def lines(self) -> list[str]:
        return [json.dumps(e.record(), separators=(",", ":")) for e in self.events]

    def digest(self) -> str:
        h = hashlib.sha256()
        for line in self.lines():
            h.update(line.encode())
            h.update(b"\n")
        return h.hexdigest()


class ViewConfinementError(AssertionError):
    pass


class AdversaryView:
    """Everything the corrupt coalition has seen so far, in order."""

    def __init__(self, coalition: Iterable[int]):
        self.coalition = frozenset(coalition)
        self.events: list[Event] = []

    def deliver(self, event: Event) -> None:
        if not event.visible_to(self.coalition):
            raise ViewConfinementError(f"event {event.seq} is not visible to the coalition")
        self.events.append(event)

    @property
    def clock(self) -> int:
        return self.events[-1].seq if self.events else -1

    def broadcasts(self, step: Optional[str] = None) -> list[Event]:
        return [e for e in self.events if e.scope is None and (step is None or e.step == step)]

    def check_confined(self) -> None:
        for e in self.events:
            if not e.visible_to(self.coalition):
                raise ViewConfinementError(f"event {e.seq} leaked into the coalition view")


class Network:
    """Ideal authenticated channels with transcript logging."""

    def __init__(self, n: int, coalition: Iterable[int] = ()):
        self.n = n
        self.transcript = Transcript()
        self.view = AdversaryView(coalition)

    def emit(self, step: str, emitter: int, channel: str, bits: Sequence[int], tag: str,
             scope: Optional[Sequence[int]] = None) -> Event:
        ev = Event(
            len(self.transcript.events), step, emitter, channel,
            None if scope is None else tuple(sorted(set(scope))),
            tuple(int(b) & 1 for b in bits), tag,
        )
        self.transcript.events.append(ev)
        if ev.visible_to(self.view.coalition):
            self.view.deliver(ev)
        return ev

    def broadcast(self, step: str, emitter: int, bits: Sequence[int], tag: str) -> Event:
        return self.emit(step, emitter, BCAST, bits, tag)

    def private(self, step: str, src: int, dst: int, bits: Sequence[int], tag: str) -> Event:
        return self.emit(step, src, PRIVATE, bits, tag, (src, dst))

    def qubit(self, step: str, src: int, dst: int, tag: str) -> Event:
        return self.emit(step, src, QUBIT, (), tag, (src, dst))

    def abort(self, step: str) -> Event:
        return self.emit(step, PUBLIC, ABORT, (1,), f"abort-{step}")

    def dc_observer(self, step: str):
        """Callback for :class:`~aqmt.dcnet.DCNet` that logs pads, publications and output."""

        def observe(ctx: RoundContext, res: RoundResult) -> None:
            tag = f"{ctx.subprotocol}#{ctx.round}"
            n = len(res.published)
            if res.pads is not None:
                for i in range(n):
                    for j in range(i + 1, n):
                        self.emit(step, i, PAD, (int(res.pads.bits[i, j]),), tag, (i, j))
            private_to = None if res.scope == BROADCAST else int(res.scope)
            for i, v in enumerate(res.published):
                scope = None if private_to is None else (i, private_to)
                if v is None:
                    self.emit(step, i, DC_REFUSE, (), tag, scope)
                else:
                    self.emit(step, i, DC, (v,), tag, scope)
            out_scope = None if private_to is None else (private_to,)
            self.emit(step, PUBLIC if private_to is None else private_to, DC_OUT, (res.output,), tag, out_scope)

        return observe
