"""What the coalition sees, as features for the statistical tests and the exact mode."""

from __future__ import annotations

from typing import Iterable

from ..network import BCAST, DC, DC_OUT, DC_REFUSE, PAD, Transcript
from ..protocol import RunOutcome


def _scope(e) -> str:
    return "all" if e.scope is None else ",".join(map(str, e.scope))


def view_features(transcript: Transcript, coalition: Iterable[int], outcome: RunOutcome) -> dict:
    """Every coalition-visible event as ``key -> payload bits`` plus the public outcome."""
    coalition = frozenset(coalition)
    feats: dict[str, str] = {"outcome": outcome.step_tag}
    for e in transcript:
        if not e.visible_to(coalition):
            continue
        key = f"{e.step}|{e.channel}|{e.tag}|{e.emitter}|{_scope(e)}"
        while key in feats:
            key += "'"
        feats[key] = "".join(map(str, e.bits))
    return feats


def canonical_view(transcript: Transcript, coalition: Iterable[int], outcome: RunOutcome) -> tuple:
    """The coalition view with DC-net rounds reduced to what they reveal.

    Broadcast rounds keep only the announced parity (and any refusal), since
    the published shares are uniform given that parity; private rounds keep
    the output seen by the coalition member.  Transmission rounds are dropped
    entirely when an honest party masks them.  Everything else is kept raw.
    """
    coalition = frozenset(coalition)
    honest_masker = any(r not in coalition for r in outcome.acting_receivers)
    out = []
    for e in transcript:
        if not e.visible_to(coalition):
            continue
        if e.channel in (PAD, DC):
            continue
        if e.channel in (DC_OUT, DC_REFUSE) and e.tag.startswith("amt#") and honest_masker:
            continue
        if e.channel == DC_REFUSE:
            out.append((e.step, e.channel, e.tag, e.emitter))
        else:
            out.append((e.step, e.channel, e.tag, e.emitter, e.scope, e.bits))
    out.append(("outcome", outcome.step_tag))
    return tuple(out)


def broadcast_bits(transcript: Transcript, step: str, tag_prefix: str, emitters: Iterable[int]) -> list[int]:
    """Payload bits of plain broadcasts in ``step`` whose tag starts with ``tag_prefix``."""
    emitters = set(emitters)
    bits: list[int] = []
    for e in transcript:
        if e.channel == BCAST and e.step == step and e.tag.startswith(tag_prefix) and e.emitter in emitters:
            bits.extend(e.bits)
    return bits
