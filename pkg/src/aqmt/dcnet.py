"""Classical anonymity toolbox built from dining-cryptographers parity rounds.

Four subprotocols sit on top of :func:`anonymous_parity_round`:

* :meth:`DCNet.logical_or` -- veto-style OR; a 1-holder contributes a fresh
  coin in each of ``s`` rounds, so a lone 1 is missed with probability 2^-s.
  Refusing to publish forces the output to 1.
* :meth:`DCNet.collision_detection` -- an OR, then ``s`` rounds in which each
  1-holder checks that the announced parity equals its own coin, then an OR of
  the "mismatch seen" flags.
* :meth:`DCNet.notification` -- for every candidate ``j`` an OR whose shares are
  sent privately to ``j`` only.
* :meth:`DCNet.amt_send` -- per-bit masked transmission: the receiver masks
  every round with a fresh bit, so the public parity is uniform.  Integrity
  uses a polynomial MAC over GF(2^s) with an AMD term (see :func:`mac_tag`).

Corrupt parties act through a *deviation* object exposing
``corrupt``, ``dc_input(party, ctx, honest_input)`` and
``dc_publish(party, ctx, honest_value)`` (``None`` means refusal).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .gf2m import GF2m, bits_to_int, int_to_bits
from .rand import Stream

BROADCAST = "broadcast"
Scope = Union[str, int]

ZERO, ONE, MANY = "zero", "one", "many"


@dataclass
class PadTable:
    """One round of pairwise one-time pads; ``bits[i][j] == bits[j][i]``."""

    bits: np.ndarray

    @classmethod
    def fresh(cls, n: int, rng: Stream) -> "PadTable":
        bits = np.zeros((n, n), dtype=np.uint8)
        for i in range(n):
            for j in range(i + 1, n):
                bits[i, j] = bits[j, i] = rng.bit("pad")
        return cls(bits)

    @classmethod
    def from_pairs(cls, n: int, values: Sequence[int]) -> "PadTable":
        """Build a table from the upper-triangle pad bits in row order."""
        bits = np.zeros((n, n), dtype=np.uint8)
        it = iter(values)
        for i in range(n):
            for j in range(i + 1, n):
                bits[i, j] = bits[j, i] = next(it)
        return cls(bits)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    def share(self, i: int) -> int:
        return int(np.bitwise_xor.reduce(self.bits[i]))


@dataclass(frozen=True)
class RoundContext:
    step: str
    subprotocol: str
    round: int
    scope: Scope = BROADCAST


@dataclass
class RoundResult:
    output: int
    published: list[Optional[int]]
    refused: frozenset[int]
    scope: Scope = BROADCAST
    pads: Optional[PadTable] = None


def anonymous_parity_round(
    inputs: Sequence[int],
    pads: PadTable,
    output_scope: Scope = BROADCAST,
    published: Optional[dict[int, Optional[int]]] = None,
) -> RoundResult:
    """One DC-net round: everyone publishes input XOR its pads.

    ``published`` overrides the value of selected parties (a corrupt party
    may publish anything, ``None`` = refusal, counted as 0 and flagged).
    """
    n = len(inputs)
    if pads.n != n:
        raise ValueError("pad table size does not match participant count")
    values: list[Optional[int]] = [(int(inputs[i]) & 1) ^ pads.share(i) for i in range(n)]
    if published:
        for i, v in published.items():
            values[i] = None if v is None else int(v) & 1
    refused = frozenset(i for i, v in enumerate(values) if v is None)
    out = 0
    for v in values:
        out ^= v or 0
    return RoundResult(out, values, refused, output_scope, pads)


@dataclass
class AmtResult:
    message: Optional[list[int]]
    aborted: bool
    decoded: dict[int, list[int]] = field(default_factory=dict)
    tag_ok: dict[int, bool] = field(default_factory=dict)


def mac_frame_symbols(bits: Sequence[int], s: int) -> list[int]:
    """Split ``bits`` into s-bit symbols, padded to an odd symbol count."""
    bits = list(bits) + [0] * (-len(bits) % s)
    syms = [bits_to_int(bits[i : i + s]) for i in range(0, len(bits), s)]
    if len(syms) % 2 == 0:
        syms.append(0)
    return syms


def mac_tag(bits: Sequence[int], key: int, s: int) -> int:
    """x^(d+2) + sum_{i=1..d} m_i x^i over GF(2^s), d odd.

    The leading x^(d+2) term (d+2 odd, hence a non-zero coefficient in
    characteristic 2) makes the tag detect additive tampering of the key
    itself, with escape probability at most (d+1)/2^s.
    """
    coeffs = [0] + mac_frame_symbols(bits, s) + [0, 1]
    return GF2m(s).eval_poly(coeffs, key)


def mac_forgery_bound(message_len: int, s: int) -> float:
    d = len(mac_frame_symbols([0] * message_len, s))
    return (d + 1) / 2**s


class DCNet:
    """Round scheduler for one subprotocol invocation context."""

    def __init__(
        self,
        n: int,
        rng: Stream,
        *,
        deviation=None,
        observer: Optional[Callable[[RoundContext, RoundResult], None]] = None,
        step: str = "-",
    ):
        if n < 2:
            raise ValueError("a DC-net needs at least two participants")
        self.n = n
        self.rng = rng
        self.deviation = deviation
        self.observer = observer
        self.step = step
        self.rounds = 0

    @property
    def corrupt(self) -> frozenset[int]:
        return frozenset(getattr(self.deviation, "corrupt", ()) or ())

    def _ctx(self, subprotocol: str, index: int, scope: Scope = BROADCAST) -> RoundContext:
        return RoundContext(self.step, subprotocol, index, scope)

    def _inputs(self, inputs: Sequence[int], subprotocol: str) -> list[int]:
        inputs = [int(b) & 1 for b in inputs]
        if len(inputs) != self.n:
            raise ValueError(f"expected {self.n} inputs, got {len(inputs)}")
        for i in sorted(self.corrupt):
            inputs[i] = int(self.deviation.dc_input(i, self._ctx(subprotocol, -1), inputs[i])) & 1
        return inputs

    def round(self, contributions: Sequence[int], subprotocol: str, index: int, scope: Scope = BROADCAST) -> RoundResult:
        pads = PadTable.fresh(self.n, self.rng)
        ctx = self._ctx(subprotocol, index, scope)
        overrides = {}
        for i in sorted(self.corrupt):
            honest_value = (int(contributions[i]) & 1) ^ pads.share(i)
            overrides[i] = self.deviation.dc_publish(i, ctx, honest_value)
        result = anonymous_parity_round(contributions, pads, scope, overrides)
        self.rounds += 1
        if self.observer is not None:
            self.observer(ctx, result)
        return result

    # -- subprotocols ----------------------------------------------------

    def logical_or(self, inputs: Sequence[int], s: int, subprotocol: str = "or") -> int:
        if s < 1:
            raise ValueError("s must be >= 1")
        inputs = self._inputs(inputs, subprotocol)
        out = 0
        for r in range(s):
            contrib = [self.rng.bit("coin") if b else 0 for b in inputs]
            res = self.round(contrib, subprotocol, r)
            out |= res.output | bool(res.refused)
        return int(out)

    def collision_detection(self, inputs: Sequence[int], s: int) -> str:
        if s < 1:
            raise ValueError("s must be >= 1")
        inputs = [int(b) & 1 for b in inputs]
        if not self.logical_or(inputs, s, "collision-a"):
            return ZERO
        # corrupt parties may join the mismatch test after seeing the OR
        holders = self._inputs(inputs, "collision-b")
        mismatch = [0] * self.n
        for r in range(s):
            coins = [self.rng.bit("coin") if h else 0 for h in holders]
            res = self.round(coins, "collision-b", r)
            for i in range(self.n):
                if holders[i] and (res.output != coins[i] or res.refused):
                    mismatch[i] = 1
        return MANY if self.logical_or(mismatch, s, "collision-c") else ONE

    def notification(
        self,
        notify: Sequence[Iterable[int]],
        s: int,
        *,
        forced_silent: Iterable[tuple[int, int]] = (),
    ) -> list[int]:
        """Each party learns privately whether anyone notified it.

        ``notify[i]`` is the set of parties ``i`` notifies.  ``forced_silent``
        pins the coins of the listed (notifier, target) pairs to 0; it exists
        so tests can force the 2^-s false-negative branch.
        """
        if s < 1:
            raise ValueError("s must be >= 1")
        notify = [set(t) for t in notify]
        silent = set(forced_silent)
        outputs = []
        for j in range(self.n):
            sub = f"notify-{j}"
            inputs = self._inputs([int(j in notify[i]) for i in range(self.n)], sub)
            bit = 0
            for r in range(s):
                contrib = [
                    0 if (i, j) in silent else (self.rng.bit("coin") if inputs[i] else 0)
                    for i in range(self.n)
                ]
                res = self.round(contrib, sub, r, scope=j)
                bit |= res.output | bool(res.refused)
            outputs.append(int(bit))
        return outputs

    def amt_send(
        self,
        message: Sequence[int],
        sender: int,
        receiver: int,
        s: int,
        *,
        maskers: Optional[Iterable[int]] = None,
        tag_check: Optional[Callable[[int, bool], int]] = None,
    ) -> AmtResult:
        """Anonymous message transmission of ``message`` from sender to receiver.

        ``maskers`` are the parties acting as receiver (default: just
        ``receiver``); each decodes with its own masks.  The closing OR takes
        "tag check failed" from each masker.
        """
        message = [int(b) & 1 for b in message]
        if not message:
            raise ValueError("message must be non-empty")
        if sender == receiver:
            raise ValueError("sender and receiver must differ")
        maskers = sorted({receiver} if maskers is None else set(maskers))
        key = bits_to_int(self.rng.bits(s, "mackey"))
        tag = mac_tag(message, key, s)
        frame = message + int_to_bits(key, s) + int_to_bits(tag, s)

        masks = {j: [] for j in maskers}
        public = []
        for t, b in enumerate(frame):
            contrib = [0] * self.n
            contrib[sender] = b
            for j in maskers:
                rho = self.rng.bit("mask")
                masks[j].append(rho)
                contrib[j] ^= rho
            res = self.round(contrib, "amt", t)
            public.append(res.output)

        decoded, tag_ok = {}, {}
        L = len(message)
        for j in maskers:
            got = [p ^ r for p, r in zip(public, masks[j])]
            body, kbits, tbits = got[:L], got[L : L + s], got[L + s :]
            ok = mac_tag(body, bits_to_int(kbits), s) == bits_to_int(tbits)
            decoded[j] = body
            tag_ok[j] = ok
        failed = [0] * self.n
        for j in maskers:
            failed[j] = int(not tag_ok[j])
            if tag_check is not None:
                failed[j] = int(tag_check(j, tag_ok[j])) & 1
        aborted = bool(self.logical_or(failed, s, "amt-or"))
        msg = decoded.get(receiver) if not aborted else None
        return AmtResult(msg, aborted, decoded, tag_ok)


# -- module-level conveniences mirroring the subprotocol contracts ----------


def logical_or(inputs: Sequence[int], s: int, rng: Stream, *, deviation=None, observer=None) -> int:
    return DCNet(len(inputs), rng, deviation=deviation, observer=observer).logical_or(inputs, s)


def collision_detection(inputs: Sequence[int], s: int, rng: Stream, *, deviation=None, observer=None) -> str:
    return DCNet(len(inputs), rng, deviation=deviation, observer=observer).collision_detection(inputs, s)


def notification(notify: Sequence[Iterable[int]], s: int, rng: Stream, *, deviation=None, observer=None, forced_silent=()) -> list[int]:
    return DCNet(len(notify), rng, deviation=deviation, observer=observer).notification(
        notify, s, forced_silent=forced_silent
    )


def amt_send(message: Sequence[int], sender: int, receiver: int, s: int, rng: Stream, *, n: int, deviation=None, observer=None) -> AmtResult:
    return DCNet(n, rng, deviation=deviation, observer=observer).amt_send(message, sender, receiver, s)
