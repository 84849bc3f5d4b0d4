"""Strategies for the corrupt coalition.

Each strategy subclasses :class:`~aqmt.protocol.HonestParty` and overrides
only the hooks it attacks through; every other action is the honest one.
Strategies see the coalition's :class:`~aqmt.network.AdversaryView` and draw
their own randomness from the trial stream under the ``"adversary"`` kind, so
a (config, seed, strategy) triple fixes the run.

Names accept a parameter as ``NAME(arg)`` or ``NAME:arg``, e.g.
``GHZ_FORGER(classical)`` or ``ABORT_FORCER:6``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import qsim
from .protocol import HonestParty, PartyAccess, ProtocolConfig
from .qsim import COMPUTATIONAL, QubitLabel

ADV = "adversary"


class UnknownStrategyError(KeyError):
    pass


class Strategy(HonestParty):
    name = "STRATEGY"
    param: Optional[str] = None

    def __init__(self, param: Optional[str] = None):
        self.param = param

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param})"

    def applicable(self, config: ProtocolConfig) -> bool:
        """Whether the coalition in ``config`` can mount this attack."""
        return bool(config.corrupt)

    def actor(self) -> int:
        """The coalition member that carries out single-party attacks."""
        S, R = self.config.sender, self.config.receiver
        bystanders = sorted(c for c in self.config.corrupt if c not in (S, R))
        return bystanders[0] if bystanders else min(self.config.corrupt)

    def pick(self, options: Sequence):
        return self.rng.choice(list(options), ADV)


class HonestCurious(Strategy):
    """Follows the protocol and only records what it sees."""

    name = "HONEST_CURIOUS"


class GhzForger(Strategy):
    """Corrupt distributor sends something other than |+_n> and corrupt verifiers vouch for it."""

    name = "GHZ_FORGER"
    variants = ("product", "classical", "entangled-ancilla", "split")

    def __init__(self, param: Optional[str] = "classical"):
        if param not in self.variants:
            raise UnknownStrategyError(f"GHZ_FORGER variant {param!r}")
        super().__init__(param)

    def applicable(self, config):
        return 0 in config.corrupt

    def extra_qubits(self, config):
        return 1 if self.param == "entangled-ancilla" else 0

    def prepare_instance(self, k, labels, cap):
        n = len(labels)
        if self.param == "product":
            return qsim.product_state(labels, [qsim.KET_PLUS] * n, cap=cap)
        if self.param == "classical":
            return qsim.QuantumRegister(labels, cap=cap)
        if self.param == "entangled-ancilla":
            anc = QubitLabel(0, f"g{k}.anc")
            return qsim.make_ghz(n + 1, list(labels) + [anc], cap=cap)
        reg = qsim.QuantumRegister(labels, cap=cap)
        qsim.apply_gate(reg, "H", [labels[1]])
        qsim.apply_gate(reg, "CNOT", [labels[1], labels[2]])
        return reg

    def verify(self, party, k, q, own, copies):
        q.discard(copies)
        return 1

    def step5(self, party, k, q, label, acting_receiver):
        anc = QubitLabel(0, f"g{k}.anc")
        if q.holds(anc):
            q.measure(anc, COMPUTATIONAL, kind=ADV)
        return super().step5(party, k, q, label, acting_receiver)


class ParityLiar(Strategy):
    """Flips its step-5 broadcast bit in one random instance."""

    name = "PARITY_LIAR"

    def bind(self, config, view, rng):
        super().bind(config, view, rng)
        self.target = self.pick(range(config.ghz_instances))

    def step5(self, party, k, q, label, acting_receiver):
        b = super().step5(party, k, q, label, acting_receiver)
        if party == self.actor() and k == self.target and not acting_receiver:
            b ^= 1
        return b


class AuthTamperer(Strategy):
    """Disturbs its GHZ qubit in one instance, which lands on a teleported authenticated qubit."""

    name = "AUTH_TAMPERER"

    def __init__(self, param: Optional[str] = "pauli"):
        if param not in ("pauli", "unitary"):
            raise UnknownStrategyError(f"AUTH_TAMPERER mode {param!r}")
        super().__init__(param)

    def bind(self, config, view, rng):
        super().bind(config, view, rng)
        self.target = self.pick(range(config.ghz_instances))
        if self.param == "pauli":
            self.op = self.pick(["X", "Y", "Z"])
        else:
            self.op = qsim.random_unitary(2, rng.generator(ADV))

    def step5(self, party, k, q, label, acting_receiver):
        if party == self.actor() and k == self.target and q.holds(label):
            q.apply(self.op, [label])
        return super().step5(party, k, q, label, acting_receiver)


class AmtBitflipper(Strategy):
    """Publishes the complement of its share in one round of the step-6 or step-7 transmission."""

    name = "AMT_BITFLIPPER"

    def __init__(self, param: Optional[str] = "6"):
        if str(param) not in ("6", "7"):
            raise UnknownStrategyError(f"AMT_BITFLIPPER step {param!r}")
        super().__init__(str(param))

    def bind(self, config, view, rng):
        super().bind(config, view, rng)
        m, s = config.m, config.s
        if self.param == "6":
            length = config.key_bits + 2 * (2 * m + s) + 2 * s
        else:
            length = 2 * m + 2 * s
        self.target = self.pick(range(length))

    def dc_publish(self, party, ctx, honest_value):
        if (
            party == self.actor()
            and ctx.step == self.param
            and ctx.subprotocol == "amt"
            and ctx.round == self.target
        ):
            return honest_value ^ 1
        return honest_value


class AbortForcer(Strategy):
    """Makes the protocol abort at a chosen step."""

    name = "ABORT_FORCER"

    def __init__(self, param: Optional[str] = "6"):
        if str(param) not in ("1", "3", "6", "7"):
            raise UnknownStrategyError(f"ABORT_FORCER step {param!r}")
        super().__init__(str(param))

    def dc_publish(self, party, ctx, honest_value):
        # refusing to publish forces any OR round to 1
        if party != self.actor():
            return honest_value
        if self.param == "1" and ctx.step == "1":
            return None
        if self.param == "6" and ctx.step == "6" and ctx.subprotocol == "decode-or":
            return None
        if self.param == "7" and ctx.step == "7" and ctx.subprotocol == "amt-or":
            return None
        return honest_value

    def verify(self, party, k, q, own, copies):
        passed = super().verify(party, k, q, own, copies)
        if self.param == "3" and party == self.actor():
            return 0
        return passed


class ReceiverUsurper(Strategy):
    """Claims to be the receiver and tries to end up with the message.

    It keeps its GHZ qubits, sends dummies in step 5 and never votes for an
    abort.  Without knowing R it fixes the residual phase by guessing R
    among the honest parties.
    """

    name = "RECEIVER_USURPER"

    def extra_qubits(self, config):
        return config.ghz_instances

    def bind(self, config, view, rng):
        super().bind(config, view, rng)
        self.guess = self.pick([i for i in range(config.n) if i not in config.corrupt])

    def claims_receiver(self, party, notified):
        return party == self.actor() or bool(notified)

    def dc_input(self, party, ctx, honest_input):
        if party == self.actor() and ctx.subprotocol in ("amt-or", "decode-or"):
            return 0
        return honest_input

    def step6_receive(self, party, q, labels, frame):
        if party != self.actor():
            return super().step6_receive(party, q, labels, frame)
        for k, lab in enumerate(labels):
            seen = [e for e in self.view.broadcasts("5") if e.tag == f"parity-{k}" and e.emitter == self.guess]
            if seen and seen[0].bits[0] and q.holds(lab):
                q.apply("P", [lab])
        _, decoded = super().step6_receive(party, q, labels, frame)
        return 0, decoded


class CorruptReceiverFakeReturn(Strategy):
    """A corrupt R forces the fail-safe branch and returns |0> instead of the message."""

    name = "CORRUPT_R_FAKE_RETURN"

    def applicable(self, config):
        return config.receiver in config.corrupt

    def bind(self, config, view, rng):
        super().bind(config, view, rng)
        self.receiver_party: Optional[int] = None

    def claims_receiver(self, party, notified):
        if notified:
            self.receiver_party = party
        return bool(notified)

    def dc_input(self, party, ctx, honest_input):
        if party == self.receiver_party and ctx.step == "7" and ctx.subprotocol == "amt-or":
            return 1
        return honest_input

    def failsafe_return(self, party, q: PartyAccess, received, halves, applied):
        if party != self.receiver_party or halves is None:
            return super().failsafe_return(party, q, received, halves, applied)
        out: list[int] = []
        for i, h in enumerate(halves):
            fake = q.allocate(f"fake{i}")
            z, x = q.bell_measure(fake, h, kind="teleport_back")
            q.discard([fake, h])
            out += [z, x]
        return out


@dataclass(frozen=True)
class StrategySpec:
    name: str
    param: Optional[str]
    factory: Callable[[Optional[str]], Strategy]

    @property
    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}({self.param})"

    def build(self) -> Strategy:
        return self.factory(self.param) if self.param is not None else self.factory()


_REGISTRY: dict[str, type] = {
    cls.name: cls
    for cls in (
        HonestCurious, GhzForger, ParityLiar, AuthTamperer, AmtBitflipper,
        AbortForcer, ReceiverUsurper, CorruptReceiverFakeReturn,
    )
}


def strategy_catalog() -> list[StrategySpec]:
    out = [StrategySpec("HONEST_CURIOUS", None, HonestCurious)]
    out += [StrategySpec("GHZ_FORGER", v, GhzForger) for v in GhzForger.variants]
    out.append(StrategySpec("PARITY_LIAR", None, ParityLiar))
    out += [StrategySpec("AUTH_TAMPERER", v, AuthTamperer) for v in ("pauli", "unitary")]
    out += [StrategySpec("AMT_BITFLIPPER", v, AmtBitflipper) for v in ("6", "7")]
    out += [StrategySpec("ABORT_FORCER", v, AbortForcer) for v in ("1", "3", "6", "7")]
    out.append(StrategySpec("RECEIVER_USURPER", None, ReceiverUsurper))
    out.append(StrategySpec("CORRUPT_R_FAKE_RETURN", None, CorruptReceiverFakeReturn))
    return out


_NAME = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\(\s*([^)]*?)\s*\)|:\s*(\S+))?\s*$")


def lookup(name: str) -> Strategy:
    """Build a strategy from ``NAME``, ``NAME(param)`` or ``NAME:param``."""
    mt = _NAME.match(name)
    if not mt:
        raise UnknownStrategyError(name)
    key = mt.group(1).upper().replace("-", "_")
    param = mt.group(2) or mt.group(3)
    cls = _REGISTRY.get(key)
    if cls is None:
        raise UnknownStrategyError(name)
    return cls(param) if param else cls()
