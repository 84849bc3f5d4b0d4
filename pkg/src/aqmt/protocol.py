"""End-to-end anonymous quantum message transmission.

:func:`run` executes the seven steps in a fixed round-robin order (party
index, then sub-step) over one shared :class:`~aqmt.rand.Stream`:

1. collision detection, proceed iff exactly one sender requested;
2. party 0 distributes 2m+s GHZ instances, one qubit per party;
3. every party verifies every instance with pseudo-copies;
4. the sender privately notifies its receiver;
5. everyone but S and R measures in the Hadamard basis, S fixes the phase;
6. S authenticates halves of 2m Bell pairs and teleports them to R;
7. S teleports the message, with fail-safe return on failure.

Honest behaviour lives in :class:`HonestParty`; a strategy for the corrupt
coalition subclasses it and overrides hooks.  Strategies act on qubits only
through a :class:`PartyAccess` restricted to coalition-owned labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import qauth, qsim
from .dcnet import ONE, DCNet, RoundContext
from .network import AdversaryView, Network, Transcript
from .qsim import HADAMARD, PHI_PLUS, QubitLabel, RegisterPool
from .rand import Stream

SUCCESS = "success"
ABORT = "abort"

SENDER = "sender"
RECEIVER = "receiver"
LOST = "lost"
CORRUPT_UNKNOWN = "corrupt-unknown"

LEMMA1_TOL = 1e-9


class ConfigError(ValueError):
    pass


class AccessError(PermissionError):
    """A party touched a qubit it does not hold."""


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    m: int = 1
    s: int = 3
    sender: Optional[int] = 1
    receiver: int = 2
    corrupt: frozenset = frozenset()
    seed: int = 0
    cap: int = qsim.DEFAULT_CAP
    extra_senders: tuple = ()
    force_notification_failure: bool = False

    def __post_init__(self):
        object.__setattr__(self, "corrupt", frozenset(int(c) for c in self.corrupt))
        object.__setattr__(self, "extra_senders", tuple(int(e) for e in self.extra_senders))
        if self.n < 3:
            raise ConfigError("need at least 3 participants")
        if self.m < 1 or self.s < 1:
            raise ConfigError("m and s must be >= 1")
        parties = range(self.n)
        if self.receiver not in parties:
            raise ConfigError("receiver index out of range")
        if self.sender is not None:
            if self.sender not in parties:
                raise ConfigError("sender index out of range")
            if self.sender == self.receiver:
                raise ConfigError("receiver must differ from sender")
        if not self.corrupt <= set(parties):
            raise ConfigError("corrupt index out of range")
        if not set(self.extra_senders) <= set(parties):
            raise ConfigError("extra sender index out of range")

    @property
    def t(self) -> int:
        return len(self.corrupt)

    @property
    def honest(self) -> list[int]:
        return [i for i in range(self.n) if i not in self.corrupt]

    @property
    def ghz_instances(self) -> int:
        return 2 * self.m + self.s

    @property
    def bell_pairs(self) -> int:
        return 2 * self.m

    @property
    def contract_key_bits(self) -> int:
        return qauth.contract_key_length(2 * self.m, self.s)

    @property
    def key_bits(self) -> int:
        return qauth.key_length(2 * self.m, self.s)

    @property
    def teleport_bits(self) -> int:
        return 2 * (2 * self.m + self.s) + 2 * self.m

    def replace(self, **kw) -> "ProtocolConfig":
        from dataclasses import replace

        return replace(self, **kw)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "m": self.m, "s": self.s, "sender": self.sender,
            "receiver": self.receiver, "corrupt": sorted(self.corrupt), "seed": self.seed,
            "cap": self.cap, "extra_senders": list(self.extra_senders),
            "force_notification_failure": self.force_notification_failure,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolConfig":
        d = dict(d)
        d["corrupt"] = frozenset(d.get("corrupt", ()))
        d["extra_senders"] = tuple(d.get("extra_senders", ()))
        return cls(**d)


@dataclass
class PartyState:
    index: int
    role: str = "bystander"
    phase: str = "1"


@dataclass
class Lemma1Record:
    instance: int
    honest_passed: bool
    holds: bool
    weight_outside: float


@dataclass
class RunOutcome:
    status: str
    abort_step: Optional[int]
    psi_holder: Optional[str]
    delivered_fidelity: Optional[float]
    sender_fidelity: Optional[float] = None
    resources: dict = field(default_factory=dict)
    lemma1: list = field(default_factory=list)
    budget: dict = field(default_factory=dict)
    acting_receivers: tuple = ()
    parties: list = field(default_factory=list)

    @property
    def step_tag(self) -> str:
        return SUCCESS if self.status == SUCCESS else f"abort-{self.abort_step}"


def check_lemma1(reg: qsim.QuantumRegister, honest_labels: Sequence[QubitLabel]) -> int:
    """1 iff the honest qubits are (up to 1e-9 weight) all-0 or all-1 together."""
    return int(qsim.weight_outside_equal_strings(reg, list(honest_labels)) < LEMMA1_TOL)


class PartyAccess:
    """Quantum operations for one party (or a coalition) on its own qubits."""

    def __init__(self, pool: RegisterPool, owners, rng: Stream, acting: int):
        self.pool = pool
        self.owners = frozenset(owners)
        self.rng = rng
        self.party = acting

    def _check(self, labels) -> None:
        for lab in labels:
            if lab.owner not in self.owners:
                raise AccessError(f"party {self.party} cannot touch {lab}")

    def holds(self, label: QubitLabel) -> bool:
        return label in self.pool and label.owner in self.owners

    def labels(self) -> list[QubitLabel]:
        return [lab for lab in self.pool.labels() if lab.owner in self.owners]

    def allocate(self, tag: str, owner: Optional[int] = None) -> QubitLabel:
        owner = self.party if owner is None else owner
        self._check([QubitLabel(owner, tag)])
        return self.pool.allocate(QubitLabel(owner, tag))

    def apply(self, gate, labels: Sequence[QubitLabel]) -> None:
        self._check(labels)
        self.pool.apply(gate, labels)

    def pauli(self, label: QubitLabel, x: int, z: int) -> None:
        self._check([label])
        self.pool.pauli(label, x, z)

    def measure(self, label: QubitLabel, basis: str = qsim.COMPUTATIONAL, *, remove: bool = True, kind: str = "measure") -> int:
        self._check([label])
        return self.pool.measure(label, basis, self.rng, remove=remove, kind=kind)

    def discard(self, labels: Sequence[QubitLabel]) -> None:
        self._check(labels)
        self.pool.discard(labels, self.rng)

    def project_ghz(self, labels: Sequence[QubitLabel]) -> int:
        self._check(labels)
        return self.pool.project_ghz(labels, self.rng)

    def bell_measure(self, a: QubitLabel, b: QubitLabel, kind: str = "teleport") -> tuple[int, int]:
        self._check([a, b])
        return self.pool.bell_measure(a, b, self.rng, kind=kind)

    def decode(self, labels: Sequence[QubitLabel], key: qauth.AuthKey) -> qauth.AuthVerdict:
        self._check(labels)
        return qauth.decode(self.pool.join(labels), labels, key, self.rng)

    def random_bits(self, k: int, kind: str = "dummy") -> list[int]:
        return self.rng.bits(k, kind)


class HonestParty:
    """The protocol as an honest participant runs it; strategies override hooks."""

    name = "HONEST"

    def bind(self, config: ProtocolConfig, view: AdversaryView, rng: Stream) -> None:
        self.config = config
        self.view = view
        self.rng = rng

    def extra_qubits(self, config: ProtocolConfig) -> int:
        return 0

    # classical DC-net rounds
    def dc_input(self, party: int, ctx: RoundContext, honest_input: int) -> int:
        return honest_input

    def dc_publish(self, party: int, ctx: RoundContext, honest_value: int) -> Optional[int]:
        return honest_value

    # step 2 (only called for a corrupt distributor)
    def prepare_instance(self, k: int, labels: Sequence[QubitLabel], cap: int) -> qsim.QuantumRegister:
        return qsim.make_ghz(len(labels), labels, cap=cap)

    # step 3
    def pseudo_copy(self, party: int, k: int, q: PartyAccess, source: QubitLabel, ancilla: QubitLabel) -> None:
        q.apply("CNOT", [source, ancilla])

    def verify(self, party: int, k: int, q: PartyAccess, own: QubitLabel, copies: Sequence[QubitLabel]) -> int:
        passed = q.project_ghz([own] + list(copies))
        for c in copies:
            q.apply("CNOT", [own, c])
        q.discard(copies)
        return passed

    # step 4
    def claims_receiver(self, party: int, notified: int) -> bool:
        return bool(notified)

    # step 5
    def step5(self, party: int, k: int, q: PartyAccess, label: QubitLabel, acting_receiver: bool) -> int:
        if acting_receiver:
            return q.random_bits(1)[0]
        return q.measure(label, HADAMARD, remove=True)

    # step 6
    def step6_receive(self, party: int, q: PartyAccess, labels: Sequence[QubitLabel], frame: Optional[list[int]]):
        """Complete the teleportations and decode; returns (failed, decoded labels)."""
        cfg = self.config
        if frame is None or any(not q.holds(lab) for lab in labels):
            return 1, None
        kb = cfg.key_bits
        key = qauth.AuthKey.from_bits(2 * cfg.m, cfg.s, frame[:kb])
        tele = frame[kb:]
        for i, lab in enumerate(labels):
            z, x = tele[2 * i], tele[2 * i + 1]
            q.pauli(lab, x, z)
        verdict = q.decode(list(labels), key)
        if not verdict.accepted:
            return 1, None
        return 0, list(verdict.decoded_labels)

    # step 7
    def step7_receive(self, party: int, q: PartyAccess, labels: Sequence[QubitLabel], bits: Optional[list[int]]):
        """Apply the message corrections; returns the bits applied (or None)."""
        if bits is None or labels is None:
            return None
        for i, lab in enumerate(labels):
            q.pauli(lab, bits[2 * i + 1], bits[2 * i])
        return list(bits)

    def failsafe_return(self, party: int, q: PartyAccess, received, halves, applied) -> list[int]:
        """Teleport the received qubits back through the spare pairs."""
        m = self.config.m
        if received is None or halves is None:
            return q.random_bits(2 * m)
        if applied is not None:
            self.step7_receive(party, q, received, applied)
        out: list[int] = []
        for r, h in zip(received, halves):
            z, x = q.bell_measure(r, h, kind="teleport_back")
            q.discard([r, h])
            out += [z, x]
        return out

    def failsafe_broadcast(self, party: int, q: PartyAccess) -> list[int]:
        return q.random_bits(2 * self.config.m)

    # step 3 announcements of a corrupt verifier go through verify(); nothing else


HONEST = HonestParty


class _Abort(Exception):
    def __init__(self, step: int):
        self.step = step


class _Deviation:
    def __init__(self, corrupt, strategy: HonestParty):
        self.corrupt = corrupt
        self.strategy = strategy

    def dc_input(self, party, ctx, honest_input):
        return self.strategy.dc_input(party, ctx, honest_input)

    def dc_publish(self, party, ctx, honest_value):
        return self.strategy.dc_publish(party, ctx, honest_value)


class Engine:
    """One protocol execution; use :func:`run`."""

    def __init__(
        self,
        config: ProtocolConfig,
        message_state,
        strategy: Optional[HonestParty] = None,
        rng: Optional[Stream] = None,
    ):
        self.cfg = config
        psi = np.asarray(message_state, dtype=complex).reshape(-1)
        if psi.size != 2**config.m:
            raise ConfigError(f"message state must have {2**config.m} amplitudes")
        if abs(np.linalg.norm(psi) - 1.0) > qsim.NORM_TOL:
            raise ConfigError("message state is not normalized")
        self.psi = psi
        self.rng = rng if rng is not None else Stream(config.seed)
        self.honest = HonestParty()
        self.strategy = strategy if strategy is not None else HonestParty()
        self.net = Network(config.n, config.corrupt)
        self.honest.bind(config, AdversaryView(()), self.rng)
        self.strategy.bind(config, self.net.view, self.rng)
        cap = config.cap + (self.strategy.extra_qubits(config) if config.corrupt else 0)
        self.pool = RegisterPool(cap)
        self.deviation = _Deviation(config.corrupt, self.strategy)
        self.parties = [PartyState(i) for i in range(config.n)]
        for i in config.corrupt:
            self.parties[i].role = "corrupt"
        self.resources = {"ghz_instances": 0, "bell_pairs": 0, "teleport_bits": 0}
        self.lemma1: list[Lemma1Record] = []
        self.budget: dict = {}
        self.receivers: list[int] = []
        self.psi_labels: list[QubitLabel] = []
        self.held: list[list[QubitLabel]] = []

    # -- helpers ----------------------------------------------------------

    def behaviour(self, party: int) -> HonestParty:
        return self.strategy if party in self.cfg.corrupt else self.honest

    def access(self, party: int) -> PartyAccess:
        owners = self.cfg.corrupt if party in self.cfg.corrupt else {party}
        return PartyAccess(self.pool, owners, self.rng, party)

    def dcnet(self, step: str) -> DCNet:
        return DCNet(self.cfg.n, self.rng, deviation=self.deviation, observer=self.net.dc_observer(step), step=step)

    def _phase(self, step: str) -> None:
        for p in self.parties:
            p.phase = step

    # -- steps ------------------------------------------------------------

    def step1_collision(self) -> None:
        self._phase("1")
        cfg = self.cfg
        wants = [0] * cfg.n
        if cfg.sender is not None:
            wants[cfg.sender] = 1
        for e in cfg.extra_senders:
            wants[e] = 1
        r = self.dcnet("1").collision_detection(wants, cfg.s)
        if r != ONE:
            if sum(wants) == 1:
                self.budget["collision_false_abort"] = True
            raise _Abort(1)
        if sum(wants) > 1:
            self.budget["collision_missed"] = True
        self.parties[cfg.sender].role = SENDER

    def step2_distribute(self) -> None:
        self._phase("2")
        cfg = self.cfg
        for k in range(cfg.ghz_instances):
            labels = [QubitLabel(0, f"g{k}.{i}") for i in range(cfg.n)]
            if 0 in cfg.corrupt:
                reg = self.strategy.prepare_instance(k, labels, self.pool.cap)
                missing = [lab for lab in labels if lab not in reg]
                if missing:
                    raise ConfigError(f"forged instance {k} lacks labels {missing}")
                for lab in reg.labels:
                    if lab not in labels and lab.owner not in cfg.corrupt:
                        raise AccessError("a corrupt distributor may only keep extra qubits itself")
                qsim.check_norm(reg)
            else:
                reg = qsim.make_ghz(cfg.n, labels, cap=self.pool.cap)
            self.pool.add(reg)
            row = [labels[0]]
            for i in range(1, cfg.n):
                row.append(self.pool.transfer(labels[i], i))
                self.net.qubit("2", 0, i, f"g{k}")
            self.held.append(row)
            self.resources["ghz_instances"] += 1

    def step3_verify(self) -> None:
        self._phase("3")
        cfg = self.cfg
        verdicts = []
        for k in range(cfg.ghz_instances):
            honest_passed = False
            for j in range(cfg.n):
                copies = []
                for i in range(cfg.n):
                    if i == j:
                        continue
                    anc = self.pool.allocate(QubitLabel(i, f"g{k}.c{i}>{j}"))
                    self.behaviour(i).pseudo_copy(i, k, self.access(i), self.held[k][i], anc)
                    copies.append(self.pool.transfer(anc, j))
                    self.net.qubit("3", i, j, f"g{k}.copy")
                announced = int(self.behaviour(j).verify(j, k, self.access(j), self.held[k][j], copies)) & 1
                if j not in cfg.corrupt:
                    honest_passed |= bool(announced)
                leftovers = [c for c in copies if c in self.pool]
                if leftovers:
                    self.pool.discard(leftovers, self.rng)
                self.net.broadcast("3", j, [announced], f"verify-{k}")
                verdicts.append(announced)
            if honest_passed:
                honest_labels = [self.held[k][i] for i in cfg.honest]
                reg = self.pool.join(honest_labels)
                w = qsim.weight_outside_equal_strings(reg, honest_labels)
                self.lemma1.append(Lemma1Record(k, True, w < LEMMA1_TOL, w))
        if not all(verdicts):
            raise _Abort(3)

    def step4_notify(self) -> list[int]:
        self._phase("4")
        cfg = self.cfg
        S, R = cfg.sender, cfg.receiver
        notify = [set() for _ in range(cfg.n)]
        notify[S].add(R)
        silent = {(S, R)} if cfg.force_notification_failure else set()
        notified = self.dcnet("4").notification(notify, cfg.s, forced_silent=silent)
        receivers = []
        for j in range(cfg.n):
            if j == S:
                continue
            if j in cfg.corrupt:
                if self.strategy.claims_receiver(j, notified[j]):
                    receivers.append(j)
            elif notified[j]:
                receivers.append(j)
                self.parties[j].role = RECEIVER
        if not notified[R]:
            self.budget["notification_failed"] = True
        self.receivers = receivers
        return notified

    def step5_anonymous_entanglement(self) -> None:
        self._phase("5")
        cfg = self.cfg
        S, R = cfg.sender, cfg.receiver
        for k in range(cfg.ghz_instances):
            bits = []
            for i in range(cfg.n):
                if i == S:
                    b = self.rng.bit("dummy")
                else:
                    b = self.behaviour(i).step5(i, k, self.access(i), self.held[k][i], i in self.receivers)
                b = int(b) & 1
                self.net.broadcast("5", i, [b], f"parity-{k}")
                bits.append(b)
            parity = 0
            for i, b in enumerate(bits):
                if i not in (S, R):
                    parity ^= b
            if parity:
                self.pool.apply("P", [self.held[k][S]])

    def step6_perfect_entanglement(self) -> dict:
        self._phase("6")
        cfg = self.cfg
        S, R = cfg.sender, cfg.receiver
        m2 = 2 * cfg.m
        halves_a, halves_b = [], []
        for i in range(m2):
            a, b = QubitLabel(S, f"bell{i}.a"), QubitLabel(S, f"bell{i}.b")
            self.pool.add(qsim.QuantumRegister([a, b], PHI_PLUS.copy()))
            halves_a.append(a)
            halves_b.append(b)
        self.resources["bell_pairs"] += m2
        key = qauth.AuthKey.fresh(m2, cfg.s, self.rng)
        traps = [QubitLabel(S, f"trap{i}") for i in range(cfg.s)]
        qauth.authenticate(self.pool.join(halves_b), halves_b, key, traps)
        block = halves_b + traps
        tele: list[int] = []
        for i, lab in enumerate(block):
            mine = self.held[i][S]
            z, x = self.pool.bell_measure(lab, mine, self.rng, kind="teleport")
            self.pool.discard([lab, mine], self.rng)
            tele += [z, x]
        self.resources["teleport_bits"] += len(tele)
        dc = self.dcnet("6")
        amt = dc.amt_send(key.to_bits() + tele, S, R, cfg.s, maskers=self.receivers)
        self._charge_amt(amt, "6")
        if amt.aborted:
            raise _Abort(6)
        failed = [0] * cfg.n
        decoded = {}
        for j in self.receivers:
            frame = amt.decoded[j] if amt.tag_ok.get(j) else None
            labels = [self.held[i][j] for i in range(cfg.ghz_instances)]
            f, dec = self.behaviour(j).step6_receive(j, self.access(j), labels, frame)
            failed[j] = int(f) & 1
            decoded[j] = dec
        missed = any(failed[j] for j in self.receivers if j not in cfg.corrupt)
        if dc.logical_or(failed, cfg.s, "decode-or"):
            raise _Abort(6)
        if missed:
            self.budget["decode_or_missed"] = True
        self.halves_a = halves_a
        return decoded

    def step7_failsafe_teleport(self, decoded: dict) -> RunOutcome:
        self._phase("7")
        cfg = self.cfg
        S, R = cfg.sender, cfg.receiver
        m = cfg.m
        bits7: list[int] = []
        for i in range(m):
            z, x = self.pool.bell_measure(self.psi_labels[i], self.halves_a[i], self.rng, kind="teleport")
            self.pool.discard([self.psi_labels[i], self.halves_a[i]], self.rng)
            bits7 += [z, x]
        self.resources["teleport_bits"] += len(bits7)
        amt = self.dcnet("7").amt_send(bits7, S, R, cfg.s, maskers=self.receivers)
        self._charge_amt(amt, "7")
        applied = {}
        for j in self.receivers:
            dec = decoded.get(j)
            recv = dec[:m] if dec else None
            bits = amt.decoded[j] if amt.tag_ok.get(j) else None
            applied[j] = self.behaviour(j).step7_receive(j, self.access(j), recv, bits)
        if not amt.aborted:
            return self._success(decoded)
        # fail-safe: R teleports back through pairs m..2m-1
        back: dict[int, list[int]] = {}
        for i in range(cfg.n):
            if i in self.receivers:
                dec = decoded.get(i)
                recv, spare = (dec[:m], dec[m:]) if dec else (None, None)
                b = self.behaviour(i).failsafe_return(i, self.access(i), recv, spare, applied.get(i))
            elif i == S:
                b = self.rng.bits(2 * m, "dummy")
            else:
                b = self.behaviour(i).failsafe_broadcast(i, self.access(i))
            b = [int(v) & 1 for v in b]
            self.net.broadcast("7", i, b, "failsafe")
            back[i] = b
        rb = back[R]
        targets = self.halves_a[m:]
        for i, lab in enumerate(targets):
            self.pool.pauli(lab, rb[2 * i + 1], rb[2 * i])
            self.pool.pauli(lab, bits7[2 * i + 1], bits7[2 * i])
        self.psi_labels = list(targets)
        sf = self.pool.overlap(targets, self.psi)
        if R in cfg.corrupt:
            holder, fid = CORRUPT_UNKNOWN, None
        elif R in self.receivers and decoded.get(R):
            holder, fid = SENDER, sf
        else:
            holder, fid = LOST, None
        return self._finish(ABORT, 7, holder, fid, sf)

    def _charge_amt(self, amt, step: str) -> None:
        # an honest receiver saw a bad tag but the closing OR stayed 0
        bad = [j for j, ok in amt.tag_ok.items() if not ok and j not in self.cfg.corrupt]
        if bad and not amt.aborted:
            self.budget[f"amt_or_missed_{step}"] = True

    # -- outcome ----------------------------------------------------------

    def _success(self, decoded: dict) -> RunOutcome:
        cfg = self.cfg
        R = cfg.receiver
        dec = decoded.get(R)
        if R in self.receivers and dec:
            labels = dec[: cfg.m]
            return self._finish(SUCCESS, None, RECEIVER, self.pool.overlap(labels, self.psi), None)
        corrupt_receivers = [j for j in self.receivers if j in cfg.corrupt]
        return self._finish(SUCCESS, None, CORRUPT_UNKNOWN if corrupt_receivers else LOST, None, None)

    def _finish(self, status, step, holder, fid, sender_fid) -> RunOutcome:
        self.pool.check_norm()
        self.net.view.check_confined()
        return RunOutcome(
            status=status,
            abort_step=step,
            psi_holder=holder,
            delivered_fidelity=fid,
            sender_fidelity=sender_fid,
            resources=dict(self.resources),
            lemma1=list(self.lemma1),
            budget=dict(self.budget),
            acting_receivers=tuple(self.receivers),
            parties=list(self.parties),
        )

    def execute(self) -> RunOutcome:
        cfg = self.cfg
        if cfg.sender is not None:
            self.psi_labels = [QubitLabel(cfg.sender, f"psi{i}") for i in range(cfg.m)]
            self.pool.add(qsim.QuantumRegister(self.psi_labels, self.psi.copy()))
        try:
            self.step1_collision()
            self.step2_distribute()
            self.step3_verify()
            self.step4_notify()
            self.step5_anonymous_entanglement()
            decoded = self.step6_perfect_entanglement()
            return self.step7_failsafe_teleport(decoded)
        except _Abort as a:
            self.net.abort(str(a.step))
            if cfg.sender is None:
                return self._finish(ABORT, a.step, None, None, None)
            sf = self.pool.overlap(self.psi_labels, self.psi)
            return self._finish(ABORT, a.step, SENDER, sf, sf)


def run(
    config: ProtocolConfig,
    message_state,
    strategy: Optional[HonestParty] = None,
    *,
    rng: Optional[Stream] = None,
) -> tuple[RunOutcome, Transcript]:
    """Execute the protocol once; deterministic in (config, message_state, strategy).

    ``rng`` replaces the default ``Stream(config.seed)``; the exact
    enumeration mode passes an :class:`~aqmt.rand.EnumeratingStream`.
    """
    eng = Engine(config, message_state, strategy, rng)
    outcome = eng.execute()
    return outcome, eng.net.transcript
