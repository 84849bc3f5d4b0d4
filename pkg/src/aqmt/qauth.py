"""Clifford-code quantum authentication.

``authenticate`` appends ``s`` trap qubits in |0>, applies a keyed uniformly
random Clifford on the m+s qubits and then a keyed Pauli one-time pad.
``decode`` undoes both and measures the traps; any non-zero trap rejects.

The key is an explicit bit string (Clifford coordinates followed by the pad),
so it can be shipped over a classical channel and decoded bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import qsim
from .clifford import clifford_key_bits, clifford_unitary
from .qsim import COMPUTATIONAL, QuantumRegister, QubitLabel
from .rand import Stream


class KeyReuseError(RuntimeError):
    """An authentication key was used for a second encode or decode."""


def key_length(m: int, s: int) -> int:
    k = m + s
    return clifford_key_bits(k) + 2 * k


def contract_key_length(message_qubits: int, s: int) -> int:
    """Key length of the purity-testing construction the protocol is stated with."""
    return 2 * message_qubits + 2 * s + 1


@dataclass
class AuthKey:
    m: int
    s: int
    clifford_bits: tuple[int, ...]
    pad_x: tuple[int, ...]
    pad_z: tuple[int, ...]
    encoded: bool = field(default=False, compare=False)
    decoded: bool = field(default=False, compare=False)

    def __post_init__(self):
        k = self.m + self.s
        if len(self.clifford_bits) != clifford_key_bits(k):
            raise ValueError("wrong Clifford key width")
        if len(self.pad_x) != k or len(self.pad_z) != k:
            raise ValueError("wrong pad width")

    @property
    def k(self) -> int:
        return self.m + self.s

    @classmethod
    def fresh(cls, m: int, s: int, rng: Stream, kind: str = "key") -> "AuthKey":
        if m < 1 or s < 1:
            raise ValueError("m and s must be >= 1")
        k = m + s
        cl: list[int] = []
        for level in range(k):
            j = k - level
            cl += rng.nonzero_bits(2 * j, kind)
            cl += rng.bits(2 * j - 1, kind)
        return cls(m, s, tuple(cl), tuple(rng.bits(k, kind)), tuple(rng.bits(k, kind)))

    def to_bits(self) -> list[int]:
        return list(self.clifford_bits) + list(self.pad_x) + list(self.pad_z)

    @classmethod
    def from_bits(cls, m: int, s: int, bits: Sequence[int]) -> "AuthKey":
        bits = [int(b) & 1 for b in bits]
        if len(bits) != key_length(m, s):
            raise ValueError(f"expected {key_length(m, s)} key bits, got {len(bits)}")
        k = m + s
        c = clifford_key_bits(k)
        return cls(m, s, tuple(bits[:c]), tuple(bits[c : c + k]), tuple(bits[c + k :]))

    def unitary(self) -> np.ndarray:
        return clifford_unitary(self.clifford_bits, self.k)


@dataclass
class AuthVerdict:
    accepted: int
    decoded_labels: list[QubitLabel]
    trap_outcomes: tuple[int, ...] = ()


def authenticate(
    reg: QuantumRegister,
    message_labels: Sequence[QubitLabel],
    key: AuthKey,
    trap_labels: Optional[Sequence[QubitLabel]] = None,
) -> QuantumRegister:
    """Encode ``message_labels`` in place; the code block is message + trap labels."""
    message_labels = list(message_labels)
    if len(message_labels) != key.m:
        raise ValueError(f"key is for {key.m} message qubits, got {len(message_labels)}")
    if key.encoded:
        raise KeyReuseError("authentication key already used for encoding")
    if trap_labels is None:
        owner = message_labels[0].owner
        trap_labels = [reg.new_label(owner, "trap") for _ in range(key.s)]
    trap_labels = list(trap_labels)
    if len(trap_labels) != key.s:
        raise ValueError(f"need {key.s} trap labels")
    if len(reg) + key.s > reg.cap:
        raise qsim.ResourceError("authentication traps exceed the register cap")
    key.encoded = True
    for lab in trap_labels:
        reg.allocate(lab)
    block = message_labels + trap_labels
    qsim.apply_gate(reg, key.unitary(), block)
    for lab, x, z in zip(block, key.pad_x, key.pad_z):
        qsim.apply_pauli(reg, lab, x, z)
    return reg


def decode(
    reg: QuantumRegister,
    auth_labels: Sequence[QubitLabel],
    key: AuthKey,
    rng: Stream,
    *,
    kind: str = "measure",
) -> AuthVerdict:
    """Undo pad and Clifford, measure and remove the traps."""
    auth_labels = list(auth_labels)
    if len(auth_labels) != key.k:
        raise ValueError(f"expected {key.k} authenticated qubits, got {len(auth_labels)}")
    if key.decoded:
        raise KeyReuseError("authentication key already used for decoding")
    key.decoded = True
    for lab, x, z in zip(auth_labels, key.pad_x, key.pad_z):
        # (Z^z X^x)^dag = X^x Z^z up to a global phase
        qsim.apply_pauli(reg, lab, x, z)
    qsim.apply_gate(reg, key.unitary().conj().T, auth_labels)
    outcomes = []
    for lab in auth_labels[key.m :]:
        rec, _ = qsim.measure(reg, lab, COMPUTATIONAL, rng, remove=True, kind=kind)
        outcomes.append(rec.outcome)
    return AuthVerdict(int(not any(outcomes)), auth_labels[: key.m], tuple(outcomes))


def security_bound(m: int, s: int) -> float:
    """Lower bound on p*q + (1 - p) for any attack."""
    return 1.0 - (m + s) / (s * (2**s + 1))
