"""Dense state-vector engine for the handful of operations the protocol needs.

Amplitudes are stored flat; label ``i`` of :attr:`QuantumRegister.labels`
is tensor axis ``i`` (big-endian, so ``|10>`` means the first label is 1).
Operations mutate the register in place and return it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .rand import Stream

NORM_TOL = 1e-9
DEFAULT_CAP = 16

SQRT1_2 = 1.0 / np.sqrt(2.0)

GATES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    # conditional phase change: P|0> = |0>, P|1> = -|1>
    "P": np.array([[1, 0], [0, -1]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) * SQRT1_2
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) * SQRT1_2
KET_0 = np.array([1, 0], dtype=complex)
KET_1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) * SQRT1_2
KET_MINUS = np.array([1, -1], dtype=complex) * SQRT1_2

COMPUTATIONAL = "computational"
HADAMARD = "hadamard"


class QSimError(Exception):
    """Base class for engine contract violations."""


class ResourceError(QSimError):
    """Register would exceed its qubit cap."""


class UnknownLabelError(QSimError, KeyError):
    pass


class NotUnitaryError(QSimError, ValueError):
    pass


class EntangledRemainderError(QSimError):
    """Fidelity requested on qubits that are entangled with the rest."""


@dataclass(frozen=True, order=True)
class QubitLabel:
    owner: int
    tag: str

    def __str__(self) -> str:
        return f"{self.owner}:{self.tag}"


@dataclass(frozen=True)
class MeasurementRecord:
    label: QubitLabel
    basis: str
    outcome: int


class QuantumRegister:
    """Labeled qubits plus a dense amplitude vector."""

    def __init__(self, labels: Sequence[QubitLabel] = (), amplitudes=None, cap: int = DEFAULT_CAP):
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise QSimError("duplicate qubit labels")
        if len(labels) > cap:
            raise ResourceError(f"{len(labels)} qubits exceed cap {cap}")
        self.cap = cap
        self.labels: list[QubitLabel] = labels
        if amplitudes is None:
            amplitudes = np.zeros(2 ** len(labels), dtype=complex)
            amplitudes[0] = 1.0
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != 2 ** len(labels):
            raise QSimError("amplitude vector does not match label count")
        self.amplitudes = amplitudes
        self._counter = itertools.count()

    # -- bookkeeping -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: QubitLabel) -> bool:
        return label in self.labels

    def index(self, label: QubitLabel) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(str(label)) from None

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * len(self.labels))

    def norm_error(self) -> float:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)

    def copy(self) -> "QuantumRegister":
        reg = QuantumRegister(list(self.labels), self.amplitudes.copy(), cap=self.cap)
        return reg

    def new_label(self, owner: int, prefix: str) -> QubitLabel:
        while True:
            label = QubitLabel(owner, f"{prefix}#{next(self._counter)}")
            if label not in self.labels:
                return label

    def allocate(self, label: QubitLabel) -> QubitLabel:
        """Append a fresh qubit in |0>."""
        if label in self.labels:
            raise QSimError(f"label {label} already present")
        if len(self.labels) + 1 > self.cap:
            raise ResourceError(f"allocating {label} exceeds cap {self.cap}")
        zero = np.zeros(2 * self.amplitudes.size, dtype=complex)
        zero[0::2] = self.amplitudes
        self.amplitudes = zero
        self.labels.append(label)
        return label

    def merge(self, other: "QuantumRegister") -> "QuantumRegister":
        """Absorb ``other`` as a tensor factor (its labels go last)."""
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise QSimError(f"labels {sorted(map(str, clash))} present in both registers")
        if len(self.labels) + len(other.labels) > self.cap:
            raise ResourceError(
                f"merging {len(other.labels)} qubits exceeds cap {self.cap}"
            )
        self.amplitudes = np.kron(self.amplitudes, other.amplitudes)
        self.labels.extend(other.labels)
        return self

    def transfer(self, label: QubitLabel, new_owner: int) -> QubitLabel:
        """Hand a qubit to another participant; the tag is kept."""
        i = self.index(label)
        moved = QubitLabel(new_owner, label.tag)
        if moved != label and moved in self.labels:
            raise QSimError(f"label {moved} already present")
        self.labels[i] = moved
        return moved

    def owned_by(self, owner: int) -> list[QubitLabel]:
        return [lab for lab in self.labels if lab.owner == owner]

    def _remove_axis(self, label: QubitLabel, value: int) -> None:
        i = self.index(label)
        t = self.tensor()
        self.amplitudes = np.ascontiguousarray(np.take(t, value, axis=i)).reshape(-1)
        del self.labels[i]


def _renormalize(reg: QuantumRegister) -> None:
    nrm = np.linalg.norm(reg.amplitudes)
    if nrm < 1e-15:
        raise QSimError("state collapsed onto a zero-probability branch")
    reg.amplitudes = reg.amplitudes / nrm


def check_norm(reg: QuantumRegister) -> None:
    err = reg.norm_error()
    if err > NORM_TOL:
        raise QSimError(f"norm drifted by {err:.3e}")


def make_ghz(n_qubits: int, labels: Sequence[QubitLabel] | None = None, cap: int = DEFAULT_CAP) -> QuantumRegister:
    """|+_n> = (|0...0> + |1...1>)/sqrt(2)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if n_qubits > cap:
        raise ResourceError(f"{n_qubits} qubits exceed cap {cap}")
    if labels is None:
        labels = [QubitLabel(i, "ghz") for i in range(n_qubits)]
    if len(labels) != n_qubits:
        raise ValueError("label count must equal n_qubits")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = amps[-1] = SQRT1_2
    return QuantumRegister(labels, amps, cap=cap)


def product_state(labels: Sequence[QubitLabel], single: Sequence[np.ndarray], cap: int = DEFAULT_CAP) -> QuantumRegister:
    amps = np.array([1.0 + 0j])
    for v in single:
        amps = np.kron(amps, np.asarray(v, dtype=complex))
    return QuantumRegister(labels, amps, cap=cap)


GateLike = Union[str, np.ndarray]


def _as_matrix(gate: GateLike) -> np.ndarray:
    if isinstance(gate, str):
        try:
            return GATES[gate]
        except KeyError:
            raise QSimError(f"unknown gate {gate!r}") from None
    u = np.asarray(gate, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitaryError("gate matrix must be square")
    if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=NORM_TOL, rtol=0):
        raise NotUnitaryError("gate matrix is not unitary")
    return u


def apply_gate(reg: QuantumRegister, gate: GateLike, targets: Sequence[QubitLabel]) -> QuantumRegister:
    u = _as_matrix(gate)
    targets = list(targets)
    k = len(targets)
    if u.shape[0] != 2**k:
        raise QSimError(f"gate acts on {int(np.log2(u.shape[0]))} qubits, got {k} targets")
    if len(set(targets)) != k:
        raise QSimError("repeated target label")
    axes = [reg.index(t) for t in targets]
    n = len(reg.labels)
    psi = np.moveaxis(reg.tensor(), axes, list(range(k))).reshape(2**k, -1)
    psi = u @ psi
    psi = np.moveaxis(psi.reshape((2,) * n), list(range(k)), axes)
    reg.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    return reg


def apply_pauli(reg: QuantumRegister, label: QubitLabel, x: int, z: int) -> QuantumRegister:
    """Apply X^x then Z^z to ``label``."""
    if x:
        apply_gate(reg, "X", [label])
    if z:
        apply_gate(reg, "Z", [label])
    return reg


def _probabilities(reg: QuantumRegister, labels: Sequence[QubitLabel]) -> np.ndarray:
    axes = [reg.index(lab) for lab in labels]
    k = len(axes)
    psi = np.moveaxis(reg.tensor(), axes, list(range(k))).reshape(2**k, -1)
    return np.sum(np.abs(psi) ** 2, axis=1)


def _collapse(reg: QuantumRegister, labels: Sequence[QubitLabel], value: int) -> None:
    axes = [reg.index(lab) for lab in labels]
    k = len(axes)
    n = len(reg.labels)
    psi = np.moveaxis(reg.tensor(), axes, list(range(k))).reshape(2**k, -1).copy()
    keep = psi[value].copy()
    psi[:] = 0
    psi[value] = keep
    psi = np.moveaxis(psi.reshape((2,) * n), list(range(k)), axes)
    reg.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    _renormalize(reg)


def measure(
    reg: QuantumRegister,
    label: QubitLabel,
    basis: str,
    rng: Stream,
    *,
    remove: bool = False,
    kind: str = "measure",
) -> tuple[MeasurementRecord, QuantumRegister]:
    """Projective single-qubit measurement; Hadamard outcome 0 means |+>."""
    if basis not in (COMPUTATIONAL, HADAMARD):
        raise QSimError(f"unknown basis {basis!r}")
    reg.index(label)
    if basis == HADAMARD:
        apply_gate(reg, "H", [label])
    p0 = float(_probabilities(reg, [label])[0])
    p0 = min(max(p0, 0.0), 1.0)
    outcome = rng.outcome((p0, 1.0 - p0), kind)
    if remove:
        reg._remove_axis(label, outcome)
        _renormalize(reg)
    else:
        _collapse(reg, [label], outcome)
        if basis == HADAMARD:
            apply_gate(reg, "H", [label])
    return MeasurementRecord(label, basis, outcome), reg


def discard(reg: QuantumRegister, labels: Sequence[QubitLabel], rng: Stream, *, kind: str = "discard") -> QuantumRegister:
    """Remove qubits from the register.

    Tracing out is unravelled as a computational-basis measurement whose
    outcome is forgotten, which leaves the remaining qubits with the correct
    reduced state in every branch.
    """
    for lab in list(labels):
        measure(reg, lab, COMPUTATIONAL, rng, remove=True, kind=kind)
    return reg


def project_ghz_subspace(
    reg: QuantumRegister, labels: Sequence[QubitLabel], rng: Stream, *, kind: str = "measure"
) -> tuple[int, QuantumRegister]:
    """Two-outcome measurement {Pi, I - Pi}, Pi = |0..0><0..0| + |1..1><1..1|."""
    labels = list(labels)
    if not labels:
        raise ValueError("need at least one label")
    probs = _probabilities(reg, labels)
    p_in = float(probs[0] + probs[-1]) if len(labels) > 1 else float(probs.sum())
    p_in = min(max(p_in, 0.0), 1.0)
    passed = rng.outcome((1.0 - p_in, p_in), kind)
    axes = [reg.index(lab) for lab in labels]
    k = len(axes)
    n = len(reg.labels)
    psi = np.moveaxis(reg.tensor(), axes, list(range(k))).reshape(2**k, -1).copy()
    inside = psi[[0, -1]].copy()
    if passed:
        psi[:] = 0
        psi[[0, -1]] = inside
    else:
        psi[[0, -1]] = 0
    psi = np.moveaxis(psi.reshape((2,) * n), list(range(k)), axes)
    reg.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    _renormalize(reg)
    return passed, reg


def bell_measure(
    reg: QuantumRegister, label_a: QubitLabel, label_b: QubitLabel, rng: Stream, *, kind: str = "teleport"
) -> tuple[tuple[int, int], QuantumRegister]:
    """Bell measurement returning (z, x): the pair collapses to (I (x) Z^z X^x)|Phi+>."""
    apply_gate(reg, "CNOT", [label_a, label_b])
    apply_gate(reg, "H", [label_a])
    probs = _probabilities(reg, [label_a, label_b])
    idx = rng.outcome(probs / probs.sum(), kind)
    _collapse(reg, [label_a, label_b], idx)
    apply_gate(reg, "H", [label_a])
    apply_gate(reg, "CNOT", [label_a, label_b])
    z, x = idx >> 1, idx & 1
    return (z, x), reg


def teleport_correction(reg: QuantumRegister, label: QubitLabel, bits: tuple[int, int]) -> QuantumRegister:
    """Undo the Pauli left on the far qubit after a Bell outcome ``(z, x)``."""
    z, x = bits
    return apply_pauli(reg, label, x, z)


def reduced_density_matrix(reg: QuantumRegister, labels: Sequence[QubitLabel]) -> np.ndarray:
    axes = [reg.index(lab) for lab in labels]
    k = len(axes)
    psi = np.moveaxis(reg.tensor(), axes, list(range(k))).reshape(2**k, -1)
    return psi @ psi.conj().T


def purity(reg: QuantumRegister, labels: Sequence[QubitLabel]) -> float:
    rho = reduced_density_matrix(reg, labels)
    return float(np.real(np.trace(rho @ rho)))


def overlap(reg: QuantumRegister, labels: Sequence[QubitLabel], target) -> float:
    """<t| rho_labels |t>; defined whether or not the labels are entangled."""
    t = np.asarray(target, dtype=complex).reshape(-1)
    t = t / np.linalg.norm(t)
    rho = reduced_density_matrix(reg, labels)
    if rho.shape[0] != t.size:
        raise QSimError("target dimension does not match labels")
    return float(min(max(np.real(t.conj() @ rho @ t), 0.0), 1.0))


def fidelity(reg: QuantumRegister, labels: Sequence[QubitLabel], target) -> float:
    """|<target|state>|^2 for labels that are unentangled with the rest."""
    labels = list(labels)
    if np.asarray(target).size != 2 ** len(labels):
        raise QSimError("target dimension does not match labels")
    if abs(1.0 - purity(reg, labels)) > NORM_TOL:
        raise EntangledRemainderError("labels are entangled with the rest of the register")
    return overlap(reg, labels, target)


def weight_outside_equal_strings(reg: QuantumRegister, labels: Sequence[QubitLabel]) -> float:
    """Probability mass whose ``labels`` bits are neither all 0 nor all 1."""
    probs = _probabilities(reg, labels)
    if len(labels) == 1:
        return 0.0
    return float(max(probs.sum() - probs[0] - probs[-1], 0.0))


def random_state(n_qubits: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-random pure state."""
    v = gen.normal(size=2**n_qubits) + 1j * gen.normal(size=2**n_qubits)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    z = (gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


class RegisterPool:
    """A product of independent registers, merged only when an operation needs it.

    Instances that never interact stay in separate (small) registers; the
    cap applies to every merged register.
    """

    def __init__(self, cap: int = DEFAULT_CAP):
        self.cap = cap
        self.registers: list[QuantumRegister] = []

    def labels(self) -> list[QubitLabel]:
        return [lab for reg in self.registers for lab in reg.labels]

    def __contains__(self, label: QubitLabel) -> bool:
        return any(label in reg for reg in self.registers)

    def owned_by(self, owner: int) -> list[QubitLabel]:
        return [lab for lab in self.labels() if lab.owner == owner]

    def add(self, reg: QuantumRegister) -> QuantumRegister:
        clash = set(reg.labels) & set(self.labels())
        if clash:
            raise QSimError(f"labels {sorted(map(str, clash))} already in the pool")
        if len(reg) > self.cap:
            raise ResourceError(f"register of {len(reg)} qubits exceeds cap {self.cap}")
        reg.cap = self.cap
        self.registers.append(reg)
        return reg

    def allocate(self, label: QubitLabel) -> QubitLabel:
        self.add(QuantumRegister([label], cap=self.cap))
        return label

    def find(self, label: QubitLabel) -> QuantumRegister:
        for reg in self.registers:
            if label in reg:
                return reg
        raise UnknownLabelError(str(label))

    def join(self, labels: Sequence[QubitLabel]) -> QuantumRegister:
        regs: list[QuantumRegister] = []
        for lab in labels:
            reg = self.find(lab)
            if not any(r is reg for r in regs):
                regs.append(reg)
        head = regs[0]
        for other in regs[1:]:
            head.merge(other)
            self.registers = [r for r in self.registers if r is not other]
        return head

    def _prune(self) -> None:
        self.registers = [r for r in self.registers if r.labels]

    def apply(self, gate: GateLike, targets: Sequence[QubitLabel]) -> None:
        apply_gate(self.join(targets), gate, targets)

    def pauli(self, label: QubitLabel, x: int, z: int) -> None:
        apply_pauli(self.find(label), label, x, z)

    def measure(self, label: QubitLabel, basis: str, rng: Stream, *, remove: bool = False, kind: str = "measure") -> int:
        rec, _ = measure(self.find(label), label, basis, rng, remove=remove, kind=kind)
        self._prune()
        return rec.outcome

    def discard(self, labels: Sequence[QubitLabel], rng: Stream, *, kind: str = "discard") -> None:
        for lab in list(labels):
            discard(self.find(lab), [lab], rng, kind=kind)
        self._prune()

    def project_ghz(self, labels: Sequence[QubitLabel], rng: Stream, *, kind: str = "measure") -> int:
        passed, _ = project_ghz_subspace(self.join(labels), labels, rng, kind=kind)
        return passed

    def bell_measure(self, a: QubitLabel, b: QubitLabel, rng: Stream, *, kind: str = "teleport") -> tuple[int, int]:
        bits, _ = bell_measure(self.join([a, b]), a, b, rng, kind=kind)
        return bits

    def transfer(self, label: QubitLabel, new_owner: int) -> QubitLabel:
        return self.find(label).transfer(label, new_owner)

    def reduced_density_matrix(self, labels: Sequence[QubitLabel]) -> np.ndarray:
        """Reduced state of ``labels`` without merging their registers."""
        labels = list(labels)
        groups: list[tuple[QuantumRegister, list[QubitLabel]]] = []
        for lab in labels:
            reg = self.find(lab)
            for r, labs in groups:
                if r is reg:
                    labs.append(lab)
                    break
            else:
                groups.append((reg, [lab]))
        rho = np.array([[1.0 + 0j]])
        order: list[QubitLabel] = []
        for reg, labs in groups:
            rho = np.kron(rho, reduced_density_matrix(reg, labs))
            order += labs
        k = len(labels)
        perm = [order.index(lab) for lab in labels]
        t = rho.reshape((2,) * (2 * k)).transpose(perm + [k + p for p in perm])
        return t.reshape(2**k, 2**k)

    def overlap(self, labels: Sequence[QubitLabel], target) -> float:
        t = np.asarray(target, dtype=complex).reshape(-1)
        t = t / np.linalg.norm(t)
        rho = self.reduced_density_matrix(labels)
        if rho.shape[0] != t.size:
            raise QSimError("target dimension does not match labels")
        return float(min(max(np.real(t.conj() @ rho @ t), 0.0), 1.0))

    def check_norm(self) -> None:
        for reg in self.registers:
            check_norm(reg)
