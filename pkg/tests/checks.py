"""Shared exhaustive checks used by the unit tests and the acceptance module."""

from __future__ import annotations

import itertools

import numpy as np

from aqmt import qsim
from aqmt.dcnet import PadTable, anonymous_parity_round
from aqmt.qsim import HADAMARD, PHI_MINUS, PHI_PLUS, QubitLabel
from aqmt.rand import enumerate_branches

TOL = 1e-9


def ghz_parity_branches(n: int) -> list[dict]:
    """Hadamard-measure n-2 qubits of |+_n> on every outcome branch.

    Returns one record per branch with the outcome string, its probability,
    the pair's fidelity to the Bell state predicted by the parity, and the
    fidelity to |Phi+> after the P correction on odd parity.
    """
    labels = [QubitLabel(i, "g") for i in range(n)]
    out = []

    def one(stream):
        reg = qsim.make_ghz(n, labels)
        bits = []
        for lab in labels[2:]:
            rec, _ = qsim.measure(reg, lab, HADAMARD, stream, remove=True)
            bits.append(rec.outcome)
        parity = sum(bits) % 2
        pair = labels[:2]
        predicted = qsim.fidelity(reg, pair, PHI_MINUS if parity else PHI_PLUS)
        if parity:
            qsim.apply_gate(reg, "P", [labels[0]])
        return tuple(bits), predicted, qsim.fidelity(reg, pair, PHI_PLUS)

    for p, (bits, predicted, corrected) in enumerate_branches(0, ["measure"], one):
        out.append({"bits": bits, "p": p, "predicted": predicted, "corrected": corrected})
    return out


def parity_law_holds(n: int) -> bool:
    branches = ghz_parity_branches(n)
    strings = {b["bits"] for b in branches}
    return (
        strings == set(itertools.product((0, 1), repeat=n - 2))
        and all(abs(b["p"] - 2.0 ** -(n - 2)) < TOL for b in branches)
        and all(b["predicted"] > 1 - TOL and b["corrected"] > 1 - TOL for b in branches)
    )


def coalition_view_distribution(inputs, coalition) -> dict:
    """Exact distribution of (coalition pads, all published values) over all pad tables."""
    n = len(inputs)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = [k for k, (i, j) in enumerate(pairs) if i in coalition or j in coalition]
    dist: dict = {}
    for values in itertools.product((0, 1), repeat=len(pairs)):
        res = anonymous_parity_round(inputs, PadTable.from_pairs(n, values))
        key = (tuple(values[k] for k in seen), tuple(res.published))
        dist[key] = dist.get(key, 0) + 1
    total = 2 ** len(pairs)
    return {k: v / total for k, v in dist.items()}


def distribution_close(p: dict, q: dict, tol: float = 1e-12) -> bool:
    return all(abs(p.get(k, 0.0) - q.get(k, 0.0)) <= tol for k in set(p) | set(q))


def pad_twirl(m: int, s: int, message: np.ndarray, clifford_bits) -> np.ndarray:
    """Average of the encoded state over every pad for a fixed Clifford."""
    from aqmt.qauth import AuthKey, authenticate

    k = m + s
    rho = 0
    for pad in itertools.product((0, 1), repeat=2 * k):
        key = AuthKey(m, s, tuple(clifford_bits), pad[:k], pad[k:])
        labels = [QubitLabel(0, f"m{i}") for i in range(m)]
        reg = qsim.QuantumRegister(labels, message)
        traps = [QubitLabel(0, f"t{i}") for i in range(s)]
        authenticate(reg, labels, key, traps)
        v = reg.amplitudes
        rho = rho + np.outer(v, v.conj())
    return rho / 4**k


ATTACKS = ("pauli", "unitary", "swap")


def qas_attack_trial(m: int, s: int, attack: str, seed: int) -> float:
    """One authenticate / attack / decode cycle; returns accept * fidelity + (1 - accept).

    The mean of this quantity estimates p*q + (1 - p).
    """
    from aqmt.qauth import AuthKey, authenticate, decode
    from aqmt.rand import Stream

    rng = Stream(seed)
    gen = rng.generator("adversary")
    psi = qsim.random_state(m, rng.generator("message"))
    labels = [QubitLabel(0, f"m{i}") for i in range(m)]
    traps = [QubitLabel(0, f"t{i}") for i in range(s)]
    reg = qsim.QuantumRegister(labels, psi)
    key = AuthKey.fresh(m, s, rng)
    authenticate(reg, labels, key, traps)
    block = labels + traps
    k = m + s
    if attack == "pauli":
        while True:
            xs, zs = gen.integers(0, 2, k), gen.integers(0, 2, k)
            if xs.any() or zs.any():
                break
        for lab, x, z in zip(block, xs, zs):
            qsim.apply_pauli(reg, lab, int(x), int(z))
    elif attack == "unitary":
        target = block[int(gen.integers(k))]
        qsim.apply_gate(reg, qsim.random_unitary(2, gen), [target])
    elif attack == "swap":
        fresh = QubitLabel(1, "fresh")
        reg.merge(qsim.QuantumRegister([fresh], qsim.random_state(1, gen)))
        target = block[int(gen.integers(k))]
        # the adversary keeps the encoded qubit and substitutes a fresh one
        qsim.apply_gate(reg, "SWAP", [target, fresh])
        qsim.discard(reg, [fresh], rng)
    else:
        raise ValueError(attack)
    verdict = decode(reg, block, key, rng)
    if not verdict.accepted:
        return 1.0
    return qsim.overlap(reg, verdict.decoded_labels, psi)



def coalition_for(spec, n=4):
    """A coalition the strategy can act through, keeping S=1 and R=2 honest where possible."""
    if spec.name == "CORRUPT_R_FAKE_RETURN":
        return {2}
    if spec.name == "GHZ_FORGER":
        return {0}
    return {3}
