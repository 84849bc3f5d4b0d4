import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqmt import qsim
from aqmt.clifford import clifford_key_bits, clifford_unitary, omega, pauli_matrix, symplectic_from_bits
from aqmt.qauth import (
    AuthKey, KeyReuseError, authenticate, contract_key_length, decode, key_length, security_bound,
)
from aqmt.qsim import QubitLabel, QuantumRegister
from aqmt.rand import Stream

from checks import ATTACKS, pad_twirl, qas_attack_trial

TOL = 1e-9


# -- Clifford sampling -------------------------------------------------------

def valid_bit_strings(k):
    """Every key bit string whose X-image segments are non-zero."""
    segs = []
    for level in range(k):
        j = k - level
        segs.append([c for c in itertools.product((0, 1), repeat=2 * j) if any(c)])
        segs.append(list(itertools.product((0, 1), repeat=2 * j - 1)))
    for parts in itertools.product(*segs):
        yield [b for part in parts for b in part]


@pytest.mark.parametrize("k,order", [(1, 6), (2, 720)])
def test_symplectic_decoding_is_a_bijection(k, order):
    seen = set()
    for bits in valid_bit_strings(k):
        xs, zs = symplectic_from_bits(bits, k)
        seen.add((xs.tobytes(), zs.tobytes()))
    assert len(seen) == order


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(1, 4))
def test_symplectic_images_commute_correctly(seed, k):
    rng = Stream(seed)
    bits = []
    for level in range(k):
        j = k - level
        bits += rng.nonzero_bits(2 * j, "key") + rng.bits(2 * j - 1, "key")
    xs, zs = symplectic_from_bits(bits, k)
    for a in range(k):
        for b in range(k):
            assert omega(xs[a], xs[b]) == 0
            assert omega(zs[a], zs[b]) == 0
            assert omega(xs[a], zs[b]) == int(a == b)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(1, 3))
def test_clifford_unitary_maps_paulis(seed, k):
    rng = Stream(seed)
    bits = []
    for level in range(k):
        j = k - level
        bits += rng.nonzero_bits(2 * j, "key") + rng.bits(2 * j - 1, "key")
    u = clifford_unitary(bits, k)
    assert np.allclose(u.conj().T @ u, np.eye(2**k), atol=TOL)
    xs, zs = symplectic_from_bits(bits, k)
    for q in range(k):
        e = np.zeros(2 * k, dtype=np.uint8)
        e[q] = 1
        assert np.allclose(u @ pauli_matrix(e) @ u.conj().T, pauli_matrix(xs[q]), atol=1e-8)
        e = np.zeros(2 * k, dtype=np.uint8)
        e[k + q] = 1
        assert np.allclose(u @ pauli_matrix(e) @ u.conj().T, pauli_matrix(zs[q]), atol=1e-8)


def test_key_lengths():
    assert clifford_key_bits(1) == 3
    assert clifford_key_bits(3) == 2 * 9 + 3
    assert key_length(1, 1) == clifford_key_bits(2) + 4 == 14
    assert contract_key_length(2, 3) == 4 * 1 + 2 * 3 + 1 == 11
    assert contract_key_length(4, 3) == 15  # m=2 inside the protocol: 4m+2s+1


# -- codec -------------------------------------------------------------------

def round_trip(m, s, psi, seed):
    rng = Stream(seed)
    labels = [QubitLabel(0, f"m{i}") for i in range(m)]
    reg = QuantumRegister(labels, psi)
    key = AuthKey.fresh(m, s, rng)
    authenticate(reg, labels, key)
    block = [lab for lab in reg.labels]
    verdict = decode(reg, block, key, rng)
    return verdict, reg


@pytest.mark.parametrize("m,s", [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4)])
def test_round_trip_identity(m, s):
    gen = np.random.default_rng(100 * m + s)
    for seed in range(50):
        psi = qsim.random_state(m, gen)
        verdict, reg = round_trip(m, s, psi, seed)
        assert verdict.accepted == 1
        assert qsim.fidelity(reg, verdict.decoded_labels, psi) > 1 - TOL
        assert len(reg) == m


def test_key_reuse_rejected():
    rng = Stream(0)
    labels = [QubitLabel(0, "m")]
    reg = QuantumRegister(labels, qsim.KET_PLUS)
    key = AuthKey.fresh(1, 2, rng)
    authenticate(reg, labels, key)
    with pytest.raises(KeyReuseError):
        authenticate(QuantumRegister([QubitLabel(1, "m")]), [QubitLabel(1, "m")], key)
    block = list(reg.labels)
    decode(reg, block, key, rng)
    with pytest.raises(KeyReuseError):
        decode(reg, block, key, rng)


def test_key_bits_round_trip():
    key = AuthKey.fresh(2, 3, Stream(9))
    bits = key.to_bits()
    assert len(bits) == key_length(2, 3)
    again = AuthKey.from_bits(2, 3, bits)
    assert again == key
    with pytest.raises(ValueError):
        AuthKey.from_bits(2, 3, bits[:-1])


def test_identity_attack_accepts():
    for seed in range(20):
        verdict, _ = round_trip(1, 3, qsim.KET_0, seed)
        assert verdict.accepted == 1


def test_pad_twirl_is_maximally_mixed():
    # m=1, s=1: average over all 16 pads for a fixed Clifford
    gen = np.random.default_rng(1)
    psi = qsim.random_state(1, gen)
    key = AuthKey.fresh(1, 1, Stream(4))
    rho = pad_twirl(1, 1, psi, key.clifford_bits)
    assert np.allclose(rho, np.eye(4) / 4, atol=TOL)


def test_security_bound_example():
    assert security_bound(1, 4) == pytest.approx(1 - 5 / 68)


@pytest.mark.parametrize("attack", ATTACKS)
def test_attack_suite_small_sample(attack):
    m, s = 1, 3
    vals = [qas_attack_trial(m, s, attack, seed) for seed in range(300)]
    mean, sd = float(np.mean(vals)), float(np.std(vals, ddof=1))
    assert mean >= security_bound(m, s) - 3 * sd / np.sqrt(len(vals))


def test_attack_score_in_unit_interval():
    for seed in range(50):
        assert 0.0 <= qas_attack_trial(2, 2, "pauli", seed) <= 1.0
