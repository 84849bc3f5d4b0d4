"""Uniform Clifford elements from explicit key bits.

A Clifford on k qubits is, up to a Pauli and a phase, a symplectic map of
F_2^{2k}.  We pick the images of X_1, Z_1, X_2, Z_2, ... one level at a time:
the image ``a`` of X_i is a uniformly random non-zero vector of the current
symplectic subspace (2j coordinate bits), the image ``v`` of Z_i is uniform
among subspace vectors with omega(a, v) = 1 (2j-1 bits), and the next level
works inside the symplectic complement of span{a, v}.  Every symplectic
matrix arises from exactly one bit string, so uniform bits give a uniform
element of Sp(2k, 2); the Pauli pad applied afterwards supplies the rest of
the Clifford group.

Vectors are numpy uint8 arrays laid out as (x_1..x_k, z_1..z_k).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def clifford_key_bits(k: int) -> int:
    return sum(4 * j - 1 for j in range(1, k + 1))


def omega(u: np.ndarray, v: np.ndarray) -> int:
    k = u.size // 2
    return int((u[:k] @ v[k:] + u[k:] @ v[:k]) % 2)


def _gf2_basis(vectors: list[np.ndarray]) -> list[np.ndarray]:
    """Independent subset (in order) of ``vectors`` over GF(2)."""
    basis: list[np.ndarray] = []
    pivots: list[int] = []
    reduced: list[np.ndarray] = []
    for v in vectors:
        w = v.copy()
        for p, r in zip(pivots, reduced):
            if w[p]:
                w ^= r
        nz = np.flatnonzero(w)
        if nz.size:
            pivots.append(int(nz[0]))
            reduced.append(w)
            basis.append(v)
    return basis


def symplectic_from_bits(bits, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode key bits into the images of X_i (rows of ``xs``) and Z_i (rows of ``zs``)."""
    bits = [int(b) & 1 for b in bits]
    if len(bits) != clifford_key_bits(k):
        raise ValueError(f"expected {clifford_key_bits(k)} bits for k={k}, got {len(bits)}")
    basis = list(np.eye(2 * k, dtype=np.uint8))
    xs, zs = [], []
    pos = 0
    for level in range(k):
        j = k - level
        c = bits[pos : pos + 2 * j]
        pos += 2 * j
        d = bits[pos : pos + 2 * j - 1]
        pos += 2 * j - 1
        if not any(c):
            # only reachable from tampered keys; map to the first basis vector
            c = [1] + [0] * (2 * j - 1)
        a = np.zeros(2 * k, dtype=np.uint8)
        for ci, b in zip(c, basis):
            if ci:
                a ^= b
        i0 = next(i for i, b in enumerate(basis) if omega(a, b))
        anchor = basis[i0]
        v = anchor.copy()
        others = [b for i, b in enumerate(basis) if i != i0]
        for di, b in zip(d, others):
            if di:
                v ^= b
                if omega(a, b):
                    v ^= anchor
        xs.append(a)
        zs.append(v)
        projected = []
        for w in basis:
            w2 = w.copy()
            if omega(w, v):
                w2 ^= a
            if omega(w, a):
                w2 ^= v
            projected.append(w2)
        basis = _gf2_basis(projected)
        assert len(basis) == 2 * (j - 1)
    return np.array(xs), np.array(zs)


_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)
_PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PI = np.eye(2, dtype=complex)


def pauli_matrix(vec: np.ndarray) -> np.ndarray:
    """Hermitian Pauli for (x|z): per qubit I, X, Z or Y."""
    k = vec.size // 2
    out = np.array([[1.0 + 0j]])
    for q in range(k):
        x, z = vec[q], vec[k + q]
        m = _PY if (x and z) else _PX if x else _PZ if z else _PI
        out = np.kron(out, m)
    return out


def unitary_from_symplectic(xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """The unitary U with U X_i U^dag = P(xs[i]) and U Z_i U^dag = P(zs[i])."""
    k = xs.shape[0]
    dim = 2**k
    proj = np.eye(dim, dtype=complex)
    for v in zs:
        proj = proj @ (np.eye(dim) + pauli_matrix(v)) / 2
    col = int(np.argmax(np.linalg.norm(proj, axis=0)))
    phi0 = proj[:, col] / np.linalg.norm(proj[:, col])
    xpaulis = [pauli_matrix(a) for a in xs]
    u = np.zeros((dim, dim), dtype=complex)
    u[:, 0] = phi0
    for idx in range(1, dim):
        # big-endian: qubit q is bit (k-1-q) of the column index
        low = idx & -idx
        q = k - 1 - (low.bit_length() - 1)
        u[:, idx] = xpaulis[q] @ u[:, idx ^ low]
    return u


@lru_cache(maxsize=256)
def _cached_unitary(bits: tuple, k: int) -> np.ndarray:
    xs, zs = symplectic_from_bits(bits, k)
    return unitary_from_symplectic(xs, zs)


def clifford_unitary(bits, k: int) -> np.ndarray:
    return _cached_unitary(tuple(int(b) & 1 for b in bits), k)
