"""Arithmetic in GF(2^s) with elements packed into Python ints."""

from __future__ import annotations

from functools import lru_cache


def _poly_mulmod(a: int, b: int, mod: int, deg: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= mod
    return out


def _poly_mod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: int) -> bool:
    """Rabin's test for a binary polynomial given as an int bit mask."""
    deg = f.bit_length() - 1
    if deg < 1:
        return False
    if deg == 1:
        return True

    def frobenius(k: int) -> int:
        # x^(2^k) mod f
        y = 0b10
        for _ in range(k):
            y = _poly_mulmod(y, y, f, deg)
        return y

    if frobenius(deg) != 0b10:
        return False
    for q in _prime_factors(deg):
        h = frobenius(deg // q) ^ 0b10
        if _poly_gcd(f, h) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def modulus(s: int) -> int:
    """Smallest irreducible polynomial of degree ``s``."""
    if s < 1:
        raise ValueError("field degree must be >= 1")
    for f in range(1 << s, 1 << (s + 1)):
        if f & 1 and is_irreducible(f):
            return f
    raise AssertionError("unreachable: irreducible polynomials exist in every degree")


class GF2m:
    """The field GF(2^s)."""

    def __init__(self, s: int):
        self.s = s
        self.mod = modulus(s)
        self.order = 1 << s

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return _poly_mulmod(a, b, self.mod, self.s)

    def pow(self, a: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def eval_poly(self, coeffs: list[int], x: int) -> int:
        """sum_i coeffs[i] * x^i by Horner's rule."""
        out = 0
        for c in reversed(coeffs):
            out = self.mul(out, x) ^ c
        return out


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | (int(b) & 1)
    return out


def int_to_bits(v: int, width: int) -> list[int]:
    return [(v >> (width - 1 - i)) & 1 for i in range(width)]
