"""Seeded randomness for a single trial.

Every random decision in a trial is drawn through a :class:`Stream`.  Draws
carry a *kind* string (``"pad"``, ``"coin"``, ``"measure"`` ...); each kind
has its own child generator derived from the trial seed, so the i-th draw of
a given kind is the same no matter how many draws of other kinds preceded
it.  :class:`EnumeratingStream` reuses that hook to walk every branch of the
selected kinds exhaustively.
"""

from __future__ import annotations

import zlib
from typing import Iterable, Iterator, Sequence

import numpy as np

_MASK64 = (1 << 64) - 1
PROB_EPS = 1e-15


def _kind_key(kind: str) -> int:
    return zlib.crc32(kind.encode("utf-8"))


class Stream:
    """Deterministic per-trial random source."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gens: dict[str, np.random.Generator] = {}
        self.draws = 0

    def generator(self, kind: str) -> np.random.Generator:
        gen = self._gens.get(kind)
        if gen is None:
            ss = np.random.SeedSequence(
                [self.seed & _MASK64, (self.seed >> 64) & _MASK64, _kind_key(kind)]
            )
            gen = np.random.Generator(np.random.PCG64(ss))
            self._gens[kind] = gen
        return gen

    def outcome(self, probs: Sequence[float], kind: str) -> int:
        """Sample an index of ``probs`` (Born rule sampling, fair coins ...)."""
        self.draws += 1
        u = self.generator(kind).random()
        acc = 0.0
        last = 0
        for i, p in enumerate(probs):
            if p <= PROB_EPS:
                continue
            last = i
            acc += p
            if u < acc:
                return i
        return last

    def bit(self, kind: str) -> int:
        return self.outcome((0.5, 0.5), kind)

    def bits(self, k: int, kind: str) -> list[int]:
        return [self.bit(kind) for _ in range(k)]

    def nonzero_bits(self, k: int, kind: str) -> list[int]:
        """Uniform k-bit vector conditioned on not being all zero."""
        while True:
            v = self.bits(k, kind)
            if any(v):
                return v

    def choice(self, seq: Sequence, kind: str):
        n = len(seq)
        return seq[self.outcome([1.0 / n] * n, kind)]


class EnumeratingStream(Stream):
    """A stream that follows a script of branch choices for selected kinds.

    Draws whose kind is in ``branched`` are resolved from ``script`` (default:
    first option with non-zero probability) and recorded in ``trace`` together
    with their probability; all other kinds fall back to the seeded
    generators.  :func:`enumerate_branches` drives the depth-first walk.
    """

    def __init__(self, seed: int, branched: Iterable[str], script: Sequence[int] = ()):
        super().__init__(seed)
        self.branched = frozenset(branched)
        self.script = list(script)
        self.trace: list[tuple[list[int], int]] = []
        self.probability = 1.0

    def outcome(self, probs: Sequence[float], kind: str) -> int:
        if kind not in self.branched:
            return super().outcome(probs, kind)
        options = [i for i, p in enumerate(probs) if p > PROB_EPS]
        pos = len(self.trace)
        choice = self.script[pos] if pos < len(self.script) else options[0]
        if choice not in options:
            raise RuntimeError("enumeration script diverged from the protocol run")
        self.trace.append((options, choice))
        self.probability *= float(probs[choice])
        return choice

    def next_script(self) -> list[int] | None:
        for pos in range(len(self.trace) - 1, -1, -1):
            options, choice = self.trace[pos]
            k = options.index(choice)
            if k + 1 < len(options):
                return [c for _, c in self.trace[:pos]] + [options[k + 1]]
        return None


def enumerate_branches(seed: int, branched: Iterable[str], run) -> Iterator[tuple[float, object]]:
    """Yield ``(probability, run(stream))`` for every branch of the given kinds."""
    branched = frozenset(branched)
    script: list[int] | None = []
    while script is not None:
        stream = EnumeratingStream(seed, branched, script)
        result = run(stream)
        yield stream.probability, result
        script = stream.next_script()
