"""Sender and receiver anonymity: statistical tests and the exact mode.

The statistical test compares the coalition's view across honest sender
(and receiver) identities feature by feature with a chi-square test of
independence, and trains a naive Bayes guesser on half of the trials.
The p-value threshold (0.001, family-wise over all features) and the
3-sigma margin on the guess rate are choices of this harness.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ..adversary import lookup
from ..protocol import ProtocolConfig, run
from ..rand import enumerate_branches
from . import stats
from .features import canonical_view
from .runner import TrialReport

P_THRESHOLD = 1e-3
MIN_TRIALS = 500


class InsufficientTrialsError(ValueError):
    pass


@dataclass
class IdentityTest:
    """Independence of the view from one identity (sender or receiver)."""

    target: str
    identities: dict
    features_tested: int
    min_p: float
    min_p_feature: Optional[str]
    adjusted_p: float
    guess_rate: float
    guess_samples: int
    bound: float
    sigma: float

    @property
    def chi2_ok(self) -> bool:
        return self.adjusted_p > P_THRESHOLD

    @property
    def guess_ok(self) -> bool:
        return self.guess_rate <= self.bound + 3 * self.sigma

    @property
    def passed(self) -> bool:
        return self.chi2_ok and self.guess_ok


@dataclass
class AnonymityReport:
    coalition: list
    n: int
    trials: int
    sender: IdentityTest
    receiver: Optional[IdentityTest]
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.sender.passed and (self.receiver is None or self.receiver.passed)

    def summary(self) -> dict:
        def one(t: Optional[IdentityTest]):
            if t is None:
                return None
            return {
                "identities": t.identities, "features": t.features_tested, "min_p": t.min_p,
                "min_p_feature": t.min_p_feature, "adjusted_p": t.adjusted_p,
                "guess_rate": t.guess_rate, "bound": t.bound, "sigma": t.sigma,
                "chi2_ok": t.chi2_ok, "guess_ok": t.guess_ok,
            }

        return {
            "coalition": self.coalition, "n": self.n, "trials": self.trials,
            "sender": one(self.sender), "receiver": one(self.receiver),
            "passed": self.passed, "notes": self.notes,
        }


def _identity_test(target: str, reports: Sequence[TrialReport], key, bound: float) -> IdentityTest:
    labels = [key(r) for r in reports]
    samples = [r.features for r in reports]
    per_feature: dict[str, list] = defaultdict(lambda: [None] * len(reports))
    for idx, feats in enumerate(samples):
        for f, v in feats.items():
            per_feature[f][idx] = v
    min_p, min_f, tested = 1.0, None, 0
    for f, values in per_feature.items():
        if len(set(values)) < 2:
            continue
        tested += 1
        p = stats.chi2_independence(stats.contingency(labels, values)).p_value
        if p < min_p:
            min_p, min_f = p, f
    adjusted = min(1.0, min_p * max(tested, 1))
    rate, m = stats.naive_bayes_guess_rate(samples, labels)
    counts: dict = defaultdict(int)
    for y in labels:
        counts[y] += 1
    return IdentityTest(
        target, dict(counts), tested, min_p, min_f, adjusted, rate, m, bound,
        stats.binomial_sigma(bound, m),
    )


def anonymity_test(reports: Sequence[TrialReport], coalition: Iterable[int], n: int,
                   min_trials: int = MIN_TRIALS) -> AnonymityReport:
    """Test the coalition view for independence from S (and from R).

    ``reports`` must carry features (``TrialBatchSpec(features=True)``) and
    have honest senders; runs with a corrupt sender are vacuous and rejected.
    """
    coalition = sorted(set(coalition))
    t = len(coalition)
    reports = list(reports)
    if any(r.features is None for r in reports):
        raise ValueError("reports were produced without view features")
    if any(r.sender in coalition for r in reports):
        raise ValueError("sender anonymity is only defined for honest senders")
    per_sender: dict = defaultdict(int)
    for r in reports:
        per_sender[r.sender] += 1
    short = {s: c for s, c in per_sender.items() if c < min_trials}
    if short:
        raise InsufficientTrialsError(f"fewer than {min_trials} trials for senders {short}")
    bound = 1.0 / (n - t)
    sender = _identity_test("sender", reports, lambda r: r.sender, bound)
    receiver = None
    honest_r = [r for r in reports if r.receiver not in coalition]
    if len({r.receiver for r in honest_r}) > 1:
        receiver = _identity_test("receiver", honest_r, lambda r: r.receiver, bound)
    notes = [
        f"chi-square threshold p > {P_THRESHOLD} after Bonferroni over features; "
        "guess rate compared with 1/(n-t) + 3 sigma (harness choices)"
    ]
    return AnonymityReport(coalition, n, len(reports), sender, receiver, notes)


# -- exact mode ---------------------------------------------------------------

EXACT_BRANCHED = ("coin", "dummy", "measure", "teleport_back")


def exact_view_distribution(config: ProtocolConfig, message, strategy: Optional[str] = None,
                            branched: Sequence[str] = EXACT_BRANCHED) -> dict:
    """Probability of every canonical coalition view, by enumerating all branches.

    Draws of the ``branched`` kinds are enumerated exhaustively; pads, masks,
    keys and the remaining kinds follow the seeded generators, which is
    sound because the canonical view never contains them.
    """
    dist: dict = defaultdict(float)

    def one(stream):
        strat = lookup(strategy) if strategy else None
        out, tr = run(config, message, strat, rng=stream)
        return canonical_view(tr, config.corrupt, out)

    total = 0.0
    for p, view in enumerate_branches(config.seed, branched, one):
        dist[view] += p
        total += p
    if abs(total - 1.0) > 1e-9:
        raise AssertionError(f"branch probabilities sum to {total}")
    return dict(dist)


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


@dataclass
class ExactReport:
    strategy: Optional[str]
    coalition: list
    pairs: list
    branches: dict
    tv: float

    @property
    def passed(self) -> bool:
        return self.tv <= 1e-12


def exact_anonymity(message, strategy: Optional[str] = None, seed: int = 0,
                    n: int = 3, m: int = 1, s: int = 1, coalition: Iterable[int] = (0,)) -> ExactReport:
    """Exact view distributions for every honest (S, R) pair; max pairwise TV."""
    coalition = frozenset(coalition)
    honest = [i for i in range(n) if i not in coalition]
    pairs = [(a, b) for a in honest for b in honest if a != b]
    dists = {}
    for S, R in pairs:
        cfg = ProtocolConfig(n=n, m=m, s=s, sender=S, receiver=R, corrupt=coalition, seed=seed)
        dists[(S, R)] = exact_view_distribution(cfg, message, strategy)
    tv = 0.0
    keys = list(dists)
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            tv = max(tv, total_variation(dists[keys[i]], dists[keys[j]]))
    return ExactReport(strategy, sorted(coalition), pairs, {f"{k}": len(v) for k, v in dists.items()}, tv)
