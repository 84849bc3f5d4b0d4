"""Where did the message end up?  Classification of finished trials."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .runner import TrialReport

FID_TOL = 1e-9

DELIVERED = "success/receiver"
RETURNED = "abort/sender"
BUDGET = "budget"
EXCLUDED = "corrupt-unknown"


def classify(r: TrialReport) -> str:
    if r.receiver in r.corrupt:
        return EXCLUDED
    fid = r.delivered_fidelity
    good = fid is not None and fid > 1 - FID_TOL
    if r.status == "success" and r.psi_holder == "receiver" and good:
        return DELIVERED
    if r.status == "abort" and r.psi_holder == "sender" and good:
        return RETURNED
    return BUDGET


@dataclass
class AuditSummary:
    s: int
    counts: dict
    audited: int
    budget: int
    bound: float
    min_fidelity: dict = field(default_factory=dict)
    budget_trials: list = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.budget / self.audited if self.audited else 0.0

    @property
    def passed(self) -> bool:
        return self.fraction <= self.bound

    def summary(self) -> dict:
        return {
            "counts": self.counts, "audited": self.audited, "budget": self.budget,
            "fraction": self.fraction, "bound": self.bound, "passed": self.passed,
            "min_fidelity": self.min_fidelity,
        }


def fidelity_audit(reports: Sequence[TrialReport], s: int) -> AuditSummary:
    """Every honest-receiver trial must end delivered or returned, up to 2^(-s+3)."""
    counts: Counter = Counter()
    mins: dict = {}
    budget_trials = []
    for r in reports:
        c = classify(r)
        counts[c] += 1
        if c in (DELIVERED, RETURNED):
            mins[c] = min(mins.get(c, 1.0), r.delivered_fidelity)
        if c == BUDGET:
            budget_trials.append((r.trial, r.step_tag, r.psi_holder))
    audited = sum(v for k, v in counts.items() if k != EXCLUDED)
    return AuditSummary(s, dict(counts), audited, counts[BUDGET], 2.0 ** (-s + 3), mins, budget_trials)
