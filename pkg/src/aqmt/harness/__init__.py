"""Trial runner, statistics and CLI."""

from .anonymity import AnonymityReport, anonymity_test, exact_anonymity
from .audit import fidelity_audit
from .runner import TrialBatchSpec, TrialReport, run_batch, run_trial

__all__ = [
    "AnonymityReport", "TrialBatchSpec", "TrialReport", "anonymity_test", "exact_anonymity",
    "fidelity_audit", "run_batch", "run_trial",
]
