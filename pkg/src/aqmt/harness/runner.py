"""Batches of independent trials."""

from __future__ import annotations

import json
import multiprocessing as mp
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .. import qsim
from ..adversary import lookup
from ..network import Transcript
from ..protocol import ProtocolConfig, RunOutcome, run
from ..rand import Stream
from . import transcript as tfile
from .features import view_features

ASSIGNMENTS = ("fixed", "uniform", "balanced")


class SpecError(ValueError):
    pass


@dataclass
class TrialBatchSpec:
    config: ProtocolConfig
    strategy: Optional[str] = None
    trials: int = 1
    base_seed: int = 0
    assignment: str = "fixed"
    message: Optional[Sequence[complex]] = None
    out_dir: Optional[str] = None
    workers: int = 1
    features: bool = False

    def validate(self) -> None:
        if self.trials < 1:
            raise SpecError("trial count must be >= 1")
        if self.assignment not in ASSIGNMENTS:
            raise SpecError(f"assignment must be one of {ASSIGNMENTS}")
        if self.assignment != "fixed" and len(self.config.honest) < 2:
            raise SpecError("need two honest parties to assign sender and receiver")
        if self.strategy is not None:
            lookup(self.strategy)
        if self.message is not None and len(self.message) != 2**self.config.m:
            raise SpecError("message length does not match m")

    def seed(self, i: int) -> int:
        return self.base_seed + i

    def trial_config(self, i: int) -> ProtocolConfig:
        cfg = self.config
        seed = self.seed(i)
        if self.assignment == "fixed":
            return cfg.replace(seed=seed)
        honest = cfg.honest
        if self.assignment == "balanced":
            pairs = [(a, b) for a in honest for b in honest if a != b]
            S, R = pairs[i % len(pairs)]
        else:
            st = Stream(seed)
            S = st.choice(honest, "assignment")
            R = st.choice([h for h in honest if h != S], "assignment")
        return cfg.replace(seed=seed, sender=S, receiver=R)

    def trial_message(self, i: int) -> np.ndarray:
        if self.message is not None:
            return np.asarray(self.message, dtype=complex)
        return qsim.random_state(self.config.m, Stream(self.seed(i)).generator("message"))


@dataclass
class TrialReport:
    trial: int
    seed: int
    sender: Optional[int]
    receiver: int
    corrupt: list
    strategy: Optional[str]
    status: str
    abort_step: Optional[int]
    step_tag: str
    psi_holder: Optional[str]
    delivered_fidelity: Optional[float]
    sender_fidelity: Optional[float]
    budget: dict
    resources: dict
    lemma1_checked: int
    lemma1_violations: int
    lemma1_max_weight: float
    acting_receivers: list
    digest: str
    events: int
    transcript_path: Optional[str] = None
    features: Optional[dict] = field(default=None, repr=False)

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("features")
        return d


def make_report(i: int, cfg: ProtocolConfig, strategy: Optional[str], out: RunOutcome, tr: Transcript,
                features: bool = False, path: Optional[str] = None) -> TrialReport:
    checked = [r for r in out.lemma1 if r.honest_passed]
    return TrialReport(
        trial=i,
        seed=cfg.seed,
        sender=cfg.sender,
        receiver=cfg.receiver,
        corrupt=sorted(cfg.corrupt),
        strategy=strategy,
        status=out.status,
        abort_step=out.abort_step,
        step_tag=out.step_tag,
        psi_holder=out.psi_holder,
        delivered_fidelity=out.delivered_fidelity,
        sender_fidelity=out.sender_fidelity,
        budget=dict(out.budget),
        resources=dict(out.resources),
        lemma1_checked=len(checked),
        lemma1_violations=sum(not r.holds for r in checked),
        lemma1_max_weight=max((r.weight_outside for r in checked), default=0.0),
        acting_receivers=list(out.acting_receivers),
        digest=tr.digest(),
        events=len(tr),
        transcript_path=path,
        features=view_features(tr, cfg.corrupt, out) if features else None,
    )


def run_trial(spec: TrialBatchSpec, i: int) -> TrialReport:
    cfg = spec.trial_config(i)
    psi = spec.trial_message(i)
    strategy = lookup(spec.strategy) if spec.strategy else None
    out, tr = run(cfg, psi, strategy)
    path = None
    if spec.out_dir:
        path = str(tfile.write(Path(spec.out_dir) / f"trial-{i:05d}.jsonl", cfg, spec.strategy, psi, tr))
    return make_report(i, cfg, spec.strategy, out, tr, spec.features, path)


def _worker(args):
    spec, i = args
    return run_trial(spec, i)


def run_batch(spec: TrialBatchSpec) -> list[TrialReport]:
    """Run every trial of ``spec``; writes transcripts and ``report.json`` when ``out_dir`` is set."""
    spec.validate()
    jobs = [(spec, i) for i in range(spec.trials)]
    if spec.workers > 1 and spec.trials > 1:
        ctx = mp.get_context("fork")
        with ctx.Pool(spec.workers) as pool:
            reports = pool.map(_worker, jobs, chunksize=max(1, spec.trials // (4 * spec.workers)))
    else:
        reports = [_worker(j) for j in jobs]
    if spec.out_dir:
        write_aggregate(Path(spec.out_dir) / "report.json", spec, reports)
    return reports


def aggregate(reports: Sequence[TrialReport]) -> dict:
    tags: dict[str, int] = {}
    holders: dict[str, int] = {}
    for r in reports:
        tags[r.step_tag] = tags.get(r.step_tag, 0) + 1
        holders[str(r.psi_holder)] = holders.get(str(r.psi_holder), 0) + 1
    delivered = [r for r in reports if r.status == "success" and r.psi_holder == "receiver"]
    fids = [r.delivered_fidelity for r in delivered if r.delivered_fidelity is not None]
    return {
        "trials": len(reports),
        "outcomes": tags,
        "holders": holders,
        "delivered": len(delivered),
        "min_delivered_fidelity": min(fids) if fids else None,
        "lemma1_checked": sum(r.lemma1_checked for r in reports),
        "lemma1_violations": sum(r.lemma1_violations for r in reports),
    }


def write_aggregate(path, spec: TrialBatchSpec, reports: Sequence[TrialReport]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {
        "spec": {
            "config": spec.config.to_dict(), "strategy": spec.strategy, "trials": spec.trials,
            "base_seed": spec.base_seed, "assignment": spec.assignment,
        },
        "aggregate": aggregate(reports),
        "trials": [r.summary() for r in reports],
    }
    path.write_text(json.dumps(body, indent=1, sort_keys=True))
