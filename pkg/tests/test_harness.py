import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.stats import chi2_contingency

from aqmt.adversary import lookup
from aqmt.harness import cli
from aqmt.harness import transcript as tfile
from aqmt.harness.anonymity import (
    InsufficientTrialsError, anonymity_test, exact_view_distribution, total_variation,
)
from aqmt.harness.audit import BUDGET, DELIVERED, EXCLUDED, RETURNED, classify, fidelity_audit
from aqmt.harness.features import canonical_view, view_features
from aqmt.harness.runner import SpecError, TrialBatchSpec, aggregate, run_batch
from aqmt.harness.stats import (
    chi2_independence, chi2_uniform, contingency, naive_bayes_guess_rate,
)
from aqmt.protocol import ProtocolConfig, run

PSI = np.array([0.6, 0.8])
TABLE = [[12, 7, 9, 22], [5, 14, 11, 8], [9, 10, 17, 6]]


# -- statistics --------------------------------------------------------------

def brute_force_chi2(table):
    """Pearson statistic with exact rational arithmetic and the p-value from the incomplete gamma."""
    rows = [sum(r) for r in table]
    cols = [sum(c) for c in zip(*table)]
    total = sum(rows)
    stat = Fraction(0)
    for i, r in enumerate(table):
        for j, obs in enumerate(r):
            exp = Fraction(rows[i] * cols[j], total)
            stat += (obs - exp) ** 2 / exp
    dof = (len(rows) - 1) * (len(cols) - 1)
    p = mpmath.gammainc(dof / 2, float(stat) / 2, mpmath.inf, regularized=True)
    return float(stat), dof, float(p)


def test_chi2_matches_brute_force_oracle():
    ours = chi2_independence(TABLE)
    stat, dof, p = brute_force_chi2(TABLE)
    assert ours.dof == dof == 6
    assert ours.statistic == pytest.approx(stat, rel=1e-12)
    assert ours.p_value == pytest.approx(p, rel=1e-9)


def test_chi2_matches_scipy():
    ours = chi2_independence(TABLE)
    ref = chi2_contingency(np.array(TABLE), correction=False)
    assert ours.statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-12)
    assert ours.dof == ref.dof


def test_chi2_degenerate_tables():
    assert chi2_independence([[5, 5]]).p_value == 1.0
    assert chi2_independence([[3, 0], [4, 0]]).p_value == 1.0
    assert chi2_independence([[3, 0, 1], [0, 0, 0], [4, 0, 2]]).dof == 1


def test_chi2_uniform():
    assert chi2_uniform([250, 250, 250, 250]).p_value == pytest.approx(1.0)
    assert chi2_uniform([400, 100]).p_value < 1e-6


def test_contingency_counts():
    t = contingency(["a", "b", "a", "a"], [1, 1, 2, 1])
    assert t.tolist() == [[2, 1], [1, 0]]


def test_naive_bayes_separable_and_random():
    samples = [{"f": str(i % 3)} for i in range(600)]
    labels = [i % 3 for i in range(600)]
    acc, m = naive_bayes_guess_rate(samples, labels)
    assert acc == 1.0 and m == 300
    gen = np.random.default_rng(0)
    noise = [{"f": str(int(gen.integers(2)))} for _ in range(600)]
    acc, _ = naive_bayes_guess_rate(noise, labels)
    assert acc < 0.45


# -- runner ------------------------------------------------------------------

def test_spec_validation():
    with pytest.raises(SpecError):
        TrialBatchSpec(ProtocolConfig(n=3), trials=0).validate()
    with pytest.raises(SpecError):
        TrialBatchSpec(ProtocolConfig(n=3), assignment="random").validate()
    with pytest.raises(SpecError):
        TrialBatchSpec(ProtocolConfig(n=3, corrupt={0, 1}), assignment="balanced").validate()
    with pytest.raises(KeyError):
        TrialBatchSpec(ProtocolConfig(n=3), strategy="NOPE").validate()


def test_seeds_and_assignments():
    spec = TrialBatchSpec(ProtocolConfig(n=4, corrupt={0}), trials=12, base_seed=100, assignment="balanced")
    assert [spec.seed(i) for i in range(3)] == [100, 101, 102]
    pairs = [(spec.trial_config(i).sender, spec.trial_config(i).receiver) for i in range(6)]
    assert sorted(pairs) == [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
    uni = TrialBatchSpec(ProtocolConfig(n=4, corrupt={0}), trials=50, assignment="uniform")
    for i in range(50):
        c = uni.trial_config(i)
        assert c.sender != c.receiver and 0 not in (c.sender, c.receiver)


def test_run_batch_writes_identical_files(tmp_path):
    spec = TrialBatchSpec(ProtocolConfig(n=3, m=1, s=2), trials=4, out_dir=str(tmp_path / "a"))
    run_batch(spec)
    spec2 = TrialBatchSpec(ProtocolConfig(n=3, m=1, s=2), trials=4, out_dir=str(tmp_path / "b"))
    run_batch(spec2)
    for i in range(4):
        a = (tmp_path / "a" / f"trial-{i:05d}.jsonl").read_bytes()
        b = (tmp_path / "b" / f"trial-{i:05d}.jsonl").read_bytes()
        assert a == b
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["aggregate"]["trials"] == 4


def test_parallel_batch_matches_serial():
    base = dict(config=ProtocolConfig(n=3, m=1, s=2), trials=6)
    serial = run_batch(TrialBatchSpec(**base))
    parallel = run_batch(TrialBatchSpec(**base, workers=2))
    assert [r.digest for r in serial] == [r.digest for r in parallel]


def test_aggregate_counts():
    reports = run_batch(TrialBatchSpec(ProtocolConfig(n=3, m=1, s=3), trials=8))
    agg = aggregate(reports)
    assert sum(agg["outcomes"].values()) == 8
    assert agg["lemma1_violations"] == 0


# -- transcripts -------------------------------------------------------------

def test_transcript_round_trip_and_replay(tmp_path):
    cfg = ProtocolConfig(n=4, m=1, s=3, corrupt={3}, seed=9)
    out, tr = run(cfg, PSI)
    path = tfile.write(tmp_path / "t.jsonl", cfg, None, PSI, tr)
    head, events = tfile.read(path)
    assert head["format"] == tfile.FORMAT
    assert head["versions"]["aqmt"]
    assert events == tr.events
    ok, recorded, replayed = tfile.replay(path)
    assert ok and recorded == replayed == tr.digest()


def test_replay_with_strategy(tmp_path):
    cfg = ProtocolConfig(n=4, m=1, s=3, corrupt={3}, seed=4)
    _, tr = run(cfg, PSI, lookup("PARITY_LIAR"))
    path = tfile.write(tmp_path / "t.jsonl", cfg, "PARITY_LIAR", PSI, tr)
    assert tfile.replay(path)[0]


def test_replay_detects_edits(tmp_path):
    cfg = ProtocolConfig(n=3, m=1, s=2, seed=1)
    _, tr = run(cfg, PSI)
    path = tfile.write(tmp_path / "t.jsonl", cfg, None, PSI, tr)
    lines = path.read_text().splitlines()
    rec = json.loads(lines[5])
    rec["tag"] = rec["tag"] + "x"
    lines[5] = json.dumps(rec, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    assert not tfile.replay(path)[0]


def test_read_rejects_unknown_format(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text(json.dumps({"format": "other"}) + "\n")
    with pytest.raises(ValueError):
        tfile.read(p)


# -- features and anonymity --------------------------------------------------

def test_features_cover_only_visible_events():
    cfg = ProtocolConfig(n=4, m=1, s=3, corrupt={0}, seed=3)
    out, tr = run(cfg, PSI)
    feats = view_features(tr, cfg.corrupt, out)
    visible = [e for e in tr if e.visible_to(cfg.corrupt)]
    assert len(feats) == len(visible) + 1
    assert feats["outcome"] == out.step_tag
    canon = canonical_view(tr, cfg.corrupt, out)
    assert canon[-1] == ("outcome", out.step_tag)


def test_anonymity_needs_enough_trials():
    reports = run_batch(TrialBatchSpec(ProtocolConfig(n=4, m=1, s=2, corrupt={0}), trials=6,
                                       assignment="balanced", features=True))
    with pytest.raises(InsufficientTrialsError):
        anonymity_test(reports, {0}, 4)
    rep = anonymity_test(reports, {0}, 4, min_trials=2)
    assert rep.sender.bound == pytest.approx(1 / 3)


def test_anonymity_rejects_corrupt_sender():
    reports = run_batch(TrialBatchSpec(ProtocolConfig(n=4, m=1, s=2, sender=1, corrupt={1}), trials=2, features=True))
    with pytest.raises(ValueError):
        anonymity_test(reports, {1}, 4, min_trials=1)


def test_exact_distribution_sums_to_one():
    cfg = ProtocolConfig(n=3, m=1, s=1, sender=None, corrupt={0})
    dist = exact_view_distribution(cfg, PSI)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
    assert total_variation(dist, dist) == 0.0
    assert total_variation({"a": 1.0}, {"b": 1.0}) == 1.0


# -- audit -------------------------------------------------------------------

def test_audit_classification():
    reports = run_batch(TrialBatchSpec(ProtocolConfig(n=3, m=1, s=3), trials=10))
    summary = fidelity_audit(reports, 3)
    assert summary.audited == 10
    assert set(summary.counts) <= {DELIVERED, RETURNED, BUDGET}
    assert summary.bound == 1.0
    r = reports[0]
    r.receiver, r.corrupt = 2, [2]
    assert classify(r) == EXCLUDED


# -- CLI ---------------------------------------------------------------------

def call(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_cli_run_and_replay(tmp_path, capsys):
    out = tmp_path / "run.jsonl"
    code, body = call(capsys, "run", "--n", "3", "--s", "2", "--seed", "4", "--out", str(out))
    assert code == 0 and body["ok"]
    code, body = call(capsys, "replay", str(out))
    assert code == 0 and body["recorded"] == body["replayed"]


def test_cli_batch_with_config_file(tmp_path, capsys):
    ini = tmp_path / "c.ini"
    ini.write_text("[aqmt]\nn = 3\ns = 3\ntrials = 4\n")
    code, body = call(capsys, "batch", "--config", str(ini), "--seed", "7")
    assert body["aggregate"]["trials"] == 4
    assert code == (0 if body["ok"] else 1)


def test_cli_audit(capsys):
    code, body = call(capsys, "fidelity-audit", "--n", "4", "--s", "4", "--corrupt", "3",
                      "--strategy", "ABORT_FORCER(7)", "--trials", "6")
    assert code == 0 and body["audit"]["audited"] == 6


def test_cli_failure_summary(capsys):
    code, body = call(capsys, "run", "--strategy", "NOPE")
    assert code == 1 and not body["ok"] and body["failures"]
    code, body = call(capsys, "anonymity-test", "--n", "4", "--corrupt", "0", "--trials", "6")
    assert code == 1 and body["failures"]
