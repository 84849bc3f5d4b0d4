"""Command line entry point: ``aqmt {run,batch,anonymity-test,fidelity-audit,replay}``.

Options may also come from an INI file (``--config``) with a ``[aqmt]``
section using the long option names as keys; command-line flags win.
Every command prints one JSON document; the exit code is 0 when all of the
command's checks pass and 1 otherwise (the JSON then lists the failures).
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from typing import Optional, Sequence

import numpy as np

from ..protocol import ProtocolConfig, run
from . import transcript as tfile
from .anonymity import anonymity_test, exact_anonymity
from .audit import fidelity_audit
from .runner import TrialBatchSpec, aggregate, make_report, run_batch

DEFAULTS = {
    "n": 4, "m": 1, "s": 4, "sender": 1, "receiver": 2, "corrupt": "", "strategy": None,
    "trials": 100, "seed": 0, "out": None, "workers": 1, "assignment": None,
}
INT_KEYS = ("n", "m", "s", "sender", "receiver", "trials", "seed", "workers")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aqmt", description="Anonymous quantum message transmission simulator")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("run", "batch", "anonymity-test", "fidelity-audit", "replay"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI file with an [aqmt] section")
        if name == "replay":
            sp.add_argument("transcript", help="transcript file to re-execute")
            continue
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--s", type=int)
        sp.add_argument("--sender", type=int)
        sp.add_argument("--receiver", type=int)
        sp.add_argument("--corrupt", help="comma-separated corrupt party indices")
        sp.add_argument("--strategy", help="adversary strategy, e.g. GHZ_FORGER(classical)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output file (run) or directory (batch commands)")
        if name != "run":
            sp.add_argument("--trials", type=int)
            sp.add_argument("--workers", type=int)
            sp.add_argument("--assignment", choices=("fixed", "uniform", "balanced"))
        if name == "anonymity-test":
            sp.add_argument("--exact", action="store_true", help="exact enumeration at n=3, m=1, s=1")
    return p


def _settings(args: argparse.Namespace) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        cp = configparser.ConfigParser()
        if not cp.read(args.config):
            raise SystemExit(f"cannot read config file {args.config}")
        section = cp["aqmt"] if cp.has_section("aqmt") else {}
        for k, v in section.items():
            k = k.replace("-", "_")
            if k in opts:
                opts[k] = int(v) if k in INT_KEYS else v
    for k in opts:
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    return opts


def _config(o: dict) -> ProtocolConfig:
    corrupt = [int(c) for c in str(o["corrupt"]).split(",") if c.strip()]
    return ProtocolConfig(n=o["n"], m=o["m"], s=o["s"], sender=o["sender"], receiver=o["receiver"],
                          corrupt=frozenset(corrupt), seed=o["seed"])


def _spec(o: dict, default_assignment: str, features: bool = False) -> TrialBatchSpec:
    return TrialBatchSpec(
        config=_config(o), strategy=o["strategy"], trials=o["trials"], base_seed=o["seed"],
        assignment=o["assignment"] or default_assignment, out_dir=o["out"], workers=o["workers"],
        features=features,
    )


def _emit(body: dict, failures: list) -> int:
    body["failures"] = failures
    body["ok"] = not failures
    print(json.dumps(body, indent=1, sort_keys=True, default=str))
    return 0 if not failures else 1


def cmd_run(o: dict) -> int:
    cfg = _config(o)
    from ..adversary import lookup

    strategy = lookup(o["strategy"]) if o["strategy"] else None
    psi = np.array([1.0] + [0.0] * (2**cfg.m - 1), dtype=complex)
    psi[:2] = [0.6, 0.8]
    out, tr = run(cfg, psi, strategy)
    path = tfile.write(o["out"], cfg, o["strategy"], psi, tr) if o["out"] else None
    rep = make_report(0, cfg, o["strategy"], out, tr, path=str(path) if path else None)
    failures = []
    if rep.lemma1_violations:
        failures.append("lemma1 violated")
    return _emit({"trial": rep.summary()}, failures)


def cmd_batch(o: dict) -> int:
    spec = _spec(o, "fixed")
    reports = run_batch(spec)
    agg = aggregate(reports)
    failures = []
    if agg["lemma1_violations"]:
        failures.append(f"{agg['lemma1_violations']} lemma1 violations")
    if spec.strategy is None and not spec.config.corrupt:
        bound = 1 - 2.0 ** (-spec.config.s + 2)
        rate = agg["delivered"] / agg["trials"]
        agg["delivered_rate"] = rate
        if rate < bound:
            failures.append(f"delivered rate {rate:.4f} below {bound:.4f}")
        if agg["min_delivered_fidelity"] is not None and agg["min_delivered_fidelity"] <= 1 - 1e-9:
            failures.append("a delivered state has fidelity <= 1 - 1e-9")
    return _emit({"aggregate": agg}, failures)


def cmd_anonymity(o: dict, exact: bool) -> int:
    if exact:
        reports = []
        for strat in [o["strategy"]]:
            rep = exact_anonymity(np.array([0.6, 0.8]), strat, seed=o["seed"])
            reports.append({"strategy": strat, "tv": rep.tv, "branches": rep.branches, "passed": rep.passed})
        failures = [f"exact TV {r['tv']:.3e} for {r['strategy']}" for r in reports if not r["passed"]]
        return _emit({"exact": reports}, failures)
    spec = _spec(o, "balanced", features=True)
    reports = run_batch(spec)
    rep = anonymity_test(reports, spec.config.corrupt, spec.config.n)
    failures = []
    for t in (rep.sender, rep.receiver):
        if t is None:
            continue
        if not t.chi2_ok:
            failures.append(f"{t.target}: chi-square adjusted p {t.adjusted_p:.3e} at {t.min_p_feature}")
        if not t.guess_ok:
            failures.append(f"{t.target}: guess rate {t.guess_rate:.3f} above {t.bound:.3f} + 3 sigma")
    return _emit({"anonymity": rep.summary()}, failures)


def cmd_audit(o: dict) -> int:
    spec = _spec(o, "balanced")
    reports = run_batch(spec)
    summary = fidelity_audit(reports, spec.config.s)
    failures = [] if summary.passed else [f"budget fraction {summary.fraction:.4f} above {summary.bound:.4f}"]
    return _emit({"audit": summary.summary()}, failures)


def cmd_replay(path: str) -> int:
    ok, recorded, replayed = tfile.replay(path)
    return _emit({"recorded": recorded, "replayed": replayed}, [] if ok else ["transcript digest mismatch"])


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "replay":
        return cmd_replay(args.transcript)
    o = _settings(args)
    try:
        if args.command == "run":
            return cmd_run(o)
        if args.command == "batch":
            return cmd_batch(o)
        if args.command == "anonymity-test":
            return cmd_anonymity(o, args.exact)
        return cmd_audit(o)
    except (ValueError, KeyError) as exc:
        return _emit({"error": type(exc).__name__}, [str(exc)])


if __name__ == "__main__":
    sys.exit(main())
