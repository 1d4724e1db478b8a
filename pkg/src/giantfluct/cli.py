"""Command line entry point: ``giantfluct {simulate,verify,sde,bgw,appendix}``.

Every subcommand takes ``--config <json>`` and ``--out <dir>``, plus ``--seed``
to override the master seed.  A config file may hold the settings of one
subcommand directly or under a section named after it (``campaign`` for
``simulate`` and ``verify``).  The exit status is 0 iff every requested
verification passes.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import appendixlab, harness, suites
from .graphproc import fluctuation_path, sample_edge_stream, trajectory
from .stats import MCStats

log = logging.getLogger("giantfluct")

_SECTIONS = {"simulate": "campaign", "verify": "campaign", "sde": "sde", "bgw": "bgw", "appendix": "appendix"}


def _load_config(cls, path: str | None, section: str, seed: int | None):
    data = {}
    if path:
        raw = json.loads(Path(path).read_text())
        if section in raw:
            data = raw[section]
        elif not set(raw) & set(_SECTIONS.values()):
            data = raw
    if seed is not None:
        data["master_seed"] = seed
    return cls(**data)


def _write_json(path: Path, obj) -> None:
    path.write_text(harness.report_json(obj) + "\n")


def _config_json(cfg) -> dict:
    return dataclasses.asdict(cfg)


def cmd_simulate(args) -> int:
    cfg = _load_config(harness.CampaignConfig, args.config, "campaign", args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("campaign: n=%d replications=%d workers=%d", cfg.n, cfg.replications, cfg.workers)
    stats = harness.run_campaign(cfg)
    _write_json(out / "config.json", _config_json(cfg))
    _write_json(out / "stats.json", stats.state())
    stats.write_csv(out)
    first = harness.replication_seed(cfg.master_seed, 0)
    fluctuation_path(trajectory(sample_edge_stream(cfg.n, cfg.t1, first), cfg.time_grid())).to_csv(out / "path_0.csv")
    return 0


def _campaign_report(stats: MCStats, n: int, ks_time: float) -> dict:
    checks = [harness.verify_covariance(stats), harness.verify_brownian_increments(stats)]
    if stats.keep_samples and stats.samples:
        X = stats.sample_matrix()
        k = int(abs(stats.grid - ks_time).argmin())
        ks = harness.ks_normality(X[:, k])
        ks["t"] = float(stats.grid[k])
        checks.append(ks)
        tail = appendixlab.tail_check(X, n, 0.2)
    else:
        tail = {"count": int((stats.max_abs_x > n**0.2).sum()), "threshold": n**0.2, "sample_size": stats.count}
    tail.update({"check": "tail", "pass": tail["count"] == 0})
    checks.append(tail)
    return {"suite": "campaign", "checks": checks, "pass": all(c["pass"] for c in checks)}


def cmd_verify(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.stats:
        state = json.loads(Path(args.stats).read_text())
        stats = MCStats.from_state(state)
        cfg = harness.CampaignConfig(**json.loads(Path(args.stats).with_name("config.json").read_text()))
    else:
        cfg = _load_config(harness.CampaignConfig, args.config, "campaign", args.seed)
        _write_json(out / "config.json", _config_json(cfg))
        stats = harness.run_campaign(cfg)
    report = _campaign_report(stats, cfg.n, cfg.ks_time)
    _write_json(out / "report.json", report)
    _summarise(report)
    return 0 if report["pass"] else 1


def cmd_sde(args) -> int:
    cfg = _load_config(suites.SDEConfig, args.config, "sde", args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = suites.run_sde_suite(cfg)
    _write_json(out / "config.json", _config_json(cfg))
    _write_json(out / "report.json", report)
    _summarise(report)
    return 0 if report["pass"] else 1


def cmd_bgw(args) -> int:
    cfg = _load_config(suites.BGWConfig, args.config, "bgw", args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = suites.run_bgw_suite(cfg)
    _write_json(out / "config.json", _config_json(cfg))
    _write_json(out / "report.json", report)
    _summarise(report)
    return 0 if report["pass"] else 1


def cmd_appendix(args) -> int:
    cfg = _load_config(suites.AppendixConfig, args.config, "appendix", args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report, sweep = suites.run_appendix_suite(cfg)
    _write_json(out / "config.json", _config_json(cfg))
    _write_json(out / "report.json", report)
    appendixlab.write_sweep_csv(out / "sweep.csv", sweep)
    _summarise(report)
    return 0 if report["pass"] else 1


def _summarise(report: dict) -> None:
    for c in report["checks"]:
        label = c["check"] + (f" t={c['t']:g}" if "t" in c else "")
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {report['suite']}: {label}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="giantfluct", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "simulate": (cmd_simulate, "run a Monte Carlo campaign and write its statistics"),
        "verify": (cmd_verify, "check a campaign against the limiting covariance"),
        "sde": (cmd_sde, "integrate the limiting SDE and sample its closed form"),
        "bgw": (cmd_bgw, "branching-process progeny and domination checks"),
        "appendix": (cmd_appendix, "connectivity, Stepanov and large-deviation checks"),
    }
    for name, (func, help_) in handlers.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, help="override the master seed")
        if name == "verify":
            p.add_argument("--stats", help="stats.json written by `simulate` (skips the campaign)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
