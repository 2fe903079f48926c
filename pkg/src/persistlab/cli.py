"""Command-line runner: pick or load a scenario, replicate it, write estimator-vs-oracle reports.

Exit codes: 0 success, 1 output not writable, 2 invalid scenario/config/flags,
3 estimator degeneracy in more than 10% of replications.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from . import config as configfile
from .errors import ConfigError, NoOracle, PersistLabError
from .estimators import EstimateReport, monte_carlo
from .history import ComplianceCounts
from .oracles import OracleValues, oracle_scenario
from .scenarios import SCENARIOS, ScenarioConfig, build_scenario

CSV_HEADER = (
    "scenario",
    "estimand",
    "mc_mean",
    "mc_sd",
    "ci_lo",
    "ci_hi",
    "oracle",
    "late_classified",
    "ate",
    "n",
    "reps",
    "seed",
)
DEGENERACY_LIMIT = 0.10
EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunReport:
    scenario: str
    config: ScenarioConfig
    estimates: EstimateReport
    oracle: OracleValues | None
    compliance: ComplianceCounts | None
    seed: int
    wall_clock: float

    @property
    def config_echo(self) -> str:
        return configfile.dumps(self.config)


def list_scenarios() -> list[tuple[str, str, str]]:
    """(name, mechanism, identity the oracle evaluates), in registry order."""
    return [(e.name, e.mechanism, e.identity) for e in SCENARIOS.values()]


def _oracle_for(estimand: str, oracle: OracleValues | None, cfg: ScenarioConfig) -> float:
    if oracle is None:
        return math.nan
    if estimand in ("wald", "wald_01"):
        return oracle.wald_limit
    if estimand in ("first_stage", "first_stage_01"):
        return oracle.first_stage_limit
    if estimand in ("reduced_form", "reduced_form_01"):
        return oracle.wald_limit * oracle.first_stage_limit
    if estimand == "reduced_form_12" and "wald_12" in oracle.extra:
        return oracle.extra["wald_12"] * oracle.extra["first_stage_12"]
    if estimand in ("late_classified", "late_classified_01"):
        return oracle.late
    if estimand == "ate":
        return oracle.ate
    if estimand == "ols_slope" and cfg.instrument is None:
        return oracle.wald_limit
    return oracle.extra.get(estimand, math.nan)


def _num(x: float) -> str:
    return "" if x is None or math.isnan(x) else repr(float(x))


def summary_rows(report: RunReport) -> list[list[str]]:
    est = report.estimates
    late = est.summaries.get("late_classified", est.summaries.get("late_classified_01"))
    late_mean = late.mean if late else math.nan
    rows = []
    for name, s in est.summaries.items():
        rows.append(
            [
                report.scenario,
                name,
                _num(s.mean),
                _num(s.sd),
                _num(s.ci_lo),
                _num(s.ci_hi),
                _num(_oracle_for(name, report.oracle, report.config)),
                _num(late_mean),
                _num(est.ate),
                str(report.config.n),
                str(est.n_reps),
                str(report.seed),
            ]
        )
    return rows


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def replication_rows(report: RunReport) -> tuple[list[str], list[list[str]]]:
    names = list(report.estimates.summaries)
    header = ["rep", "seed", "void", *names, "always_takers", "never_takers", "compliers", "defiers"]
    rows = []
    for r in report.estimates.replications:
        c = r.compliance
        counts = [c.always_takers, c.never_takers, c.compliers, c.defiers] if c else ["", "", "", ""]
        rows.append(
            [str(r.index), str(r.seed), r.void_reason or "", *(_num(r.values[k]) for k in names), *map(str, counts)]
        )
    return header, rows


def plain_text(report: RunReport) -> str:
    est = report.estimates
    cfg = report.config
    identity = report.oracle.notes if report.oracle else "none available"
    lines = [
        f"scenario: {report.scenario} (mechanism {cfg.mechanism})",
        f"n = {cfg.n}, reps = {est.n_reps}, seed = {report.seed}, void reps = {est.n_void}",
        f"oracle identity: {identity}",
        "",
        "sources: mc_* = estimator over replications; oracle = closed form; "
        "late = classification by counterfactual re-simulation",
        "",
    ]
    header = ("estimand", "mc_mean", "mc_sd", "ci_lo", "ci_hi", "oracle", "delta")
    table = []
    for name, s in est.summaries.items():
        o = _oracle_for(name, report.oracle, cfg)
        delta = s.mean - o if not math.isnan(o) else math.nan
        table.append((name, *(f"{v:.6f}" if not math.isnan(v) else "-" for v in (s.mean, s.sd, s.ci_lo, s.ci_hi, o, delta))))
    widths = [max(len(r[i]) for r in (header, *table)) for i in range(len(header))]
    for row in (header, *table):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    if report.compliance is not None:
        c = report.compliance
        lines += [
            "",
            "compliance (summed over replications, classification):",
            f"  always_takers {c.always_takers}  never_takers {c.never_takers}  "
            f"compliers {c.compliers}  defiers {c.defiers}",
        ]
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(report: RunReport, out_dir, fmt: str = "csv") -> list[Path]:
    """Write the report files into ``out_dir`` and return their paths.

    ``csv`` writes summary.csv and replications.csv; ``plain`` writes
    summary.txt. Both write config.toml, the config echo.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"config.toml": report.config_echo}
    if fmt == "csv":
        files["summary.csv"] = _csv_text(CSV_HEADER, summary_rows(report))
        files["replications.csv"] = _csv_text(*replication_rows(report))
    elif fmt == "plain":
        files["summary.txt"] = plain_text(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    paths = []
    for name, text in files.items():
        path = out / name
        _atomic_write(path, text)
        paths.append(path)
    return paths


def _total_compliance(est: EstimateReport) -> ComplianceCounts | None:
    counts = [r.compliance for r in est.replications if r.compliance is not None]
    if not counts:
        return None
    return ComplianceCounts(
        always_takers=sum(c.always_takers for c in counts),
        never_takers=sum(c.never_takers for c in counts),
        compliers=sum(c.compliers for c in counts),
        defiers=sum(c.defiers for c in counts),
    )


def execute(cfg: ScenarioConfig, seed: int, threads: int | None = None) -> RunReport:
    start = time.perf_counter()
    est = monte_carlo(cfg, cfg.reps, seed, threads=threads)
    try:
        oracle = oracle_scenario(cfg)
    except (NoOracle, PersistLabError):
        oracle = None
    return RunReport(
        scenario=cfg.name,
        config=cfg,
        estimates=est,
        oracle=oracle,
        compliance=_total_compliance(est),
        seed=seed,
        wall_clock=time.perf_counter() - start,
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="persistlab",
        description="Simulate take-up/persistence scenarios and compare IV estimates with closed-form LATE values.",
    )
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", metavar="NAME", help=f"one of: {', '.join(SCENARIOS)}")
    src.add_argument("--config", metavar="PATH", help="scenario config file (TOML, dotted keys)")
    src.add_argument("--list", action="store_true", help="list scenarios and exit")
    p.add_argument("--n", type=int, help="locations per replication")
    p.add_argument("--reps", type=int, help="Monte Carlo replications")
    p.add_argument("--seed", type=int, help="master seed (falls back to $PERSISTLAB_SEED, then 0)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override (repeatable)")
    p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
    p.add_argument("--format", choices=("csv", "plain"), default="csv")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    return p


def _resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("PERSISTLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"PERSISTLAB_SEED={env!r} is not an integer") from None
    return 0


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.list:
        for name, mech, identity in list_scenarios():
            print(f"{name:<10} {mech:<20} {name} → {identity}")
        return EXIT_OK
    try:
        if args.config:
            cfg = configfile.apply_overrides(configfile.load(args.config), args.set)
        else:
            name = args.scenario or "ajr"
            cfg = configfile.apply_overrides(build_scenario(name), args.set, scenario=name)
        changes = {k: v for k, v in (("n", args.n), ("reps", args.reps)) if v is not None}
        if changes:
            cfg = cfg.with_(**changes)
        seed = _resolve_seed(args.seed)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except ConfigError as exc:
        print(f"persistlab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report = execute(cfg, seed, threads=args.threads)
    try:
        paths = emit_report(report, args.out, args.format)
    except OSError as exc:
        print(f"persistlab: cannot write report to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    est = report.estimates
    print(
        f"{cfg.name}: {est.headline} mean {est.mc_mean:.6f} (sd {est.mc_sd:.6f}) over {est.n_reps} reps, "
        f"{est.n_void} void; {report.wall_clock:.2f}s"
    )
    for path in paths:
        print(f"  wrote {path}")
    if est.void_share > DEGENERACY_LIMIT:
        print(f"persistlab: estimator degenerate in {est.n_void}/{est.n_reps} replications", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
