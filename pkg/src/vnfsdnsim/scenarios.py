"""Scenario orchestration and result emission.

Six canned evaluations share one execution path: build the topology, wire
a security configuration (an ordered function chain plus controller
settings), attach the scenario's traffic profiles, run, and fold KPIs.
Every security configuration of a scenario runs under the same seed; the
per-(profile, source) random streams guarantee the offered traffic is
byte-identical across configurations, so KPI deltas are attributable to
the security configuration alone.

Results are emitted as CSV tables and as newline-delimited record streams
whose bytes are reproducible under a fixed seed (one wall-clock header
field excepted), plus per-figure plot-data files.  Measured values can be
checked against the shipped calibration targets.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
import time
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .config import (
    ConfigError,
    PROFILE_PREFIX,
    ScenarioConfig,
    canonical_json,
)
from .engine import SimEngine
from .metrics import (
    AnalyticParams,
    Hypothesis1Result,
    KpiCounters,
    KpiReport,
    WindowRow,
    check_hypothesis1,
)
from .model import ThreatKind, build_topology
from .runtime import NetworkSim, RunResult
from .sdn import Controller
from .vnf import (
    CAPTURE_FORMAT_VERSION,
    CaptureVnf,
    FilterVnf,
    FirewallRule,
    FirewallVnf,
    IdsVnf,
    MitigationProfile,
    VnfChain,
)


class ConfigMismatch(Exception):
    """The configuration does not belong to the requested scenario."""


class MissingMetric(Exception):
    """A calibration target references a value the result does not contain."""


class BadFormat(Exception):
    """A capture file violates the line-delimited record contract."""


class UnsupportedVersion(Exception):
    """A capture file declares a format version this reader cannot parse."""


# ----------------------------------------------------------------------
# security configuration -> function chain


def build_chain(
    label: str,
    cfg: ScenarioConfig,
    engine: SimEngine,
    topology,
    capture_folder: Path | None,
) -> tuple[VnfChain, CaptureVnf | None, bool]:
    """Realise a security-config label as (chain, capture tap, flow rules on)."""
    sec = cfg.security

    def firewall() -> FirewallVnf:
        rules = []
        for spec in sec.firewall_rules:
            rules.append(
                FirewallRule(
                    action=spec.action,
                    src=topology.by_name(spec.src).id if spec.src else None,
                    dst=topology.by_name(spec.dst).id if spec.dst else None,
                    protocol=spec.protocol,
                )
            )
        return FirewallVnf(rules=rules)

    def ids() -> IdsVnf:
        return IdsVnf(
            signatures=frozenset(ThreatKind(v) for v in sec.ids.signatures),
            anomaly_window_s=sec.ids.anomaly_window_s,
            anomaly_threshold_pps=sec.ids.anomaly_threshold_pps,
        )

    capture = None
    if label == "no_security":
        return VnfChain([]), None, False
    if label == "firewall_only":
        return VnfChain([firewall()]), None, True
    if label == "ids_only":
        return VnfChain([ids()]), None, True
    if label in ("vnfsdn", "vnfsdn_firewall"):
        vnfs = [FilterVnf(policy=cfg.policy)]
        if label == "vnfsdn_firewall":
            vnfs.append(firewall())
        vnfs.append(ids())
        if sec.capture and capture_folder is not None:
            capture = CaptureVnf(capture_folder, engine.seed)
        return VnfChain(vnfs), capture, True
    if label.startswith(PROFILE_PREFIX):
        name = label[len(PROFILE_PREFIX):]
        p = sec.profiles[name]
        profile = MitigationProfile(
            name=name,
            detection_probability=p.detection_probability,
            detection_delay_us=p.detection_delay_us,
            cost_us=p.cost_us,
            memory_kb_per_flow=p.memory_kb_per_flow,
            prioritize_benign=p.prioritize_benign,
            rng=engine.register_stream(f"profile/{name}"),
        )
        return VnfChain([profile]), None, True
    raise ConfigError(f"unknown security config {label!r}")


# ----------------------------------------------------------------------
# running


def run_one(
    cfg: ScenarioConfig,
    label: str,
    *,
    hosts: int | None = None,
    out_dir: str | Path | None = None,
    collect_trace: bool = False,
    retain_samples: bool = False,
) -> RunResult:
    """Execute one (security config, topology size) cell of a scenario."""
    star = cfg.topology if hosts is None else replace(cfg.topology, hosts=hosts)
    topology = build_topology(star)
    engine = SimEngine(cfg.seed, hash_events=True)
    capture_folder = None
    if out_dir is not None:
        capture_folder = Path(out_dir) / "captures" / f"s{cfg.scenario}_{label}"
    chain, capture, flow_rules = build_chain(label, cfg, engine, topology, capture_folder)
    controller = Controller(
        topology,
        congestion_threshold=cfg.controller.congestion_threshold,
        congestion_penalty=cfg.controller.congestion_penalty,
        drop_idle_timeout_s=cfg.controller.drop_idle_timeout_s,
        install_delay_us=cfg.controller.install_delay_us,
        flow_rules=flow_rules,
    )
    sim = NetworkSim(
        topology,
        engine,
        controller,
        chain,
        capture=capture,
        window_s=cfg.window_s,
        monitor_interval_s=cfg.monitor_interval_s,
        memory_base_mb=cfg.memory_base_mb,
        collect_trace=collect_trace,
        retain_samples=retain_samples,
        label=label,
    )
    sim.attach_traffic(
        cfg.duration_s,
        benign=list(cfg.traffic.benign),
        ddos=list(cfg.traffic.ddos),
        access=list(cfg.traffic.access),
    )
    return sim.run(cfg.duration_s)


@dataclass(frozen=True)
class RunRow:
    label: str
    hosts: int
    result: RunResult


@dataclass(frozen=True)
class TargetCheck:
    name: str
    measured: float | None
    expected: float
    tolerance: float
    comparator: str
    passed: bool
    normative: bool
    note: str = ""


@dataclass
class ScenarioResult:
    scenario: int
    seed: int
    config_digest: str
    duration_s: float
    window_s: float
    rows: tuple[RunRow, ...]
    checks: tuple[TargetCheck, ...] = ()

    def row(self, label: str) -> RunRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise MissingMetric(f"no run for security config {label!r}")

    def digest(self) -> str:
        """Content digest over everything emitted except the wall-clock field."""
        h = hashlib.sha256()
        h.update(canonical_json(_result_object(self)).encode())
        return h.hexdigest()


def run_scenario(
    scenario_id: int,
    cfg: ScenarioConfig,
    *,
    out_dir: str | Path | None = None,
    targets: "CalibrationTargets | None" = None,
) -> ScenarioResult:
    """Run every security configuration (and sweep point) of a scenario."""
    if cfg.scenario != scenario_id:
        raise ConfigMismatch(
            f"configuration is for scenario {cfg.scenario}, not {scenario_id}"
        )
    rows: list[RunRow] = []
    if cfg.sweep_hosts:
        for label in cfg.security.configs:
            for n in cfg.sweep_hosts:
                result = run_one(cfg, label, hosts=n, out_dir=out_dir)
                rows.append(RunRow(f"{label}_h{n:03d}", n, result))
    else:
        for label in cfg.security.configs:
            result = run_one(cfg, label, out_dir=out_dir)
            rows.append(RunRow(label, cfg.topology.hosts, result))
    result = ScenarioResult(
        scenario=scenario_id,
        seed=cfg.seed,
        config_digest=cfg.digest(),
        duration_s=cfg.duration_s,
        window_s=cfg.window_s,
        rows=tuple(rows),
    )
    if targets is None:
        targets = CalibrationTargets.shipped()
    relevant = [t for t in targets.entries if t.scenario == scenario_id]
    if relevant:
        comparison = compare_to_targets(result, targets)
        result.checks = tuple(comparison.checks)
    return result


# ----------------------------------------------------------------------
# calibration targets


@dataclass(frozen=True)
class TargetSpec:
    name: str
    scenario: int
    value: float
    comparator: str  # "abs" | "ge" | "le"
    tolerance: float | None = None
    tolerance_pct: float | None = None
    normative: bool = True
    scale_with_duration: bool = False
    reference_duration_s: float | None = None
    note: str = ""

    def __post_init__(self) -> None:
        if (self.tolerance is None) == (self.tolerance_pct is None):
            raise ValueError(f"target {self.name}: exactly one tolerance form required")
        tol = self.tolerance if self.tolerance is not None else self.tolerance_pct
        if tol <= 0:
            raise ValueError(f"target {self.name}: tolerance must be positive")
        if self.comparator not in ("abs", "ge", "le"):
            raise ValueError(f"target {self.name}: bad comparator {self.comparator!r}")
        if self.scale_with_duration and not self.reference_duration_s:
            raise ValueError(f"target {self.name}: scaling needs a reference duration")


@dataclass(frozen=True)
class CalibrationTargets:
    entries: tuple[TargetSpec, ...]

    @staticmethod
    def from_dict(tree: dict) -> "CalibrationTargets":
        entries = []
        for t in tree.get("targets", ()):
            entries.append(
                TargetSpec(
                    name=t["name"],
                    scenario=int(t["scenario"]),
                    value=float(t["value"]),
                    comparator=t.get("comparator", "abs"),
                    tolerance=t.get("tolerance"),
                    tolerance_pct=t.get("tolerance_pct"),
                    normative=bool(t.get("normative", True)),
                    scale_with_duration=bool(t.get("scale_with_duration", False)),
                    reference_duration_s=t.get("reference_duration_s"),
                    note=t.get("note", ""),
                )
            )
        return CalibrationTargets(tuple(entries))

    @staticmethod
    def load(path: str | Path) -> "CalibrationTargets":
        with open(path, "r", encoding="utf-8") as fh:
            return CalibrationTargets.from_dict(json.load(fh))

    @staticmethod
    def shipped() -> "CalibrationTargets":
        text = (
            resources.files("vnfsdnsim")
            .joinpath("data/default_targets.json")
            .read_text(encoding="utf-8")
        )
        return CalibrationTargets.from_dict(json.loads(text))


def _availability_extreme(report: KpiReport, peak: bool) -> float:
    values = [w.availability_pct for w in report.windows if w.availability_pct is not None]
    if not values:
        raise MissingMetric("no windows carry an availability value")
    return max(values) if peak else min(values)


def _reduction_pct(baseline: float | None, improved: float | None, what: str) -> float:
    if baseline is None or improved is None or baseline <= 0:
        raise MissingMetric(f"cannot compute {what} reduction (baseline {baseline!r})")
    return (baseline - improved) / baseline * 100.0


def _measure(result: ScenarioResult, name: str) -> float:
    """Resolve a calibration-target name to a measured value."""
    r = result  # noqa: F841 - readability alias

    def report(label: str) -> KpiReport:
        return result.row(label).result.report

    if name.startswith("s1_benign_loss_"):
        return float(report(name.removeprefix("s1_benign_loss_")).benign_loss_total)
    if name == "s1_availability_min_no_security":
        return _availability_extreme(report("no_security"), peak=False)
    if name == "s1_availability_peak_vnfsdn_firewall":
        return _availability_extreme(report("vnfsdn_firewall"), peak=True)
    if name.startswith("s4_latency_ms_"):
        value = report(name.removeprefix("s4_latency_ms_")).mean_latency_ms
    elif name.startswith("s4_jitter_ms_"):
        value = report(name.removeprefix("s4_jitter_ms_")).jitter_ms
    elif name.startswith("s4_throughput_mbps_"):
        value = report(name.removeprefix("s4_throughput_mbps_")).throughput_mbps
    elif name == "s4_lab_throughput_mbps":
        value = report("vnfsdn").throughput_mbps
    elif name == "s5_response_reduction_pct":
        return _reduction_pct(
            report("no_security").response_time_ms,
            report("vnfsdn").response_time_ms,
            "response-time",
        )
    elif name == "s5_benign_loss_reduction_pct":
        return _reduction_pct(
            float(report("no_security").benign_loss_total),
            float(report("vnfsdn").benign_loss_total),
            "benign-loss",
        )
    elif name == "s5_availability_gain_pp":
        base = report("no_security").availability_pct
        new = report("vnfsdn").availability_pct
        if base is None or new is None:
            raise MissingMetric("availability undefined in one of the runs")
        return new - base
    else:
        raise ConfigError(f"unknown calibration target {name!r}")
    if value is None:
        raise MissingMetric(f"metric for {name!r} is undefined in this run")
    return float(value)


@dataclass(frozen=True)
class ComparisonReport:
    checks: tuple[TargetCheck, ...]
    normative_passed: bool
    skipped: tuple[tuple[str, str], ...] = ()


def compare_to_targets(
    result: ScenarioResult, targets: CalibrationTargets
) -> ComparisonReport:
    """Mark each target for this scenario pass/fail against measured values.

    Targets whose metric cannot be resolved in this result — typically a
    security configuration that was not part of the run — are reported as
    skipped rather than failed, so partial runs stay comparable.  Target
    names the resolver does not know at all raise ConfigError.
    """
    checks = []
    skipped = []
    for spec in targets.entries:
        if spec.scenario != result.scenario:
            continue
        expected = spec.value
        if spec.scale_with_duration:
            expected *= result.duration_s / spec.reference_duration_s
        tol = (
            spec.tolerance
            if spec.tolerance is not None
            else abs(expected) * spec.tolerance_pct / 100.0
        )
        try:
            measured = _measure(result, spec.name)
        except MissingMetric as exc:
            skipped.append((spec.name, str(exc)))
            continue
        if spec.comparator == "abs":
            passed = abs(measured - expected) <= tol
        elif spec.comparator == "ge":
            passed = measured >= expected - tol
        else:
            passed = measured <= expected + tol
        checks.append(
            TargetCheck(
                name=spec.name,
                measured=measured,
                expected=expected,
                tolerance=tol,
                comparator=spec.comparator,
                passed=passed,
                normative=spec.normative,
                note=spec.note,
            )
        )
    normative_passed = all(c.passed for c in checks if c.normative)
    return ComparisonReport(tuple(checks), normative_passed, tuple(skipped))


# ----------------------------------------------------------------------
# emission

_WINDOW_COLUMNS = (
    "window",
    "start_s",
    "sent_benign",
    "delivered_benign",
    "benign_queue_drops",
    "benign_blocked",
    "threat_sent",
    "threat_blocked",
    "unauthorized_sent",
    "unauthorized_blocked",
    "mean_latency_ms",
    "jitter_ms",
    "mean_rtt_ms",
    "throughput_mbps",
    "availability_pct",
    "cpu_pct",
    "memory_mb",
    "tdr",
    "monitored_weighted_bytes",
    "cumulative_benign_loss",
)

_SUMMARY_COLUMNS = (
    "scenario",
    "config",
    "hosts",
    "seed",
    "duration_s",
    "secure_traffic_pct",
    "tdr",
    "ubr",
    "exposure",
    "access_outcome",
    "reliability",
    "mean_latency_ms",
    "jitter_ms",
    "mean_rtt_ms",
    "detection_time_ms",
    "response_time_ms",
    "throughput_mbps",
    "availability_pct",
    "availability_min_pct",
    "availability_peak_pct",
    "cpu_pct",
    "memory_mb_mean",
    "memory_mb_max",
    "benign_sent",
    "benign_delivered",
    "benign_loss_total",
    "total_packets",
    "delivered_packets",
    "blocked_packets",
    "queue_dropped",
    "threat_packets",
    "blocked_threats",
    "unauthorized_attempts",
    "blocked_unauthorized",
    "rules_installed",
    "reroutes",
    "events_processed",
    "event_hash",
)


def _cell(value) -> str:
    """Canonical CSV cell: empty for undefined, 6-decimal fixed for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _round6(value):
    if isinstance(value, float):
        return round(value, 6)
    return value


def _window_object(w) -> dict:
    return {
        "kind": "window",
        "window": w.index,
        "start_s": _round6(w.start_s),
        "sent_benign": w.sent_benign,
        "delivered_benign": w.delivered_benign,
        "benign_queue_drops": w.benign_queue_drops,
        "benign_blocked": w.benign_blocked,
        "threat_sent": w.threat_sent,
        "threat_blocked": w.threat_blocked,
        "unauthorized_sent": w.unauthorized_sent,
        "unauthorized_blocked": w.unauthorized_blocked,
        "mean_latency_ms": _round6(w.mean_latency_ms),
        "jitter_ms": _round6(w.jitter_ms),
        "mean_rtt_ms": _round6(w.mean_rtt_ms),
        "throughput_mbps": _round6(w.throughput_mbps),
        "availability_pct": _round6(w.availability_pct),
        "cpu_pct": _round6(w.cpu_pct),
        "memory_mb": _round6(w.memory_mb),
        "tdr": _round6(w.tdr),
        "monitored_weighted_bytes": _round6(w.monitored_weighted_bytes),
        "cumulative_benign_loss": w.cumulative_benign_loss,
    }


def _summary_object(scenario: int, row: RunRow) -> dict:
    rep = row.result.report
    c = rep.counters
    avail = [w.availability_pct for w in rep.windows if w.availability_pct is not None]
    return {
        "kind": "summary",
        "scenario": scenario,
        "config": row.label,
        "hosts": row.hosts,
        "seed": row.result.seed,
        "duration_s": _round6(row.result.duration_s),
        "secure_traffic_pct": _round6(rep.secure_traffic_pct),
        "tdr": _round6(rep.tdr),
        "ubr": _round6(rep.ubr),
        "exposure": _round6(rep.exposure),
        "access_outcome": _round6(rep.access_outcome),
        "reliability": _round6(rep.reliability),
        "mean_latency_ms": _round6(rep.mean_latency_ms),
        "jitter_ms": _round6(rep.jitter_ms),
        "mean_rtt_ms": _round6(rep.mean_rtt_ms),
        "detection_time_ms": _round6(rep.detection_time_ms),
        "response_time_ms": _round6(rep.response_time_ms),
        "throughput_mbps": _round6(rep.throughput_mbps),
        "availability_pct": _round6(rep.availability_pct),
        "availability_min_pct": _round6(min(avail)) if avail else None,
        "availability_peak_pct": _round6(max(avail)) if avail else None,
        "cpu_pct": _round6(rep.cpu_pct),
        "memory_mb_mean": _round6(rep.memory_mb_mean),
        "memory_mb_max": _round6(rep.memory_mb_max),
        "benign_sent": rep.benign_sent,
        "benign_delivered": rep.benign_delivered,
        "benign_loss_total": rep.benign_loss_total,
        "total_packets": c.total_packets,
        "delivered_packets": c.delivered_packets,
        "blocked_packets": c.blocked_packets,
        "queue_dropped": c.queue_dropped,
        "threat_packets": c.threat_packets,
        "blocked_threats": c.blocked_threat_packets,
        "unauthorized_attempts": c.unauthorized_attempts,
        "blocked_unauthorized": c.blocked_unauthorized,
        "rules_installed": row.result.rules_installed,
        "reroutes": row.result.reroutes,
        "events_processed": row.result.events_processed,
        "event_hash": row.result.event_hash,
    }


def _result_object(result: ScenarioResult) -> dict:
    return {
        "scenario": result.scenario,
        "seed": result.seed,
        "config_digest": result.config_digest,
        "rows": [
            {
                "summary": _summary_object(result.scenario, row),
                "windows": [_window_object(w) for w in row.result.report.windows],
            }
            for row in result.rows
        ],
    }


_NDREC_JSON = {"sort_keys": True, "separators": (",", ":")}


def emit_results(
    result: ScenarioResult,
    out_dir: str | Path,
    formats: tuple[str, ...] = ("csv", "records"),
) -> list[Path]:
    """Write result files under ``out_dir``; returns the paths written."""
    for fmt in formats:
        if fmt not in ("csv", "records"):
            raise ConfigError(f"unknown output format {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []

    if "csv" in formats:
        for row in result.rows:
            path = out / f"s{result.scenario}_{row.label}_{result.seed}.csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(_WINDOW_COLUMNS)
                for w in row.result.report.windows:
                    obj = _window_object(w)
                    writer.writerow(_cell(obj[col]) for col in _WINDOW_COLUMNS)
            paths.append(path)
        path = out / f"s{result.scenario}_summary_{result.seed}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_SUMMARY_COLUMNS)
            for row in result.rows:
                obj = _summary_object(result.scenario, row)
                writer.writerow(_cell(obj[col]) for col in _SUMMARY_COLUMNS)
        paths.append(path)
        paths.extend(_emit_plotdata(result, out))

    if "records" in formats:
        for row in result.rows:
            path = out / f"s{result.scenario}_{row.label}_{result.seed}.ndrec"
            header = {
                "kind": "header",
                "format_version": 1,
                "generated_unix_ms": int(time.time() * 1000),
                "scenario": result.scenario,
                "config": row.label,
                "config_digest": result.config_digest,
                "seed": result.seed,
            }
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(header, **_NDREC_JSON) + "\n")
                for w in row.result.report.windows:
                    fh.write(json.dumps(_window_object(w), **_NDREC_JSON) + "\n")
                fh.write(
                    json.dumps(_summary_object(result.scenario, row), **_NDREC_JSON) + "\n"
                )
            paths.append(path)

    return paths


# Figure analogs emitted per scenario: availability and cumulative-loss
# series for the five S1 configs; the size sweep; per-window response and
# resource series; the S4 latency/jitter/throughput series; the S5
# availability and resource series.
_FIGS_BY_SCENARIO = {
    1: ("5a", "5b"),
    2: ("6",),
    3: ("7",),
    4: ("8",),
    5: ("9", "10"),
    6: (),
}


def _series_csv(
    out: Path, fig: str, result: ScenarioResult, fields: dict[str, str]
) -> Path:
    """One row per window; one column group per (field, config)."""
    n_windows = max((len(r.result.report.windows) for r in result.rows), default=0)
    path = out / f"plotdata_fig{fig}.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        header = ["window"]
        for prefix in fields:
            header.extend(f"{prefix}_{row.label}" for row in result.rows)
        writer.writerow(header)
        for i in range(n_windows):
            cells = [str(i)]
            for attr in fields.values():
                for row in result.rows:
                    windows = row.result.report.windows
                    value = getattr(windows[i], attr) if i < len(windows) else None
                    cells.append(_cell(value))
            writer.writerow(cells)
    return path


def _emit_plotdata(result: ScenarioResult, out: Path) -> list[Path]:
    paths = []
    for fig in _FIGS_BY_SCENARIO.get(result.scenario, ()):
        if fig == "5a":
            paths.append(_series_csv(out, fig, result, {"avail": "availability_pct"}))
        elif fig == "5b":
            paths.append(_series_csv(out, fig, result, {"loss": "cumulative_benign_loss"}))
        elif fig == "6":
            path = out / "plotdata_fig6.csv"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    (
                        "hosts",
                        "config",
                        "detection_time_ms",
                        "mean_latency_ms",
                        "benign_loss_total",
                        "throughput_mbps",
                        "cpu_pct",
                        "memory_mb_max",
                    )
                )
                for row in result.rows:
                    rep = row.result.report
                    writer.writerow(
                        (
                            row.hosts,
                            row.label,
                            _cell(rep.detection_time_ms),
                            _cell(rep.mean_latency_ms),
                            rep.benign_loss_total,
                            _cell(rep.throughput_mbps),
                            _cell(rep.cpu_pct),
                            _cell(rep.memory_mb_max),
                        )
                    )
            paths.append(path)
        elif fig == "7":
            paths.append(
                _series_csv(
                    out,
                    fig,
                    result,
                    {
                        "rtt": "mean_rtt_ms",
                        "avail": "availability_pct",
                        "cpu": "cpu_pct",
                        "mem": "memory_mb",
                    },
                )
            )
        elif fig == "8":
            paths.append(
                _series_csv(
                    out,
                    fig,
                    result,
                    {
                        "latency": "mean_latency_ms",
                        "jitter": "jitter_ms",
                        "throughput": "throughput_mbps",
                    },
                )
            )
        elif fig == "9":
            paths.append(_series_csv(out, fig, result, {"avail": "availability_pct"}))
        elif fig == "10":
            paths.append(
                _series_csv(out, fig, result, {"cpu": "cpu_pct", "mem": "memory_mb"})
            )
    return paths


# ----------------------------------------------------------------------
# reading emitted results back

_WINDOW_INT_COLUMNS = frozenset(
    {
        "window",
        "sent_benign",
        "delivered_benign",
        "benign_queue_drops",
        "benign_blocked",
        "threat_sent",
        "threat_blocked",
        "unauthorized_sent",
        "unauthorized_blocked",
        "cumulative_benign_loss",
    }
)

_SUMMARY_INT_COLUMNS = frozenset(
    {
        "scenario",
        "hosts",
        "seed",
        "benign_sent",
        "benign_delivered",
        "benign_loss_total",
        "total_packets",
        "delivered_packets",
        "blocked_packets",
        "queue_dropped",
        "threat_packets",
        "blocked_threats",
        "unauthorized_attempts",
        "blocked_unauthorized",
        "rules_installed",
        "reroutes",
        "events_processed",
    }
)

_SUMMARY_STR_COLUMNS = frozenset({"config", "event_hash"})


def _parse_cell(column: str, text: str, ints: frozenset, strs: frozenset = frozenset()):
    if text == "":
        return None
    if column in strs:
        return text
    if column in ints:
        return int(text)
    return float(text)


def _read_windows(path: Path) -> list[WindowRow]:
    windows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            cells = {
                col: _parse_cell(col, rec[col], _WINDOW_INT_COLUMNS)
                for col in _WINDOW_COLUMNS
            }
            cells["index"] = cells.pop("window")
            for col in ("throughput_mbps", "cpu_pct", "memory_mb",
                        "monitored_weighted_bytes"):
                cells[col] = cells[col] if cells[col] is not None else 0.0
            windows.append(WindowRow(**cells))
    return windows


def load_results(out_dir: str | Path) -> list[ScenarioResult]:
    """Rebuild scenario results from the CSV files written by emit_results.

    Only fields present in the files are populated; in particular the
    configuration digest is not recoverable from CSV output.
    """
    out = Path(out_dir)
    results = []
    for summary_path in sorted(out.glob("s*_summary_*.csv")):
        match = re.fullmatch(r"s(\d+)_summary_(\d+)\.csv", summary_path.name)
        if not match:
            continue
        scenario, seed = int(match.group(1)), int(match.group(2))
        rows = []
        with open(summary_path, "r", encoding="utf-8", newline="") as fh:
            for rec in csv.DictReader(fh):
                cells = {
                    col: _parse_cell(
                        col, rec[col], _SUMMARY_INT_COLUMNS, _SUMMARY_STR_COLUMNS
                    )
                    for col in _SUMMARY_COLUMNS
                }
                label = cells["config"]
                window_path = out / f"s{scenario}_{label}_{seed}.csv"
                windows = _read_windows(window_path) if window_path.exists() else []
                counters = KpiCounters(
                    total_packets=cells["total_packets"] or 0,
                    delivered_packets=cells["delivered_packets"] or 0,
                    blocked_packets=cells["blocked_packets"] or 0,
                    queue_dropped=cells["queue_dropped"] or 0,
                    threat_packets=cells["threat_packets"] or 0,
                    blocked_threat_packets=cells["blocked_threats"] or 0,
                    unauthorized_attempts=cells["unauthorized_attempts"] or 0,
                    blocked_unauthorized=cells["blocked_unauthorized"] or 0,
                )
                report = KpiReport(
                    duration_s=cells["duration_s"] or 0.0,
                    counters=counters,
                    windows=windows,
                    secure_traffic_pct=cells["secure_traffic_pct"],
                    tdr=cells["tdr"],
                    ubr=cells["ubr"],
                    exposure=cells["exposure"],
                    access_outcome=cells["access_outcome"],
                    reliability=cells["reliability"],
                    mean_latency_ms=cells["mean_latency_ms"],
                    jitter_ms=cells["jitter_ms"],
                    mean_rtt_ms=cells["mean_rtt_ms"],
                    detection_time_ms=cells["detection_time_ms"],
                    response_time_ms=cells["response_time_ms"],
                    throughput_mbps=cells["throughput_mbps"] or 0.0,
                    availability_pct=cells["availability_pct"],
                    cpu_pct=cells["cpu_pct"] or 0.0,
                    memory_mb_mean=cells["memory_mb_mean"] or 0.0,
                    memory_mb_max=cells["memory_mb_max"] or 0.0,
                    benign_sent=cells["benign_sent"] or 0,
                    benign_delivered=cells["benign_delivered"] or 0,
                    benign_loss_total=cells["benign_loss_total"] or 0,
                    detection_samples=0,
                )
                rows.append(
                    RunRow(
                        label,
                        cells["hosts"] or 0,
                        RunResult(
                            label=label,
                            seed=cells["seed"] or seed,
                            duration_s=cells["duration_s"] or 0.0,
                            report=report,
                            events_processed=cells["events_processed"] or 0,
                            event_hash=cells["event_hash"],
                            rules_installed=cells["rules_installed"] or 0,
                            reroutes=cells["reroutes"] or 0,
                        ),
                    )
                )
        duration = max((r.result.duration_s for r in rows), default=0.0)
        window_s = 1.0
        for r in rows:
            w = r.result.report.windows
            if len(w) >= 2:
                window_s = w[1].start_s - w[0].start_s
                break
        results.append(
            ScenarioResult(
                scenario=scenario,
                seed=seed,
                config_digest="",
                duration_s=duration,
                window_s=window_s,
                rows=tuple(rows),
            )
        )
    return results


# ----------------------------------------------------------------------
# capture dump

_CAPTURE_HEADER_KEYS = ("ap_mac", "channel", "format_version", "iface", "run_seed")
_CAPTURE_RECORD_KEYS = (
    "class",
    "dst",
    "id",
    "protocol",
    "sim_time_us",
    "size",
    "src",
    "tag",
    "verdict",
)


def _parse_capture_line(line: str, number: int, keys: tuple[str, ...]) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise BadFormat(f"line {number}: not a valid record ({exc.msg})") from exc
    if not isinstance(obj, dict) or tuple(obj.keys()) != keys:
        raise BadFormat(
            f"line {number}: expected keys {list(keys)}, got "
            f"{list(obj.keys()) if isinstance(obj, dict) else type(obj).__name__}"
        )
    return obj


def capture_dump(path: str | Path) -> str:
    """Validate a capture file and render a human-readable listing."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise BadFormat(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise BadFormat("line 1: file is empty, header object missing")
    header = _parse_capture_line(lines[0], 1, _CAPTURE_HEADER_KEYS)
    if header["format_version"] != CAPTURE_FORMAT_VERSION:
        raise UnsupportedVersion(
            f"format version {header['format_version']} "
            f"(supported: {CAPTURE_FORMAT_VERSION})"
        )
    out = [
        f"capture file {path}",
        f"  interface {header['iface']} channel {header['channel']} "
        f"ap {header['ap_mac']} seed {header['run_seed']}",
    ]
    count = 0
    for number, line in enumerate(lines[1:], start=2):
        rec = _parse_capture_line(line, number, _CAPTURE_RECORD_KEYS)
        count += 1
        out.append(
            f"  [{rec['sim_time_us']:>12} us] #{rec['id']} "
            f"{rec['src']}->{rec['dst']} {rec['size']}B {rec['protocol']} "
            f"tag={rec['tag']} class={rec['class']} verdict={rec['verdict']}"
        )
    out.append(f"  {count} records")
    return "\n".join(out)


# ----------------------------------------------------------------------
# size-vs-security verification


def hypothesis1_sizes(n_max: int) -> list[int]:
    """Perfect squares up to n_max, plus n_max itself."""
    if n_max < 2:
        raise ValueError(f"need n_max >= 2, got {n_max}")
    sizes = {i * i for i in range(1, math.isqrt(n_max) + 1)}
    sizes.add(n_max)
    return sorted(sizes)


def verify_hypothesis1(
    n_max: int,
    gamma: float = 0.0,
    m: float = 1.0,
    horizon_s: float = 1.0,
    a: float = 1.0,
    gamma_scale: str = "const",
) -> Hypothesis1Result:
    base = AnalyticParams(n=1, a_n=a, gamma_n=gamma, m=m, horizon_s=horizon_s)
    return check_hypothesis1(base, hypothesis1_sizes(n_max), gamma_scale)
