"""Data-plane security functions and their chaining.

Each function inspects a packet and returns a verdict.  A chain consults
its functions in order and stops at the first Block, so the per-packet
processing cost is the sum of the costs of the functions actually
consulted.

The packet filter realises tag-set admission: a packet is forwarded only
when its tag is in the authorised set and it is not an access violation,
otherwise it is blocked with a policy-mismatch reason.  The capture
function implements monitor-mode recording: every packet presented while
monitoring is active is appended to an in-memory buffer and counted, and
``stop_and_save`` persists the buffer as one line-delimited record file.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .engine import RngStream
from .model import Packet, PacketClass, SecurityPolicy, ThreatKind


class InactiveVnf(Exception):
    """A packet was offered to a function that is administratively down."""


class MonitoringStopped(Exception):
    """Capture was invoked after monitoring had been stopped."""


class IoFailure(Exception):
    """Persisting a capture buffer failed."""


class BlockReason(Enum):
    POLICY_MISMATCH = "policy_mismatch"
    FIREWALL_RULE = "firewall_rule"
    IDS_SIGNATURE = "ids_signature"
    IDS_ANOMALY = "ids_anomaly"
    PROFILE_DETECTION = "profile_detection"


@dataclass(frozen=True)
class Verdict:
    forward: bool
    reason: BlockReason | None = None

    def __post_init__(self) -> None:
        if self.forward and self.reason is not None:
            raise ValueError("a forward verdict carries no block reason")
        if not self.forward and self.reason is None:
            raise ValueError("a block verdict needs a reason")

    @property
    def label(self) -> str:
        return "forward" if self.forward else f"block:{self.reason.value}"


FORWARD = Verdict(True)


def block(reason: BlockReason) -> Verdict:
    return Verdict(False, reason)


# ----------------------------------------------------------------------
# individual functions


@dataclass
class FilterVnf:
    """Tag-set admission filter.

    Forwards a packet iff its tag is authorised and it is not an
    unauthorised-access attempt; blocks everything else as a policy
    mismatch.  Inspecting while inactive is an error, not a silent pass.
    """

    policy: SecurityPolicy
    active: bool = True
    cost_us: int = 2

    def check(self, packet: Packet, now_us: int = 0) -> Verdict:
        if not self.active:
            raise InactiveVnf("packet filter is not active")
        if self.policy.accepts(packet.tag) and packet.cls is not PacketClass.UNAUTHORIZED_ACCESS:
            return FORWARD
        return block(BlockReason.POLICY_MISMATCH)


@dataclass(frozen=True)
class FirewallRule:
    """Static allow/deny rule; ``None`` fields match anything."""

    action: str  # "allow" | "deny"
    src: int | None = None
    dst: int | None = None
    protocol: str | None = None

    def __post_init__(self) -> None:
        if self.action not in ("allow", "deny"):
            raise ValueError(f"firewall action must be allow|deny, got {self.action!r}")

    def matches(self, packet: Packet) -> bool:
        return (
            (self.src is None or self.src == packet.src)
            and (self.dst is None or self.dst == packet.dst)
            and (self.protocol is None or self.protocol == packet.protocol)
        )


@dataclass
class FirewallVnf:
    """First-match static rule table with a configurable default action."""

    rules: list[FirewallRule] = field(default_factory=list)
    default_allow: bool = True
    active: bool = True
    cost_us: int = 1

    def check(self, packet: Packet, now_us: int = 0) -> Verdict:
        if not self.active:
            raise InactiveVnf("firewall is not active")
        for rule in self.rules:
            if rule.matches(packet):
                return FORWARD if rule.action == "allow" else block(BlockReason.FIREWALL_RULE)
        return FORWARD if self.default_allow else block(BlockReason.FIREWALL_RULE)


@dataclass
class IdsVnf:
    """Signature matching plus a sliding-window per-source rate detector.

    Every packet updates the source's arrival history.  Signature hits are
    reported first; otherwise the source's arrival rate over the trailing
    window is compared against the anomaly threshold.
    """

    signatures: frozenset[ThreatKind] = frozenset()
    anomaly_window_s: float = 1.0
    anomaly_threshold_pps: float = 1000.0
    active: bool = True
    cost_us: int = 5
    _arrivals: dict[int, deque[int]] = field(default_factory=dict, repr=False)

    def check(self, packet: Packet, now_us: int) -> Verdict:
        if not self.active:
            raise InactiveVnf("intrusion detector is not active")
        window_us = int(self.anomaly_window_s * 1_000_000)
        history = self._arrivals.setdefault(packet.src, deque())
        cutoff = now_us - window_us
        while history and history[0] <= cutoff:
            history.popleft()
        history.append(now_us)
        if packet.threat_kind is not None and packet.threat_kind in self.signatures:
            return block(BlockReason.IDS_SIGNATURE)
        if len(history) / self.anomaly_window_s > self.anomaly_threshold_pps:
            return block(BlockReason.IDS_ANOMALY)
        return FORWARD

    @property
    def tracked_sources(self) -> int:
        return len(self._arrivals)


@dataclass
class MitigationProfile:
    """Baseline mitigation behaviour used for approach comparisons.

    Threat packets are detected with ``detection_probability`` (one draw per
    packet from the injected stream); a detection takes ``detection_delay_us``
    to propagate to the control plane.  ``prioritize_benign`` marks profiles
    that schedule benign traffic ahead of everything else instead of (or in
    addition to) blocking.
    """

    name: str
    detection_probability: float
    detection_delay_us: int = 0
    cost_us: int = 3
    memory_kb_per_flow: float = 8.0
    prioritize_benign: bool = False
    active: bool = True
    rng: RngStream | None = None
    _flows: set[tuple[int, int, str]] = field(default_factory=set, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.detection_probability <= 1.0:
            raise ValueError(
                f"detection probability must be in [0, 1], got {self.detection_probability}"
            )

    def check(self, packet: Packet, now_us: int = 0) -> Verdict:
        if not self.active:
            raise InactiveVnf(f"profile {self.name!r} is not active")
        self._flows.add((packet.src, packet.dst, packet.tag))
        if packet.cls is PacketClass.THREAT and self.detection_probability > 0.0:
            if self.rng is None:
                raise ValueError(f"profile {self.name!r} has no random stream attached")
            if self.rng.uniform() < self.detection_probability:
                return block(BlockReason.PROFILE_DETECTION)
        return FORWARD

    @property
    def tracked_flows(self) -> int:
        return len(self._flows)


# ----------------------------------------------------------------------
# packet capture

CAPTURE_FORMAT_VERSION = 1
CAPTURE_SUFFIX = ".ndrec"

# json.dumps with these settings is the byte-level file contract: keys in
# lexicographic order, no whitespace.
_JSON_KW = {"sort_keys": True, "separators": (",", ":")}


@dataclass
class CaptureRecord:
    packet_id: int
    src: int
    dst: int
    size: int
    protocol: str
    class_label: str
    tag: str
    sim_time_us: int
    verdict_label: str

    def as_object(self) -> dict:
        return {
            "class": self.class_label,
            "dst": self.dst,
            "id": self.packet_id,
            "protocol": self.protocol,
            "sim_time_us": self.sim_time_us,
            "size": self.size,
            "src": self.src,
            "tag": self.tag,
            "verdict": self.verdict_label,
        }


class CaptureVnf:
    """Monitor-mode packet recorder.

    Mirrors the usual capture workflow: put an interface in monitor mode,
    accumulate frames, then stop and save the buffer to a dump file in a
    target folder.  The file is line-delimited: a header object first, then
    one object per captured packet, all with keys in lexicographic order.
    """

    def __init__(
        self,
        folder: str | Path,
        run_seed: int,
        *,
        channel: int = 6,
        ap_mac: str = "02:00:00:00:00:01",
        iface: str = "mon0",
        started_at_us: int = 0,
        cost_us: int = 1,
    ):
        self.folder = Path(folder)
        self.run_seed = run_seed
        self.channel = channel
        self.ap_mac = ap_mac
        self.iface = iface
        self.started_at_us = started_at_us
        self.cost_us = cost_us
        self.monitoring = True
        self.buffer: list[CaptureRecord] = []
        self.capture_count = 0

    def capture(self, packet: Packet, verdict: Verdict, now_us: int) -> CaptureRecord:
        """Record one presented packet and bump the running count."""
        if not self.monitoring:
            raise MonitoringStopped("capture invoked after monitoring stopped")
        record = CaptureRecord(
            packet_id=packet.id,
            src=packet.src,
            dst=packet.dst,
            size=packet.size,
            protocol=packet.protocol,
            class_label=packet.class_label,
            tag=packet.tag,
            sim_time_us=now_us,
            verdict_label=verdict.label,
        )
        self.buffer.append(record)
        self.capture_count += 1
        return record

    def header_object(self) -> dict:
        return {
            "ap_mac": self.ap_mac,
            "channel": self.channel,
            "format_version": CAPTURE_FORMAT_VERSION,
            "iface": self.iface,
            "run_seed": self.run_seed,
        }

    def stop_and_save(self) -> Path:
        """Stop monitoring, persist the buffer, clear it, return the file path."""
        self.monitoring = False
        path = self.folder / f"capture_{self.run_seed}_{self.started_at_us}{CAPTURE_SUFFIX}"
        try:
            self.folder.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(self.header_object(), **_JSON_KW) + "\n")
                for record in self.buffer:
                    fh.write(json.dumps(record.as_object(), **_JSON_KW) + "\n")
        except OSError as exc:
            raise IoFailure(f"cannot write capture file {path}: {exc}") from exc
        self.buffer.clear()
        return path


# ----------------------------------------------------------------------
# chaining


class VnfChain:
    """Ordered security functions consulted until the first Block."""

    def __init__(self, vnfs: list | None = None):
        self.vnfs = list(vnfs or [])

    def process(self, packet: Packet, now_us: int) -> tuple[Verdict, int]:
        """Return (verdict, total cost in us of the functions consulted)."""
        cost = 0
        for vnf in self.vnfs:
            cost += vnf.cost_us
            verdict = vnf.check(packet, now_us)
            if not verdict.forward:
                return verdict, cost
        return FORWARD, cost

    def __len__(self) -> int:
        return len(self.vnfs)
