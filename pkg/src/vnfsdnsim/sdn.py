"""Centralised controller: route computation, flow rules, congestion response.

Routing is minimum-total-latency over link latencies with a deterministic
tie-break: among equal-cost paths the lexicographically smallest node
sequence wins, i.e. ties are broken by the smallest next node id.

Data-plane verdicts feed back into the control plane: a Block verdict is
generalised to the packet's flow and installed as an ingress drop rule, so
subsequent packets of that flow die at the edge without traversing the
security chain.  Drop rules expire after an idle timeout; matching a rule
(including matching it to drop a packet) refreshes the timer.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .model import NodeId, Packet, Topology
from .vnf import Verdict

DROP_PRIORITY = 100


class NoPath(Exception):
    """Source and destination are not connected."""


@dataclass(frozen=True)
class FlowKey:
    """Flow identity used for rule generalisation: endpoints plus tag."""

    src: NodeId
    dst: NodeId
    discriminator: str


def flow_key_for(packet: Packet) -> FlowKey:
    return FlowKey(packet.src, packet.dst, packet.tag)


@dataclass
class FlowRule:
    key: FlowKey
    action: str  # "drop" | "forward"
    path: tuple[NodeId, ...] | None
    priority: int
    installed_at: int
    idle_timeout_us: int
    last_match: int
    reason: str = ""

    def active(self, now_us: int) -> bool:
        return self.installed_at <= now_us and not self.expired(now_us)

    def expired(self, now_us: int) -> bool:
        return now_us - self.last_match > self.idle_timeout_us


class Controller:
    """Single control point for routing and flow admission."""

    def __init__(
        self,
        topology: Topology,
        *,
        congestion_threshold: float = 0.8,
        congestion_penalty: float = 10.0,
        drop_idle_timeout_s: float = 30.0,
        install_delay_us: int = 1000,
        flow_rules: bool = True,
    ):
        if not 0.0 < congestion_threshold <= 1.0:
            raise ValueError(f"congestion threshold must be in (0, 1], got {congestion_threshold}")
        self.topology = topology
        self.congestion_threshold = congestion_threshold
        self.congestion_penalty = congestion_penalty
        self.drop_idle_timeout_us = int(drop_idle_timeout_s * 1_000_000)
        self.install_delay_us = install_delay_us
        self.flow_rules = flow_rules
        # (key, priority) -> rule; at most one active rule per pair.
        self._rules: dict[tuple[FlowKey, int], FlowRule] = {}
        self._routes: dict[tuple[NodeId, NodeId], tuple[NodeId, ...]] = {}
        self.rules_installed = 0
        self.reroutes = 0

    # ------------------------------------------------------------------
    # routing

    def compute_route(
        self,
        src: NodeId,
        dst: NodeId,
        latency_penalty: dict[frozenset[NodeId], float] | None = None,
    ) -> tuple[NodeId, ...]:
        """Shortest path by summed link latency, smallest node sequence on ties."""
        if src == dst:
            raise ValueError("source and destination coincide")
        # Heap entries order first by cost then by path tuple, which realises
        # the smallest-next-node tie-break without a separate pass.
        heap: list[tuple[float, tuple[NodeId, ...]]] = [(0, (src,))]
        settled: set[NodeId] = set()
        while heap:
            cost, path = heapq.heappop(heap)
            node = path[-1]
            if node == dst:
                return path
            if node in settled:
                continue
            settled.add(node)
            for nbr, link in self.topology.neighbors(node):
                if nbr in settled:
                    continue
                weight = link.latency_us
                if latency_penalty:
                    weight *= latency_penalty.get(frozenset((link.a, link.b)), 1.0)
                heapq.heappush(heap, (cost + weight, path + (nbr,)))
        raise NoPath(f"no path from node {src} to node {dst}")

    def route(self, src: NodeId, dst: NodeId) -> tuple[NodeId, ...]:
        """Cached route lookup; computes and caches on first use."""
        cached = self._routes.get((src, dst))
        if cached is None:
            cached = self.compute_route(src, dst)
            self._routes[(src, dst)] = cached
        return cached

    # ------------------------------------------------------------------
    # flow rules

    def lookup(self, packet: Packet, now_us: int) -> tuple[str, FlowRule | None]:
        """Resolve a packet against the rule store.

        Returns ("drop", rule), ("forward", rule) or ("chain", None) when no
        rule matches and the packet must be inspected.
        """
        key = flow_key_for(packet)
        best: FlowRule | None = None
        for priority in (DROP_PRIORITY, 0):
            rule = self._rules.get((key, priority))
            if rule is not None and rule.active(now_us):
                best = rule
                break
            if rule is not None and rule.expired(now_us):
                del self._rules[(key, priority)]
        if best is None:
            return "chain", None
        best.last_match = now_us
        return ("drop" if best.action == "drop" else "forward"), best

    def on_verdict(
        self,
        packet: Packet,
        verdict: Verdict,
        now_us: int,
        extra_delay_us: int = 0,
    ) -> FlowRule | None:
        """React to a data-plane verdict.

        Forward verdicts only warm the route cache.  Block verdicts install
        an ingress drop rule for the packet's flow (no-op when flow-rule
        generalisation is disabled), active after the install delay plus any
        reporting delay of the detecting function.
        """
        if verdict.forward:
            self.route(packet.src, packet.dst)
            return None
        if not self.flow_rules:
            return None
        active_from = now_us + self.install_delay_us + extra_delay_us
        rule = FlowRule(
            key=flow_key_for(packet),
            action="drop",
            path=None,
            priority=DROP_PRIORITY,
            installed_at=active_from,
            idle_timeout_us=self.drop_idle_timeout_us,
            last_match=active_from,
            reason=verdict.reason.value if verdict.reason else "",
        )
        self._rules[(rule.key, rule.priority)] = rule
        self.rules_installed += 1
        return rule

    def expire_rule(self, rule: FlowRule, now_us: int) -> bool:
        """Remove the rule if idle; returns True when it was dropped."""
        stored = self._rules.get((rule.key, rule.priority))
        if stored is not rule:
            return False
        if stored.expired(now_us):
            del self._rules[(rule.key, rule.priority)]
            return True
        return False

    def is_current(self, rule: FlowRule) -> bool:
        """True while ``rule`` is the stored rule for its (key, priority) slot."""
        return self._rules.get((rule.key, rule.priority)) is rule

    def active_rule_count(self, now_us: int) -> int:
        return sum(1 for r in self._rules.values() if r.active(now_us))

    def rules(self) -> list[FlowRule]:
        return list(self._rules.values())

    # ------------------------------------------------------------------
    # congestion

    def handle_congestion(
        self, link_nodes: tuple[NodeId, NodeId], occupancy: float
    ) -> list[tuple[NodeId, NodeId, tuple[NodeId, ...]]]:
        """Re-route cached flows away from a congested link.

        When occupancy exceeds the threshold, every cached route crossing the
        link is recomputed with that link's latency scaled by the congestion
        penalty.  Flows with no alternative keep their route.  Returns the
        (src, dst, new_path) triples that actually moved.
        """
        if occupancy <= self.congestion_threshold:
            return []
        hot = frozenset(link_nodes)
        penalty = {hot: self.congestion_penalty}
        moved = []
        for (src, dst), path in list(self._routes.items()):
            if not _path_uses(path, hot):
                continue
            try:
                alternative = self.compute_route(src, dst, latency_penalty=penalty)
            except NoPath:
                continue
            if alternative != path:
                self._routes[(src, dst)] = alternative
                moved.append((src, dst, alternative))
                self.reroutes += 1
        return moved


def _path_uses(path: tuple[NodeId, ...], link: frozenset[NodeId]) -> bool:
    return any(frozenset((path[i], path[i + 1])) == link for i in range(len(path) - 1))
