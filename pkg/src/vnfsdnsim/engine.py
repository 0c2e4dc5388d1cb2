"""Deterministic discrete-event kernel: clock, event queue, named RNG streams.

The clock is an integer microsecond counter.  Events are dispatched in
(time, enqueue-sequence) order, so two runs that schedule the same events
process them in the same order, always.  Randomness is drawn from named
streams derived from the run seed, which keeps independent traffic sources
reproducible in isolation: adding or removing one stream never perturbs
the draws of another.
"""

from __future__ import annotations

import hashlib
import heapq
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Sequence

SimTime = int  # microseconds since run start

US_PER_S = 1_000_000


def seconds(s: float) -> SimTime:
    """Convert seconds to the integer-microsecond clock."""
    return int(round(s * US_PER_S))


class TimeTravel(Exception):
    """An event was scheduled, or the clock advanced, into the past."""


class UnknownStream(Exception):
    """A random draw was requested from a stream that was never registered."""


class EventKind(Enum):
    PACKET_ARRIVAL = "packet_arrival"
    PACKET_DEPARTURE = "packet_departure"
    RULE_TIMEOUT = "rule_timeout"
    WINDOW_BOUNDARY = "window_boundary"
    TRAFFIC_EMIT = "traffic_emit"
    ATTACK_START = "attack_start"
    ATTACK_STOP = "attack_stop"
    MONITOR_SAMPLE = "monitor_sample"


@dataclass
class Event:
    """A scheduled callback.  ``seq`` breaks ties between equal timestamps."""

    time: SimTime
    seq: int
    kind: EventKind
    fn: Callable[[SimTime, Any], None]
    payload: Any = None


class RngStream:
    """Random stream keyed by (run seed, stream name).

    Each stream owns an independent generator seeded from a digest of the
    run seed and the stream name, so the n-th draw of a stream is a pure
    function of (seed, name, n).  ``counter`` records how many draws have
    been taken, which makes divergence between two runs easy to localise.
    """

    __slots__ = ("name", "counter", "_rng")

    def __init__(self, seed: int, name: str):
        self.name = name
        self.counter = 0
        digest = hashlib.blake2b(f"{seed}:{name}".encode(), digest_size=8).digest()
        self._rng = random.Random(int.from_bytes(digest, "big"))

    def uniform(self) -> float:
        """Uniform draw in [0, 1)."""
        self.counter += 1
        return self._rng.random()

    def exponential(self, rate: float) -> float:
        """Exponential draw with the given rate (mean 1/rate)."""
        if rate <= 0:
            raise ValueError(f"exponential rate must be positive, got {rate!r}")
        return -math.log(1.0 - self.uniform()) / rate

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi]."""
        if hi < lo:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        return lo + int(self.uniform() * (hi - lo + 1))

    def choice(self, weights: Sequence[float]) -> int:
        """Index drawn proportionally to ``weights`` (all non-negative)."""
        total = float(sum(weights))
        if total <= 0 or any(w < 0 for w in weights):
            raise ValueError(f"weights must be non-negative with a positive sum: {weights!r}")
        u = self.uniform() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                return i
        return len(weights) - 1


class SimEngine:
    """Single-threaded event loop over an integer-microsecond clock."""

    def __init__(self, seed: int, hash_events: bool = False):
        self.seed = seed
        self._now: SimTime = 0
        self._heap: list[tuple[int, int, Event]] = []
        self._seq = 0
        self._streams: dict[str, RngStream] = {}
        self._processed = 0
        self._hasher = hashlib.sha256() if hash_events else None

    # ------------------------------------------------------------------
    # clock and queue

    def now(self) -> SimTime:
        return self._now

    @property
    def processed(self) -> int:
        """Number of events dispatched so far."""
        return self._processed

    def pending(self) -> int:
        """Number of events still queued."""
        return len(self._heap)

    def schedule(
        self,
        time: SimTime,
        kind: EventKind,
        fn: Callable[[SimTime, Any], None],
        payload: Any = None,
    ) -> Event:
        """Queue ``fn(time, payload)`` for dispatch at ``time``."""
        time = int(time)
        if time < self._now:
            raise TimeTravel(f"cannot schedule at {time}us, clock is at {self._now}us")
        ev = Event(time, self._seq, kind, fn, payload)
        self._seq += 1
        heapq.heappush(self._heap, (time, ev.seq, ev))
        return ev

    def run_until(self, t: SimTime) -> int:
        """Dispatch every event with time <= t; leave the clock exactly at t.

        Returns the number of events processed by this call.
        """
        t = int(t)
        if t < self._now:
            raise TimeTravel(f"cannot run backwards to {t}us from {self._now}us")
        heap = self._heap
        n = 0
        while heap and heap[0][0] <= t:
            time_us, seq, ev = heapq.heappop(heap)
            self._now = time_us
            if self._hasher is not None:
                self._hasher.update(b"%d,%d,%s;" % (time_us, seq, ev.kind.name.encode()))
            ev.fn(time_us, ev.payload)
            n += 1
        self._now = t
        self._processed += n
        return n

    # ------------------------------------------------------------------
    # randomness

    def register_stream(self, name: str) -> RngStream:
        """Create (or return the existing) stream with this name.

        Re-registering never resets an existing stream: draw counters are
        part of the reproducibility contract.
        """
        stream = self._streams.get(name)
        if stream is None:
            stream = RngStream(self.seed, name)
            self._streams[name] = stream
        return stream

    def stream(self, name: str) -> RngStream:
        try:
            return self._streams[name]
        except KeyError:
            raise UnknownStream(f"stream {name!r} was never registered") from None

    def uniform(self, name: str) -> float:
        return self.stream(name).uniform()

    def exponential(self, name: str, rate: float) -> float:
        return self.stream(name).exponential(rate)

    def choice(self, name: str, weights: Sequence[float]) -> int:
        return self.stream(name).choice(weights)

    def event_hash(self) -> str | None:
        """Hex digest over the dispatched (time, seq, kind) sequence, if enabled."""
        return self._hasher.hexdigest() if self._hasher is not None else None
