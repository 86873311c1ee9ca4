"""Simulated lossy broadcast network.

Every broadcast fans out to all registered tiles in the sender's partition
component.  Per-recipient drop draws and latency draws come from a single
seeded generator consumed in sorted-recipient order, so a given (config,
seed, broadcast sequence) always yields the same delivery schedule.

Drops are independent per recipient.  A physical radio loses a broadcast
for nearby receivers together; independent draws are simpler and strictly
harsher on the protocol.
"""

from __future__ import annotations

import heapq
import operator
import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import Tick, TileId


class NetworkError(ValueError):
    pass


class UnknownSender(NetworkError):
    pass


class UnknownTile(NetworkError):
    pass


class DuplicateTile(NetworkError):
    pass


@dataclass(frozen=True)
class NetworkConfig:
    latency_min: int = 1
    latency_max: int = 3
    drop_probability: float = 0.0
    partitions: tuple[frozenset[TileId], ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.latency_min <= self.latency_max:
            raise NetworkError("need 0 <= latency_min <= latency_max")
        if not 0.0 <= self.drop_probability <= 1.0:
            raise NetworkError("drop_probability must be in [0, 1]")
        _check_disjoint(self.partitions)


def _check_disjoint(partitions) -> None:
    seen: set[TileId] = set()
    for group in partitions:
        overlap = seen & set(group)
        if overlap:
            raise NetworkError(f"partition groups overlap on tiles {sorted(overlap)}")
        seen |= set(group)


class DeliveryEvent(NamedTuple):
    deliver_at: Tick
    origin: TileId
    recipient: TileId
    wire: str


@dataclass
class Network:
    config: NetworkConfig
    seed: int | None = None
    _rng: random.Random = field(init=False)
    # tile id -> registration generation; bumped on re-add so in-flight
    # events addressed to a replaced tile are dropped
    _tiles: dict[TileId, int] = field(init=False, default_factory=dict)
    _generation: int = field(init=False, default=0)
    _component: dict[TileId, int] | None = field(init=False, default=None)
    _queue: list[tuple[Tick, TileId, TileId, int, int, str]] = field(
        init=False, default_factory=list
    )
    _pushes: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        self._rng = random.Random(self.config.seed if self.seed is None else self.seed)
        self.set_partitions(self.config.partitions)

    def add_tile(self, tid: TileId) -> None:
        if tid in self._tiles:
            raise DuplicateTile(f"tile {tid} already registered")
        self._generation += 1
        self._tiles[tid] = self._generation

    def remove_tile(self, tid: TileId) -> None:
        if tid not in self._tiles:
            raise UnknownTile(f"tile {tid} not registered")
        del self._tiles[tid]

    def set_partitions(self, partitions) -> None:
        _check_disjoint(partitions)
        if not partitions:
            self._component = None
            return
        component: dict[TileId, int] = {}
        for i, group in enumerate(partitions):
            for tid in group:
                component[tid] = i
        self._component = component

    def _reachable(self, sender: TileId) -> list[TileId]:
        if self._component is None:
            return [tid for tid in sorted(self._tiles) if tid != sender]
        # Tiles absent from every partition group share an implicit
        # component, so [[1,2]] fragments {1,2} away from everyone else.
        sender_comp = self._component.get(sender, -1)
        return [
            tid
            for tid in sorted(self._tiles)
            if tid != sender and self._component.get(tid, -1) == sender_comp
        ]

    def broadcast(self, sender: TileId, wire: str, now: Tick) -> None:
        if sender not in self._tiles:
            raise UnknownSender(f"tile {sender} not registered")
        drop = self.config.drop_probability
        jitter = self.config.latency_max - self.config.latency_min
        if jitter == 0:
            # Shared latency: one queue entry fans out to every survivor,
            # which keeps heap traffic off the dense-beacon hot path.
            survivors = [
                (recipient, self._tiles[recipient])
                for recipient in self._reachable(sender)
                if drop == 0.0 or self._rng.random() >= drop
            ]
            if survivors:
                self._pushes += 1
                heapq.heappush(
                    self._queue,
                    (now + self.config.latency_min, sender, self._pushes,
                     survivors, wire),
                )
            return
        for recipient in self._reachable(sender):
            if drop > 0.0 and self._rng.random() < drop:
                continue
            latency = self.config.latency_min + self._rng.randrange(jitter + 1)
            self._pushes += 1
            heapq.heappush(
                self._queue,
                (now + latency, sender, self._pushes,
                 [(recipient, self._tiles[recipient])], wire),
            )

    def step(self, until: Tick) -> list[DeliveryEvent]:
        """Pop every delivery due at or before ``until``.

        Ordered by (deliver_at, origin, recipient); events to tiles removed
        (or replaced) since enqueue are dropped silently.
        """
        out: list[DeliveryEvent] = []
        for deliver_at, origin, recipients, wire in self.step_batches(until):
            for recipient in recipients:
                out.append(DeliveryEvent(deliver_at, origin, recipient, wire))
        # stable: same-key events keep enqueue order
        out.sort(key=operator.itemgetter(0, 1, 2))
        return out

    def step_batches(
        self, until: Tick
    ) -> list[tuple[Tick, TileId, list[TileId], str]]:
        """step() without the per-recipient fan-out: one row per broadcast,
        popped in (deliver_at, origin, enqueue) order.

        Any one recipient sees its messages in the same relative order as
        in step(); only the interleaving across recipients differs, which
        no tile can observe.
        """
        out: list[tuple[Tick, TileId, list[TileId], str]] = []
        while self._queue and self._queue[0][0] <= until:
            deliver_at, origin, _, recipients, wire = heapq.heappop(self._queue)
            alive = [
                recipient
                for recipient, generation in recipients
                if self._tiles.get(recipient) == generation
            ]
            if alive:
                out.append((deliver_at, origin, alive, wire))
        return out
