"""Live-mode wrapper around a Simulation.

One background thread owns the simulation and is its only writer; HTTP
handlers interact through a command queue (idea submissions) and through
immutable snapshots published at the end of every tick.  The event-record
list is append-only, so stream readers just chase its length.
"""

from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass
from typing import Any

from ..core import IdeaError, TileId, validate_idea
from ..harness.events import LogRecord
from ..harness.runner import Simulation
from ..harness.scenario import Scenario
from ..tile import Phase

IDEA_DISPLAY_CHARS = 80


class GatewayError(ValueError):
    pass


class NoIdleTile(GatewayError):
    pass


class UnknownTile(GatewayError):
    pass


class InvalidSince(GatewayError):
    pass


@dataclass(frozen=True)
class Submission:
    tile: TileId
    text: str


class LiveRunner:
    def __init__(self, scenario: Scenario, seed: int, tick_hz: float = 10.0):
        self.scenario = scenario
        self.tick_hz = tick_hz
        self.sim = Simulation(scenario, seed)
        self._commands: queue.Queue[Submission] = queue.Queue()
        self._lock = threading.Lock()
        self._snapshot: dict[str, Any] = {}
        self._reserved: set[TileId] = set()
        self._done = threading.Event()
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._loop, name="tileswarm-sim", daemon=True)
        self._publish_snapshot()

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=5.0)

    @property
    def done(self) -> bool:
        return self._done.is_set()

    def wait_done(self, timeout: float | None = None) -> bool:
        return self._done.wait(timeout)

    def _loop(self) -> None:
        period = 0.0 if self.tick_hz <= 0 else 1.0 / self.tick_hz
        next_deadline = time.monotonic()
        while not self._stop.is_set() and self.sim.tick < self.scenario.duration_ticks:
            self._drain_commands()
            self.sim.step()
            self._publish_snapshot()
            if period:
                next_deadline += period
                delay = next_deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
        if self.sim.tick >= self.scenario.duration_ticks:
            self.sim.finalize()
        self._done.set()

    def _drain_commands(self) -> None:
        while True:
            try:
                sub = self._commands.get_nowait()
            except queue.Empty:
                return
            self.sim.inject_idea(sub.tile, sub.text)

    # -- submissions ----------------------------------------------------------

    def submit_idea(self, tile: TileId | None, text: str) -> tuple[TileId, int]:
        """Validate and queue a submission; returns (tile used, current tick).

        Raises IdeaError subclasses for bad text, UnknownTile for an explicit
        tile that does not exist, NoIdleTile when no tile is free to hand out.
        """
        if self.done:
            raise GatewayError("simulation has finished")
        normalized = validate_idea(text)
        with self._lock:
            snapshot = self._snapshot
            known = {t["id"]: t for t in snapshot["tiles"]}
            if tile is None:
                candidates = [
                    t["id"]
                    for t in snapshot["tiles"]
                    if t["phase"] == Phase.IDLE.value and t["id"] not in self._reserved
                ]
                if not candidates:
                    raise NoIdleTile("every tile is already holding an idea")
                tile = min(candidates)
            elif tile not in known:
                raise UnknownTile(f"tile {tile} does not exist")
            self._reserved.add(tile)
        self._commands.put(Submission(tile=tile, text=normalized))
        return tile, snapshot["tick"]

    # -- reads ----------------------------------------------------------------

    def _publish_snapshot(self) -> None:
        sim = self.sim
        tiles = []
        for tid in sorted(sim.tiles):
            s = sim.tiles[tid]
            idea = s.idea if s.idea is None else s.idea[:IDEA_DISPLAY_CHARS]
            tiles.append(
                {
                    "id": tid,
                    "x": s.pose.x,
                    "y": s.pose.y,
                    "heading": s.pose.heading,
                    "color": s.color.value,
                    "aggregate": s.aggregate,
                    "phase": s.phase.value,
                    "idea": idea,
                }
            )
        snapshot = {
            "tick": sim.tick - 1 if sim.tick else 0,
            "done": sim.tick >= self.scenario.duration_ticks,
            "arena": {"width": sim.arena.width, "height": sim.arena.height},
            "markers": [
                {"id": mid, "x": x, "y": y}
                for mid, (x, y) in sorted(sim.markers.entries.items())
            ],
            "tiles": tiles,
            "metrics": {
                "nonzero_aggregate_count": len(
                    {t["aggregate"] for t in tiles if t["aggregate"] != 0}
                ),
                "unassigned_count": sum(
                    1 for t in tiles if t["idea"] is not None and t["aggregate"] == 0
                ),
                "messages_sent": sum(
                    1
                    for r in sim.records
                    if r.kind == "event" and r.data["type"] == "Broadcast"
                ),
            },
        }
        with self._lock:
            self._snapshot = snapshot
            # A reservation lapses once the idea lands (tile leaves IDLE)
            # or the tile disappears.
            self._reserved &= {
                t["id"] for t in tiles if t["phase"] == Phase.IDLE.value
            }

    def get_snapshot(self) -> dict[str, Any]:
        with self._lock:
            return self._snapshot

    def records_from(self, index: int) -> list[LogRecord]:
        records = self.sim.records  # append-only; slicing a stable prefix
        return records[index : len(records)]

    def latest_tick(self) -> int:
        return self.get_snapshot()["tick"]

    def check_since(self, since: int) -> None:
        if since > self.latest_tick():
            raise InvalidSince(f"since={since} is in the future")

    def log_text(self) -> str:
        """Full log so far; only byte-stable once the run is done."""
        return "\n".join(r.line() for r in self.records_from(0)) + "\n"
