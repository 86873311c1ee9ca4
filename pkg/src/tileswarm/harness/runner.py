"""Deterministic discrete-event runner.

Tick order is fixed: script events, network deliveries, per-tile logic in
ascending id order, physics, then arrivals.  All randomness lives in the
seeded network, so a (scenario, seed) pair always produces a byte-identical
event log, and replay just re-executes the log's embedded scenario and
checks every line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .. import tile as tilemod
from ..arena import (
    ArenaConfig,
    MarkerTable,
    Pose,
    ProximityReading,
    SlotRegistry,
    arrived,
    plan_step,
    step_physics,
)
from ..core import Color, TileId, decode_message
from ..netsim import Network
from ..similarity import get_provider
from ..tile import Phase, TileState
from . import events as ev
from .events import IntegrityError, LogRecord
from .scenario import Scenario, ScriptEvent, scenario_from_dict, scenario_to_dict


@dataclass
class RunResult:
    scenario: Scenario
    seed: int
    records: list[LogRecord]
    final_states: dict[TileId, TileState]

    def to_text(self) -> str:
        return ev.to_text(self.records)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")


@dataclass
class ReplayResult:
    scenario: Scenario
    seed: int
    records: list[LogRecord]
    final_tiles: list[dict[str, Any]]


class Simulation:
    """One running scenario; step() advances a single tick."""

    def __init__(self, scenario: Scenario, seed: int):
        self.scenario = scenario
        self.seed = seed
        self.provider = get_provider(scenario.provider)
        self.markers: MarkerTable = scenario.markers
        self.arena: ArenaConfig = scenario.arena
        self.network = Network(scenario.network, seed=seed)
        self.slots = SlotRegistry(pitch=scenario.arena.slot_pitch)
        self.tiles: dict[TileId, TileState] = {}
        self.poses: dict[TileId, Pose] = {}
        self.proximity: dict[TileId, ProximityReading | None] = {}
        self.records: list[LogRecord] = [
            ev.header_record(seed, scenario_to_dict(scenario))
        ]
        self.tick = 0
        self._seq = 0
        self._script_index = 0
        self._pending_script: list[ScriptEvent] = []
        for tid, pose in scenario.tiles:
            self._add_tile(tid, pose)

    # -- plumbing ---------------------------------------------------------

    def _add_tile(self, tid: TileId, pose: Pose) -> None:
        self.network.add_tile(tid)
        self.tiles[tid] = TileState(
            id=tid, provider=self.provider, config=self.scenario.timing, pose=pose
        )
        self.poses[tid] = pose
        self.proximity[tid] = None

    def _remove_tile(self, tid: TileId) -> None:
        self.network.remove_tile(tid)
        self.slots.release(tid)
        del self.tiles[tid]
        del self.poses[tid]
        del self.proximity[tid]

    def _emit(self, type_: str, **payload: Any) -> None:
        self.records.append(ev.event_record(self.tick, self._seq, type_, **payload))
        self._seq += 1

    def _emit_diff(self, tid: TileId, before: tuple[int, Color, Phase]) -> None:
        state = self.tiles[tid]
        if state.color is not before[1]:
            self._emit(ev.COLOR_CHANGE, tile=tid, color=state.color.value)
        if state.phase is not before[2]:
            self._emit(ev.PHASE_CHANGE, tile=tid, phase=state.phase.value)

    def _snapshot_acp(self, tid: TileId) -> tuple[int, Color, Phase]:
        s = self.tiles[tid]
        return (s.aggregate, s.color, s.phase)

    def _broadcast(self, tid: TileId, wires: list[str]) -> None:
        for wire in wires:
            self.network.broadcast(tid, wire, self.tick)
            self._emit(ev.BROADCAST, tile=tid, wire=wire)

    def inject_idea(self, tid: TileId, text: str) -> None:
        """Queue an idea entry for the next tick (live-mode submissions)."""
        self._pending_script.append(
            ScriptEvent(at_tick=self.tick + 1, event="idea", tile=tid, text=text)
        )

    # -- script -----------------------------------------------------------

    def _apply_script(self) -> None:
        due: list[ScriptEvent] = []
        script = self.scenario.script
        while self._script_index < len(script) and script[self._script_index].at_tick <= self.tick:
            due.append(script[self._script_index])
            self._script_index += 1
        if self._pending_script:
            ready = [e for e in self._pending_script if e.at_tick <= self.tick]
            if ready:
                self._pending_script = [
                    e for e in self._pending_script if e.at_tick > self.tick
                ]
                due.extend(ready)
        for event in due:
            self._apply_script_event(event)

    def _apply_script_event(self, event: ScriptEvent) -> None:
        if event.event == "idea":
            self._emit(ev.SCRIPT_APPLIED, event="idea", tile=event.tile, text=event.text)
            before = self._snapshot_acp(event.tile)
            wires = tilemod.on_user_idea(self.tiles[event.tile], event.text, self.tick)
            self._emit_diff(event.tile, before)
            self._broadcast(event.tile, wires)
        elif event.event == "remove":
            self._emit(ev.SCRIPT_APPLIED, event="remove", tile=event.tile)
            self._remove_tile(event.tile)
        elif event.event == "add":
            self._emit(
                ev.SCRIPT_APPLIED,
                event="add",
                tile=event.tile,
                x=event.x,
                y=event.y,
                heading=event.heading,
            )
            self._add_tile(event.tile, Pose(x=event.x, y=event.y, heading=event.heading))
        elif event.event == "partition":
            groups = [sorted(g) for g in event.groups]
            self._emit(ev.SCRIPT_APPLIED, event="partition", groups=groups)
            self.network.set_partitions(event.groups)
        elif event.event == "heal":
            self._emit(ev.SCRIPT_APPLIED, event="heal")
            self.network.set_partitions(())

    # -- one tick ---------------------------------------------------------

    def step(self) -> None:
        self._apply_script()

        if self.scenario.log_deliveries:
            for delivery in self.network.step(self.tick):
                state = self.tiles.get(delivery.recipient)
                if state is None:
                    continue
                self._emit(
                    ev.DELIVERY,
                    to=delivery.recipient,
                    origin=delivery.origin,
                    wire=delivery.wire,
                )
                tilemod.on_message(state, _decode_cached(delivery.wire), self.tick)
        else:
            # No per-delivery records wanted: take whole broadcasts and
            # decode each wire once, which is most of the hot path at the
            # 63-tile scale.
            tiles = self.tiles
            tick = self.tick
            on_message = tilemod.on_message
            for _, _, recipients, wire in self.network.step_batches(tick):
                msg = _decode_cached(wire)
                for recipient in recipients:
                    state = tiles.get(recipient)
                    if state is not None:
                        on_message(state, msg, tick)

        motions = {}
        for tid in sorted(self.tiles):
            state = self.tiles[tid]
            # on_tick only ever changes color/phase alongside an action, so
            # the before/after diff can be skipped on quiet ticks
            before = self._snapshot_acp(tid)
            wires, motion, action = tilemod.on_tick(state, self.markers, self.tick)
            if action is not None:
                self._emit(ev.DECISION, tile=tid, **_action_payload(action))
                self._emit_diff(tid, before)
            if wires:
                self._broadcast(tid, wires)
            motions[tid] = motion

        # Tiles that left their aggregate (or stopped being settled) free
        # their parking slot before physics moves anyone.
        for tid in list(self.slots.by_tile):
            state = self.tiles.get(tid)
            parked_aggregate = self.slots.by_tile[tid][0]
            if (
                state is None
                or state.phase is not Phase.SETTLED
                or state.aggregate != parked_aggregate
            ):
                self.slots.release(tid)

        velocities = {
            tid: plan_step(self.poses[tid], motions[tid], self.proximity[tid], self.arena)
            for tid in sorted(self.tiles)
        }
        self.poses, self.proximity = step_physics(self.poses, velocities, self.arena)

        for tid in sorted(self.tiles):
            state = self.tiles[tid]
            state.pose = self.poses[tid]
            if state.phase is not Phase.NAVIGATING:
                continue
            marker_pos = self.markers.position(state.aggregate)
            if arrived(
                state.pose, marker_pos, self.slots.occupancy(state.aggregate),
                radius=self.arena.arrival_radius,
            ):
                slot, (sx, sy) = self.slots.park(tid, state.aggregate, marker_pos)
                state.pose = Pose(x=sx, y=sy, heading=state.pose.heading)
                self.poses[tid] = state.pose
                tilemod.on_arrival(state, self.tick)
                self._emit(
                    ev.ARRIVAL, tile=tid, aggregate=state.aggregate, slot=slot, x=sx, y=sy
                )
                self._emit(ev.PHASE_CHANGE, tile=tid, phase=state.phase.value)

        self.tick += 1

    def run_to_end(self) -> None:
        while self.tick < self.scenario.duration_ticks:
            self.step()

    def final_tiles(self) -> list[dict[str, Any]]:
        out = []
        for tid in sorted(self.tiles):
            s = self.tiles[tid]
            out.append(
                {
                    "id": tid,
                    "idea": s.idea,
                    "aggregate": s.aggregate,
                    "claim_tick": s.claim_tick,
                    "founded": s.founded,
                    "color": s.color.value,
                    "phase": s.phase.value,
                    "x": s.pose.x,
                    "y": s.pose.y,
                    "heading": s.pose.heading,
                }
            )
        return out

    def finalize(self) -> None:
        self.records.append(ev.final_record(self.tick - 1, self.final_tiles()))


_DECODE_CACHE: dict[str, Any] = {}


def _decode_cached(wire: str):
    # Beacons repeat the same wire string for many ticks; messages are
    # frozen so sharing one decode is safe.
    msg = _DECODE_CACHE.get(wire)
    if msg is None:
        msg = decode_message(wire)
        if len(_DECODE_CACHE) > 100_000:
            _DECODE_CACHE.clear()
        _DECODE_CACHE[wire] = msg
    return msg


def _action_payload(action: tilemod.AggregateAction) -> dict[str, Any]:
    if isinstance(action, tilemod.Join):
        return {
            "action": "join",
            "aggregate": action.aggregate,
            "peer": action.peer,
            "score": action.score,
        }
    if isinstance(action, tilemod.Claim):
        return {"action": "claim", "aggregate": action.marker}
    if isinstance(action, tilemod.Unassigned):
        return {"action": "unassigned", "aggregate": 0}
    if isinstance(action, tilemod.Backoff):
        return {"action": "backoff", "marker": action.marker, "winner": action.winner}
    raise AssertionError(f"unexpected action {action!r}")


class SimulationAborted(RuntimeError):
    """A module error stopped the run; carries the partial event log."""

    def __init__(self, cause: BaseException, records: list[LogRecord]):
        super().__init__(f"simulation aborted at record {len(records)}: {cause}")
        self.cause = cause
        self.records = records


def run(scenario: Scenario, seed: int) -> RunResult:
    sim = Simulation(scenario, seed)
    try:
        sim.run_to_end()
    except Exception as exc:
        raise SimulationAborted(exc, sim.records) from exc
    sim.finalize()
    return RunResult(
        scenario=scenario, seed=seed, records=sim.records, final_states=sim.tiles
    )


def replay(log_text: str) -> ReplayResult:
    """Re-execute the log's scenario and verify every line matches.

    Raises IntegrityError when the log is malformed, truncated, or does not
    match what the embedded (scenario, seed) actually produces.
    """
    records = ev.parse_log_lines(log_text)
    header = records[0]
    scenario = scenario_from_dict(header.data["scenario"])
    seed = header.data["seed"]
    rerun = run(scenario, seed)
    if len(rerun.records) != len(records):
        raise IntegrityError(
            f"log has {len(records)} records, replay produced {len(rerun.records)}"
        )
    for i, (got, expected) in enumerate(zip(records, rerun.records)):
        if got.line() != expected.line():
            raise IntegrityError(f"record {i} diverges from deterministic replay")
    return ReplayResult(
        scenario=scenario,
        seed=seed,
        records=rerun.records,
        final_tiles=rerun.records[-1].data["tiles"],
    )
