"""Scenario files: one self-describing JSON record per line.

Record kinds:

    {"kind": "scenario", "name": ..., "duration_ticks": N, ...}   (required, first)
    {"kind": "arena", "width": W, "height": H, ...}               (optional)
    {"kind": "timing", "reeval": 10, "beacon": 5, ...}            (optional)
    {"kind": "network", "latency_min": ..., ...}                  (optional)
    {"kind": "marker", "id": K, "x": ..., "y": ...}               (1..M, required)
    {"kind": "tile", "id": T, "x": ..., "y": ..., "heading": ...} (required)
    {"kind": "script", "at_tick": T, "event": "idea", ...}        (any number)

Script events: idea(tile, text), remove(tile), add(tile, x, y, heading),
partition(groups), heal.  The script must be sorted by at_tick and may only
reference tiles that exist at that point in the timeline.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from ..arena import ArenaConfig, MarkerError, MarkerTable, Pose
from ..core import TileId
from ..netsim import NetworkConfig, NetworkError
from ..similarity import get_provider
from ..tile import TileConfig


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class ScriptEvent:
    at_tick: int
    event: str  # idea | remove | add | partition | heal
    tile: TileId | None = None
    text: str | None = None
    x: float | None = None
    y: float | None = None
    heading: float = 0.0
    groups: tuple[tuple[TileId, ...], ...] | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    duration_ticks: int
    threshold: float = 0.3
    provider: str = "trigram-256"
    log_deliveries: bool = True
    arena: ArenaConfig = field(default_factory=ArenaConfig)
    timing: TileConfig = field(default_factory=TileConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    markers: MarkerTable = field(
        default_factory=lambda: MarkerTable(dict(DEFAULT_MARKERS))
    )
    tiles: tuple[tuple[TileId, Pose], ...] = ()
    script: tuple[ScriptEvent, ...] = ()


# Spread across the default 6x4 arena, pairwise >= 2 * arrival radius apart.
DEFAULT_MARKERS: dict[int, tuple[float, float]] = {
    1: (1.0, 1.0),
    2: (5.0, 1.0),
    3: (1.0, 3.0),
    4: (5.0, 3.0),
    5: (3.0, 2.0),
}


def _field(record: dict[str, Any], key: str, line: int, kind=None) -> Any:
    if key not in record:
        raise ParseError(line, f"record {record.get('kind')!r} missing field {key!r}")
    value = record[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(line, f"field {key!r} has wrong type: {value!r}")
    return value


_INT = int
_NUM = (int, float)


def loads_scenario(text: str) -> Scenario:
    head: dict[str, Any] | None = None
    arena_rec: dict[str, Any] = {}
    timing_rec: dict[str, Any] = {}
    network_rec: dict[str, Any] = {}
    markers: dict[int, tuple[float, float]] = {}
    tiles: list[tuple[TileId, Pose]] = []
    script: list[ScriptEvent] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(record, dict) or "kind" not in record:
            raise ParseError(lineno, "each record must be an object with a 'kind'")
        kind = record["kind"]
        if kind == "scenario":
            if head is not None:
                raise ParseError(lineno, "duplicate scenario record")
            head = record
            _field(record, "name", lineno, str)
            _field(record, "duration_ticks", lineno, _INT)
        elif kind == "arena":
            arena_rec = record
        elif kind == "timing":
            timing_rec = record
        elif kind == "network":
            network_rec = record
        elif kind == "marker":
            mid = _field(record, "id", lineno, _INT)
            if mid in markers:
                raise ParseError(lineno, f"duplicate marker id {mid}")
            markers[mid] = (
                float(_field(record, "x", lineno, _NUM)),
                float(_field(record, "y", lineno, _NUM)),
            )
        elif kind == "tile":
            tid = _field(record, "id", lineno, _INT)
            tiles.append(
                (
                    tid,
                    Pose(
                        x=float(_field(record, "x", lineno, _NUM)),
                        y=float(_field(record, "y", lineno, _NUM)),
                        heading=float(record.get("heading", 0.0)),
                    ),
                )
            )
        elif kind == "script":
            script.append(_parse_script(record, lineno))
        else:
            raise ParseError(lineno, f"unknown record kind {kind!r}")

    if head is None:
        raise ParseError(0, "missing scenario record")

    scenario = Scenario(
        name=head["name"],
        duration_ticks=head["duration_ticks"],
        threshold=float(head.get("threshold", 0.3)),
        provider=head.get("provider", "trigram-256"),
        log_deliveries=bool(head.get("log_deliveries", True)),
        arena=_build(ArenaConfig, arena_rec),
        timing=TileConfig(
            reeval_ticks=timing_rec.get("reeval", 10),
            beacon_ticks=timing_rec.get("beacon", 5),
            stale_ticks=timing_rec.get("stale", 50),
            threshold=float(head.get("threshold", 0.3)),
            hysteresis=timing_rec.get("hysteresis", 0.05),
        ),
        network=NetworkConfig(
            latency_min=network_rec.get("latency_min", 1),
            latency_max=network_rec.get("latency_max", 3),
            drop_probability=network_rec.get("drop_probability", 0.0),
            partitions=_groups(network_rec.get("partitions", [])),
            seed=network_rec.get("seed", 0),
        ),
        markers=MarkerTable(markers) if markers else MarkerTable(dict(DEFAULT_MARKERS)),
        tiles=tuple(tiles),
        script=tuple(script),
    )
    validate_scenario(scenario)
    return scenario


def _groups(raw) -> tuple[frozenset[TileId], ...]:
    return tuple(frozenset(int(t) for t in group) for group in raw)


def _build(cls, record: dict[str, Any]):
    names = {f.name for f in dataclasses.fields(cls)}
    return cls(**{k: v for k, v in record.items() if k in names})


def _parse_script(record: dict[str, Any], lineno: int) -> ScriptEvent:
    at_tick = _field(record, "at_tick", lineno, _INT)
    event = _field(record, "event", lineno, str)
    if event == "idea":
        return ScriptEvent(
            at_tick=at_tick,
            event=event,
            tile=_field(record, "tile", lineno, _INT),
            text=_field(record, "text", lineno, str),
        )
    if event == "remove":
        return ScriptEvent(
            at_tick=at_tick, event=event, tile=_field(record, "tile", lineno, _INT)
        )
    if event == "add":
        return ScriptEvent(
            at_tick=at_tick,
            event=event,
            tile=_field(record, "tile", lineno, _INT),
            x=float(_field(record, "x", lineno, _NUM)),
            y=float(_field(record, "y", lineno, _NUM)),
            heading=float(record.get("heading", 0.0)),
        )
    if event == "partition":
        return ScriptEvent(
            at_tick=at_tick, event=event, groups=_groups(_field(record, "groups", lineno, list))
        )
    if event == "heal":
        return ScriptEvent(at_tick=at_tick, event=event)
    raise ParseError(lineno, f"unknown script event {event!r}")


def validate_scenario(scenario: Scenario) -> None:
    if scenario.duration_ticks < 1:
        raise ValidationError("duration_ticks must be >= 1")
    try:
        get_provider(scenario.provider)
    except KeyError:
        raise ValidationError(f"unknown embedding provider {scenario.provider!r}") from None

    seen: set[TileId] = set()
    for tid, pose in scenario.tiles:
        if tid < 1:
            raise ValidationError(f"tile ids must be >= 1, got {tid}")
        if tid in seen:
            raise ValidationError(f"duplicate tile id {tid}")
        seen.add(tid)
        _check_in_bounds(pose.x, pose.y, scenario.arena, f"tile {tid}")

    try:
        scenario.markers.validate_spacing(2.0 * scenario.arena.arrival_radius)
    except MarkerError as exc:
        raise ValidationError(str(exc)) from None
    for mid, (x, y) in scenario.markers.entries.items():
        _check_in_bounds(x, y, scenario.arena, f"marker {mid}")

    last_tick = 0
    alive = set(seen)
    for i, ev in enumerate(scenario.script):
        if ev.at_tick < last_tick:
            raise ValidationError(
                f"script not sorted by at_tick at position {i} (tick {ev.at_tick})"
            )
        last_tick = ev.at_tick
        if ev.at_tick >= scenario.duration_ticks:
            raise ValidationError(
                f"script event at tick {ev.at_tick} beyond duration {scenario.duration_ticks}"
            )
        if ev.event in ("idea", "remove") and ev.tile not in alive:
            raise ValidationError(
                f"script event {ev.event!r} references missing tile {ev.tile}"
            )
        if ev.event == "remove":
            alive.remove(ev.tile)
        elif ev.event == "add":
            if ev.tile in alive:
                raise ValidationError(f"script adds duplicate tile {ev.tile}")
            if ev.tile < 1:
                raise ValidationError(f"tile ids must be >= 1, got {ev.tile}")
            alive.add(ev.tile)
            _check_in_bounds(ev.x, ev.y, scenario.arena, f"added tile {ev.tile}")
        elif ev.event == "partition":
            try:
                _check_partitions_disjoint(ev.groups)
            except NetworkError as exc:
                raise ValidationError(str(exc)) from None


def _check_partitions_disjoint(groups) -> None:
    seen: set[TileId] = set()
    for group in groups:
        overlap = seen & set(group)
        if overlap:
            raise NetworkError(f"partition groups overlap on tiles {sorted(overlap)}")
        seen |= set(group)


def _check_in_bounds(x: float, y: float, arena: ArenaConfig, what: str) -> None:
    if not (0.0 <= x <= arena.width and 0.0 <= y <= arena.height):
        raise ValidationError(f"{what} at ({x}, {y}) outside arena bounds")


def load_scenario(path: str | Path) -> Scenario:
    return loads_scenario(Path(path).read_text(encoding="utf-8"))


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    """Plain-dict form embedded into event-log headers."""
    return {
        "name": scenario.name,
        "duration_ticks": scenario.duration_ticks,
        "threshold": scenario.threshold,
        "provider": scenario.provider,
        "log_deliveries": scenario.log_deliveries,
        "arena": dataclasses.asdict(scenario.arena),
        "timing": {
            "reeval": scenario.timing.reeval_ticks,
            "beacon": scenario.timing.beacon_ticks,
            "stale": scenario.timing.stale_ticks,
            "hysteresis": scenario.timing.hysteresis,
        },
        "network": {
            "latency_min": scenario.network.latency_min,
            "latency_max": scenario.network.latency_max,
            "drop_probability": scenario.network.drop_probability,
            "partitions": [sorted(g) for g in scenario.network.partitions],
            "seed": scenario.network.seed,
        },
        "markers": {str(k): list(v) for k, v in sorted(scenario.markers.entries.items())},
        "tiles": [
            {"id": tid, "x": p.x, "y": p.y, "heading": p.heading}
            for tid, p in scenario.tiles
        ],
        "script": [_script_to_dict(ev) for ev in scenario.script],
    }


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    timing = data.get("timing", {})
    network = data.get("network", {})
    return Scenario(
        name=data["name"],
        duration_ticks=data["duration_ticks"],
        threshold=data.get("threshold", 0.3),
        provider=data.get("provider", "trigram-256"),
        log_deliveries=data.get("log_deliveries", True),
        arena=_build(ArenaConfig, data.get("arena", {})),
        timing=TileConfig(
            reeval_ticks=timing.get("reeval", 10),
            beacon_ticks=timing.get("beacon", 5),
            stale_ticks=timing.get("stale", 50),
            threshold=data.get("threshold", 0.3),
            hysteresis=timing.get("hysteresis", 0.05),
        ),
        network=NetworkConfig(
            latency_min=network.get("latency_min", 1),
            latency_max=network.get("latency_max", 3),
            drop_probability=network.get("drop_probability", 0.0),
            partitions=_groups(network.get("partitions", [])),
            seed=network.get("seed", 0),
        ),
        markers=MarkerTable(
            {int(k): (v[0], v[1]) for k, v in data["markers"].items()}
        ),
        tiles=tuple(
            (t["id"], Pose(x=t["x"], y=t["y"], heading=t.get("heading", 0.0)))
            for t in data["tiles"]
        ),
        script=tuple(_script_from_dict(ev) for ev in data.get("script", [])),
    )


def _script_to_dict(ev: ScriptEvent) -> dict[str, Any]:
    out: dict[str, Any] = {"at_tick": ev.at_tick, "event": ev.event}
    if ev.tile is not None:
        out["tile"] = ev.tile
    if ev.text is not None:
        out["text"] = ev.text
    if ev.x is not None:
        out["x"] = ev.x
        out["y"] = ev.y
        out["heading"] = ev.heading
    if ev.groups is not None:
        out["groups"] = [sorted(g) for g in ev.groups]
    return out


def _script_from_dict(data: dict[str, Any]) -> ScriptEvent:
    return ScriptEvent(
        at_tick=data["at_tick"],
        event=data["event"],
        tile=data.get("tile"),
        text=data.get("text"),
        x=data.get("x"),
        y=data.get("y"),
        heading=data.get("heading", 0.0),
        groups=_groups(data["groups"]) if "groups" in data else None,
    )


def dump_scenario(scenario: Scenario) -> str:
    """Serialize back to the line-delimited file format (used by fixtures)."""
    lines = [
        json.dumps(
            {
                "kind": "scenario",
                "name": scenario.name,
                "duration_ticks": scenario.duration_ticks,
                "threshold": scenario.threshold,
                "provider": scenario.provider,
                "log_deliveries": scenario.log_deliveries,
            },
            sort_keys=True,
        ),
        json.dumps({"kind": "arena", **dataclasses.asdict(scenario.arena)}, sort_keys=True),
        json.dumps(
            {
                "kind": "timing",
                "reeval": scenario.timing.reeval_ticks,
                "beacon": scenario.timing.beacon_ticks,
                "stale": scenario.timing.stale_ticks,
                "hysteresis": scenario.timing.hysteresis,
            },
            sort_keys=True,
        ),
        json.dumps(
            {
                "kind": "network",
                "latency_min": scenario.network.latency_min,
                "latency_max": scenario.network.latency_max,
                "drop_probability": scenario.network.drop_probability,
                "partitions": [sorted(g) for g in scenario.network.partitions],
                "seed": scenario.network.seed,
            },
            sort_keys=True,
        ),
    ]
    for mid, (x, y) in sorted(scenario.markers.entries.items()):
        lines.append(json.dumps({"kind": "marker", "id": mid, "x": x, "y": y}, sort_keys=True))
    for tid, pose in scenario.tiles:
        lines.append(
            json.dumps(
                {"kind": "tile", "id": tid, "x": pose.x, "y": pose.y, "heading": pose.heading},
                sort_keys=True,
            )
        )
    for ev in scenario.script:
        lines.append(json.dumps({"kind": "script", **_script_to_dict(ev)}, sort_keys=True))
    return "\n".join(lines) + "\n"


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario file shipped with the package (e.g. 'bristol63')."""
    ref = resources.files("tileswarm.scenarios").joinpath(f"{name}.scenario")
    return Path(str(ref))
