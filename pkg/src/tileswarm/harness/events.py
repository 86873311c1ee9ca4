"""Append-only event log: one JSON record per line.

Layout:

    {"kind": "header", "format": 1, "seed": S, "scenario": {...}}
    {"kind": "event", "tick": T, "seq": N, "type": "...", ...payload}
    ...
    {"kind": "final", "tick": T, "tiles": [...]}

Records are serialized with sorted keys and no extra whitespace, so the
same run always produces byte-identical text and logs diff cleanly.
Replay verification re-executes the embedded scenario and compares every
line; a truncated or edited log fails with IntegrityError.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

FORMAT_VERSION = 1

# Event types appearing in the "type" field.
BROADCAST = "Broadcast"
DELIVERY = "Delivery"
DECISION = "Decision"
COLOR_CHANGE = "ColorChange"
PHASE_CHANGE = "PhaseChange"
ARRIVAL = "Arrival"
SCRIPT_APPLIED = "ScriptApplied"


class IntegrityError(ValueError):
    pass


@dataclass(frozen=True)
class LogRecord:
    kind: str  # header | event | final
    data: dict[str, Any]

    def line(self) -> str:
        return json.dumps({"kind": self.kind, **self.data}, sort_keys=True, separators=(",", ":"))


def header_record(seed: int, scenario_dict: dict[str, Any]) -> LogRecord:
    return LogRecord(
        "header", {"format": FORMAT_VERSION, "seed": seed, "scenario": scenario_dict}
    )


def event_record(tick: int, seq: int, type_: str, **payload: Any) -> LogRecord:
    return LogRecord("event", {"tick": tick, "seq": seq, "type": type_, **payload})


def final_record(tick: int, tiles: list[dict[str, Any]]) -> LogRecord:
    return LogRecord("final", {"tick": tick, "tiles": tiles})


def to_text(records: Iterable[LogRecord]) -> str:
    return "\n".join(r.line() for r in records) + "\n"


def write_log(records: Iterable[LogRecord], path: str | Path) -> None:
    Path(path).write_text(to_text(records), encoding="utf-8")


def parse_log_lines(text: str) -> list[LogRecord]:
    """Parse raw log text; structural errors raise IntegrityError."""
    records: list[LogRecord] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError:
            raise IntegrityError(f"line {lineno}: not valid JSON") from None
        if not isinstance(data, dict) or "kind" not in data:
            raise IntegrityError(f"line {lineno}: missing record kind")
        kind = data.pop("kind")
        records.append(LogRecord(kind, data))

    if not records or records[0].kind != "header":
        raise IntegrityError("log must start with a header record")
    if records[-1].kind != "final":
        raise IntegrityError("log is truncated: missing final record")
    if records[0].data.get("format") != FORMAT_VERSION:
        raise IntegrityError(f"unsupported log format {records[0].data.get('format')!r}")
    return records


def read_log(path: str | Path) -> list[LogRecord]:
    return parse_log_lines(Path(path).read_text(encoding="utf-8"))
