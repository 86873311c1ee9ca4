"""Run metrics derived from an event log, including pairwise agreement
between the simulator's final assignment and the centralized oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..core import AggregateId, TileId
from .events import ARRIVAL, BROADCAST, SCRIPT_APPLIED, LogRecord


@dataclass(frozen=True)
class Metrics:
    nonzero_aggregate_count: int
    unassigned_count: int
    messages_sent: int
    mean_ticks_idea_to_settle: float | None
    oracle_agreement: float | None = None

    def to_dict(self) -> dict:
        return {
            "nonzero_aggregate_count": self.nonzero_aggregate_count,
            "unassigned_count": self.unassigned_count,
            "messages_sent": self.messages_sent,
            "mean_ticks_idea_to_settle": self.mean_ticks_idea_to_settle,
            "oracle_agreement": self.oracle_agreement,
        }


def idea_sequence(records: list[LogRecord]) -> list[tuple[TileId, str]]:
    """Time-ordered (tile, text) entries, script and live submissions alike."""
    out: list[tuple[TileId, str]] = []
    for rec in records:
        if rec.kind == "event" and rec.data.get("type") == SCRIPT_APPLIED:
            if rec.data.get("event") == "idea":
                out.append((rec.data["tile"], rec.data["text"]))
    return out


def final_assignment(records: list[LogRecord]) -> dict[TileId, AggregateId]:
    final = records[-1]
    assert final.kind == "final", "log must end with a final record"
    return {
        t["id"]: t["aggregate"] for t in final.data["tiles"] if t["idea"] is not None
    }


def pairwise_agreement(
    sim: dict[TileId, AggregateId], oracle: dict[TileId, AggregateId]
) -> float:
    """Fraction of tile pairs where both sides agree on same-vs-different.

    Two unassigned tiles count as "different": aggregate 0 is not a
    cluster.  A pair set of fewer than one pair is vacuously 1.0.
    """
    tiles = sorted(set(sim) & set(oracle))
    pairs = list(itertools.combinations(tiles, 2))
    if not pairs:
        return 1.0
    agree = 0
    for a, b in pairs:
        same_sim = sim[a] == sim[b] and sim[a] != 0
        same_oracle = oracle[a] == oracle[b] and oracle[a] != 0
        agree += same_sim == same_oracle
    return agree / len(pairs)


def compute_metrics(
    records: list[LogRecord], oracle: dict[TileId, AggregateId] | None = None
) -> Metrics:
    messages = 0
    # tile -> tick of the idea entry still waiting for its arrival
    waiting: dict[TileId, int] = {}
    settle_ticks: list[int] = []
    for rec in records:
        if rec.kind != "event":
            continue
        type_ = rec.data["type"]
        if type_ == BROADCAST:
            messages += 1
        elif type_ == SCRIPT_APPLIED and rec.data.get("event") == "idea":
            waiting[rec.data["tile"]] = rec.data["tick"]
        elif type_ == ARRIVAL:
            tid = rec.data["tile"]
            if tid in waiting:
                settle_ticks.append(rec.data["tick"] - waiting.pop(tid))

    assignment = final_assignment(records)
    nonzero = {a for a in assignment.values() if a != 0}
    mean_settle = sum(settle_ticks) / len(settle_ticks) if settle_ticks else None
    return Metrics(
        nonzero_aggregate_count=len(nonzero),
        unassigned_count=sum(1 for a in assignment.values() if a == 0),
        messages_sent=messages,
        mean_ticks_idea_to_settle=mean_settle,
        oracle_agreement=(
            pairwise_agreement(assignment, oracle) if oracle is not None else None
        ),
    )
