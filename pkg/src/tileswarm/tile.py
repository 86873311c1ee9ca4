"""Per-agent state machine.

All behavior lives here: a tile consumes delivered messages and user input,
and emits broadcasts plus a motion command.  It knows nothing beyond its
own state, the messages it has heard, and the shared marker table; the
test suite asserts that architecturally.

The decision rule, run every re-evaluation window for any tile holding an
idea:

  1. score all known idea-holding peers against the own idea;
  2. if the best score strictly clears the threshold and that peer sits in
     an aggregate, join it;
  3. otherwise claim the lowest marker no known peer occupies;
  4. no marker free: go white and stay put.

A settled tile switches only when a peer in another aggregate beats its
best score within the current aggregate by the hysteresis margin; without
that damping the continuous recalculation oscillates.  Conflicting claims
on one marker resolve without coordination: the claimant with the larger
(claim_tick, id) backs off as soon as it hears the rival.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import similarity
from .arena import STOP, GoTo, MarkerTable, MotionCommand, Pose
from .core import (
    PALETTE,
    AggregateId,
    BroadcastMessage,
    Color,
    Tick,
    TileId,
    encode_message,
    validate_idea,
)
from .similarity import EmbeddingProvider


class PaletteExhausted(RuntimeError):
    pass


class Phase(str, Enum):
    IDLE = "idle"
    HAS_IDEA = "has_idea"
    NAVIGATING = "navigating"
    SETTLED = "settled"
    UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class TileConfig:
    reeval_ticks: int = 10
    beacon_ticks: int = 5
    stale_ticks: int = 50
    threshold: float = 0.3
    hysteresis: float = 0.05


# Aggregate actions produced by decide().
@dataclass(frozen=True)
class Join:
    aggregate: AggregateId
    peer: TileId
    score: float


@dataclass(frozen=True)
class Claim:
    marker: AggregateId


@dataclass(frozen=True)
class Unassigned:
    pass


@dataclass(frozen=True)
class Stay:
    """No change; a settled tile keeps its aggregate (and its marker)."""


@dataclass(frozen=True)
class Backoff:
    """Lost a claim conflict; dropped to aggregate 0 pending re-decision."""

    marker: AggregateId
    winner: TileId


AggregateAction = Join | Claim | Unassigned | Stay | Backoff


@dataclass(slots=True)
class PeerRecord:
    aggregate: AggregateId
    claim_tick: Tick | None
    idea: str | None
    embedding: np.ndarray | None
    last_heard: Tick
    score: float | None  # similarity to the own idea; None if either side has none


def color_for_aggregate(aggregate: AggregateId) -> Color:
    if aggregate == 0:
        return Color.WHITE
    return PALETTE[(aggregate - 1) % len(PALETTE)]


def assign_color(aggregate: AggregateId, used: set[Color]) -> Color:
    """First palette color not already used by another aggregate.

    Because claims always take the lowest free marker and ``used`` is
    derived from the same peer view, this agrees with the positional
    palette mapping joiners use.
    """
    if aggregate == 0:
        return Color.WHITE
    for color in PALETTE:
        if color not in used:
            return color
    raise PaletteExhausted(f"all {len(PALETTE)} palette colors in use")


@dataclass
class TileState:
    id: TileId
    provider: EmbeddingProvider
    config: TileConfig = field(default_factory=TileConfig)
    pose: Pose = field(default_factory=lambda: Pose(0.0, 0.0))
    idea: str | None = None
    embedding: np.ndarray | None = None
    aggregate: AggregateId = 0
    claim_tick: Tick | None = None
    founded: bool = False
    color: Color = Color.WHITE
    phase: Phase = Phase.IDLE
    peers: dict[TileId, PeerRecord] = field(default_factory=dict)
    # set by on_message when a rival claim appears; checked next tick
    _conflict_hint: bool = field(default=False, repr=False)

    # -- helpers -----------------------------------------------------------

    def _fresh_peers(self, now: Tick) -> list[tuple[TileId, PeerRecord]]:
        horizon = now - self.config.stale_ticks
        return [
            (tid, rec) for tid, rec in self.peers.items() if rec.last_heard >= horizon
        ]

    def _beacon(self) -> BroadcastMessage:
        return BroadcastMessage(
            sender=self.id,
            aggregate=self.aggregate,
            claim_tick=self.claim_tick if self.aggregate != 0 else None,
            idea=self.idea,
        )

    def _clear_assignment(self, phase: Phase) -> None:
        self.aggregate = 0
        self.claim_tick = None
        self.founded = False
        self.color = Color.WHITE
        self.phase = phase

    def _rescore_peers(self) -> None:
        for rec in self.peers.values():
            if self.idea is not None and rec.idea is not None:
                rec.score = similarity.pair_score(self.provider, self.idea, rec.idea)
            else:
                rec.score = None


# -- operations ---------------------------------------------------------------


def on_user_idea(state: TileState, raw_text: str, now: Tick) -> list[str]:
    """Accept (re-)entered idea text; returns the wire strings to broadcast.

    Validation errors propagate before any state is touched.  Entering an
    idea always resets the aggregate: the tile re-decides from scratch at
    its next window, which is also what re-entry on a settled tile means.
    """
    text = validate_idea(raw_text)
    state.idea = text
    state.embedding = similarity.embed(text, state.provider)
    state._clear_assignment(Phase.HAS_IDEA)
    state._rescore_peers()
    return [encode_message(state._beacon())]


def on_message(state: TileState, msg: BroadcastMessage, now: Tick) -> None:
    """Fold one delivered broadcast into the peer table.  No decisions here."""
    assert msg.sender != state.id, "self-messages must be filtered by the network"
    rec = state.peers.get(msg.sender)
    if rec is None:
        embedding = (
            similarity.embed(msg.idea, state.provider) if msg.idea is not None else None
        )
        score = (
            similarity.pair_score(state.provider, state.idea, msg.idea)
            if state.idea is not None and msg.idea is not None
            else None
        )
        state.peers[msg.sender] = PeerRecord(
            aggregate=msg.aggregate,
            claim_tick=msg.claim_tick,
            idea=msg.idea,
            embedding=embedding,
            last_heard=now,
            score=score,
        )
    else:
        if msg.idea != rec.idea:
            rec.idea = msg.idea
            rec.embedding = (
                similarity.embed(msg.idea, state.provider)
                if msg.idea is not None
                else None
            )
            rec.score = (
                similarity.pair_score(state.provider, state.idea, msg.idea)
                if state.idea is not None and msg.idea is not None
                else None
            )
        rec.aggregate = msg.aggregate
        rec.claim_tick = msg.claim_tick
        rec.last_heard = now
    if (
        state.founded
        and state.aggregate != 0
        and msg.aggregate == state.aggregate
        and (msg.claim_tick, msg.sender) < (state.claim_tick, state.id)
    ):
        state._conflict_hint = True


def decide(state: TileState, markers: MarkerTable, now: Tick) -> AggregateAction:
    """Pick the aggregate action for a tile holding an idea.

    Settled tiles are damped: they move only for a strictly better score
    (by the hysteresis margin) in another aggregate, and never give up
    their marker just because the neighborhood went quiet.
    """
    assert state.embedding is not None and state.idea is not None
    assert state.phase in (Phase.HAS_IDEA, Phase.UNASSIGNED, Phase.SETTLED)
    fresh = state._fresh_peers(now)
    best = similarity.select_best(
        (
            (tid, rec.aggregate, rec.score)
            for tid, rec in fresh
            if rec.score is not None
        ),
        state.config.threshold,
    )

    if state.phase is Phase.SETTLED:
        k = state.aggregate
        if best is None or best.aggregate == k:
            return Stay()
        current = max(
            (rec.score for _, rec in fresh if rec.aggregate == k and rec.score is not None),
            default=0.0,
        )
        if best.score <= current + state.config.hysteresis:
            return Stay()
        if best.aggregate != 0:
            return Join(aggregate=best.aggregate, peer=best.tile, score=best.score)
        # Best peer has no aggregate yet; it will match us on its own next
        # window, so founding a second marker for the pair helps nobody.
        return Stay()

    if best is not None and best.aggregate != 0:
        return Join(aggregate=best.aggregate, peer=best.tile, score=best.score)
    occupied = {rec.aggregate for _, rec in fresh if rec.aggregate != 0}
    for marker in range(1, markers.count + 1):
        if marker not in occupied:
            return Claim(marker=marker)
    return Unassigned()


def on_tick(
    state: TileState, markers: MarkerTable, now: Tick
) -> tuple[list[str], MotionCommand, AggregateAction | None]:
    """Advance one tick: conflict back-off, periodic re-decision, beacons.

    Returns (wire strings to broadcast, motion command, the action applied
    this tick or None).  Aggregate changes broadcast immediately; otherwise
    beacons go out every beacon period.
    """
    cfg = state.config
    applied: AggregateAction | None = None
    changed = False

    # Lexicographic claim-conflict back-off: smallest (claim_tick, id) wins.
    # Joiners never back off; they adopted an existing claim, they do not
    # hold one.
    if state._conflict_hint:
        state._conflict_hint = False
        if state.founded and state.aggregate != 0:
            rival = _earliest_rival(state, now)
            if rival is not None:
                applied = Backoff(marker=state.aggregate, winner=rival)
                state._clear_assignment(Phase.HAS_IDEA)
                changed = True

    window = now % cfg.reeval_ticks == 0
    if (
        window
        and applied is None
        and state.embedding is not None
        and state.phase in (Phase.HAS_IDEA, Phase.UNASSIGNED, Phase.SETTLED)
    ):
        action = decide(state, markers, now)
        if isinstance(action, Join) and action.aggregate != state.aggregate:
            state.aggregate = action.aggregate
            state.claim_tick = now
            state.founded = False
            state.color = color_for_aggregate(action.aggregate)
            state.phase = Phase.NAVIGATING
            applied, changed = action, True
        elif isinstance(action, Claim):
            fresh = state._fresh_peers(now)
            used = {
                color_for_aggregate(rec.aggregate)
                for _, rec in fresh
                if rec.aggregate not in (0, action.marker)
            }
            state.aggregate = action.marker
            state.claim_tick = now
            state.founded = True
            state.color = assign_color(action.marker, used)
            state.phase = Phase.NAVIGATING
            applied, changed = action, True
        elif isinstance(action, Unassigned) and (
            state.aggregate != 0 or state.phase is not Phase.UNASSIGNED
        ):
            state._clear_assignment(Phase.UNASSIGNED)
            applied, changed = action, True

    # Drop long-silent peers; reads already filter by freshness, this is
    # memory hygiene on the same horizon.
    if now % cfg.beacon_ticks == 0:
        horizon = now - cfg.stale_ticks
        stale = [tid for tid, rec in state.peers.items() if rec.last_heard < horizon]
        for tid in stale:
            del state.peers[tid]

    wires: list[str] = []
    if changed or now % cfg.beacon_ticks == 0:
        wires.append(encode_message(state._beacon()))

    if state.phase is Phase.NAVIGATING:
        motion: MotionCommand = GoTo(*markers.position(state.aggregate))
    else:
        motion = STOP
    return wires, motion, applied


def _earliest_rival(state: TileState, now: Tick) -> TileId | None:
    mine = (state.claim_tick, state.id)
    best: tuple[Tick, TileId] | None = None
    for tid, rec in state._fresh_peers(now):
        if rec.aggregate != state.aggregate or rec.claim_tick is None:
            continue
        key = (rec.claim_tick, tid)
        if key < mine and (best is None or key < best):
            best = key
    return None if best is None else best[1]


def on_arrival(state: TileState, now: Tick) -> None:
    """Harness callback when a navigating tile reaches its marker."""
    assert state.phase is Phase.NAVIGATING and state.aggregate != 0
    state.phase = Phase.SETTLED
