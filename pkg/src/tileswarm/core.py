"""Domain types shared by every module, plus the wire codec for broadcasts.

The codec grammar is the only thing tiles ever exchange:

    <sender>|<aggregate>|<claim_tick or empty>|<escaped idea or empty>

Backslash escapes ``\\`` and ``\\|`` inside the idea field.  Everything in
this module is a plain value or a pure function and safe to share across
threads.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from enum import Enum

# Aliases used across the package.  TileId >= 1; AggregateId 0 means
# "unassigned", values 1..marker_count name the aggregate anchored at that
# marker.
TileId = int
AggregateId = int
Tick = int

MAX_IDEA_CHARS = 280


class IdeaError(ValueError):
    """Raised when raw idea text cannot be normalized."""


class EmptyIdea(IdeaError):
    pass


class TooLong(IdeaError):
    pass


class InvariantViolation(ValueError):
    """A structurally valid value that breaks a domain invariant."""


class DecodeError(ValueError):
    """Raised when a wire string is not in the codec's image."""


class MalformedFieldCount(DecodeError):
    pass


class NonNumericField(DecodeError):
    pass


class BadEscape(DecodeError):
    pass


class Color(str, Enum):
    WHITE = "white"
    RED = "red"
    ORANGE = "orange"
    YELLOW = "yellow"
    GREEN = "green"
    CYAN = "cyan"
    BLUE = "blue"
    PURPLE = "purple"
    MAGENTA = "magenta"


# Fixed assignment order for aggregate colors.  WHITE is reserved for
# unassigned tiles and is not part of the palette.
PALETTE: tuple[Color, ...] = (
    Color.RED,
    Color.ORANGE,
    Color.YELLOW,
    Color.GREEN,
    Color.CYAN,
    Color.BLUE,
    Color.PURPLE,
    Color.MAGENTA,
)

_CANONICAL_INT = re.compile(r"^(0|[1-9][0-9]*)$")


def validate_idea(raw: str) -> str:
    """Normalize raw user text into idea text.

    Strips control characters, trims surrounding whitespace, and enforces
    the 1..280 character budget.  Raises EmptyIdea or TooLong.
    """
    cleaned = "".join(ch for ch in raw if unicodedata.category(ch) != "Cc")
    cleaned = cleaned.strip()
    if not cleaned:
        raise EmptyIdea("idea is empty after normalization")
    if len(cleaned) > MAX_IDEA_CHARS:
        raise TooLong(f"idea is {len(cleaned)} chars, cap is {MAX_IDEA_CHARS}")
    return cleaned


_NORMALIZED_CACHE: dict[str, bool] = {}


def _is_normalized_idea(text: str) -> bool:
    # Hot path: every message construction re-checks its idea text, and the
    # same few hundred texts repeat across beacons.
    cached = _NORMALIZED_CACHE.get(text)
    if cached is None:
        try:
            cached = validate_idea(text) == text
        except IdeaError:
            cached = False
        if len(_NORMALIZED_CACHE) > 100_000:
            _NORMALIZED_CACHE.clear()
        _NORMALIZED_CACHE[text] = cached
    return cached


@dataclass(frozen=True)
class BroadcastMessage:
    """The only inter-tile information channel.

    A tile with no idea yet broadcasts a presence beacon: idea absent,
    aggregate 0.  claim_tick is the tick at which the sender acquired its
    current aggregate and is present exactly when aggregate != 0.
    """

    sender: TileId
    aggregate: AggregateId
    claim_tick: Tick | None = None
    idea: str | None = None

    def __post_init__(self) -> None:
        if self.sender < 1:
            raise InvariantViolation(f"sender must be >= 1, got {self.sender}")
        if self.aggregate < 0:
            raise InvariantViolation("aggregate must be >= 0")
        if self.aggregate != 0 and self.claim_tick is None:
            raise InvariantViolation("aggregate != 0 requires claim_tick")
        if self.aggregate == 0 and self.claim_tick is not None:
            raise InvariantViolation("aggregate 0 must not carry claim_tick")
        if self.claim_tick is not None and self.claim_tick < 0:
            raise InvariantViolation("claim_tick must be >= 0")
        if self.idea is None:
            if self.aggregate != 0:
                raise InvariantViolation("a tile without an idea cannot be in an aggregate")
        elif not _is_normalized_idea(self.idea):
            raise InvariantViolation("idea text is not normalized idea text")


def _escape_idea(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|")


def encode_message(msg: BroadcastMessage) -> str:
    """Encode a valid message into its wire string."""
    claim = "" if msg.claim_tick is None else str(msg.claim_tick)
    idea = "" if msg.idea is None else _escape_idea(msg.idea)
    return f"{msg.sender}|{msg.aggregate}|{claim}|{idea}"


def _split_wire(wire: str) -> list[str]:
    fields: list[str] = []
    buf: list[str] = []
    escaped = False
    for ch in wire:
        if escaped:
            if ch not in ("\\", "|"):
                raise BadEscape(f"invalid escape sequence \\{ch}")
            buf.append(ch)
            escaped = False
        elif ch == "\\":
            escaped = True
        elif ch == "|":
            fields.append("".join(buf))
            buf.clear()
        else:
            buf.append(ch)
    if escaped:
        raise BadEscape("dangling escape at end of message")
    fields.append("".join(buf))
    return fields


def _parse_int(field: str, name: str) -> int:
    if not _CANONICAL_INT.match(field):
        raise NonNumericField(f"{name} field is not a canonical integer: {field!r}")
    return int(field)


def decode_message(wire: str) -> BroadcastMessage:
    """Parse a wire string, rejecting anything encode could not have produced."""
    fields = _split_wire(wire)
    if len(fields) != 4:
        raise MalformedFieldCount(f"expected 4 fields, got {len(fields)}")
    sender = _parse_int(fields[0], "sender")
    aggregate = _parse_int(fields[1], "aggregate")
    claim_tick = None if fields[2] == "" else _parse_int(fields[2], "claim_tick")
    idea = fields[3] if fields[3] else None
    return BroadcastMessage(sender=sender, aggregate=aggregate, claim_tick=claim_tick, idea=idea)
