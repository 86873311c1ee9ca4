"""tileswarm: a deterministic simulator of an idea-clustering tile swarm.

Touchscreen "tile" agents collect free-text ideas, compare them by hashed
trigram embeddings over a broadcast-only ad-hoc network, and physically
aggregate at rendezvous markers in a 2D arena.  The harness runs scenarios
deterministically and logs every event for replay; the gateway serves live
snapshots and an event stream to the board UI.
"""

from .core import (
    BroadcastMessage,
    Color,
    PALETTE,
    decode_message,
    encode_message,
    validate_idea,
)
from .similarity import TrigramProvider, best_match, cosine_similarity, embed, get_provider

__version__ = "0.1.0"

__all__ = [
    "BroadcastMessage",
    "Color",
    "PALETTE",
    "TrigramProvider",
    "best_match",
    "cosine_similarity",
    "decode_message",
    "embed",
    "encode_message",
    "get_provider",
    "validate_idea",
    "__version__",
]
