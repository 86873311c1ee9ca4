"""Live-mode service boundary: snapshots, idea submission, event stream."""

from .live import GatewayError, InvalidSince, LiveRunner, NoIdleTile, UnknownTile
from .server import make_server, serve

__all__ = [
    "GatewayError",
    "InvalidSince",
    "LiveRunner",
    "NoIdleTile",
    "UnknownTile",
    "make_server",
    "serve",
]
