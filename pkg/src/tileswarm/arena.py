"""2D world model: marker coordinates, kinematics, proximity sensing,
arrival detection, and hex parking slots around markers.

Tiles are 0.1 m squares moving at a fixed linear speed.  Obstacle handling
is a single reactive rule driven by a simulated front proximity sensor:
when something sits inside the frontal cone, rotate away until the cone
clears.  There is no path planner and no physics solver; overlap is
prevented by refusing the move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import AggregateId, TileId


def wrap_angle(theta: float) -> float:
    """Wrap to [-pi, pi)."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped < 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0  # radians, [-pi, pi)


@dataclass(frozen=True)
class GoTo:
    x: float
    y: float


@dataclass(frozen=True)
class Stop:
    pass


MotionCommand = GoTo | Stop

STOP = Stop()


@dataclass(frozen=True)
class ProximityReading:
    bearing: float  # relative to heading, [-pi, pi)
    distance: float


@dataclass(frozen=True)
class ArenaConfig:
    width: float = 6.0
    height: float = 4.0
    dt: float = 0.1  # seconds per tick
    speed: float = 0.1  # m/s while driving
    omega_max: float = math.pi  # rad/s
    heading_gate: float = math.radians(15.0)  # drive only when aligned this well
    avoid_distance: float = 0.15  # obstacle trigger range
    avoid_half_angle: float = math.radians(45.0)  # rotate-away trigger cone
    sensor_half_angle: float = math.radians(100.0)  # sensor's own field of view
    sensor_range: float = 0.3
    footprint: float = 0.1  # tile side; also minimum center separation
    arrival_radius: float = 0.5
    slot_pitch: float = 0.22  # hex parking ring spacing; > avoid_distance


class MarkerError(ValueError):
    pass


@dataclass(frozen=True)
class MarkerTable:
    """Rendezvous marker ids 1..count mapped to arena coordinates."""

    entries: dict[AggregateId, tuple[float, float]]

    def __post_init__(self) -> None:
        ids = sorted(self.entries)
        if not ids:
            raise MarkerError("at least one marker required")
        if ids != list(range(1, len(ids) + 1)):
            raise MarkerError(f"marker ids must be 1..{len(ids)}, got {ids}")

    @property
    def count(self) -> int:
        return len(self.entries)

    def position(self, marker: AggregateId) -> tuple[float, float]:
        return self.entries[marker]

    def validate_spacing(self, min_separation: float) -> None:
        ids = sorted(self.entries)
        for i, a in enumerate(ids):
            for b in ids[i + 1 :]:
                ax, ay = self.entries[a]
                bx, by = self.entries[b]
                if math.hypot(ax - bx, ay - by) < min_separation:
                    raise MarkerError(
                        f"markers {a} and {b} closer than {min_separation} m"
                    )


def plan_step(
    pose: Pose,
    cmd: MotionCommand,
    proximity: ProximityReading | None,
    cfg: ArenaConfig,
) -> tuple[float, float]:
    """One reactive control step: (linear m/s, angular rad/s).

    Stop yields zero velocity.  GoTo turns toward the target and drives
    once the heading error is inside the gate; an obstacle inside the
    frontal cone overrides everything with a rotate-away maneuver.
    """
    if isinstance(cmd, Stop):
        return 0.0, 0.0
    blocked = proximity is not None and proximity.distance <= cfg.avoid_distance
    if blocked and abs(proximity.bearing) <= cfg.avoid_half_angle:
        # Rotate away from the obstacle's side; obstacle dead ahead turns
        # clockwise so head-on pairs swerve the same way and pass.
        omega = -cfg.omega_max if proximity.bearing >= 0.0 else cfg.omega_max
        return 0.0, omega
    error = wrap_angle(math.atan2(cmd.y - pose.y, cmd.x - pose.x) - pose.heading)
    omega = max(-cfg.omega_max, min(cfg.omega_max, error / cfg.dt))
    linear = cfg.speed if abs(error) < cfg.heading_gate else 0.0
    if blocked:
        # Obstacle just cleared the cone.  Turning back toward it would
        # re-trigger the rotation and livelock against anything parked
        # between tile and target, so hold course and slide past instead.
        if omega * proximity.bearing > 0.0:
            omega = 0.0
        linear = cfg.speed
    return linear, omega


def _sense_all(
    order: list[TileId],
    xs: np.ndarray,
    ys: np.ndarray,
    headings: np.ndarray,
    cfg: ArenaConfig,
) -> dict[TileId, ProximityReading | None]:
    """Frontal-cone proximity for every tile at once.

    Candidates are the other tiles' centers plus the perpendicular foot of
    each wall, treated as point obstacles.
    """
    n = len(order)
    # candidate offsets: columns 0..n-1 are tiles, n..n+3 the four walls
    dx = np.empty((n, n + 4))
    dy = np.empty((n, n + 4))
    dx[:, :n] = xs[None, :] - xs[:, None]
    dy[:, :n] = ys[None, :] - ys[:, None]
    dx[:, n] = -xs
    dy[:, n] = 0.0
    dx[:, n + 1] = cfg.width - xs
    dy[:, n + 1] = 0.0
    dx[:, n + 2] = 0.0
    dy[:, n + 2] = -ys
    dx[:, n + 3] = 0.0
    dy[:, n + 3] = cfg.height - ys

    dist = np.hypot(dx, dy)
    if n:
        np.fill_diagonal(dist[:, :n], np.inf)
    bearing = np.arctan2(dy, dx) - headings[:, None]
    bearing = np.mod(bearing + math.pi, 2.0 * math.pi) - math.pi
    visible = (
        (dist <= cfg.sensor_range)
        & (dist > 0.0)
        & (np.abs(bearing) <= cfg.sensor_half_angle)
    )
    masked = np.where(visible, dist, np.inf)
    nearest = np.argmin(masked, axis=1)
    readings: dict[TileId, ProximityReading | None] = {}
    for i, tid in enumerate(order):
        j = nearest[i]
        if visible[i, j]:
            readings[tid] = ProximityReading(
                bearing=float(bearing[i, j]), distance=float(dist[i, j])
            )
        else:
            readings[tid] = None
    return readings


def step_physics(
    poses: dict[TileId, Pose],
    velocities: dict[TileId, tuple[float, float]],
    cfg: ArenaConfig,
) -> tuple[dict[TileId, Pose], dict[TileId, ProximityReading | None]]:
    """Euler-integrate one tick and return new poses plus sensor readings.

    Rotation applies before translation.  Positions clamp at the walls
    (half a footprint in from the boundary).  A translation that would
    put two tile centers closer than one footprint is cancelled for the
    mover; two passes catch movers colliding with freshly reverted tiles.
    """
    half = cfg.footprint / 2.0
    new_poses: dict[TileId, Pose] = {}
    moved: list[TileId] = []
    for tid in sorted(poses):
        pose = poses[tid]
        linear, omega = velocities.get(tid, (0.0, 0.0))
        heading = wrap_angle(pose.heading + omega * cfg.dt)
        if linear:
            x = pose.x + linear * math.cos(heading) * cfg.dt
            y = pose.y + linear * math.sin(heading) * cfg.dt
            x = min(max(x, half), cfg.width - half)
            y = min(max(y, half), cfg.height - half)
            if (x, y) != (pose.x, pose.y):
                moved.append(tid)
        else:
            x, y = pose.x, pose.y
        new_poses[tid] = Pose(x=x, y=y, heading=heading)

    order = sorted(new_poses)
    index = {tid: i for i, tid in enumerate(order)}
    xs = np.array([new_poses[t].x for t in order])
    ys = np.array([new_poses[t].y for t in order])

    if moved and len(new_poses) > 1:
        for _ in range(2):
            dists = np.hypot(xs[:, None] - xs[None, :], ys[:, None] - ys[None, :])
            np.fill_diagonal(dists, np.inf)
            adjusted = False
            for tid in moved:
                i = index[tid]
                j = int(np.argmin(dists[i]))
                new_min = dists[i, j]
                if new_min >= cfg.footprint:
                    continue
                old = poses[tid]
                old_min = math.hypot(old.x - xs[j], old.y - ys[j])
                if new_min >= old_min:
                    # Opening the gap stays legal even inside the footprint;
                    # otherwise a tile overlapped by a parking teleport could
                    # never walk free again.
                    continue
                # Drop the approach component and keep the tangential one,
                # so crowds slip along each other instead of wedging solid.
                # A pure head-on approach therefore stops dead.
                heading = new_poses[tid].heading
                x, y = _slide_contact(old, (xs[i], ys[i]), (xs[j], ys[j]), cfg, half)
                if (x, y) != (old.x, old.y):
                    others = np.hypot(xs - x, ys - y)
                    others[i] = np.inf
                    slid_min = float(others.min())
                    if slid_min < cfg.footprint and slid_min < old_min:
                        x, y = old.x, old.y
                new_poses[tid] = Pose(x=x, y=y, heading=heading)
                xs[i], ys[i] = x, y
                adjusted = True
            if not adjusted:
                break

    headings = np.array([new_poses[t].heading for t in order])
    readings = _sense_all(order, xs, ys, headings, cfg)
    return new_poses, readings


def _slide_contact(
    old: Pose,
    candidate: tuple[float, float],
    obstacle: tuple[float, float],
    cfg: ArenaConfig,
    half: float,
) -> tuple[float, float]:
    """Project a blocked displacement onto the contact tangent."""
    ox, oy = obstacle
    ux, uy = ox - old.x, oy - old.y
    norm = math.hypot(ux, uy)
    if norm == 0.0:
        return old.x, old.y
    ux, uy = ux / norm, uy / norm
    dx, dy = candidate[0] - old.x, candidate[1] - old.y
    approach = dx * ux + dy * uy
    if approach > 0.0:
        dx -= approach * ux
        dy -= approach * uy
    x = min(max(old.x + dx, half), cfg.width - half)
    y = min(max(old.y + dy, half), cfg.height - half)
    return x, y


def arrived(
    pose: Pose,
    marker_position: tuple[float, float],
    occupants: int = 0,
    radius: float = 0.5,
) -> bool:
    """True once the tile is within the aggregate radius of its marker.

    The occupant count does not change the arrival test; it is threaded
    through so callers computing the parking slot have it in hand.
    """
    mx, my = marker_position
    return math.hypot(pose.x - mx, pose.y - my) <= radius


def hex_slot(
    marker_position: tuple[float, float], index: int, pitch: float
) -> tuple[float, float]:
    """Coordinates of parking slot ``index`` on the hex rings around a marker.

    Ring k (k >= 1) holds 6k slots at radius k * pitch; slot 0 is the first
    slot of ring 1, so the marker point itself stays clear.
    """
    if index < 0:
        raise ValueError("slot index must be >= 0")
    ring = 1
    while 3 * ring * (ring + 1) <= index:
        ring += 1
    within = index - 3 * ring * (ring - 1)
    angle = 2.0 * math.pi * within / (6 * ring)
    mx, my = marker_position
    return (mx + ring * pitch * math.cos(angle), my + ring * pitch * math.sin(angle))


@dataclass
class SlotRegistry:
    """Harness-side bookkeeping of which tile is parked on which slot."""

    pitch: float
    slots: dict[AggregateId, dict[int, TileId]] = field(default_factory=dict)
    by_tile: dict[TileId, tuple[AggregateId, int]] = field(default_factory=dict)

    def park(
        self, tid: TileId, aggregate: AggregateId, marker_position: tuple[float, float],
    ) -> tuple[int, tuple[float, float]]:
        """Assign the free slot nearest the marker: lowest index, since the
        index order walks the rings inside-out."""
        occupied = self.slots.setdefault(aggregate, {})
        index = 0
        while index in occupied:
            index += 1
        occupied[index] = tid
        self.by_tile[tid] = (aggregate, index)
        return index, hex_slot(marker_position, index, self.pitch)

    def release(self, tid: TileId) -> None:
        parked = self.by_tile.pop(tid, None)
        if parked is not None:
            aggregate, index = parked
            self.slots.get(aggregate, {}).pop(index, None)

    def occupancy(self, aggregate: AggregateId) -> int:
        return len(self.slots.get(aggregate, {}))
