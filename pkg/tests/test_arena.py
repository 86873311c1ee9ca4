import math

import pytest

from tileswarm.arena import (
    STOP,
    ArenaConfig,
    GoTo,
    MarkerError,
    MarkerTable,
    Pose,
    ProximityReading,
    SlotRegistry,
    arrived,
    hex_slot,
    plan_step,
    step_physics,
    wrap_angle,
)

CFG = ArenaConfig()


class TestPlanStep:
    def test_stop(self):
        assert plan_step(Pose(1, 1, 0.0), STOP, None, CFG) == (0.0, 0.0)

    def test_target_ahead_drives_straight(self):
        linear, omega = plan_step(Pose(1, 1, 0.0), GoTo(3, 1), None, CFG)
        assert linear == CFG.speed
        assert omega == 0.0

    def test_turns_in_place_when_misaligned(self):
        linear, omega = plan_step(Pose(1, 1, 0.0), GoTo(1, 3), None, CFG)
        assert linear == 0.0
        assert omega == CFG.omega_max  # target at +90 degrees

    def test_small_error_drives_while_correcting(self):
        pose = Pose(1, 1, math.radians(10.0))
        linear, omega = plan_step(pose, GoTo(3, 1), None, CFG)
        assert linear == CFG.speed
        assert omega == pytest.approx(-math.radians(10.0) / CFG.dt)

    def test_obstacle_in_cone_rotates_away(self):
        # Geometry oracle: +10 degrees bearing, 0.1 m, inside the +/-45
        # degree cone and the 0.15 m trigger, so rotate negative at full rate.
        reading = ProximityReading(bearing=math.radians(10.0), distance=0.1)
        linear, omega = plan_step(Pose(1, 1, 0.0), GoTo(3, 1), reading, CFG)
        assert (linear, omega) == (0.0, -CFG.omega_max)

    def test_obstacle_left_side_rotates_right(self):
        reading = ProximityReading(bearing=math.radians(-30.0), distance=0.1)
        linear, omega = plan_step(Pose(1, 1, 0.0), GoTo(3, 1), reading, CFG)
        assert (linear, omega) == (0.0, CFG.omega_max)

    def test_obstacle_outside_cone_ignored(self):
        reading = ProximityReading(bearing=math.radians(60.0), distance=0.1)
        linear, _ = plan_step(Pose(1, 1, 0.0), GoTo(3, 1), reading, CFG)
        assert linear == CFG.speed

    def test_obstacle_beyond_trigger_ignored(self):
        reading = ProximityReading(bearing=0.0, distance=0.2)
        linear, _ = plan_step(Pose(1, 1, 0.0), GoTo(3, 1), reading, CFG)
        assert linear == CFG.speed


class TestStepPhysics:
    def test_lone_tile_euler_step(self):
        poses = {1: Pose(1.0, 1.0, 0.0)}
        new, _ = step_physics(poses, {1: (0.1, 0.0)}, CFG)
        assert new[1].x == pytest.approx(1.01)
        assert new[1].y == pytest.approx(1.0)

    def test_rotation_applies_before_translation(self):
        poses = {1: Pose(1.0, 1.0, 0.0)}
        omega = math.pi / 2 / CFG.dt  # quarter turn this tick
        new, _ = step_physics(poses, {1: (0.1, omega)}, CFG)
        assert new[1].heading == pytest.approx(math.pi / 2)
        assert new[1].x == pytest.approx(1.0)
        assert new[1].y == pytest.approx(1.01)

    def test_wall_clamp(self):
        poses = {1: Pose(0.06, 1.0, math.pi)}
        new, _ = step_physics(poses, {1: (0.1, 0.0)}, CFG)
        assert new[1].x == CFG.footprint / 2

    def test_head_on_movers_both_stop(self):
        poses = {
            1: Pose(1.00, 1.0, 0.0),
            2: Pose(1.09, 1.0, math.pi),
        }
        vel = {1: (0.1, 0.0), 2: (0.1, 0.0)}
        new, _ = step_physics(poses, vel, CFG)
        assert (new[1].x, new[1].y) == (1.00, 1.0)
        assert (new[2].x, new[2].y) == (1.09, 1.0)

    def test_proximity_reports_nearest_in_cone(self):
        poses = {
            1: Pose(1.0, 1.0, 0.0),
            2: Pose(1.2, 1.0, 0.0),  # dead ahead at 0.2
            3: Pose(1.1, 1.0, 0.0),  # dead ahead at 0.1
        }
        _, readings = step_physics(poses, {}, CFG)
        assert readings[1].distance == pytest.approx(0.1)
        assert readings[1].bearing == pytest.approx(0.0)

    def test_proximity_ignores_behind(self):
        poses = {1: Pose(1.0, 1.0, 0.0), 2: Pose(0.9, 1.0, 0.0)}
        _, readings = step_physics(poses, {}, CFG)
        assert readings[1] is None

    def test_wall_visible_to_sensor(self):
        poses = {1: Pose(0.2, 2.0, math.pi)}  # facing the x=0 wall
        _, readings = step_physics(poses, {}, CFG)
        assert readings[1].distance == pytest.approx(0.2)


class TestArrival:
    def test_boundary(self):
        assert arrived(Pose(1.49, 1.0, 0.0), (1.0, 1.0), radius=0.5)
        assert not arrived(Pose(1.51, 1.0, 0.0), (1.0, 1.0), radius=0.5)


class TestHexSlots:
    def test_first_ring(self):
        x, y = hex_slot((2.0, 2.0), 0, 0.15)
        assert (x, y) == pytest.approx((2.15, 2.0))
        x, y = hex_slot((2.0, 2.0), 1, 0.15)
        assert (x, y) == pytest.approx(
            (2.0 + 0.15 * math.cos(math.pi / 3), 2.0 + 0.15 * math.sin(math.pi / 3))
        )

    def test_seventh_occupant_on_second_ring(self):
        # Ring 1 holds indices 0..5; index 6 opens ring 2 at radius 2*pitch.
        x, y = hex_slot((2.0, 2.0), 6, 0.15)
        assert math.hypot(x - 2.0, y - 2.0) == pytest.approx(0.30)

    def test_ring_sizes(self):
        # Independent count: ring k should hold 6k slots.
        radii = [
            round(math.hypot(*(c - m for c, m in zip(hex_slot((0, 0), i, 1.0), (0, 0)))), 9)
            for i in range(3 * 3 * 4)
        ]
        assert radii.count(1.0) == 6
        assert radii.count(2.0) == 12
        assert radii.count(3.0) == 18

    def test_slots_distinct(self):
        seen = {hex_slot((0.0, 0.0), i, 0.15) for i in range(40)}
        assert len(seen) == 40


class TestSlotRegistry:
    def test_park_release_cycle(self):
        reg = SlotRegistry(pitch=0.15)
        marker = (2.0, 2.0)
        idx1, _ = reg.park(10, 1, marker)
        idx2, _ = reg.park(11, 1, marker)
        assert (idx1, idx2) == (0, 1)
        reg.release(10)
        idx3, _ = reg.park(12, 1, marker)
        assert idx3 == 0
        assert reg.occupancy(1) == 2

    def test_seventh_parker_hits_second_ring(self):
        reg = SlotRegistry(pitch=0.15)
        marker = (2.0, 2.0)
        for tid in range(1, 7):
            reg.park(tid, 1, marker)
        idx, (x, y) = reg.park(7, 1, marker)
        assert idx == 6
        assert math.hypot(x - 2.0, y - 2.0) == pytest.approx(0.30)


class TestMarkerTable:
    def test_ids_must_be_dense_from_one(self):
        with pytest.raises(MarkerError):
            MarkerTable({2: (1.0, 1.0)})

    def test_spacing_validation(self):
        table = MarkerTable({1: (1.0, 1.0), 2: (1.4, 1.0)})
        with pytest.raises(MarkerError):
            table.validate_spacing(1.0)
        table.validate_spacing(0.3)


def test_wrap_angle_range():
    for theta in [-7.0, -math.pi, 0.0, math.pi, 9.42]:
        w = wrap_angle(theta)
        assert -math.pi <= w < math.pi
