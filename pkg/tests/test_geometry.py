import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simris.errors import DegenerateGeometry
from simris.geometry import (
    AnglePair,
    Environment,
    MountingScenario,
    Point3,
    RoomBounds,
    clip_cluster_distance,
    distance,
    ris_arrival_angles,
    ris_departure_angles_to_rx,
    ris_local_point,
    scatterer_position,
)

SW, OW = MountingScenario.SIDE_WALL, MountingScenario.OPPOSITE_WALL
angle = st.floats(-1.4, 1.4)


def test_distance_basic():
    assert distance(Point3(0, 0, 0), Point3(3, 4, 12)) == pytest.approx(13.0)
    d = distance(np.zeros((4, 3)), np.ones(3))
    assert d.shape == (4,) and np.allclose(d, np.sqrt(3))


def test_scatterer_along_broadside():
    p = scatterer_position(Point3(0, 25, 2), 10.0, AnglePair(0.0, 0.0))
    assert np.allclose(p, [10, 25, 2])
    # positive azimuth turns toward -y
    p = scatterer_position(Point3(0, 25, 2), 10.0, AnglePair(np.pi / 2, 0.0))
    assert np.allclose(p, [0, 15, 2], atol=1e-12)
    p = scatterer_position(Point3(0, 0, 0), 2.0, AnglePair(0.0, np.pi / 2))
    assert np.allclose(p, [0, 0, 2], atol=1e-12)


def test_side_wall_angles_hand_values():
    ris = Point3(40, 50, 2)
    a = ris_departure_angles_to_rx(ris, Point3(38, 48, 1), SW)
    assert a.azimuth == pytest.approx(np.pi / 4)
    assert a.elevation == pytest.approx(-np.arcsin(1 / 3))
    a = ris_arrival_angles(ris, Point3(40, 40, 2), SW)
    assert a.azimuth == 0 and a.elevation == 0


def test_opposite_wall_angles_hand_values():
    ris = Point3(75, 25, 2)
    a = ris_departure_angles_to_rx(ris, Point3(70, 30, 2), OW)
    assert a.azimuth == pytest.approx(np.pi / 4)
    a = ris_departure_angles_to_rx(ris, Point3(70, 20, 2), OW)
    assert a.azimuth == pytest.approx(-np.pi / 4)


def test_coincident_point_raises():
    with pytest.raises(DegenerateGeometry):
        ris_arrival_angles(Point3(1, 2, 3), Point3(1, 2, 3), SW)


@settings(max_examples=200, deadline=None)
@given(phi=angle, theta=angle, dist=st.floats(1.0, 100.0), scen=st.sampled_from([SW, OW]))
def test_local_point_round_trip(phi, theta, dist, scen):
    ris = Point3(40, 50, 2)
    p = ris_local_point(ris, dist, AnglePair(phi, theta), scen)
    assert distance(p, ris) == pytest.approx(dist, rel=1e-9)
    back = ris_arrival_angles(ris, p, scen)
    assert back.azimuth == pytest.approx(phi, abs=1e-9)
    assert back.elevation == pytest.approx(theta, abs=1e-9)


def test_angle_ranges_property():
    rng = np.random.default_rng(0)
    pts = rng.uniform([0, 0, 0], [75, 49, 3.5], size=(500, 3))
    for scen in (SW, OW):
        a = ris_arrival_angles(Point3(40, 50, 2), pts, scen)
        assert np.all(np.abs(a.azimuth) <= np.pi / 2) and np.all(np.abs(a.elevation) <= np.pi / 2)


def test_clip_inside_room_unchanged():
    a = clip_cluster_distance(Point3(0, 25, 2), AnglePair(0.0, 0.0), 10.0, RoomBounds(), Environment.INDOOR)
    assert a == pytest.approx(10.0)


def test_clip_shortens_to_ceiling():
    # straight up from z=2 in a 3.5 m room: 1.5 m left
    a = clip_cluster_distance(Point3(0, 25, 2), AnglePair(0.0, np.pi / 2), 10.0, RoomBounds(), "InH")
    assert a == pytest.approx(1.5)


def test_clip_discards_below_one_meter():
    a = clip_cluster_distance(Point3(0, 25, 3), AnglePair(0.0, np.pi / 2), 10.0, RoomBounds(), "InH")
    assert np.isnan(a)


def test_clip_outdoor_only_ground():
    a = clip_cluster_distance(Point3(0, 25, 20), AnglePair(0.0, 0.0), 500.0, RoomBounds(), "UMi")
    assert a == pytest.approx(500.0)
    a = clip_cluster_distance(Point3(0, 25, 20), AnglePair(0.0, -np.pi / 6), 500.0, RoomBounds(), "UMi")
    assert a == pytest.approx(40.0)


@settings(max_examples=200, deadline=None)
@given(phi=angle, theta=angle, a=st.floats(1.0, 90.0))
def test_clipped_scatterers_stay_in_room(phi, theta, a):
    tx = Point3(0, 25, 2)
    out = clip_cluster_distance(tx, AnglePair(phi, theta), a, RoomBounds(), "InH")
    if not np.isnan(out):
        assert 1.0 <= out <= a + 1e-12
        assert RoomBounds().contains(scatterer_position(tx, out, AnglePair(phi, theta)))


def test_enum_parse():
    assert MountingScenario.parse("sidewall") is SW
    assert Environment.parse("UMi") is Environment.OUTDOOR
    with pytest.raises(ValueError):
        Environment.parse("space")
