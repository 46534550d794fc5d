"""Deterministic 3D geometry: distances, scatterer placement and RIS angles.

Coordinates are in meters. The Tx broadside points along +x. An RIS mounted
on a side wall lies in the xz plane and radiates toward -y; an RIS on the
opposite wall lies in the yz plane and radiates toward -x. All angles are in
radians.

Functions accept single points of shape ``(3,)`` or stacks of shape
``(..., 3)`` and broadcast accordingly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateGeometry

__all__ = [
    "Point3",
    "MountingScenario",
    "Environment",
    "RoomBounds",
    "AnglePair",
    "distance",
    "scatterer_position",
    "ris_arrival_angles",
    "ris_departure_angles_to_rx",
    "ris_local_point",
    "clip_cluster_distance",
]


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class MountingScenario(enum.Enum):
    SIDE_WALL = "SideWall"  # RIS in the xz plane
    OPPOSITE_WALL = "OppositeWall"  # RIS in the yz plane

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if str(value).lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown mounting scenario {value!r}")


class Environment(enum.Enum):
    INDOOR = "InH"
    OUTDOOR = "UMi"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if str(value).lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown environment {value!r}")


@dataclass(frozen=True)
class RoomBounds:
    """Axis-aligned room ``[0, x_max] x [0, y_max] x [0, z_max]``.

    Outdoors only the ground plane ``z = 0`` is enforced.
    """

    x_max: float = 75.0
    y_max: float = 50.0
    z_max: float = 3.5

    def __post_init__(self):
        if min(self.x_max, self.y_max, self.z_max) <= 0:
            raise ValueError("room bounds must be strictly positive")

    def contains(self, p, tol=1e-9):
        p = np.asarray(p, dtype=float)
        upper = np.array([self.x_max, self.y_max, self.z_max])
        return np.all((p >= -tol) & (p <= upper + tol), axis=-1)


class AnglePair(NamedTuple):
    azimuth: np.ndarray | float
    elevation: np.ndarray | float


def _sgn(x):
    # sgn(0) := +1
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def distance(p, q):
    """Euclidean distance between ``p`` and ``q``."""
    d = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    return np.sqrt(np.sum(d * d, axis=-1))


def scatterer_position(tx, a_c, angles):
    """Place a scatterer ``a_c`` meters from ``tx`` along the departure angles."""
    tx = np.asarray(tx, dtype=float)
    phi, theta = np.asarray(angles[0], float), np.asarray(angles[1], float)
    a_c = np.asarray(a_c, dtype=float)
    x = tx[..., 0] + a_c * np.cos(theta) * np.cos(phi)
    y = tx[..., 1] - a_c * np.cos(theta) * np.sin(phi)
    z = tx[..., 2] + a_c * np.sin(theta)
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def _ris_angles(ris, p, scenario):
    ris = np.asarray(ris, dtype=float)
    p = np.asarray(p, dtype=float)
    diff = p - ris
    b = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.any(b == 0):
        raise DegenerateGeometry("point coincides with the RIS reference element")
    dx, dy, dz = diff[..., 0], diff[..., 1], diff[..., 2]
    if scenario is MountingScenario.SIDE_WALL:
        # sgn(x_RIS - x_p) for both the scatterer and the Rx direction
        phi = _sgn(-dx) * np.arctan2(np.abs(dx), np.abs(dy))
    else:
        phi = _sgn(dy) * np.arctan2(np.abs(dy), np.abs(dx))
    theta = _sgn(dz) * np.arcsin(np.clip(np.abs(dz) / b, 0.0, 1.0))
    return AnglePair(phi, theta)


def ris_arrival_angles(ris, scat, scenario):
    """Arrival angles at the RIS from scatterer(s) ``scat``, w.r.t. RIS broadside.

    Raises
    ------
    DegenerateGeometry
        If a scatterer lies exactly at the RIS reference element.
    """
    scenario = MountingScenario.parse(scenario)
    return _ris_angles(ris, scat, scenario)


def ris_departure_angles_to_rx(ris, rx, scenario):
    """Departure angles from the RIS toward the Rx (same sign conventions)."""
    scenario = MountingScenario.parse(scenario)
    return _ris_angles(ris, rx, scenario)


def ris_local_point(ris, dist, angles, scenario):
    """Inverse of :func:`ris_arrival_angles` for points in front of the RIS."""
    scenario = MountingScenario.parse(scenario)
    ris = np.asarray(ris, dtype=float)
    phi, theta = np.asarray(angles[0], float), np.asarray(angles[1], float)
    dist = np.asarray(dist, dtype=float)
    horiz = dist * np.cos(theta)
    if scenario is MountingScenario.SIDE_WALL:
        x = ris[..., 0] - horiz * np.sin(phi)
        y = ris[..., 1] - horiz * np.cos(phi)
    else:
        x = ris[..., 0] - horiz * np.cos(phi)
        y = ris[..., 1] + horiz * np.sin(phi)
    z = ris[..., 2] + dist * np.sin(theta)
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def _direction(angles):
    phi, theta = np.asarray(angles[0], float), np.asarray(angles[1], float)
    return np.stack(
        np.broadcast_arrays(np.cos(theta) * np.cos(phi), -np.cos(theta) * np.sin(phi), np.sin(theta)),
        axis=-1,
    )


def _exit_distance(origin, u, lo, hi):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_hi = np.where(u > 0, (hi - origin) / u, np.inf)
        t_lo = np.where(u < 0, (lo - origin) / u, np.inf)
    t = np.minimum(t_hi, t_lo)
    return np.maximum(np.min(t, axis=-1), 0.0)


def clip_cluster_distance(origin, angles, a_c, bounds, env, min_distance=1.0, direction=None):
    """Shorten ``a_c`` so the scatterer stays inside the environment.

    Indoors the full room box is enforced, outdoors only ``z >= 0``. The
    result is ``nan`` wherever no distance of at least ``min_distance``
    keeps the point inside (the sub-ray is discarded).

    ``direction`` overrides the unit vectors implied by ``angles`` (used for
    rays leaving the RIS rather than the Tx).
    """
    env = Environment.parse(env)
    origin = np.asarray(origin, dtype=float)
    u = _direction(angles) if direction is None else np.asarray(direction, dtype=float)
    a_c = np.asarray(a_c, dtype=float)
    if env is Environment.INDOOR:
        lo = np.zeros(3)
        hi = np.array([bounds.x_max, bounds.y_max, bounds.z_max])
    else:
        lo = np.array([-np.inf, -np.inf, 0.0])
        hi = np.array([np.inf, np.inf, np.inf])
    t_max = _exit_distance(origin, u, lo, hi)
    a = np.minimum(a_c, t_max)
    out = np.where(a >= min_distance, a, np.nan)
    return float(out) if out.ndim == 0 else out
