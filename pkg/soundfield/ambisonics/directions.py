"""
Directions on the unit sphere.

Convention: azimuth 0 / elevation 0 points along +X, azimuth grows counterclockwise
towards +Y, elevation grows towards +Z. Angles are radians everywhere except in
`from_degrees` / `to_degrees`.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import GeometryError

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# Elevations this far beyond the pole are rounding noise and get clamped
_POLE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Direction:
    azimuth: float
    elevation: float

    def __post_init__(self):
        az = float(self.azimuth)
        el = float(self.elevation)
        if not (math.isfinite(az) and math.isfinite(el)):
            raise GeometryError(f"Direction angles must be finite, got ({az}, {el})")
        if abs(el) > HALF_PI + _POLE_TOLERANCE:
            raise GeometryError(f"Elevation {el} rad is outside [-pi/2, pi/2]")
        el = max(-HALF_PI, min(HALF_PI, el))
        az = az % TWO_PI
        if az >= TWO_PI:
            # -tiny % 2pi rounds up to 2pi
            az = 0.0
        object.__setattr__(self, 'azimuth', az)
        object.__setattr__(self, 'elevation', el)

    @classmethod
    def from_degrees(cls, azimuth_deg, elevation_deg):
        return cls(math.radians(azimuth_deg), math.radians(elevation_deg))

    @classmethod
    def from_vector(cls, vector):
        x, y, z = (float(v) for v in vector)
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0 or not math.isfinite(norm):
            raise GeometryError("Cannot take the direction of a zero or non-finite vector")
        return cls(math.atan2(y, x), math.atan2(z, math.hypot(x, y)))

    def to_degrees(self):
        return math.degrees(self.azimuth), math.degrees(self.elevation)

    def unit_vector(self):
        cos_el = math.cos(self.elevation)
        return np.array([
            cos_el * math.cos(self.azimuth),
            cos_el * math.sin(self.azimuth),
            math.sin(self.elevation),
        ])

    def to_dict(self):
        az_deg, el_deg = self.to_degrees()
        return {'azimuth_deg': az_deg, 'elevation_deg': el_deg}

    @classmethod
    def from_dict(cls, data):
        return cls.from_degrees(data['azimuth_deg'], data['elevation_deg'])


def directions_to_vectors(directions):
    """(n, 3) array of unit vectors for a sequence of directions."""
    az = np.array([d.azimuth for d in directions], dtype=float)
    el = np.array([d.elevation for d in directions], dtype=float)
    return angles_to_vectors(az, el)


def angles_to_vectors(azimuth, elevation):
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.asarray(elevation, dtype=float)
    cos_el = np.cos(elevation)
    return np.stack([cos_el * np.cos(azimuth), cos_el * np.sin(azimuth), np.sin(elevation)], axis=-1)


def vectors_to_angles(vectors):
    """Azimuth in [0, 2pi) and elevation for an (n, 3) array of nonzero vectors."""
    vectors = np.asarray(vectors, dtype=float)
    x, y, z = vectors[..., 0], vectors[..., 1], vectors[..., 2]
    azimuth = np.mod(np.arctan2(y, x), TWO_PI)
    azimuth = np.where(azimuth >= TWO_PI, 0.0, azimuth)
    elevation = np.arctan2(z, np.hypot(x, y))
    return azimuth, elevation


def great_circle_distance(a, b):
    """Angle in radians between two directions, in [0, pi]."""
    u = a.unit_vector()
    v = b.unit_vector()
    # atan2 keeps full precision near 0 and pi where arccos does not
    return float(math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v))))


def sample_uniform_direction(rng):
    """Uniform direction on the sphere from a normalized 3-D Gaussian draw."""
    while True:
        v = rng.standard_normal(3)
        if np.linalg.norm(v) > 1e-12:
            return Direction.from_vector(v)


def sample_uniform_directions(rng, count):
    vectors = rng.standard_normal((int(count), 3))
    norms = np.linalg.norm(vectors, axis=1)
    # A zero draw has probability zero; keep the shape regardless
    vectors[norms < 1e-12] = (1.0, 0.0, 0.0)
    azimuth, elevation = vectors_to_angles(vectors)
    return [Direction(az, el) for az, el in zip(azimuth, elevation)]
