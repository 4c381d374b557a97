"""
Shoebox rooms and randomized scene layouts.

Surfaces are indexed 0 floor (z=0), 1 ceiling (z=Lz), 2 wall x=0, 3 wall x=Lx,
4 wall y=0, 5 wall y=Ly.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..ambisonics.directions import Direction, sample_uniform_direction
from ..exceptions import ConfigurationError, GeometryError
from .materials import RIGID, absorptive_presets

logger = logging.getLogger(__name__)

NUM_SURFACES = 6
SURFACE_NAMES = ('floor', 'ceiling', 'wall_x0', 'wall_x1', 'wall_y0', 'wall_y1')

ROOM_DIM_RANGE = (2.0, 15.0)
SOURCE_DISTANCE_RANGE = (0.6, 5.0)
RECEIVER_OFFSET_FRACTION = 0.1
WALL_MARGIN = 0.1
MAX_PLACEMENT_TRIES = 10_000


def _as_point(position, name):
    point = np.asarray(position, dtype=float).reshape(-1)
    if point.shape != (3,) or not np.all(np.isfinite(point)):
        raise GeometryError(f"{name} must be a finite 3-D position, got {position!r}")
    return point


@dataclass(frozen=True)
class Room:
    dims: tuple
    surface_materials: tuple = (RIGID,) * NUM_SURFACES

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dims)
        if len(dims) != 3 or not all(np.isfinite(d) and d > 0.0 for d in dims):
            raise GeometryError(f"Room dimensions must be three positive lengths, got {self.dims!r}")
        materials = tuple(str(m) for m in self.surface_materials)
        if len(materials) != NUM_SURFACES:
            raise ConfigurationError(f"A shoebox room needs {NUM_SURFACES} surface materials, got {len(materials)}")
        object.__setattr__(self, 'dims', dims)
        object.__setattr__(self, 'surface_materials', materials)

    @property
    def size(self):
        return np.array(self.dims)

    def contains(self, position, margin=0.0):
        """True when `position` lies strictly inside the room, `margin` away from every surface."""
        point = np.asarray(position, dtype=float)
        return bool(np.all(point > margin) and np.all(point < self.size - margin))

    def check_inside(self, position, name='position'):
        point = _as_point(position, name)
        if not self.contains(point):
            raise GeometryError(f"{name} {point.tolist()} is not inside the room {list(self.dims)}")
        return point

    def to_dict(self):
        return {'dims_m': list(self.dims), 'surface_materials': list(self.surface_materials)}

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data['dims_m']), tuple(data['surface_materials']))


@dataclass(frozen=True, eq=False)
class SceneSource:
    position: np.ndarray
    distance: float
    direction: Direction

    def to_dict(self):
        return {
            'position_m': [float(v) for v in self.position],
            'distance_m': float(self.distance),
            'direction': self.direction.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            np.asarray(data['position_m'], dtype=float),
            float(data['distance_m']),
            Direction.from_dict(data['direction']),
        )


@dataclass(frozen=True, eq=False)
class SceneGeometry:
    room: Room
    receiver: np.ndarray
    sources: tuple = field(default_factory=tuple)
    target_index: int = 0

    def __post_init__(self):
        receiver = self.room.check_inside(self.receiver, 'receiver')
        object.__setattr__(self, 'receiver', receiver)
        object.__setattr__(self, 'sources', tuple(self.sources))
        for k, source in enumerate(self.sources):
            self.room.check_inside(source.position, f'source {k}')
        if self.sources and not 0 <= self.target_index < len(self.sources):
            raise GeometryError(f"Target index {self.target_index} out of range for {len(self.sources)} sources")

    @property
    def target(self):
        return self.sources[self.target_index]

    def to_dict(self):
        return {
            'room': self.room.to_dict(),
            'receiver_m': [float(v) for v in self.receiver],
            'sources': [s.to_dict() for s in self.sources],
            'target_index': self.target_index,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            Room.from_dict(data['room']),
            np.asarray(data['receiver_m'], dtype=float),
            tuple(SceneSource.from_dict(s) for s in data['sources']),
            int(data.get('target_index', 0)),
        )


def source_from_positions(receiver, position):
    """SceneSource seen from `receiver`; the two points must differ."""
    offset = np.asarray(position, dtype=float) - np.asarray(receiver, dtype=float)
    distance = float(np.linalg.norm(offset))
    if distance == 0.0:
        raise GeometryError("Source and receiver coincide")
    return SceneSource(np.asarray(position, dtype=float), distance, Direction.from_vector(offset))


def sample_room(rng, materials=None, dims_range=ROOM_DIM_RANGE):
    """Room with uniform dimensions and one material drawn per surface.

    `materials` is the list of preset names to draw from; it defaults to every
    absorptive preset.
    """
    low, high = dims_range
    dims = rng.uniform(low, high, size=3)
    choices = tuple(materials) if materials else absorptive_presets()
    if not choices:
        raise ConfigurationError("No materials to draw surfaces from")
    picks = rng.integers(0, len(choices), size=NUM_SURFACES)
    return Room(tuple(dims), tuple(choices[i] for i in picks))


def _place_source(rng, room, receiver, distance_range, margin, max_tries):
    low, high = distance_range
    for _ in range(max_tries):
        direction = sample_uniform_direction(rng)
        distance = rng.uniform(low, high)
        position = receiver + distance * direction.unit_vector()
        if room.contains(position, margin):
            return SceneSource(position, float(distance), direction)
    raise GeometryError(
        f"Could not place a source {low}-{high} m from the receiver inside room {list(room.dims)} "
        f"after {max_tries} tries"
    )


def sample_scene_geometry(rng, n_sources, materials=None, dims_range=ROOM_DIM_RANGE,
                          distance_range=SOURCE_DISTANCE_RANGE, margin=WALL_MARGIN,
                          max_tries=MAX_PLACEMENT_TRIES):
    """Random room, receiver near its centre, and `n_sources` sources; source 0 is the target."""
    n_sources = int(n_sources)
    if n_sources < 1:
        raise ConfigurationError(f"A scene needs at least one source, got {n_sources}")
    room = sample_room(rng, materials, dims_range)
    size = room.size
    receiver = 0.5 * size + rng.uniform(-RECEIVER_OFFSET_FRACTION, RECEIVER_OFFSET_FRACTION, size=3) * size
    sources = tuple(
        _place_source(rng, room, receiver, distance_range, margin, max_tries)
        for _ in range(n_sources)
    )
    return SceneGeometry(room, receiver, sources, target_index=0)
