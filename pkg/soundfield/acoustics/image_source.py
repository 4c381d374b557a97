"""
Image-source enumeration for shoebox rooms.

Images are indexed by an integer triple (nx, ny, nz). Along one axis of length L the
image coordinate is n*L + s for even n and (n+1)*L - s for odd n, and the path
reflects |n| times off that axis' two walls, alternating, starting with the far wall
for n > 0 and the near wall for n < 0. Every triple with |nx| + |ny| + |nz| <= max
order is enumerated, sorted by (order, nx, ny, nz), so the direct path comes first.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..ambisonics.directions import Direction, vectors_to_angles
from ..exceptions import ConfigurationError, GeometryError
from .materials import resolve_surfaces

logger = logging.getLogger(__name__)

# (near wall, far wall) surface indices for the x, y and z axes
AXIS_SURFACES = ((2, 3), (4, 5), (0, 1))


@dataclass(frozen=True, eq=False)
class ImagePath:
    delay_s: float
    direction: Direction
    order: int
    gain: float
    wall_sequence: tuple
    distance: float

    def __post_init__(self):
        object.__setattr__(self, 'wall_sequence', tuple(int(w) for w in self.wall_sequence))
        if self.order != len(self.wall_sequence):
            raise GeometryError(f"Path order {self.order} does not match {len(self.wall_sequence)} wall hits")

    def to_dict(self):
        return {
            'delay_s': self.delay_s,
            'direction': self.direction.to_dict(),
            'order': self.order,
            'gain': self.gain,
            'wall_sequence': list(self.wall_sequence),
        }


@lru_cache(maxsize=64)
def image_lattice(max_order):
    """(P, 3) integer triples with L1 norm <= max_order, direct path first."""
    max_order = int(max_order)
    if max_order < 0:
        raise ConfigurationError(f"max_order must be >= 0, got {max_order}")
    axis = np.arange(-max_order, max_order + 1)
    nx, ny, nz = np.meshgrid(axis, axis, axis, indexing='ij')
    triples = np.stack([nx.ravel(), ny.ravel(), nz.ravel()], axis=1)
    orders = np.abs(triples).sum(axis=1)
    triples = triples[orders <= max_order]
    orders = orders[orders <= max_order]
    ranking = np.lexsort((triples[:, 2], triples[:, 1], triples[:, 0], orders))
    lattice = triples[ranking]
    lattice.setflags(write=False)
    return lattice


def _wall_hits(n):
    """(near, far) hit counts for a lattice index array along one axis."""
    magnitude = np.abs(n)
    major = (magnitude + 1) // 2
    minor = magnitude // 2
    near = np.where(n > 0, minor, major)
    far = np.where(n > 0, major, minor)
    return near, far


def _wall_sequence(triple):
    sequence = []
    for n, (near, far) in zip(triple, AXIS_SURFACES):
        first, second = (far, near) if n > 0 else (near, far)
        sequence.extend(first if k % 2 == 0 else second for k in range(abs(int(n))))
    return tuple(sequence)


@dataclass(frozen=True, eq=False)
class ImageSourceField:
    """All image paths of one source/receiver pair as parallel arrays."""

    indices: np.ndarray        # (P, 3) lattice triples
    positions: np.ndarray      # (P, 3) image positions, jitter included
    distances: np.ndarray      # (P,)
    delays: np.ndarray         # (P,) seconds
    gains: np.ndarray          # (P,) distance attenuation
    unit_vectors: np.ndarray   # (P, 3) direction of arrival at the receiver
    orders: np.ndarray         # (P,)
    wall_counts: np.ndarray    # (P, 6) reflections per surface

    def __len__(self):
        return self.indices.shape[0]

    @property
    def max_delay(self):
        return float(self.delays.max())

    def select(self, mask):
        return ImageSourceField(**{name: getattr(self, name)[mask] for name in self.__dataclass_fields__})

    def path(self, i):
        azimuth, elevation = vectors_to_angles(self.unit_vectors[i])
        return ImagePath(
            delay_s=float(self.delays[i]),
            direction=Direction(float(azimuth), float(elevation)),
            order=int(self.orders[i]),
            gain=float(self.gains[i]),
            wall_sequence=_wall_sequence(self.indices[i]),
            distance=float(self.distances[i]),
        )

    def paths(self):
        return [self.path(i) for i in range(len(self))]


def image_source_field(room, src, recv, max_order, jitter=0.0, rng=None,
                       speed_of_sound=343.0, min_distance=0.1):
    """Image paths of a shoebox room in array form.

    Each reflected image is displaced uniformly inside a cube of half-width
    jitter * order / sqrt(3), so the displacement never exceeds jitter * order.
    The direct path is never displaced, and nothing is drawn from `rng` when
    jitter is zero.
    """
    src = room.check_inside(src, 'source')
    recv = room.check_inside(recv, 'receiver')
    if np.array_equal(src, recv):
        raise GeometryError("Source and receiver coincide; the direct path has zero length")
    if jitter < 0.0:
        raise ConfigurationError(f"Jitter must be >= 0, got {jitter}")

    lattice = image_lattice(max_order)
    size = room.size
    odd = (lattice % 2) != 0
    positions = np.where(odd, (lattice + 1) * size - src, lattice * size + src)
    orders = np.abs(lattice).sum(axis=1)

    if jitter > 0.0:
        if rng is None:
            raise ConfigurationError("Jitter needs a random generator")
        half_width = jitter * orders / np.sqrt(3.0)
        positions = positions + rng.uniform(-1.0, 1.0, size=positions.shape) * half_width[:, None]

    offsets = positions - recv
    distances = np.linalg.norm(offsets, axis=1)
    with np.errstate(invalid='ignore', divide='ignore'):
        unit_vectors = offsets / distances[:, None]
    # A displaced image landing on the receiver keeps its undisplaced direction
    degenerate = distances == 0.0
    if np.any(degenerate):
        fallback = np.where(odd, (lattice + 1) * size - src, lattice * size + src)[degenerate] - recv
        unit_vectors[degenerate] = fallback / np.linalg.norm(fallback, axis=1)[:, None]

    near_x, far_x = _wall_hits(lattice[:, 0])
    near_y, far_y = _wall_hits(lattice[:, 1])
    near_z, far_z = _wall_hits(lattice[:, 2])
    wall_counts = np.stack([near_z, far_z, near_x, far_x, near_y, far_y], axis=1)

    return ImageSourceField(
        indices=lattice,
        positions=positions,
        distances=distances,
        delays=distances / speed_of_sound,
        gains=1.0 / np.maximum(distances, min_distance),
        unit_vectors=unit_vectors,
        orders=orders,
        wall_counts=wall_counts,
    )


def enumerate_image_sources(room, src, recv, max_order, jitter=0.0, rng=None,
                            speed_of_sound=343.0, min_distance=0.1):
    """One ImagePath per lattice image with total reflection order <= max_order."""
    field = image_source_field(room, src, recv, max_order, jitter, rng, speed_of_sound, min_distance)
    return field.paths()


def path_spectrum(path, freqs, room, bank, sample_rate=None):
    """Complex multiplier of one path: gain * wall responses * exp(-j 2 pi f delay)."""
    freqs = np.asarray(freqs, dtype=float)
    surfaces = resolve_surfaces(room.surface_materials, bank)
    sample_rate = sample_rate or surfaces[0].sample_rate
    if np.any(freqs < 0.0) or np.any(freqs > sample_rate / 2.0):
        raise ConfigurationError(f"Frequencies must lie in [0, {sample_rate / 2.0}] Hz")
    multiplier = np.full(freqs.shape, path.gain, dtype=float)
    for wall in path.wall_sequence:
        multiplier = multiplier * surfaces[wall].amplitude(freqs)
    return multiplier * np.exp(-2j * np.pi * freqs * path.delay_s)
