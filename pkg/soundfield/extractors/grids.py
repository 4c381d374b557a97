"""
Direction grids for sampling the sphere.
"""

from dataclasses import dataclass

import numpy as np

from ..ambisonics.encoding import NUM_CHANNELS, sh_matrix_from_vectors
from ..exceptions import ConfigurationError

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True, eq=False)
class DirectionGrid:
    name: str
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != 3:
            raise ConfigurationError(f"Grid '{self.name}' must be an (n, 3) array of unit vectors")
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        vectors.setflags(write=False)
        object.__setattr__(self, 'vectors', vectors)

    def __len__(self):
        return self.vectors.shape[0]

    def sh_matrix(self):
        return sh_matrix_from_vectors(self.vectors)


def fibonacci_grid(n):
    """Golden-spiral lattice of n nearly equal-area points."""
    n = int(n)
    if n < 1:
        raise ConfigurationError(f"A grid needs at least one point, got {n}")
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    r = np.sqrt(1.0 - z ** 2)
    phi = k * GOLDEN_ANGLE
    return DirectionGrid(f'fibonacci-{n}', np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1))


def _octahedron():
    return np.vstack([np.eye(3), -np.eye(3)])


def _icosahedron():
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = []
    for a in (-1.0, 1.0):
        for b in (-golden, golden):
            vertices.extend([(0.0, a, b), (a, b, 0.0), (b, 0.0, a)])
    return np.array(vertices)


# name -> (builder, strength t)
T_DESIGNS = {
    'octahedron': (_octahedron, 3),
    'icosahedron': (_icosahedron, 5),
}


def t_design(name):
    try:
        builder, strength = T_DESIGNS[name]
    except KeyError:
        raise ConfigurationError(f"Unknown t-design '{name}', expected one of {sorted(T_DESIGNS)}") from None
    return DirectionGrid(f'{name} ({strength}-design)', builder())


def grid_sh_matrix(grid):
    return grid.sh_matrix()


def named_grid(name, size):
    if name in (None, 'fibonacci'):
        return fibonacci_grid(size)
    return t_design(name)


def check_grid_rank(grid):
    """SH matrix of `grid`, which must have full column rank."""
    matrix = grid.sh_matrix()
    rank = np.linalg.matrix_rank(matrix)
    if rank < NUM_CHANNELS:
        raise ConfigurationError(
            f"Grid '{grid.name}' gives a rank-{rank} SH matrix; first order needs rank {NUM_CHANNELS}"
        )
    return matrix
