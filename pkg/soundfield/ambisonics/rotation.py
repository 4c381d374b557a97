"""
Rotation of first-order ambisonic signals.

A first-order rotation is block diagonal: W is left alone and the dipole channels
(Y, Z, X) are rotated by the Cartesian rotation conjugated with the (y, z, x)
channel permutation.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError
from .directions import Direction
from .encoding import CARTESIAN_TO_ACN, FoaSignal

_ORTHOGONALITY_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class FoaRotation:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (4, 4):
            raise ConfigurationError(f"FOA rotation must be 4x4, got {matrix.shape}")
        if not (np.array_equal(matrix[0], [1.0, 0.0, 0.0, 0.0])
                and np.array_equal(matrix[:, 0], [1.0, 0.0, 0.0, 0.0])):
            raise ConfigurationError("FOA rotation must leave the W channel untouched")
        block = matrix[1:, 1:]
        if (np.max(np.abs(block @ block.T - np.eye(3))) > _ORTHOGONALITY_TOLERANCE
                or abs(np.linalg.det(block) - 1.0) > _ORTHOGONALITY_TOLERANCE):
            raise ConfigurationError("FOA rotation block must be a proper orthogonal matrix")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @property
    def cartesian(self):
        """The 3x3 rotation acting on (x, y, z) vectors."""
        return CARTESIAN_TO_ACN.T @ self.matrix[1:, 1:] @ CARTESIAN_TO_ACN

    def is_identity(self):
        return np.array_equal(self.matrix, np.eye(4))

    def compose(self, other):
        """Rotation that applies `other` first, then `self`."""
        return rotation_from_matrix(self.cartesian @ other.cartesian)

    def inverse(self):
        return rotation_from_matrix(self.cartesian.T)


def rotation_from_matrix(rotation3):
    rotation3 = np.asarray(rotation3, dtype=float)
    matrix = np.eye(4)
    matrix[1:, 1:] = CARTESIAN_TO_ACN @ rotation3 @ CARTESIAN_TO_ACN.T
    return FoaRotation(matrix)


def _skew(w):
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def _rotation_same_hemisphere(u, v):
    # Valid for u . v >= 0, where 1 + c >= 1 keeps the formula well conditioned
    w = np.cross(u, v)
    c = float(np.dot(u, v))
    k = _skew(w)
    return np.eye(3) + k + (k @ k) / (1.0 + c)


def _half_turn_axis(u):
    """Axis perpendicular to u used for half turns: +Z projected off u, or +X at the poles."""
    reference = np.array([0.0, 0.0, 1.0])
    if abs(u[2]) > 1.0 - 1e-9:
        reference = np.array([1.0, 0.0, 0.0])
    axis = reference - np.dot(reference, u) * u
    return axis / np.linalg.norm(axis)


def _half_turn(axis):
    return 2.0 * np.outer(axis, axis) - np.eye(3)


def cartesian_rotation_between(u, v):
    """Proper 3x3 rotation taking unit vector u onto unit vector v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.dot(u, v) >= 0.0:
        return _rotation_same_hemisphere(u, v)
    # Turn u onto -u first, then close the remaining (acute) gap
    flip = _half_turn(_half_turn_axis(u))
    return _rotation_same_hemisphere(-u, v) @ flip


def rotation_between(source, target):
    """FOA rotation mapping sh_eval(source) onto sh_eval(target).

    Antipodal pairs rotate half a turn about +Z projected perpendicular to `source`
    (which is +Z itself for horizontal directions), or about +X when `source` is a pole.
    """
    return rotation_from_matrix(cartesian_rotation_between(source.unit_vector(), target.unit_vector()))


def rotate_direction(rotation, direction):
    return Direction.from_vector(rotation.cartesian @ direction.unit_vector())


def apply_rotation(signal, rotation):
    if rotation.is_identity():
        return signal
    return FoaSignal(rotation.matrix @ signal.samples, signal.sample_rate)
