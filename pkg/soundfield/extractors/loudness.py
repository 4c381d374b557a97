"""
Directional loudness modification.

The FOA signal is decoded to a grid of directions, each direction is weighted by 1
inside a spherical cap around the target and by `out_gain` outside, and the result is
re-encoded: M = pinv(Y) diag(g) Y with Y the grid's SH matrix. `cap_spread_deg` is the
full opening angle of the cap.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..ambisonics.encoding import FoaSignal, sh_eval, sh_matrix_from_vectors
from ..exceptions import ConfigurationError
from .grids import check_grid_rank

logger = logging.getLogger(__name__)

# Grid points this close to the cap edge count as inside
_EDGE_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class LoudnessMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (4, 4):
            raise ConfigurationError(f"Loudness matrix must be 4x4, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    def is_identity(self):
        return np.array_equal(self.matrix, np.eye(4))


def check_cap_spread(cap_spread_deg):
    if not 0.0 < cap_spread_deg <= 360.0:
        raise ConfigurationError(f"cap_spread_deg must lie in (0, 360], got {cap_spread_deg}")


def cap_gains(vectors, target_dir, cap_spread_deg, out_gain):
    """1 for directions within half the spread of `target_dir`, `out_gain` elsewhere."""
    target = target_dir.unit_vector()
    angles = np.arctan2(np.linalg.norm(np.cross(vectors, target), axis=1), vectors @ target)
    half = np.radians(cap_spread_deg) / 2.0
    return np.where(angles <= half + _EDGE_TOLERANCE, 1.0, float(out_gain))


def build_loudness_matrix(target_dir, cap_spread_deg, out_gain, grid):
    check_cap_spread(cap_spread_deg)
    sh = check_grid_rank(grid)
    gains = cap_gains(grid.vectors, target_dir, cap_spread_deg, out_gain)
    if np.all(gains == 1.0):
        return LoudnessMatrix(np.eye(4))
    inside = int(np.count_nonzero(gains == 1.0))
    logger.debug(f"Loudness cap keeps {inside} of {len(grid)} points of grid '{grid.name}'")
    return LoudnessMatrix(np.linalg.pinv(sh) @ (gains[:, None] * sh))


def apply_loudness_mod(x, loudness):
    if loudness.is_identity():
        return x
    return FoaSignal(loudness.matrix @ x.samples, x.sample_rate)


def directional_response(loudness, target_dir, vectors):
    """sh_eval(d)^T M^T sh_eval(target) for each row d of `vectors`."""
    return sh_matrix_from_vectors(vectors) @ loudness.matrix.T @ sh_eval(target_dir).coefficients
