from .directions import (
    Direction,
    great_circle_distance,
    sample_uniform_direction,
    sample_uniform_directions,
)
from .encoding import CHANNELS, FoaGains, FoaSignal, encode_plane_wave, sh_eval, sh_matrix
from .rotation import (
    FoaRotation,
    apply_rotation,
    rotate_direction,
    rotation_between,
    rotation_from_matrix,
)

__all__ = [
    'CHANNELS',
    'Direction',
    'FoaGains',
    'FoaRotation',
    'FoaSignal',
    'apply_rotation',
    'encode_plane_wave',
    'great_circle_distance',
    'rotate_direction',
    'rotation_between',
    'rotation_from_matrix',
    'sample_uniform_direction',
    'sample_uniform_directions',
    'sh_eval',
    'sh_matrix',
]
