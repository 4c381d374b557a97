from .beamforming import beam_pattern, beam_weights, beamform_and_project, null_angle
from .grids import DirectionGrid, check_grid_rank, fibonacci_grid, grid_sh_matrix, named_grid, t_design
from .loudness import LoudnessMatrix, apply_loudness_mod, build_loudness_matrix, directional_response
from .registry import ExtractorAlgorithm, ExtractorConfig, build_extractor, run_extractor

__all__ = [
    'DirectionGrid',
    'ExtractorAlgorithm',
    'ExtractorConfig',
    'LoudnessMatrix',
    'apply_loudness_mod',
    'beam_pattern',
    'beam_weights',
    'beamform_and_project',
    'build_extractor',
    'build_loudness_matrix',
    'check_grid_rank',
    'directional_response',
    'fibonacci_grid',
    'grid_sh_matrix',
    'named_grid',
    'null_angle',
    'run_extractor',
    't_design',
]
