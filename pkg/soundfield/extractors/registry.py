"""
Target extractors selectable by name.

Every extractor is a fixed linear map from a 4 x T FOA mixture to a 4 x T estimate of
the target's FOA image, parameterized only by the target direction.
"""

import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..ambisonics.directions import Direction
from ..ambisonics.encoding import FoaSignal, sh_eval
from ..conf import get_setting
from ..exceptions import ConfigurationError
from .beamforming import beam_weights, beamform
from .grids import named_grid
from .loudness import apply_loudness_mod, build_loudness_matrix, check_cap_spread

logger = logging.getLogger(__name__)


class ExtractorAlgorithm(Enum):
    IDENTITY = 'identity'
    LOUDNESS_MOD = 'loudness_mod'
    MAX_DI_BAP = 'max_di_bap'
    MAX_RE_BAP = 'max_re_bap'

    @property
    def cli_name(self):
        return _CLI_NAMES[self]

    @classmethod
    def from_cli(cls, name):
        for algorithm, cli_name in _CLI_NAMES.items():
            if name in (cli_name, algorithm.value):
                return algorithm
        raise ConfigurationError(f"Unknown algorithm '{name}', expected one of {cls.cli_choices()}")

    @classmethod
    def cli_choices(cls):
        return [algorithm.cli_name for algorithm in cls]


_CLI_NAMES = {
    ExtractorAlgorithm.IDENTITY: 'identity',
    ExtractorAlgorithm.LOUDNESS_MOD: 'loudness',
    ExtractorAlgorithm.MAX_DI_BAP: 'max-di',
    ExtractorAlgorithm.MAX_RE_BAP: 'max-re',
}

_BEAM_KINDS = {
    ExtractorAlgorithm.MAX_DI_BAP: 'max_di',
    ExtractorAlgorithm.MAX_RE_BAP: 'max_re',
}


@dataclass(frozen=True)
class ExtractorConfig:
    algorithm: ExtractorAlgorithm
    target_dir: Direction
    cap_spread_deg: float = 60.0
    out_gain: float = 0.0
    grid_size: int = 36
    grid: str = 'fibonacci'

    def __post_init__(self):
        if isinstance(self.algorithm, str):
            object.__setattr__(self, 'algorithm', ExtractorAlgorithm.from_cli(self.algorithm))
        if not isinstance(self.target_dir, Direction):
            raise ConfigurationError("target_dir must be a Direction")
        check_cap_spread(self.cap_spread_deg)
        if int(self.grid_size) < 4:
            raise ConfigurationError(f"grid_size must be >= 4, got {self.grid_size}")

    @classmethod
    def from_settings(cls, algorithm, target_dir, **overrides):
        values = {
            'cap_spread_deg': get_setting('CAP_SPREAD_DEG'),
            'out_gain': get_setting('LOUDNESS_OUT_GAIN'),
            'grid_size': get_setting('GRID_SIZE'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(algorithm=algorithm, target_dir=target_dir, **values)

    def steered(self, target_dir):
        return dataclasses.replace(self, target_dir=target_dir)

    def to_dict(self):
        return {
            'algorithm': self.algorithm.cli_name,
            'target_dir': self.target_dir.to_dict(),
            'cap_spread_deg': self.cap_spread_deg,
            'out_gain': self.out_gain,
            'grid_size': self.grid_size,
            'grid': self.grid,
        }


class Extractor:
    """A precomputed extractor; call it on FOA signals."""

    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, x):
        raise NotImplementedError


class IdentityExtractor(Extractor):
    def __call__(self, x):
        return x


class LoudnessExtractor(Extractor):
    def __init__(self, cfg):
        super().__init__(cfg)
        grid = named_grid(cfg.grid, cfg.grid_size)
        self.loudness = build_loudness_matrix(cfg.target_dir, cfg.cap_spread_deg, cfg.out_gain, grid)

    def __call__(self, x):
        return apply_loudness_mod(x, self.loudness)


class BeamExtractor(Extractor):
    def __init__(self, cfg):
        super().__init__(cfg)
        self.kind = _BEAM_KINDS[cfg.algorithm]
        self.weights = beam_weights(self.kind, cfg.target_dir)
        self.gains = sh_eval(cfg.target_dir).coefficients

    def __call__(self, x):
        return FoaSignal(np.outer(self.gains, beamform(x, self.weights)), x.sample_rate)


_EXTRACTORS = {
    ExtractorAlgorithm.IDENTITY: IdentityExtractor,
    ExtractorAlgorithm.LOUDNESS_MOD: LoudnessExtractor,
    ExtractorAlgorithm.MAX_DI_BAP: BeamExtractor,
    ExtractorAlgorithm.MAX_RE_BAP: BeamExtractor,
}


def build_extractor(cfg):
    logger.debug(f"Building {cfg.algorithm.cli_name} extractor for {cfg.target_dir.to_dict()}")
    return _EXTRACTORS[cfg.algorithm](cfg)


def run_extractor(cfg, x):
    """Estimate of the target's FOA image; same shape and rate as `x`."""
    return build_extractor(cfg)(x)
