"""
First-order real spherical harmonics (SN3D normalization, ACN channel order) and
plane-wave encoding.

ACN order is [W, Y, Z, X]. For a unit-amplitude plane wave from direction d the gains
are [1, cos(el) sin(az), sin(el), cos(el) cos(az)], i.e. W followed by the unit
direction vector permuted into (y, z, x).
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import DegenerateInputError, SignalFormatError

CHANNELS = ('W', 'Y', 'Z', 'X')
NUM_CHANNELS = 4

# Cartesian (x, y, z) -> ACN dipole channels (Y, Z, X)
CARTESIAN_TO_ACN = np.array([
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0],
])


@dataclass(frozen=True, eq=False)
class FoaGains:
    coefficients: np.ndarray

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if coefficients.shape != (NUM_CHANNELS,):
            raise SignalFormatError(f"FOA gains need 4 coefficients, got {coefficients.shape[0]}")
        coefficients.setflags(write=False)
        object.__setattr__(self, 'coefficients', coefficients)

    def __getitem__(self, channel):
        return self.coefficients[channel]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coefficients, dtype=dtype)


@dataclass(frozen=True, eq=False)
class FoaSignal:
    """4 x T real ambisonic signal, ACN/SN3D."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] != NUM_CHANNELS:
            raise SignalFormatError(f"FOA signal must be shaped (4, T), got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise DegenerateInputError("FOA signal contains NaN or Inf samples")
        if int(self.sample_rate) <= 0:
            raise SignalFormatError(f"Sample rate must be positive, got {self.sample_rate}")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'sample_rate', int(self.sample_rate))

    @classmethod
    def zeros(cls, num_samples, sample_rate):
        return cls(np.zeros((NUM_CHANNELS, int(num_samples))), sample_rate)

    @classmethod
    def from_array(cls, array, sample_rate, channels_last=False):
        """Build from a (4, T) array, or (T, 4) with `channels_last` as soundfile returns it."""
        array = np.asarray(array, dtype=float)
        return cls(array.T if channels_last else array, sample_rate)

    @property
    def num_samples(self):
        return self.samples.shape[1]

    @property
    def duration(self):
        return self.num_samples / self.sample_rate

    def channel(self, name):
        return self.samples[CHANNELS.index(name.upper())]

    def scaled(self, factor):
        return FoaSignal(self.samples * float(factor), self.sample_rate)

    def _check_compatible(self, other):
        if self.sample_rate != other.sample_rate:
            raise SignalFormatError(f"Sample rate mismatch: {self.sample_rate} vs {other.sample_rate}")
        if self.num_samples != other.num_samples:
            raise SignalFormatError(f"Length mismatch: {self.num_samples} vs {other.num_samples}")

    def __add__(self, other):
        self._check_compatible(other)
        return FoaSignal(self.samples + other.samples, self.sample_rate)

    def __sub__(self, other):
        self._check_compatible(other)
        return FoaSignal(self.samples - other.samples, self.sample_rate)

    def energy(self):
        return float(np.sum(self.samples ** 2))

    def rms(self):
        return float(np.sqrt(np.mean(self.samples ** 2))) if self.num_samples else 0.0


def sh_eval(direction):
    cos_el = np.cos(direction.elevation)
    return FoaGains(np.array([
        1.0,
        cos_el * np.sin(direction.azimuth),
        np.sin(direction.elevation),
        cos_el * np.cos(direction.azimuth),
    ]))


def sh_matrix(directions):
    """(n, 4) matrix whose row i is sh_eval(directions[i])."""
    az = np.array([d.azimuth for d in directions], dtype=float)
    el = np.array([d.elevation for d in directions], dtype=float)
    return sh_matrix_from_angles(az, el)


def sh_matrix_from_angles(azimuth, elevation):
    azimuth = np.asarray(azimuth, dtype=float)
    elevation = np.asarray(elevation, dtype=float)
    cos_el = np.cos(elevation)
    return np.stack([
        np.ones_like(azimuth),
        cos_el * np.sin(azimuth),
        np.sin(elevation),
        cos_el * np.cos(azimuth),
    ], axis=-1)


def sh_matrix_from_vectors(vectors):
    """SH rows for unit vectors (n, 3); avoids a round trip through angles."""
    vectors = np.asarray(vectors, dtype=float)
    return np.concatenate([np.ones(vectors.shape[:-1] + (1,)), vectors @ CARTESIAN_TO_ACN.T], axis=-1)


def encode_plane_wave(mono, direction, sample_rate):
    mono = np.asarray(mono, dtype=float).reshape(-1)
    if mono.size == 0:
        raise DegenerateInputError("Cannot encode an empty mono signal")
    if not np.all(np.isfinite(mono)):
        raise DegenerateInputError("Mono signal contains NaN or Inf samples")
    gains = sh_eval(direction).coefficients
    return FoaSignal(gains[:, None] * mono[None, :], sample_rate)
