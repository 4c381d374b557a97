"""
WAV input/output through soundfile.

FOA files are RIFF WAV, 4 channels, 32-bit float. Arrays are (channels, samples)
inside the toolkit and (samples, channels) on disk.
"""

import logging
from pathlib import Path

import numpy as np
import soundfile as sf

from ..ambisonics.encoding import NUM_CHANNELS, FoaSignal
from ..exceptions import SignalFormatError

logger = logging.getLogger(__name__)


def _read(path, dtype):
    if not Path(path).is_file():
        raise FileNotFoundError(f"Audio file {path} does not exist")
    try:
        return sf.read(str(path), dtype=dtype, always_2d=True)
    except sf.SoundFileError as e:
        raise SignalFormatError(f"{path}: unreadable audio ({e})") from e


def write_foa_wav(path, signal):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.ascontiguousarray(signal.samples.T.astype(np.float32))
    sf.write(str(path), data, signal.sample_rate, subtype='FLOAT', format='WAV')


def read_foa_wav(path, expected_rate=None):
    data, sample_rate = _read(path, 'float32')
    if data.shape[1] != NUM_CHANNELS:
        raise SignalFormatError(f"{path}: expected 4 channels, found {data.shape[1]}")
    if expected_rate is not None and sample_rate != int(expected_rate):
        raise SignalFormatError(f"{path}: expected {expected_rate} Hz, found {sample_rate} Hz")
    return FoaSignal.from_array(data, sample_rate, channels_last=True)


def write_mono_wav(path, samples, sample_rate):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(str(path), np.asarray(samples, dtype=np.float32), int(sample_rate), subtype='FLOAT', format='WAV')


def read_mono(path):
    """Read any soundfile-supported file, downmixing to mono. Returns (samples, rate)."""
    data, sample_rate = _read(path, 'float64')
    if data.shape[1] > 1:
        logger.debug(f"Downmixing {data.shape[1]} channels of {path}")
    return data.mean(axis=1), int(sample_rate)
