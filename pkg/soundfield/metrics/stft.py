"""
Short-time Fourier analysis of FOA signals.

Frames are centred: the signal is reflect-padded by half a window at both ends, so frame
l covers samples [l * hop - n_fft / 2, l * hop + n_fft / 2). With a periodic Hann window
and hop = n_fft / 4 the overlap-add inverse reconstructs the input exactly.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import get_window

from ..ambisonics.encoding import NUM_CHANNELS
from ..exceptions import DegenerateInputError, SignalFormatError

FFT_SIZE = 1024
HOP = 256


def hann_window(n_fft):
    return get_window('hann', n_fft, fftbins=True)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    bins: np.ndarray  # (channels, L, F)
    fft_size: int
    hop: int
    sample_rate: int
    num_samples: int

    @property
    def num_frames(self):
        return self.bins.shape[1]

    @property
    def num_bins(self):
        return self.bins.shape[2]


def _check_params(n_fft, hop):
    if n_fft < 2 or n_fft % 2:
        raise SignalFormatError(f"FFT size must be even and >= 2, got {n_fft}")
    if not 0 < hop <= n_fft:
        raise SignalFormatError(f"Hop must lie in (0, {n_fft}], got {hop}")


def stft(samples, n_fft=FFT_SIZE, hop=HOP):
    """(L, n_fft // 2 + 1) complex STFT of a single channel."""
    _check_params(n_fft, hop)
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise SignalFormatError(f"stft expects a single channel, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DegenerateInputError("Cannot analyse a signal with NaN or Inf samples")
    pad = n_fft // 2
    padded = np.pad(x, pad, mode='reflect' if x.size > 1 else 'constant')
    frames = sliding_window_view(padded, n_fft)[::hop]
    return np.fft.rfft(frames * hann_window(n_fft), axis=-1)


def istft(bins, length, n_fft=FFT_SIZE, hop=HOP):
    """Weighted overlap-add inverse of `stft`, cut to `length` samples."""
    _check_params(n_fft, hop)
    bins = np.asarray(bins)
    window = hann_window(n_fft)
    frames = np.fft.irfft(bins, n=n_fft, axis=-1) * window
    num_frames = frames.shape[0]
    total = n_fft + hop * (num_frames - 1)
    index = hop * np.arange(num_frames)[:, None] + np.arange(n_fft)
    signal = np.zeros(total)
    weight = np.zeros(total)
    np.add.at(signal, index, frames)
    np.add.at(weight, index, np.broadcast_to(window ** 2, frames.shape))
    covered = weight > 1e-10
    signal[covered] /= weight[covered]
    pad = n_fft // 2
    out = signal[pad:pad + int(length)]
    if out.size < length:
        out = np.pad(out, (0, int(length) - out.size))
    return out


def foa_stft(x, n_fft=FFT_SIZE, hop=HOP):
    bins = np.stack([stft(x.samples[c], n_fft, hop) for c in range(NUM_CHANNELS)])
    return Spectrogram(bins, n_fft, hop, x.sample_rate, x.num_samples)


def stft_l1_loss(y, y_hat, n_fft=FFT_SIZE, hop=HOP):
    """Summed complex-STFT l1 distance, averaged across the FOA channels."""
    if y.samples.shape != y_hat.samples.shape:
        raise SignalFormatError(f"Cannot compare signals shaped {y.samples.shape} and {y_hat.samples.shape}")
    reference = foa_stft(y, n_fft, hop).bins
    estimate = foa_stft(y_hat, n_fft, hop).bins
    return float(np.sum(np.abs(reference - estimate)) / NUM_CHANNELS)
