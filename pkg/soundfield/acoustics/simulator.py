"""
Frequency-domain simulation of first-order ambisonic room impulse responses.

The RIR spectrum of channel c is the sum over image paths p of
gain_p * (wall responses along p) * exp(-j 2 pi f delay_p) * sh_eval(direction_p)[c],
built on the real-FFT grid of size N (the next power of two >= the RIR length) and
brought back with an inverse real FFT. Each path therefore lands in the time domain
as an N-periodic band-limited impulse.

Two engines share that contract:

- ``exact`` sums every path on every bin (chunked over paths).
- ``fast`` splits each delay into an integer part and a fraction in [0, 1). The
  fractional phase is interpolated over Chebyshev nodes, so each node needs one real
  FFT of a sparse impulse train. Wall responses are evaluated exactly on anchor
  frequencies and interpolated linearly between them; rigid rooms need one anchor.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import signal, sparse

from ..ambisonics.encoding import NUM_CHANNELS, FoaSignal, sh_matrix_from_vectors
from ..conf import get_setting
from ..exceptions import ConfigurationError, RirLengthError
from .image_source import image_source_field
from .materials import material_bank, resolve_surfaces

logger = logging.getLogger(__name__)

ENGINES = ('exact', 'fast')
RIR_TAIL_SAMPLES = 64
CHEBYSHEV_NODES = 14
ANCHOR_SPACING_HZ = 250.0
_EXACT_CHUNK_ELEMENTS = 2 ** 22


@dataclass(frozen=True)
class SimulationConfig:
    max_order: int = 40
    jitter: float = 0.05
    fs: int = 16000
    rir_length: int = None
    max_duration_s: float = 1.5
    speed_of_sound: float = 343.0
    min_distance: float = 0.1
    engine: str = 'fast'
    material_taps: int = 33
    anchor_spacing_hz: float = ANCHOR_SPACING_HZ

    def __post_init__(self):
        if int(self.max_order) < 0:
            raise ConfigurationError(f"max_order must be >= 0, got {self.max_order}")
        if float(self.jitter) < 0.0:
            raise ConfigurationError(f"jitter must be >= 0, got {self.jitter}")
        if int(self.fs) <= 0:
            raise ConfigurationError(f"Sample rate must be positive, got {self.fs}")
        if self.rir_length is not None and int(self.rir_length) <= 0:
            raise ConfigurationError(f"rir_length must be positive, got {self.rir_length}")
        if self.max_duration_s <= 0.0 or self.speed_of_sound <= 0.0 or self.min_distance <= 0.0:
            raise ConfigurationError("Durations, speed of sound and minimum distance must be positive")
        if self.engine not in ENGINES:
            raise ConfigurationError(f"Unknown simulation engine '{self.engine}', expected one of {ENGINES}")
        if self.anchor_spacing_hz <= 0.0:
            raise ConfigurationError("anchor_spacing_hz must be positive")

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'max_order': get_setting('MAX_ORDER'),
            'jitter': get_setting('JITTER_M'),
            'fs': get_setting('SAMPLE_RATE'),
            'max_duration_s': get_setting('MAX_RIR_SECONDS'),
            'speed_of_sound': get_setting('SPEED_OF_SOUND'),
            'min_distance': get_setting('MIN_DISTANCE_M'),
            'engine': get_setting('SIM_ENGINE'),
            'material_taps': get_setting('MATERIAL_TAPS'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True, eq=False)
class AmbisonicRir(FoaSignal):
    """4-channel room impulse response; `max_delay_samples` is the latest path delay."""

    max_delay_samples: float = 0.0
    path_count: int = 0

    def __post_init__(self):
        super().__post_init__()
        if self.num_samples <= math.floor(self.max_delay_samples):
            raise RirLengthError(math.floor(self.max_delay_samples) + 1, self.num_samples)


def fft_size(length):
    return max(2, 1 << (int(length) - 1).bit_length())


def required_length(max_delay_samples):
    """Shortest RIR that still holds the sample of the latest arrival."""
    return math.floor(max_delay_samples) + 1


def _truncate_paths(field, cfg):
    """Drop paths later than max_duration_s and settle the RIR length."""
    fs = cfg.fs
    keep = field.delays <= cfg.max_duration_s
    keep[0] = True
    if not np.all(keep):
        field = field.select(keep)
    required = required_length(field.max_delay * fs)
    if cfg.rir_length is None:
        return field, required + RIR_TAIL_SAMPLES
    if int(cfg.rir_length) < required:
        raise RirLengthError(required, cfg.rir_length)
    return field, int(cfg.rir_length)


def _material_products(field, surfaces, freqs, rows=slice(None)):
    """(paths, freqs) product of wall responses raised to their hit counts."""
    counts = field.wall_counts[rows]
    product = np.ones((counts.shape[0], np.size(freqs)))
    for index, material in enumerate(surfaces):
        hits = counts[:, index]
        if material.is_rigid() or not np.any(hits):
            continue
        product *= np.power(material.amplitude(freqs)[None, :], hits[:, None])
    return product


def _exact_spectrum(field, sh, surfaces, freqs, fs):
    bins = freqs.size
    spectrum = np.zeros((NUM_CHANNELS, bins), dtype=complex)
    chunk = max(1, _EXACT_CHUNK_ELEMENTS // bins)
    for start in range(0, len(field), chunk):
        rows = slice(start, start + chunk)
        amplitude = field.gains[rows, None] * _material_products(field, surfaces, freqs, rows)
        phase = np.exp(-2j * np.pi * np.outer(field.delays[rows], freqs))
        spectrum += sh[rows].T @ (amplitude * phase)
    return spectrum


def chebyshev_nodes(count):
    """Chebyshev points of the first kind on [0, 1]."""
    k = np.arange(count)
    return 0.5 - 0.5 * np.cos((2 * k + 1) * np.pi / (2 * count))


def lagrange_weights(x, nodes):
    """(len(x), len(nodes)) Lagrange basis polynomials evaluated at x."""
    x = np.asarray(x, dtype=float)
    weights = np.ones((x.size, nodes.size))
    for j, node in enumerate(nodes):
        for m, other in enumerate(nodes):
            if m != j:
                weights[:, j] *= (x - other) / (node - other)
    return weights


def _anchor_bands(surfaces, fs, spacing):
    if all(m.is_rigid() for m in surfaces):
        return None
    count = int(math.ceil((fs / 2.0) / spacing)) + 1
    return np.linspace(0.0, fs / 2.0, count)


def _fast_spectrum(field, sh, surfaces, freqs, fs, n_fft, spacing):
    bins = freqs.size
    delays = field.delays * fs
    integer = np.floor(delays).astype(np.int64)
    fraction = delays - integer
    nodes = chebyshev_nodes(CHEBYSHEV_NODES)
    lagrange = lagrange_weights(fraction, nodes)
    omega = 2.0 * np.pi * np.arange(bins) / n_fft
    node_phase = np.exp(-1j * np.outer(omega, nodes))

    paths = len(field)
    selection = sparse.csr_matrix(
        (np.ones(paths), (integer, np.arange(paths))),
        shape=(n_fft, paths),
    )
    # (paths, nodes, channels) weights shared by every band
    base = lagrange[:, :, None] * sh[:, None, :]

    anchors = _anchor_bands(surfaces, fs, spacing)
    if anchors is None:
        band_gains = field.gains[:, None]
        hats = np.ones((1, bins))
    else:
        band_gains = field.gains[:, None] * _material_products(field, surfaces, anchors)
        step = anchors[1] - anchors[0]
        hats = np.clip(1.0 - np.abs(freqs[None, :] - anchors[:, None]) / step, 0.0, None)

    spectrum = np.zeros((NUM_CHANNELS, bins), dtype=complex)
    for band in range(hats.shape[0]):
        support = np.nonzero(hats[band])[0]
        if support.size == 0:
            continue
        weights = (band_gains[:, band, None, None] * base).reshape(paths, -1)
        trains = np.asarray(selection @ weights)
        node_spectra = np.fft.rfft(trains, axis=0)[support].reshape(support.size, CHEBYSHEV_NODES, NUM_CHANNELS)
        combined = np.einsum('kj,kjc->ck', node_phase[support], node_spectra)
        spectrum[:, support] += hats[band, support] * combined
    return spectrum


def simulate_rir_spectrum(room, src, recv, cfg, rng=None, bank=None):
    """Half spectrum (4, N/2 + 1), FFT size N, RIR length and the path field used."""
    fs = int(cfg.fs)
    bank = bank if bank is not None else material_bank(fs, cfg.material_taps)
    surfaces = resolve_surfaces(room.surface_materials, bank)
    field = image_source_field(
        room, src, recv, cfg.max_order, cfg.jitter, rng,
        speed_of_sound=cfg.speed_of_sound, min_distance=cfg.min_distance,
    )
    field, length = _truncate_paths(field, cfg)
    n_fft = fft_size(length)
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / fs)
    sh = sh_matrix_from_vectors(field.unit_vectors)

    if cfg.engine == 'exact':
        spectrum = _exact_spectrum(field, sh, surfaces, freqs, fs)
    else:
        spectrum = _fast_spectrum(field, sh, surfaces, freqs, fs, n_fft, cfg.anchor_spacing_hz)

    spectrum[:, 0] = spectrum[:, 0].real
    spectrum[:, -1] = spectrum[:, -1].real
    return spectrum, n_fft, length, field


def simulate_rir(room, src, recv, cfg, rng=None, bank=None):
    spectrum, n_fft, length, field = simulate_rir_spectrum(room, src, recv, cfg, rng, bank)
    samples = np.fft.irfft(spectrum, n=n_fft, axis=-1)[:, :length]
    logger.debug(
        f"Simulated {len(field)} paths with the {cfg.engine} engine: "
        f"{length} samples, FFT size {n_fft}"
    )
    return AmbisonicRir(samples, cfg.fs, max_delay_samples=field.max_delay * cfg.fs, path_count=len(field))


def hermitian_residue(half_spectrum, n_fft):
    """Largest imaginary part of the full inverse FFT, relative to the RMS of its real part."""
    half_spectrum = np.atleast_2d(half_spectrum)
    mirrored = np.conj(half_spectrum[:, -2:0:-1]) if n_fft % 2 == 0 else np.conj(half_spectrum[:, :0:-1])
    full = np.concatenate([half_spectrum, mirrored], axis=-1)
    time = np.fft.ifft(full, n=n_fft, axis=-1)
    rms = float(np.sqrt(np.mean(time.real ** 2)))
    if rms == 0.0:
        return 0.0
    return float(np.max(np.abs(time.imag))) / rms


def periodic_sinc(n, t, n_fft):
    """Band-limited N-periodic unit impulse at fractional position t, sampled at n.

    Matches a unit impulse built on the real-FFT grid with a real Nyquist bin.
    """
    n = np.asarray(n, dtype=float)
    theta = 2.0 * np.pi * (n - t) / n_fft
    harmonics = n_fft // 2 - 1
    half = np.sin(theta / 2.0)
    with np.errstate(invalid='ignore', divide='ignore'):
        dirichlet = np.sin((harmonics + 0.5) * theta) / (2.0 * half) - 0.5
    dirichlet = np.where(np.abs(half) < 1e-12, float(harmonics), dirichlet)
    nyquist = np.where(np.asarray(n) % 2 == 0, 1.0, -1.0) * np.cos(np.pi * t)
    return (1.0 + 2.0 * dirichlet + nyquist) / n_fft


def periodic_sinc_oracle(field, sample_rate, n_fft, length):
    """Time-domain RIR of a rigid room as a sum of band-limited fractional-delay impulses."""
    n = np.arange(length)
    sh = sh_matrix_from_vectors(field.unit_vectors)
    out = np.zeros((NUM_CHANNELS, length))
    for p in range(len(field)):
        impulse = periodic_sinc(n, field.delays[p] * sample_rate, n_fft)
        out += (field.gains[p] * sh[p])[:, None] * impulse[None, :]
    return out


def band_limited_peak(samples, factor=64):
    """(peak magnitude, fractional sample position) of a band-limited signal.

    Upsampling treats the signal as periodic over its length, so it is exact for RIRs
    whose length equals their FFT size.
    """
    samples = np.asarray(samples, dtype=float)
    fine = signal.resample(samples, samples.size * factor)
    index = int(np.argmax(np.abs(fine)))
    return float(np.abs(fine[index])), index / factor
