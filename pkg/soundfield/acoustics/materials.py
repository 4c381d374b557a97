"""
Wall materials as short linear-phase reflection filters.

Each preset is designed from per-octave absorption coefficients (reflection amplitude
sqrt(1 - alpha)) with scipy's frequency-sampling FIR design. Responses are evaluated
relative to the centre tap, so a reflection shapes the spectrum without adding a
bulk delay; `rigid` is a centred unit impulse with a response of exactly 1.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import signal

from ..conf import get_setting
from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)

RIGID = 'rigid'
MIN_TAPS = 8
MAX_TAPS = 64
_PASSIVE_LIMIT = 1.0 + 1e-9
_CHECK_POINTS = 2049
_DESIGN_MARGIN = 1e-6


def zero_phase_response(fir, sample_rate, freqs):
    """Real response of a symmetric odd-length FIR, measured about its centre tap."""
    freqs = np.asarray(freqs, dtype=float)
    c = (fir.size - 1) // 2
    lags = np.arange(1, c + 1)
    omega = 2.0 * np.pi * freqs / sample_rate
    return fir[c] + 2.0 * np.cos(np.multiply.outer(omega, lags)) @ fir[c + 1:]


def _peak_response(fir, sample_rate):
    return float(np.max(np.abs(zero_phase_response(fir, sample_rate, np.linspace(0.0, sample_rate / 2.0, _CHECK_POINTS)))))


@dataclass(frozen=True, eq=False)
class Material:
    name: str
    reflection_fir: np.ndarray
    sample_rate: int

    def __post_init__(self):
        fir = np.asarray(self.reflection_fir, dtype=float).reshape(-1)
        if not MIN_TAPS <= fir.size <= MAX_TAPS:
            raise ConfigurationError(f"Material '{self.name}': {fir.size} taps, expected {MIN_TAPS}-{MAX_TAPS}")
        if fir.size % 2 == 0:
            raise ConfigurationError(f"Material '{self.name}': reflection FIR needs an odd length")
        if not np.allclose(fir, fir[::-1], rtol=0.0, atol=1e-12):
            raise ConfigurationError(f"Material '{self.name}': reflection FIR must be symmetric")
        fir.setflags(write=False)
        object.__setattr__(self, 'reflection_fir', fir)
        peak = _peak_response(fir, self.sample_rate)
        if peak > _PASSIVE_LIMIT:
            raise ConfigurationError(f"Material '{self.name}' is not passive (peak response {peak:.6f})")

    @property
    def centre(self):
        return (self.reflection_fir.size - 1) // 2

    def amplitude(self, freqs):
        """Zero-phase (real) frequency response at `freqs` in Hz."""
        return zero_phase_response(self.reflection_fir, self.sample_rate, freqs)

    def is_rigid(self):
        centred = np.zeros_like(self.reflection_fir)
        centred[self.centre] = 1.0
        return np.array_equal(self.reflection_fir, centred)


def _materials_file(path=None):
    path = path or get_setting('MATERIALS_FILE')
    if path is None:
        path = Path(__file__).resolve().parents[2] / 'data' / 'materials.json'
    return Path(path)


@lru_cache(maxsize=8)
def load_absorption_tables(path=None):
    """Return (octave band centres, {name: absorption per band})."""
    path = _materials_file(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read material tables from {path}: {e}") from e
    bands = tuple(float(b) for b in data['octave_bands_hz'])
    tables = {}
    for name, alphas in data['absorption'].items():
        if len(alphas) != len(bands):
            raise ConfigurationError(f"Material '{name}' has {len(alphas)} coefficients for {len(bands)} bands")
        if any(not 0.0 <= a <= 1.0 for a in alphas):
            raise ConfigurationError(f"Material '{name}' has absorption outside [0, 1]")
        tables[name] = tuple(float(a) for a in alphas)
    return bands, tables


def design_material(name, absorption, bands, sample_rate, taps):
    if taps % 2 == 0:
        # odd lengths only, so the largest usable design is MAX_TAPS - 1
        taps = taps + 1 if taps < MAX_TAPS else taps - 1
    if all(a == 0.0 for a in absorption):
        fir = np.zeros(taps)
        fir[(taps - 1) // 2] = 1.0
        return Material(name, fir, sample_rate)

    nyquist = sample_rate / 2.0
    reflection = np.sqrt(1.0 - np.asarray(absorption))
    keep = np.asarray(bands) < nyquist
    freq = np.concatenate([[0.0], np.asarray(bands)[keep], [nyquist]])
    kept = reflection[keep]
    gain = np.concatenate([[kept[0]], kept, [kept[-1]]])
    fir = signal.firwin2(taps, freq, gain, fs=sample_rate)
    fir = 0.5 * (fir + fir[::-1])

    peak = _peak_response(fir, sample_rate)
    if peak > 1.0 - _DESIGN_MARGIN:
        # Leave headroom for frequencies between the check points
        fir = fir / (peak * (1.0 + _DESIGN_MARGIN))
    return Material(name, fir, sample_rate)


@lru_cache(maxsize=16)
def material_bank(sample_rate, taps=None, path=None):
    """All presets designed for `sample_rate`, keyed by name."""
    taps = taps or get_setting('MATERIAL_TAPS')
    bands, tables = load_absorption_tables(path)
    bank = {name: design_material(name, alphas, bands, int(sample_rate), int(taps)) for name, alphas in tables.items()}
    logger.debug(f"Designed {len(bank)} materials at {sample_rate} Hz with {taps} taps")
    return bank


def absorptive_presets(path=None):
    _, tables = load_absorption_tables(path)
    return tuple(name for name, alphas in tables.items() if any(a > 0.0 for a in alphas))


def resolve_surfaces(surface_materials, bank):
    """Materials for the six surfaces, in surface index order."""
    resolved = []
    for index, name in enumerate(surface_materials):
        try:
            resolved.append(bank[name])
        except KeyError:
            raise ConfigurationError(f"Unknown material '{name}' on surface {index}") from None
    return tuple(resolved)
