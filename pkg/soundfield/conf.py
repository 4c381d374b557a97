"""
Access to the SOUNDFIELD settings dictionary with built-in defaults.

Library code takes explicit parameters; management commands and config
dataclasses use `get_setting` to fill in whatever the caller left out.
"""

from django.conf import settings

DEFAULTS = {
    'SAMPLE_RATE': 16000,
    'SEGMENT_SAMPLES': 65536,
    'SPEED_OF_SOUND': 343.0,
    'MAX_ORDER': 40,
    'MAX_RIR_SECONDS': 1.5,
    'JITTER_M': 0.05,
    'MIN_DISTANCE_M': 0.1,
    'MATERIAL_TAPS': 33,
    'SIM_ENGINE': 'fast',
    'SOURCES_PER_SCENE': 4,
    'GAIN_DB_RANGE': (-10.0, 10.0),
    'SILENCE_PROB': 0.2,
    'NEAR_PROB': 0.5,
    'NEAR_BOX_DEG': 15.0,
    'CLOSE_CAP_DEG': 15.0,
    'CLIP_RMS_DBFS': -25.0,
    'CROSSFADE_MS': 10.0,
    'CAP_SPREAD_DEG': 60.0,
    'LOUDNESS_OUT_GAIN': 0.0,
    'GRID_SIZE': 36,
    'STFT_FFT': 1024,
    'STFT_HOP': 256,
    'SDR_CLAMP_DB': 100.0,
    'SCHEMA_VERSION': 1,
    'MATERIALS_FILE': None,
}


def get_setting(name):
    """Return SOUNDFIELD[name], falling back to the built-in default."""
    configured = getattr(settings, 'SOUNDFIELD', {}) if settings.configured else {}
    if name in configured:
        return configured[name]
    try:
        return DEFAULTS[name]
    except KeyError:
        raise KeyError(f"Unknown soundfield setting '{name}'") from None
