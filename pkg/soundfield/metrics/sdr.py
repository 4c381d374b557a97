"""
Scale-invariant signal-to-distortion ratio.

No mean removal: the projection uses the raw signals. Results are clamped to
[-clamp_db, clamp_db] so perfect and silent estimates stay finite.
"""

import numpy as np

from ..exceptions import DegenerateInputError, SignalFormatError

CLAMP_DB = 100.0


def si_sdr(estimate, reference, clamp_db=CLAMP_DB):
    estimate = np.asarray(estimate, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if estimate.shape != reference.shape or estimate.ndim != 1:
        raise SignalFormatError(
            f"SI-SDR needs two equal-length channels, got {estimate.shape} and {reference.shape}"
        )
    reference_energy = float(reference @ reference)
    if reference_energy == 0.0:
        raise DegenerateInputError("SI-SDR is undefined for a zero-energy reference")
    scale = float(estimate @ reference) / reference_energy
    target = scale * reference
    distortion = estimate - target
    target_energy = float(target @ target)
    distortion_energy = float(distortion @ distortion)
    if target_energy == 0.0:
        return -clamp_db
    if distortion_energy == 0.0:
        return clamp_db
    value = 10.0 * np.log10(target_energy / distortion_energy)
    return float(np.clip(value, -clamp_db, clamp_db))
