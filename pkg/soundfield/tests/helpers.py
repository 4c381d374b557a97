"""
Shared fixtures: synthetic clip pools, anechoic scenes and plane-wave signals.
"""

import os

import numpy as np

from soundfield.acoustics.bank import InMemorySceneBank, SceneRirs
from soundfield.acoustics.geometry import Room, SceneGeometry, source_from_positions
from soundfield.acoustics.simulator import AmbisonicRir, SimulationConfig
from soundfield.ambisonics.directions import Direction, sample_uniform_directions
from soundfield.ambisonics.encoding import FoaSignal, encode_plane_wave, sh_eval
from soundfield.mixing.clips import ClipPool
from soundfield.mixing.scene import MixerConfig, MixturePair, quantize

FS = 16000
SLOW_TESTS = os.environ.get('SOUNDFIELD_SLOW_TESTS') == '1'

DESCRIPTIONS = ('speech', 'dog barking', 'piano', 'rain', 'door knock', 'guitar')


def noise(seed, num_samples):
    return np.random.default_rng(seed).standard_normal(num_samples)


def clip_pool(descriptions=DESCRIPTIONS, num_samples=6000, seed=0):
    """In-memory pool with one noise clip per description, lengths varying around `num_samples`."""
    rng = np.random.default_rng(seed)
    clips = []
    for k, description in enumerate(descriptions):
        length = num_samples + 500 * (k % 3) - 500
        clips.append((f'clip_{k:06d}', description, 0.05 * rng.standard_normal(length)))
    return ClipPool.from_arrays(clips, sample_rate=FS)


def impulse_rir(direction, length=32, delay=0):
    samples = np.zeros((4, length))
    samples[:, delay] = sh_eval(direction).coefficients
    return AmbisonicRir(samples, FS, max_delay_samples=float(delay), path_count=1)


def anechoic_scene(directions, scene_id='scene_000000'):
    """Scene whose RIRs are single on-time plane-wave impulses from `directions`."""
    room = Room((8.0, 8.0, 8.0))
    receiver = np.array([4.0, 4.0, 4.0])
    sources = [source_from_positions(receiver, receiver + 1.5 * d.unit_vector()) for d in directions]
    geometry = SceneGeometry(room, receiver, sources)
    rirs = [impulse_rir(s.direction) for s in sources]
    return SceneRirs(scene_id, geometry, rirs)


def anechoic_bank(count, n_sources=4, seed=0):
    rng = np.random.default_rng(seed)
    return InMemorySceneBank(
        anechoic_scene(sample_uniform_directions(rng, n_sources), scene_id=f'scene_{k:06d}')
        for k in range(count)
    )


def mixer_config(**overrides):
    values = {
        'sample_rate': FS,
        'num_samples': 4096,
        'gain_db_range': (-10.0, 10.0),
        'silence_prob': 0.2,
        'near_prob': 0.5,
    }
    values.update(overrides)
    return MixerConfig(**values)


def small_simulation(**overrides):
    values = {
        'max_order': 2,
        'jitter': 0.0,
        'fs': FS,
        'max_duration_s': 0.2,
        'engine': 'exact',
    }
    values.update(overrides)
    return SimulationConfig(**values)


def plane_wave(direction, mono):
    return encode_plane_wave(mono, direction, FS)


def plane_wave_pair(target_dir, interferer_dirs=(), num_samples=4096, seed=0, interferer_gain=1.0, quantized=True):
    """Anechoic pair of one target and uncorrelated plane-wave interferers, with matching metadata.

    Quantized pairs keep mixture = target + residual exact in float32 WAV files.
    """
    target = plane_wave(target_dir, 0.1 * noise(seed, num_samples))
    residual = FoaSignal.zeros(num_samples, FS)
    for k, direction in enumerate(interferer_dirs):
        residual = residual + plane_wave(direction, 0.1 * interferer_gain * noise(seed + k + 1, num_samples))
    if quantized:
        target = FoaSignal(quantize(target.samples), FS)
        residual = FoaSignal(quantize(residual.samples), FS)
    meta = {
        'pair_id': f'pair_{seed:06d}',
        'sample_rate': FS,
        'target': {'direction': target_dir.to_dict()},
        'secondaries': [{'direction': d.to_dict(), 'silenced': False} for d in interferer_dirs],
    }
    return MixturePair(target + residual, target, residual, meta)


def degrees(azimuth, elevation=0.0):
    return Direction.from_degrees(azimuth, elevation)
