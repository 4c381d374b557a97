"""
Remixing of recorded FOA segments by rotation.

Each segment carries one static source direction. Rotating the whole segment moves that
source to a fresh direction on the sphere, so a small pool of annotated segments yields
many spatial layouts.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..ambisonics.directions import Direction, sample_uniform_direction
from ..ambisonics.encoding import FoaSignal
from ..ambisonics.rotation import apply_rotation, rotation_between
from ..conf import get_setting
from ..exceptions import DataIntegrityError, PoolExhaustedError, SignalFormatError
from ..utils.audio_io import read_foa_wav
from ..utils.manifests import load_manifest
from .clips import crossfade_samples, draw_offset, fit_clip_length, same_description
from .scene import MixturePair, close_secondary, mix_scene, place_near_target

logger = logging.getLogger(__name__)

SEGMENT_MANIFEST = 'segments.json'


@dataclass(frozen=True)
class SegmentRecord:
    segment_id: str
    path: str
    description: str
    direction: Direction

    @classmethod
    def from_dict(cls, data):
        return cls(
            data['segment_id'],
            data['file'],
            data.get('description', ''),
            Direction.from_degrees(data['azimuth_deg'], data['elevation_deg']),
        )


class FoaSegmentPool:
    def __init__(self, records, root=None, audio=None, sample_rate=None):
        self.records = list(records)
        self.root = Path(root) if root is not None else None
        self._audio = dict(audio or {})
        self.sample_rate = int(sample_rate or get_setting('SAMPLE_RATE'))
        if len({r.segment_id for r in self.records}) != len(self.records):
            raise DataIntegrityError("Segment ids must be unique within a pool")

    @classmethod
    def load(cls, root):
        root = Path(root)
        data = load_manifest(root / SEGMENT_MANIFEST, 'foa_segments')
        records = [SegmentRecord.from_dict(entry) for entry in data['segments']]
        return cls(records, root=root, sample_rate=data.get('sample_rate'))

    def __len__(self):
        return len(self.records)

    def audio(self, record):
        if record.segment_id in self._audio:
            return self._audio[record.segment_id]
        foa = read_foa_wav(self.root / record.path, expected_rate=self.sample_rate)
        return foa


def rotate_remix(segment, known_dir, rng, new_dir=None):
    """Rotate `segment` so its source moves from `known_dir` to a uniform random direction.

    Returns the rotated segment and the direction it now arrives from.
    """
    if new_dir is None:
        new_dir = sample_uniform_direction(rng)
    return apply_rotation(segment, rotation_between(known_dir, new_dir)), new_dir


def fit_segment_length(segment, num_samples, offset, crossfade):
    channels = [fit_clip_length(ch, num_samples, crossfade=crossfade, offset=offset) for ch in segment.samples]
    return FoaSignal(np.stack(channels), segment.sample_rate)


def build_remix_pair(rng, segment_pool, cfg):
    """Target and one secondary segment, each rotated to a fresh direction, then mixed."""
    if len(segment_pool) < 2:
        raise PoolExhaustedError("Segment remixing needs at least two segments")
    records = segment_pool.records
    target_record = records[int(rng.integers(0, len(records)))]
    target_dir = sample_uniform_direction(rng)

    near = rng.random() < cfg.near_prob
    candidates = [r for r in records if r.segment_id != target_record.segment_id]
    if near:
        candidates = [r for r in candidates if not same_description(r.description, target_record.description)]
        if not candidates:
            raise PoolExhaustedError(
                f"No segment with a description other than '{target_record.description}' for near placement"
            )
    secondary_record = candidates[int(rng.integers(0, len(candidates)))]
    secondary_dir = place_near_target(target_dir, rng, cfg.near_box_deg) if near else sample_uniform_direction(rng)

    low, high = cfg.gain_db_range
    gains = rng.uniform(low, high, size=2)
    silenced = bool(rng.random() < cfg.silence_prob) and not near

    fade = crossfade_samples(cfg.sample_rate, cfg.crossfade_ms)
    renders = []
    entries = []
    for record, direction, gain_db, is_target in (
        (target_record, target_dir, gains[0], True),
        (secondary_record, secondary_dir, gains[1], False),
    ):
        segment = segment_pool.audio(record)
        if segment.sample_rate != cfg.sample_rate:
            raise SignalFormatError(f"Segment '{record.segment_id}' is {segment.sample_rate} Hz")
        offset = draw_offset(rng, segment.num_samples, cfg.num_samples)
        rotated, _ = rotate_remix(segment, record.direction, rng, new_dir=direction)
        fitted = fit_segment_length(rotated, cfg.num_samples, offset, fade)
        renders.append(fitted.scaled(10.0 ** (float(gain_db) / 20.0)))
        entries.append(_RemixSource(is_target, silenced and not is_target, {
            'segment_id': record.segment_id,
            'description': record.description,
            'original_direction': record.direction.to_dict(),
            'direction': direction.to_dict(),
            'gain_db': float(gain_db),
            'offset': offset,
            'silenced': silenced and not is_target,
            'near': near and not is_target,
        }))

    pair = mix_scene(entries, renders, cfg.sample_rate)
    secondaries = [entries[1].meta]
    meta = {
        'kind': 'segment_remix',
        'sample_rate': cfg.sample_rate,
        'num_samples': cfg.num_samples,
        'target': entries[0].meta,
        'secondaries': secondaries,
        'near_placed': bool(near),
        'peak_scale': pair.meta['peak_scale'],
        'close_secondary': close_secondary(target_dir, secondaries, cfg.close_cap_deg),
    }
    return MixturePair(pair.mixture, pair.target, pair.residual, meta)


@dataclass(frozen=True)
class _RemixSource:
    is_target: bool
    silenced: bool
    meta: dict
