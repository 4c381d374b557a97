"""
Mono clip pool and the generic clip importer.

Imported clips are mono, float32, at the toolkit sample rate and RMS-normalized, so
the mixer's gain range means the same thing for every clip. `clips.json` at the pool
root lists each clip with its free-text description.
"""

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import signal

from ..conf import get_setting
from ..exceptions import DataIntegrityError, DegenerateInputError, PoolExhaustedError, SignalFormatError
from ..utils.audio_io import read_mono, write_mono_wav
from ..utils.manifests import dump_json, load_manifest

logger = logging.getLogger(__name__)

POOL_MANIFEST = 'clips.json'
AUDIO_SUFFIXES = ('.wav', '.flac', '.ogg', '.aiff', '.aif')


@dataclass(frozen=True)
class ClipRecord:
    clip_id: str
    path: str
    description: str
    sample_rate: int
    num_samples: int

    def to_dict(self):
        return asdict(self)


def same_description(a, b):
    return a.strip().casefold() == b.strip().casefold()


class ClipPool:
    """Clips by id; audio comes from `root` or from an in-memory mapping."""

    def __init__(self, records, root=None, audio=None, sample_rate=None):
        self.records = list(records)
        self.root = Path(root) if root is not None else None
        self._audio = dict(audio or {})
        self.sample_rate = int(sample_rate or get_setting('SAMPLE_RATE'))
        self._by_id = {r.clip_id: r for r in self.records}
        if len(self._by_id) != len(self.records):
            raise DataIntegrityError("Clip ids must be unique within a pool")

    @classmethod
    def load(cls, root):
        root = Path(root)
        data = load_manifest(root / POOL_MANIFEST, 'clip_pool')
        records = [ClipRecord(**entry) for entry in data['clips']]
        return cls(records, root=root, sample_rate=data['sample_rate'])

    @classmethod
    def from_arrays(cls, clips, sample_rate=None):
        """In-memory pool from (clip_id, description, samples) triples."""
        sample_rate = int(sample_rate or get_setting('SAMPLE_RATE'))
        records, audio = [], {}
        for clip_id, description, samples in clips:
            samples = np.asarray(samples, dtype=float).reshape(-1)
            records.append(ClipRecord(clip_id, '', description, sample_rate, samples.size))
            audio[clip_id] = samples
        return cls(records, audio=audio, sample_rate=sample_rate)

    def __len__(self):
        return len(self.records)

    def record(self, clip_id):
        try:
            return self._by_id[clip_id]
        except KeyError:
            raise PoolExhaustedError(f"Unknown clip '{clip_id}'") from None

    def audio(self, clip_id):
        record = self.record(clip_id)
        if clip_id in self._audio:
            return self._audio[clip_id]
        samples, rate = read_mono(self.root / record.path)
        if rate != self.sample_rate:
            raise SignalFormatError(f"Clip '{clip_id}' is {rate} Hz, pool expects {self.sample_rate} Hz")
        return samples

    def distinct_descriptions(self):
        return {r.description.strip().casefold() for r in self.records}


def rms_dbfs(samples):
    rms = float(np.sqrt(np.mean(np.square(samples)))) if np.size(samples) else 0.0
    return 20.0 * math.log10(rms) if rms > 0.0 else -math.inf


def normalize_rms(samples, target_dbfs):
    samples = np.asarray(samples, dtype=float)
    rms = float(np.sqrt(np.mean(np.square(samples)))) if samples.size else 0.0
    if rms == 0.0:
        raise DegenerateInputError("Cannot normalize a silent clip")
    return samples * (10.0 ** (target_dbfs / 20.0) / rms)


def crossfade_samples(sample_rate, crossfade_ms=None):
    crossfade_ms = get_setting('CROSSFADE_MS') if crossfade_ms is None else crossfade_ms
    return int(round(sample_rate * crossfade_ms / 1000.0))


def draw_offset(rng, clip_length, num_samples):
    """Random crop start for a long clip; short clips always start at 0."""
    if clip_length <= num_samples:
        return 0
    return int(rng.integers(0, clip_length - num_samples + 1))


def fit_clip_length(clip, num_samples, rng=None, crossfade=0, offset=None):
    """Crop a long clip (at `offset`, or a random start) or loop a short one.

    Loops overlap by `crossfade` samples with a raised-cosine fade.
    """
    clip = np.asarray(clip, dtype=float).reshape(-1)
    if clip.size == 0:
        raise DegenerateInputError("Cannot fit an empty clip")
    if clip.size >= num_samples:
        if offset is None:
            offset = draw_offset(rng, clip.size, num_samples) if rng is not None else 0
        return clip[offset:offset + num_samples].copy()

    overlap = min(int(crossfade), clip.size // 2)
    fade_in = 0.5 - 0.5 * np.cos(np.pi * (np.arange(overlap) + 0.5) / overlap) if overlap else np.zeros(0)
    pieces = [clip]
    length = clip.size
    tail = clip[-overlap:] if overlap else None
    while length < num_samples:
        if overlap:
            pieces[-1] = pieces[-1][:-overlap]
            pieces.append(tail * (1.0 - fade_in) + clip[:overlap] * fade_in)
            pieces.append(clip[overlap:])
            length += clip.size - overlap
        else:
            pieces.append(clip)
            length += clip.size
    return np.concatenate(pieces)[:num_samples]


def resample_to(samples, rate, target_rate):
    if rate == target_rate:
        return samples
    divisor = math.gcd(int(rate), int(target_rate))
    return signal.resample_poly(samples, int(target_rate) // divisor, int(rate) // divisor)


def read_descriptions(csv_path):
    """{file name or stem: description} from a CSV with `filename` and `description` columns."""
    frame = pd.read_csv(csv_path, dtype=str).fillna('')
    missing = {'filename', 'description'} - set(frame.columns)
    if missing:
        raise DataIntegrityError(f"{csv_path} lacks column(s) {sorted(missing)}")
    descriptions = {}
    for filename, description in zip(frame['filename'], frame['description']):
        filename = filename.strip()
        descriptions[filename] = description
        descriptions.setdefault(Path(filename).stem, description)
    return descriptions


def import_clip(path, out_dir, clip_id, description, sample_rate, target_dbfs):
    samples, rate = read_mono(path)
    samples = resample_to(samples, rate, sample_rate)
    samples = normalize_rms(samples, target_dbfs)
    relative = f'clips/{clip_id}.wav'
    write_mono_wav(Path(out_dir) / relative, samples, sample_rate)
    return ClipRecord(clip_id, relative, description, sample_rate, int(samples.size))


def import_clips(source_dir, out_dir, descriptions_csv=None, sample_rate=None, target_dbfs=None):
    """Import every audio file under `source_dir` into a clip pool at `out_dir`."""
    source_dir = Path(source_dir)
    out_dir = Path(out_dir)
    sample_rate = int(sample_rate or get_setting('SAMPLE_RATE'))
    target_dbfs = get_setting('CLIP_RMS_DBFS') if target_dbfs is None else target_dbfs
    if not source_dir.is_dir():
        raise FileNotFoundError(f"Clip source directory {source_dir} does not exist")
    descriptions = read_descriptions(descriptions_csv) if descriptions_csv else {}

    files = sorted(p for p in source_dir.rglob('*') if p.suffix.lower() in AUDIO_SUFFIXES)
    records = []
    skipped = 0
    for index, path in enumerate(files):
        relative_name = str(path.relative_to(source_dir))
        description = descriptions.get(relative_name) or descriptions.get(path.name) or descriptions.get(path.stem) or path.stem
        clip_id = f'clip_{index:06d}'
        try:
            records.append(import_clip(path, out_dir, clip_id, description, sample_rate, target_dbfs))
        except DegenerateInputError:
            logger.warning(f"Skipping silent clip {path}")
            skipped += 1

    dump_json(out_dir / POOL_MANIFEST, {
        'schema_version': get_setting('SCHEMA_VERSION'),
        'kind': 'clip_pool',
        'sample_rate': sample_rate,
        'rms_dbfs': target_dbfs,
        'clips': [r.to_dict() for r in records],
    })
    logger.info(f"Imported {len(records)} clips into {out_dir} ({skipped} skipped)")
    return ClipPool(records, root=out_dir, sample_rate=sample_rate)
