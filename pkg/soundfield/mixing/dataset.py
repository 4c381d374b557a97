"""
Mixture datasets on disk.

Layout::

    <root>/manifest.json
    <root>/pairs/pair_<index>/mixture.wav
    <root>/pairs/pair_<index>/target.wav
    <root>/pairs/pair_<index>/residual.wav
    <root>/pairs/pair_<index>/meta.json
"""

import json
import logging
from functools import lru_cache
from pathlib import Path

from ..acoustics.bank import RirBank, SimulatingSceneProvider
from ..acoustics.simulator import SimulationConfig
from ..ambisonics.directions import Direction
from ..conf import get_setting
from ..exceptions import ConfigurationError, DataIntegrityError, PoolExhaustedError
from ..utils.audio_io import read_foa_wav, write_foa_wav
from ..utils.manifests import dump_json, load_json, load_manifest
from ..utils.parallel import celery_map, ordered_map
from ..utils.seeding import item_rng
from .clips import ClipPool
from .scene import PAIR_STREAM, MixerConfig, MixturePair, build_pair, close_secondary
from .segments import FoaSegmentPool, build_remix_pair

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'
META_FILE = 'meta.json'
IDENTITY_TOLERANCE = 1e-6


def pair_name(index):
    return f'pair_{int(index):06d}'


def close_secondary_from_meta(meta, cap_deg=None):
    """Recompute the close-secondary bucket label from the directions in `meta`."""
    cap_deg = get_setting('CLOSE_CAP_DEG') if cap_deg is None else cap_deg
    target_dir = Direction.from_dict(meta['target']['direction'])
    return close_secondary(target_dir, meta['secondaries'], cap_deg)


def write_pair(pair, pair_dir):
    pair_dir = Path(pair_dir)
    write_foa_wav(pair_dir / 'mixture.wav', pair.mixture)
    write_foa_wav(pair_dir / 'target.wav', pair.target)
    write_foa_wav(pair_dir / 'residual.wav', pair.residual)
    dump_json(pair_dir / META_FILE, pair.meta)


def load_pair(pair_dir, tolerance=IDENTITY_TOLERANCE):
    """Read a pair back, refusing one whose mixture is not target + residual."""
    pair_dir = Path(pair_dir)
    meta = load_json(pair_dir / META_FILE)
    rate = meta.get('sample_rate')
    pair = MixturePair(
        mixture=read_foa_wav(pair_dir / 'mixture.wav', expected_rate=rate),
        target=read_foa_wav(pair_dir / 'target.wav', expected_rate=rate),
        residual=read_foa_wav(pair_dir / 'residual.wav', expected_rate=rate),
        meta=meta,
    )
    if not pair.mixture.num_samples == pair.target.num_samples == pair.residual.num_samples:
        raise DataIntegrityError(f"{pair_dir}: mixture, target and residual differ in length")
    error = pair.identity_error()
    if error > tolerance:
        raise DataIntegrityError(f"{pair_dir}: mixture differs from target + residual by {error:.3g}")
    return pair


def list_pairs(root):
    """Pair directories of a dataset, in index order."""
    root = Path(root)
    manifest = load_manifest(root / MANIFEST_NAME, 'mixture_dataset')
    return [root / entry['path'] for entry in manifest['pairs']]


@lru_cache(maxsize=4)
def _load_sources(clips_dir, rir_dir, segments_dir, simulation):
    if segments_dir:
        return FoaSegmentPool.load(segments_dir), None
    pool = ClipPool.load(clips_dir)
    if rir_dir:
        return pool, RirBank.load(rir_dir)
    return pool, SimulatingSceneProvider(SimulationConfig.from_dict(json.loads(simulation)))


def _open_sources(job):
    """Pool and scene provider of a job, loaded once per process."""
    simulation = json.dumps(job.get('simulation'), sort_keys=True)
    return _load_sources(job.get('clips_dir'), job.get('rir_dir'), job.get('segments_dir'), simulation)


def make_pair(job, index, pool=None, provider=None):
    """Build pair `index` of the dataset described by `job`."""
    cfg = MixerConfig.from_dict(job['mixer'])
    if pool is None:
        pool, provider = _open_sources(job)
    rng = item_rng(job['seed'], index, stream=PAIR_STREAM)
    if job.get('segments_dir'):
        pair = build_remix_pair(rng, pool, cfg)
    else:
        pair = build_pair(rng, pool, provider, cfg)
    pair.meta.update({'pair_id': pair_name(index), 'index': index, 'seed': job['seed']})
    return pair


def write_dataset_item(job, index, pool=None, provider=None):
    try:
        pair = make_pair(job, index, pool, provider)
        write_pair(pair, Path(job['out_dir']) / 'pairs' / pair_name(index))
    except Exception:
        logger.error(f"Pair {index} failed", exc_info=True)
        raise
    return {
        'pair_id': pair_name(index),
        'index': index,
        'path': f'pairs/{pair_name(index)}',
        'close_secondary': pair.meta['close_secondary'],
        'near_placed': pair.meta['near_placed'],
        'active_secondaries': sum(not s['silenced'] for s in pair.meta['secondaries']),
    }


def _dataset_worker(args):
    job, index = args
    return write_dataset_item(job, index)


def dataset_job(out_dir, seed, mixer_cfg, clips_dir=None, rir_dir=None, segments_dir=None, simulation=None):
    """Plain-dict description of a dataset build, shared by local workers and Celery tasks."""
    if segments_dir is None and clips_dir is None:
        raise ConfigurationError("A dataset needs a clip pool or a segment pool")
    return {
        'out_dir': str(out_dir),
        'seed': seed,
        'mixer': mixer_cfg.to_dict(),
        'clips_dir': str(clips_dir) if clips_dir else None,
        'rir_dir': str(rir_dir) if rir_dir else None,
        'segments_dir': str(segments_dir) if segments_dir else None,
        'simulation': (simulation or SimulationConfig.from_settings()).to_dict(),
    }


def _check_pool(job):
    pool, provider = _open_sources(job)
    near_prob = job['mixer']['near_prob']
    if near_prob > 0.0 and len({r.description.strip().casefold() for r in pool.records}) < 2:
        raise PoolExhaustedError("Near placement needs clips with at least two different descriptions")
    return pool, provider


def generate_dataset(job, count, workers=None, use_celery=False, progress=True):
    count = int(count)
    if count < 0:
        raise ConfigurationError(f"count must be >= 0, got {count}")
    root = Path(job['out_dir'])
    root.mkdir(parents=True, exist_ok=True)
    _load_sources.cache_clear()
    _check_pool(job)

    if use_celery:
        from ..tasks import build_pair_task
        entries = celery_map(build_pair_task, [(job, i) for i in range(count)])
    else:
        entries = ordered_map(_dataset_worker, [(job, i) for i in range(count)],
                              workers=workers, desc='Mixture pairs', progress=progress)

    close_count = sum(e['close_secondary'] for e in entries)
    manifest = {
        'schema_version': get_setting('SCHEMA_VERSION'),
        'kind': 'mixture_dataset',
        'seed': job['seed'],
        'count': count,
        'config': {k: v for k, v in job.items() if k != 'out_dir'},
        'pairs': entries,
        'stats': {
            'close_secondary_count': close_count,
            'close_secondary_fraction': close_count / count if count else None,
            'near_placed_count': sum(e['near_placed'] for e in entries),
        },
    }
    dump_json(root / MANIFEST_NAME, manifest)
    logger.info(f"Wrote {count} pairs to {root} ({close_count} with a close secondary)")
    return manifest
