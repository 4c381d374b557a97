"""
Batch evaluation of extractors over a mixture dataset.

Every pair is scored independently; a pair that fails to load (corrupt audio, broken
identity, missing files) is skipped and logged. Evaluation only reads the dataset.
"""

import logging
from pathlib import Path

from ..ambisonics.directions import Direction
from ..conf import get_setting
from ..exceptions import ConfigurationError, DataIntegrityError, SoundfieldError
from ..extractors.registry import ExtractorAlgorithm, ExtractorConfig, build_extractor
from ..mixing.dataset import list_pairs, load_pair
from ..utils.parallel import celery_map, ordered_map
from .report import PairScore, aggregate, score_pair

logger = logging.getLogger(__name__)


def evaluation_job(algorithms, extractor_overrides=None, with_loss=True):
    """Plain-dict evaluation settings, shared by local workers and Celery tasks."""
    names = [ExtractorAlgorithm.from_cli(a).cli_name for a in algorithms]
    if not names:
        raise ConfigurationError("At least one algorithm is required")
    return {
        'algorithms': names,
        'extractor': {k: v for k, v in (extractor_overrides or {}).items() if v is not None},
        'with_loss': with_loss,
        'clamp_db': get_setting('SDR_CLAMP_DB'),
        'close_cap_deg': get_setting('CLOSE_CAP_DEG'),
        'n_fft': get_setting('STFT_FFT'),
        'hop': get_setting('STFT_HOP'),
    }


def score_pair_dir(pair_dir, job):
    """Score every algorithm of `job` on one pair; returns score dicts or the skip reason."""
    pair_dir = Path(pair_dir)
    try:
        pair = load_pair(pair_dir)
        target_dir = Direction.from_dict(pair.meta['target']['direction'])
        scores = []
        for name in job['algorithms']:
            cfg = ExtractorConfig.from_settings(name, target_dir, **job['extractor'])
            estimate = build_extractor(cfg)(pair.mixture)
            scores.append(score_pair(
                pair, estimate, algorithm=name, clamp_db=job['clamp_db'],
                close_cap_deg=job['close_cap_deg'], with_loss=job['with_loss'],
                n_fft=job['n_fft'], hop=job['hop'],
            ).to_dict())
    except (SoundfieldError, OSError, KeyError, ValueError) as exc:
        logger.warning(f"Skipping pair {pair_dir.name}: {exc}")
        return {'pair_id': pair_dir.name, 'error': str(exc)}
    return {'pair_id': pair_dir.name, 'scores': scores}


def _evaluation_worker(args):
    pair_dir, job = args
    return score_pair_dir(pair_dir, job)


def evaluate_dataset(pairs_dir, job, workers=None, use_celery=False, progress=True):
    pair_dirs = [str(p) for p in list_pairs(pairs_dir)]
    if not pair_dirs:
        raise DataIntegrityError(f"Dataset {pairs_dir} has no pairs to evaluate")

    if use_celery:
        from ..tasks import score_pair_task
        results = celery_map(score_pair_task, [(p, job) for p in pair_dirs])
    else:
        results = ordered_map(_evaluation_worker, [(p, job) for p in pair_dirs],
                              workers=workers, desc='Evaluating pairs', progress=progress)

    skipped = [r['pair_id'] for r in results if 'error' in r]
    if len(skipped) == len(results):
        raise DataIntegrityError(f"All {len(results)} pairs of {pairs_dir} failed to load or score")
    scores = [PairScore.from_dict(s) for r in results if 'scores' in r for s in r['scores']]
    report = aggregate(scores, skipped=skipped)
    logger.info(f"Scored {len(results) - len(skipped)} pairs with {job['algorithms']}, skipped {len(skipped)}")
    return report
