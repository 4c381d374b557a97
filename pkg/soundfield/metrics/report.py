"""
Per-pair scores and bucketed aggregate reports.

A pair is in the close-secondary bucket when at least one active secondary lies within
the close cap (15 degrees great-circle) of the target direction.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ..conf import get_setting
from ..exceptions import DegenerateInputError, SignalFormatError
from ..mixing.dataset import close_secondary_from_meta
from .sdr import CLAMP_DB, si_sdr
from .stft import FFT_SIZE, HOP, stft_l1_loss

logger = logging.getLogger(__name__)

BUCKETS = ('all', 'only_close_secondary', 'no_close_secondary')
TABLE_COLUMNS = {
    'all': 'SI-SDRi [dB] (all)',
    'only_close_secondary': '(only close secondary)',
    'no_close_secondary': '(no close secondary)',
}

# Target channels this far below the loudest one (-200 dB) count as silent
SILENT_CHANNEL_RATIO = 1e-20


@dataclass(frozen=True)
class PairScore:
    pair_id: str
    algorithm: str
    close_secondary: bool
    channel_si_sdr_mix: tuple
    channel_si_sdr_est: tuple
    excluded_channels: tuple = ()
    stft_l1: float = None

    @property
    def si_sdr_mix_db(self):
        return float(np.mean(self.channel_si_sdr_mix))

    @property
    def si_sdr_est_db(self):
        return float(np.mean(self.channel_si_sdr_est))

    @property
    def si_sdri_db(self):
        return self.si_sdr_est_db - self.si_sdr_mix_db

    def to_dict(self):
        return {
            'pair_id': self.pair_id,
            'algorithm': self.algorithm,
            'close_secondary': self.close_secondary,
            'channel_si_sdr_mix': list(self.channel_si_sdr_mix),
            'channel_si_sdr_est': list(self.channel_si_sdr_est),
            'excluded_channels': list(self.excluded_channels),
            'stft_l1': self.stft_l1,
            'si_sdr_mix_db': self.si_sdr_mix_db,
            'si_sdr_est_db': self.si_sdr_est_db,
            'si_sdri_db': self.si_sdri_db,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            pair_id=data['pair_id'],
            algorithm=data['algorithm'],
            close_secondary=bool(data['close_secondary']),
            channel_si_sdr_mix=tuple(data['channel_si_sdr_mix']),
            channel_si_sdr_est=tuple(data['channel_si_sdr_est']),
            excluded_channels=tuple(data.get('excluded_channels', ())),
            stft_l1=data.get('stft_l1'),
        )


def active_channels(target):
    energies = np.sum(target.samples ** 2, axis=1)
    loudest = energies.max()
    if loudest == 0.0:
        raise DegenerateInputError("Cannot score against a silent target")
    return [c for c in range(len(energies)) if energies[c] > SILENT_CHANNEL_RATIO * loudest]


def score_pair(pair, estimate, algorithm='', clamp_db=CLAMP_DB, close_cap_deg=None,
               with_loss=False, n_fft=FFT_SIZE, hop=HOP):
    if estimate.samples.shape != pair.target.samples.shape:
        raise SignalFormatError(
            f"Estimate shaped {estimate.samples.shape} does not match the target {pair.target.samples.shape}"
        )
    channels = active_channels(pair.target)
    excluded = tuple(c for c in range(pair.target.samples.shape[0]) if c not in channels)
    if excluded:
        logger.debug(f"Pair {pair.meta.get('pair_id')}: silent target channels {excluded} left out")
    target = pair.target.samples
    return PairScore(
        pair_id=pair.meta.get('pair_id', ''),
        algorithm=algorithm,
        close_secondary=close_secondary_from_meta(pair.meta, close_cap_deg),
        channel_si_sdr_mix=tuple(si_sdr(pair.mixture.samples[c], target[c], clamp_db) for c in channels),
        channel_si_sdr_est=tuple(si_sdr(estimate.samples[c], target[c], clamp_db) for c in channels),
        excluded_channels=excluded,
        stft_l1=stft_l1_loss(pair.target, estimate, n_fft, hop) if with_loss else None,
    )


@dataclass
class AlgorithmSummary:
    algorithm: str
    means: dict
    counts: dict
    mean_stft_l1: float = None

    def to_dict(self):
        return {
            'algorithm': self.algorithm,
            'mean_si_sdri_db': dict(self.means),
            'pair_counts': dict(self.counts),
            'mean_stft_l1': self.mean_stft_l1,
        }


@dataclass
class EvalReport:
    summaries: list
    scores: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def summary(self, algorithm):
        for summary in self.summaries:
            if summary.algorithm == algorithm:
                return summary
        raise KeyError(algorithm)

    def to_dict(self):
        return {
            'schema_version': get_setting('SCHEMA_VERSION'),
            'buckets': list(BUCKETS),
            'algorithms': [s.to_dict() for s in self.summaries],
            'skipped_pairs': list(self.skipped),
            'scores': [s.to_dict() for s in self.scores],
        }

    def to_table(self):
        rows = []
        for s in self.summaries:
            row = {'Algorithm': s.algorithm}
            for bucket in BUCKETS:
                mean = s.means[bucket]
                row[TABLE_COLUMNS[bucket]] = 'n/a' if mean is None else f'{mean:.2f} (n={s.counts[bucket]})'
            rows.append(row)
        frame = pd.DataFrame(rows, columns=['Algorithm', *TABLE_COLUMNS.values()])
        return frame.to_string(index=False) + '\n'


def _bucket_mean(values):
    return float(values.mean()) if len(values) else None


def aggregate(scores, skipped=()):
    """Mean SI-SDRi per algorithm and bucket; an empty bucket is None, never 0."""
    if not scores:
        raise DegenerateInputError("No pair scores to aggregate")
    frame = pd.DataFrame({
        'algorithm': [s.algorithm for s in scores],
        'close_secondary': [bool(s.close_secondary) for s in scores],
        'si_sdri_db': [s.si_sdri_db for s in scores],
        'stft_l1': [s.stft_l1 for s in scores],
    })
    summaries = []
    for algorithm, group in frame.groupby('algorithm', sort=False):
        close = group.loc[group['close_secondary'], 'si_sdri_db']
        far = group.loc[~group['close_secondary'], 'si_sdri_db']
        losses = pd.to_numeric(group['stft_l1'], errors='coerce').dropna()
        summaries.append(AlgorithmSummary(
            algorithm=algorithm,
            means={
                'all': _bucket_mean(group['si_sdri_db']),
                'only_close_secondary': _bucket_mean(close),
                'no_close_secondary': _bucket_mean(far),
            },
            counts={'all': len(group), 'only_close_secondary': len(close), 'no_close_secondary': len(far)},
            mean_stft_l1=_bucket_mean(losses),
        ))
    return EvalReport(summaries=summaries, scores=list(scores), skipped=list(skipped))
