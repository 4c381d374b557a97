from .evaluation import evaluate_dataset, evaluation_job, score_pair_dir
from .report import BUCKETS, AlgorithmSummary, EvalReport, PairScore, aggregate, score_pair
from .sdr import si_sdr
from .stft import Spectrogram, foa_stft, istft, stft, stft_l1_loss

__all__ = [
    'AlgorithmSummary',
    'BUCKETS',
    'EvalReport',
    'PairScore',
    'Spectrogram',
    'aggregate',
    'evaluate_dataset',
    'evaluation_job',
    'foa_stft',
    'istft',
    'score_pair',
    'score_pair_dir',
    'si_sdr',
    'stft',
    'stft_l1_loss',
]
