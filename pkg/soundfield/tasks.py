import logging

from celery import shared_task

from .acoustics.bank import simulate_and_write
from .metrics.evaluation import score_pair_dir
from .mixing.dataset import write_dataset_item

logger = logging.getLogger(__name__)


@shared_task(name='soundfield.simulate_scene')
def simulate_scene_task(seed, index, cfg_dict, n_sources, materials, root, keep=None):
    """Simulate RIR scene `index` of a bank (its first `keep` sources) under `root`; returns its manifest entry."""
    logger.info(f"Simulating scene {index} (seed {seed}) into {root}")
    return simulate_and_write((seed, index, cfg_dict, n_sources, materials, root, keep))


@shared_task(name='soundfield.build_pair')
def build_pair_task(job, index):
    """Build and write mixture pair `index`; returns its manifest entry."""
    return write_dataset_item(job, index)


@shared_task(name='soundfield.score_pair')
def score_pair_task(pair_dir, job):
    return score_pair_dir(pair_dir, job)
