"""
Best-effort run provenance.

Artifacts never depend on the database: when it is missing or unmigrated, recording
logs a warning and the command carries on.
"""

import logging

from django.db import DatabaseError, transaction
from django.utils import timezone

from .models import AlgorithmResult, RunRecord

logger = logging.getLogger(__name__)


def start_run(command, enabled=True, **fields):
    if not enabled:
        return None
    if fields.get('seed') is not None:
        fields['seed'] = str(fields['seed'])
    try:
        return RunRecord.objects.create(command=command, **fields)
    except DatabaseError as e:
        logger.warning(f"Run provenance disabled for '{command}': {e}")
        return None


def finish_run(record, status, item_count=0, skipped_count=0, message=None):
    if record is None:
        return
    record.status = status
    record.item_count = item_count
    record.skipped_count = skipped_count
    record.message = message
    record.finished_at = timezone.now()
    try:
        record.save()
    except DatabaseError as e:
        logger.warning(f"Could not update run {record.pk}: {e}")


def record_results(record, report):
    """Store the bucket means of an evaluation report against `record`."""
    if record is None:
        return
    try:
        with transaction.atomic():
            for summary in report.summaries:
                AlgorithmResult.objects.update_or_create(
                    run=record,
                    algorithm=summary.algorithm,
                    defaults={
                        'mean_all_db': summary.means['all'],
                        'mean_close_db': summary.means['only_close_secondary'],
                        'mean_no_close_db': summary.means['no_close_secondary'],
                        'count_all': summary.counts['all'],
                        'count_close': summary.counts['only_close_secondary'],
                        'count_no_close': summary.counts['no_close_secondary'],
                    },
                )
    except DatabaseError as e:
        logger.warning(f"Could not store results of run {record.pk}: {e}")
