"""
Shared plumbing for the soundfield management commands.

Exit codes: 2 for configuration and usage errors, 3 for I/O errors, 4 for data that
violates an invariant it was written with.
"""

import logging

from django.core.management.base import BaseCommand, CommandError

from ..exceptions import (
    DataIntegrityError,
    DegenerateInputError,
    SignalFormatError,
    SoundfieldError,
)
from ..provenance import finish_run, start_run

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DATA = 4


def exit_code_for(error):
    if isinstance(error, (DataIntegrityError, DegenerateInputError)):
        return EXIT_DATA
    if isinstance(error, (OSError, SignalFormatError)):
        return EXIT_IO
    return EXIT_CONFIG


class SoundfieldCommand(BaseCommand):
    """Runs `run(**options)` and turns domain errors into CommandErrors with exit codes."""

    record_runs = False

    def add_batch_arguments(self, parser):
        parser.add_argument('--threads', type=int, default=None,
                            help='Worker processes (default: logical cores).')
        parser.add_argument('--celery', action='store_true',
                            help='Dispatch items as Celery tasks instead of local processes.')
        parser.add_argument('--no-progress', action='store_true', help='Hide progress bars.')

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        if self.record_runs:
            parser.add_argument('--no-record', action='store_true',
                                help='Do not store run provenance in the database.')
        return parser

    def provenance(self, options):
        """RunRecord fields for this invocation; commands that record runs override this."""
        return {}

    def handle(self, *args, **options):
        record = self.record = None
        if self.record_runs:
            record = self.record = start_run(self.command_name, enabled=not options.get('no_record'), **self.provenance(options))
        try:
            items, skipped = self.run(**options)
        except (SoundfieldError, OSError) as e:
            finish_run(record, 'failed', message=str(e))
            logger.error(f"{self.command_name} failed: {e}")
            raise CommandError(str(e), returncode=exit_code_for(e)) from e
        except Exception as e:
            finish_run(record, 'failed', message=str(e))
            raise
        finish_run(record, 'succeeded', item_count=items, skipped_count=skipped)

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def run(self, **options):
        """Do the work; returns (items processed, items skipped)."""
        raise NotImplementedError
