import logging
from pathlib import Path

from django.core.management.base import CommandError

from soundfield.management.base import EXIT_CONFIG, SoundfieldCommand
from soundfield.mixing.dataset import dataset_job, generate_dataset
from soundfield.mixing.scene import MixerConfig
from soundfield.utils.seeding import validate_seed

logger = logging.getLogger(__name__)


class Command(SoundfieldCommand):
    help = 'Renders (mixture, target, residual) FOA pairs from a clip pool and RIR bank, or from FOA segments.'
    record_runs = True

    def add_arguments(self, parser):
        parser.add_argument('--clips-dir', default=None, help='Clip pool written by import_clips.')
        parser.add_argument('--rir-dir', default=None,
                            help='RIR bank written by gen_rirs (default: simulate scenes on the fly).')
        parser.add_argument('--segments-dir', default=None, help='Annotated FOA segment pool to remix instead.')
        parser.add_argument('--count', type=int, required=True)
        parser.add_argument('--near-prob', type=float, default=None)
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--out-dir', required=True)
        parser.add_argument('--silence-prob', type=float, default=None)
        parser.add_argument('--gain-range', type=float, nargs=2, default=None, metavar=('LOW_DB', 'HIGH_DB'))
        parser.add_argument('--exclude-target', nargs='*', default=None,
                            help='Descriptions never used for the target source.')
        self.add_batch_arguments(parser)

    def provenance(self, options):
        return {
            'seed': options['seed'],
            'input_paths': {k: options[k] for k in ('clips_dir', 'rir_dir', 'segments_dir') if options[k]},
            'output_path': options['out_dir'],
            'count': options['count'],
            'near_prob': options['near_prob'],
            'threads': options['threads'],
        }

    def run(self, **options):
        if not options['clips_dir'] and not options['segments_dir']:
            raise CommandError('One of --clips-dir or --segments-dir is required', returncode=EXIT_CONFIG)
        if options['clips_dir'] and options['segments_dir']:
            raise CommandError('--clips-dir and --segments-dir are mutually exclusive', returncode=EXIT_CONFIG)
        if options['clips_dir'] and not options['rir_dir']:
            logger.warning("No --rir-dir given; scenes are simulated per pair")

        seed = validate_seed(options['seed'])
        cfg = MixerConfig.from_settings(
            near_prob=options['near_prob'],
            silence_prob=options['silence_prob'],
            gain_db_range=options['gain_range'],
            exclude_target=options['exclude_target'],
        )
        job = dataset_job(
            options['out_dir'], seed, cfg,
            clips_dir=options['clips_dir'],
            rir_dir=options['rir_dir'],
            segments_dir=options['segments_dir'],
        )
        if self.record is not None:
            self.record.config = job

        manifest = generate_dataset(
            job, options['count'],
            workers=options['threads'],
            use_celery=options['celery'],
            progress=not options['no_progress'],
        )
        stats = manifest['stats']
        fraction = stats['close_secondary_fraction']
        self.stdout.write(self.style.SUCCESS(f"Wrote {manifest['count']} pairs to {Path(options['out_dir'])}"))
        if fraction is not None:
            self.stdout.write(
                f"Close-secondary pairs: {stats['close_secondary_count']} ({fraction:.1%}), "
                f"near-placed: {stats['near_placed_count']}"
            )
        return manifest['count'], 0
