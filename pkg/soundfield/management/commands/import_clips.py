from soundfield.management.base import SoundfieldCommand
from soundfield.mixing.clips import import_clips


class Command(SoundfieldCommand):
    help = 'Imports mono audio clips (any WAV/FLAC, downmixed and resampled) into a clip pool.'

    def add_arguments(self, parser):
        parser.add_argument('--source-dir', required=True)
        parser.add_argument('--out-dir', required=True)
        parser.add_argument('--descriptions', default=None,
                            help="CSV with 'filename' and 'description' columns.")
        parser.add_argument('--sample-rate', type=int, default=None)
        parser.add_argument('--rms-dbfs', type=float, default=None)

    def run(self, **options):
        pool = import_clips(
            options['source_dir'], options['out_dir'],
            descriptions_csv=options['descriptions'],
            sample_rate=options['sample_rate'],
            target_dbfs=options['rms_dbfs'],
        )
        self.stdout.write(self.style.SUCCESS(f"Imported {len(pool.records)} clips into {options['out_dir']}"))
        return len(pool.records), 0
