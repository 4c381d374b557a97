from soundfield.ambisonics.directions import Direction
from soundfield.conf import get_setting
from soundfield.extractors.grids import T_DESIGNS
from soundfield.extractors.registry import ExtractorAlgorithm, ExtractorConfig, run_extractor
from soundfield.management.base import SoundfieldCommand
from soundfield.utils.audio_io import read_foa_wav, write_foa_wav


class Command(SoundfieldCommand):
    help = 'Extracts the FOA image of the source at a given direction from a 4-channel WAV.'

    def add_arguments(self, parser):
        parser.add_argument('algorithm', choices=ExtractorAlgorithm.cli_choices())
        parser.add_argument('--azimuth', type=float, required=True, help='Target azimuth in degrees.')
        parser.add_argument('--elevation', type=float, required=True, help='Target elevation in degrees.')
        parser.add_argument('--input', required=True)
        parser.add_argument('--output', required=True)
        parser.add_argument('--spread', type=float, default=None, help='Full cap width in degrees (loudness).')
        parser.add_argument('--out-gain', type=float, default=None, help='Linear gain outside the cap (loudness).')
        parser.add_argument('--grid-size', type=int, default=None, help='Fibonacci grid points (loudness).')
        parser.add_argument('--grid', choices=['fibonacci', *T_DESIGNS], default=None)
        parser.add_argument('--sample-rate', type=int, default=None, help='Required input rate.')

    def run(self, **options):
        cfg = ExtractorConfig.from_settings(
            options['algorithm'],
            Direction.from_degrees(options['azimuth'], options['elevation']),
            cap_spread_deg=options['spread'],
            out_gain=options['out_gain'],
            grid_size=options['grid_size'],
            grid=options['grid'],
        )
        x = read_foa_wav(options['input'], expected_rate=options['sample_rate'] or get_setting('SAMPLE_RATE'))
        write_foa_wav(options['output'], run_extractor(cfg, x))
        self.stdout.write(self.style.SUCCESS(
            f"{cfg.algorithm.cli_name}: wrote {x.num_samples} samples to {options['output']}"
        ))
        return 1, 0
