from pathlib import Path

from soundfield.acoustics.bank import generate_rir_bank
from soundfield.acoustics.materials import material_bank, resolve_surfaces
from soundfield.acoustics.simulator import ENGINES, SimulationConfig
from soundfield.management.base import SoundfieldCommand
from soundfield.utils.seeding import validate_seed


class Command(SoundfieldCommand):
    help = 'Simulates a bank of ambisonic RIRs, grouped in scenes (one room per scene, one RIR per source).'
    record_runs = True

    def add_arguments(self, parser):
        parser.add_argument('--count', type=int, required=True, help='Number of RIRs to simulate, grouped into scenes.')
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--out-dir', required=True)
        parser.add_argument('--max-order', type=int, default=None)
        parser.add_argument('--jitter', type=float, default=None, help='Image-source jitter in metres per order.')
        parser.add_argument('--rir-seconds', type=float, default=None, help='Drop paths arriving later than this.')
        parser.add_argument('--rir-length', type=int, default=None, help='Fixed RIR length in samples.')
        parser.add_argument('--engine', choices=ENGINES, default=None)
        parser.add_argument('--materials', nargs='+', default=None,
                            help='Material presets drawn per surface (default: every absorptive preset).')
        parser.add_argument('--sources-per-scene', type=int, default=None)
        self.add_batch_arguments(parser)

    def provenance(self, options):
        return {
            'seed': options['seed'],
            'output_path': options['out_dir'],
            'count': options['count'],
            'threads': options['threads'],
        }

    def run(self, **options):
        seed = validate_seed(options['seed'])
        cfg = SimulationConfig.from_settings(
            max_order=options['max_order'],
            jitter=options['jitter'],
            max_duration_s=options['rir_seconds'],
            rir_length=options['rir_length'],
            engine=options['engine'],
        )
        if options['materials']:
            resolve_surfaces(options['materials'], material_bank(cfg.fs, cfg.material_taps))
        if self.record is not None:
            self.record.config = cfg.to_dict()

        out_dir = Path(options['out_dir'])
        self.stdout.write(f"Simulating {options['count']} RIRs into {out_dir} (seed {seed}, engine {cfg.engine})")
        manifest = generate_rir_bank(
            out_dir, options['count'], seed, cfg,
            n_sources=options['sources_per_scene'],
            materials=options['materials'],
            workers=options['threads'],
            use_celery=options['celery'],
            progress=not options['no_progress'],
        )
        self.stdout.write(self.style.SUCCESS(
            f"Wrote {manifest['count']} RIRs in {manifest['scene_count']} scenes to {out_dir}"
        ))
        return manifest['count'], 0
