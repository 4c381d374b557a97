from pathlib import Path

from soundfield.extractors.registry import ExtractorAlgorithm
from soundfield.management.base import SoundfieldCommand
from soundfield.metrics.evaluation import evaluate_dataset, evaluation_job
from soundfield.provenance import record_results
from soundfield.utils.manifests import dump_json


class Command(SoundfieldCommand):
    help = 'Scores extractors on a mixture dataset and writes SI-SDRi reports by close-secondary bucket.'
    record_runs = True

    def add_arguments(self, parser):
        parser.add_argument('--pairs-dir', required=True, help='Dataset written by gen_mixtures.')
        parser.add_argument('--algorithms', nargs='+', choices=ExtractorAlgorithm.cli_choices(),
                            default=ExtractorAlgorithm.cli_choices())
        parser.add_argument('--report-json', default=None)
        parser.add_argument('--report-table', default=None)
        parser.add_argument('--spread', type=float, default=None)
        parser.add_argument('--out-gain', type=float, default=None)
        parser.add_argument('--grid-size', type=int, default=None)
        parser.add_argument('--no-loss', action='store_true', help='Skip the STFT l1 distance.')
        self.add_batch_arguments(parser)

    def provenance(self, options):
        return {
            'input_paths': {'pairs_dir': options['pairs_dir']},
            'output_path': options['report_json'],
            'algorithms': options['algorithms'],
            'threads': options['threads'],
        }

    def run(self, **options):
        job = evaluation_job(
            options['algorithms'],
            {
                'cap_spread_deg': options['spread'],
                'out_gain': options['out_gain'],
                'grid_size': options['grid_size'],
            },
            with_loss=not options['no_loss'],
        )
        report = evaluate_dataset(
            options['pairs_dir'], job,
            workers=options['threads'],
            use_celery=options['celery'],
            progress=not options['no_progress'],
        )
        table = report.to_table()
        if options['report_json']:
            dump_json(options['report_json'], report.to_dict())
        if options['report_table']:
            path = Path(options['report_table'])
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(table, encoding='utf-8')
        record_results(self.record, report)

        self.stdout.write(table)
        if report.skipped:
            self.stdout.write(self.style.WARNING(f"Skipped {len(report.skipped)} pairs: {', '.join(report.skipped)}"))
        scored = len({s.pair_id for s in report.scores})
        self.stdout.write(self.style.SUCCESS(f"Scored {scored} pairs"))
        return scored, len(report.skipped)
