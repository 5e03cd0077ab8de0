from controversy.analysis import information_gain_ranking, write_ranking
from controversy.artifacts import atomic_write
from controversy.conf import get_setting
from controversy.management.base import ToolkitCommand, read_concepts_file, read_contexts_file


class Command(ToolkitCommand):
    help = 'Rank the words of controversial-concept sentences by information gain'

    def add_arguments(self, parser):
        parser.add_argument('--contexts', required=True, help='Contexts file from ingest')
        parser.add_argument('--concepts', required=True, help='Concept list with binary labels (CSV)')
        parser.add_argument('--out', required=True, help='Ranking file to write')
        parser.add_argument('--min-df', type=int, default=get_setting('MIN_DF'))
        parser.add_argument('--mask-token', default=get_setting('MASK_TOKEN'))
        parser.add_argument('--top', type=int, default=10, help='Number of words echoed to stdout')

    def run(self, **options):
        contexts = read_contexts_file(options['contexts'])
        labels = read_concepts_file(options['concepts']).labels()

        ranking = information_gain_ranking(
            contexts, labels, min_df=options['min_df'], mask_token=options['mask_token']
        )

        with atomic_write(options['out']) as stream:
            write_ranking(ranking, stream, self.config_echo(options))

        if not ranking:
            self.stderr.write(f"Warning: no word reaches min_df={options['min_df']}; ranking is empty")
        for entry in ranking[:options['top']]:
            self.stdout.write(f"{entry.word}\t{entry.gain:.4f}")
        self.stdout.write(self.style.SUCCESS(f"Ranked {len(ranking)} words into {options['out']}"))
