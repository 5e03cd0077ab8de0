import os

from controversy.artifacts import atomic_write
from controversy.conf import get_setting
from controversy.corpus import write_concepts, write_corpus
from controversy.management.base import ToolkitCommand
from controversy.synthetic import planted_corpus


class Command(ToolkitCommand):
    help = 'Write a planted-signal corpus and concept list for trying the pipeline end to end'

    def add_arguments(self, parser):
        parser.add_argument('--out-dir', required=True)
        parser.add_argument('--n-pos', type=int, default=40)
        parser.add_argument('--n-neg', type=int, default=40)
        parser.add_argument('--contexts-per-concept', type=int, default=30)
        parser.add_argument('--dispute-rate-pos', type=float, default=0.2)
        parser.add_argument('--dispute-rate-neg', type=float, default=0.02)
        parser.add_argument('--categories', default='',
                            help='Comma-separated categories dealt over the positives')
        parser.add_argument('--n-graded', type=int, default=0)
        parser.add_argument('--seed', type=int, default=get_setting('SEED'))

    def run(self, **options):
        categories = tuple(name.strip() for name in options['categories'].split(',') if name.strip())
        concepts, sentences = planted_corpus(
            n_pos=options['n_pos'],
            n_neg=options['n_neg'],
            contexts_per_concept=options['contexts_per_concept'],
            dispute_rate_pos=options['dispute_rate_pos'],
            dispute_rate_neg=options['dispute_rate_neg'],
            seed=options['seed'],
            categories=categories,
            n_graded=options['n_graded'],
        )

        corpus_path = os.path.join(options['out_dir'], 'corpus.jsonl')
        concepts_path = os.path.join(options['out_dir'], 'concepts.csv')
        with atomic_write(corpus_path) as stream:
            write_corpus(sentences, stream)
        with atomic_write(concepts_path) as stream:
            write_concepts(concepts, stream)

        self.stdout.write(self.style.SUCCESS(
            f"Wrote {len(sentences)} sentences for {len(concepts)} concepts to {options['out_dir']}"
        ))
