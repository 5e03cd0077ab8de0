from controversy.artifacts import atomic_write
from controversy.conf import get_setting
from controversy.corpus import extract_contexts, write_contexts
from controversy.management.base import ToolkitCommand, read_concepts_file, read_corpus_file


class Command(ToolkitCommand):
    help = 'Extract masked, length-filtered contexts of every target concept from a corpus'

    def add_arguments(self, parser):
        parser.add_argument('--corpus', required=True, help='Line-delimited JSON corpus file')
        parser.add_argument('--concepts', required=True, help='Concept list (CSV)')
        parser.add_argument('--out', required=True, help='Contexts file to write')
        parser.add_argument('--min-len', type=int, default=get_setting('MIN_LEN'))
        parser.add_argument('--max-len', type=int, default=get_setting('MAX_LEN'))
        parser.add_argument('--cap', type=int, default=None,
                            help='Keep a seeded random sample of at most this many contexts per concept')
        parser.add_argument('--min-mentions', type=int, default=get_setting('MIN_MENTIONS'),
                            help='Drop concepts linked fewer times than this')
        parser.add_argument('--mask-token', default=get_setting('MASK_TOKEN'))
        parser.add_argument('--seed', type=int, default=get_setting('SEED'))

    def run(self, **options):
        sentences = read_corpus_file(options['corpus'])
        concepts = read_concepts_file(options['concepts'])

        contexts = extract_contexts(
            sentences,
            concepts,
            min_len=options['min_len'],
            max_len=options['max_len'],
            per_concept_cap=options['cap'],
            rng_seed=options['seed'],
            mask_token=options['mask_token'],
            min_mentions=options['min_mentions'],
        )

        with atomic_write(options['out']) as stream:
            write_contexts(contexts, stream, self.config_echo(options))

        for concept_id, concept_contexts in contexts.items():
            self.stdout.write(f"{concept_id}\t{len(concept_contexts)}")

        empty = [concept_id for concept_id, concept_contexts in contexts.items() if not concept_contexts]
        if empty:
            self.stdout.write('Warnings:')
            for concept_id in empty:
                self.stdout.write(f"  {concept_id}: no eligible contexts")

        self.stdout.write(self.style.SUCCESS(
            f"Wrote {sum(len(v) for v in contexts.values())} contexts to {options['out']}"
        ))
