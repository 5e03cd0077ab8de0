from dataclasses import replace

from django.core.management.base import CommandError

from controversy.artifacts import atomic_write
from controversy.conf import get_setting
from controversy.corpus import extract_contexts
from controversy.evaluation import ExperimentConfig, render_report, run_experiment
from controversy.management.base import (
    ToolkitCommand, read_concepts_file, read_contexts_file, read_corpus_file, read_embeddings_file,
)
from controversy.serializers import ESTIMATOR_CHOICES, PROTOCOL_CHOICES


class Command(ToolkitCommand):
    help = 'Run an evaluation protocol (kfold, loco or graded) and write the report'

    def add_arguments(self, parser):
        parser.add_argument('--concepts', required=True, help='Concept list (CSV)')
        parser.add_argument('--contexts', help='Contexts file from ingest')
        parser.add_argument('--corpus', help='Corpus file, ingested on the fly when --contexts is absent')
        parser.add_argument('--graded-concepts',
                            help='Graded concept list for the graded protocol '
                                 '(default: graded concepts of --concepts)')
        parser.add_argument('--embeddings', help='Textual word-vector file (nn, nn-weighted)')
        parser.add_argument('--estimator', choices=ESTIMATOR_CHOICES, default='nb')
        parser.add_argument('--protocol', choices=PROTOCOL_CHOICES, default='kfold')
        parser.add_argument('--out', required=True, help='Report file to write')
        parser.add_argument('--radius', type=float, default=get_setting('RADIUS'))
        parser.add_argument('--fallback-score', type=float, default=get_setting('FALLBACK_SCORE'))
        parser.add_argument('--alpha', type=float, default=get_setting('ALPHA'))
        parser.add_argument('--keep-oov', action='store_true')
        parser.add_argument('--k', type=int, default=get_setting('K'))
        parser.add_argument('--min-len', type=int, default=get_setting('MIN_LEN'))
        parser.add_argument('--max-len', type=int, default=get_setting('MAX_LEN'))
        parser.add_argument('--held-out-category', default=None,
                            help='Category held out by loco (default: every category in turn)')
        parser.add_argument('--positive-threshold', type=int, default=get_setting('POSITIVE_THRESHOLD'))
        parser.add_argument('--negative-sample', type=int, default=None,
                            help='Grade-0 concepts sampled as negatives (default: as many as positives)')
        parser.add_argument('--no-balance', action='store_true',
                            help='Train on all sentences instead of equal-sized class pools')
        parser.add_argument('--mask-token', default=get_setting('MASK_TOKEN'))
        parser.add_argument('--seed', type=int, default=get_setting('SEED'))

    def run(self, **options):
        if options['estimator'] != 'nb' and not options['embeddings']:
            raise CommandError(f"--embeddings is required for estimator {options['estimator']}")
        if not options['contexts'] and not options['corpus']:
            raise CommandError('one of --contexts or --corpus is required')

        config = ExperimentConfig.from_data({
            'estimator': options['estimator'],
            'protocol': options['protocol'],
            'radius': options['radius'],
            'fallback_score': options['fallback_score'],
            'alpha': options['alpha'],
            'skip_oov': not options['keep_oov'],
            'k': options['k'],
            'seed': options['seed'],
            'held_out_category': options['held_out_category'],
            'positive_threshold': options['positive_threshold'],
            'negative_sample': options['negative_sample'],
            'balance': not options['no_balance'],
            'mask_token': options['mask_token'],
        })

        concepts = read_concepts_file(options['concepts'])
        graded = None
        if options['graded_concepts']:
            graded = read_concepts_file(options['graded_concepts'])

        if options['contexts']:
            contexts = read_contexts_file(options['contexts'])
        else:
            targets = concepts if graded is None else _merged(concepts, graded)
            contexts = extract_contexts(
                read_corpus_file(options['corpus']),
                targets,
                min_len=options['min_len'],
                max_len=options['max_len'],
                rng_seed=options['seed'],
                mask_token=options['mask_token'],
            )

        table = read_embeddings_file(options['embeddings']) if options['embeddings'] else None

        report = run_experiment(config, concepts, contexts, table=table, graded=graded)
        report = replace(report, config_echo={**report.config_echo, **self._inputs(options)})

        with atomic_write(options['out'], binary=True) as stream:
            stream.write(render_report(report))

        for row in report.per_fold:
            self.stdout.write(f"{row.fold}\t{row.accuracy:.4f}")
        line = f"aggregate accuracy {report.aggregate_accuracy:.4f}"
        if report.pearson is not None:
            line += f", pearson {report.pearson:.4f}"
        self.stdout.write(self.style.SUCCESS(line))

    def _inputs(self, options):
        keys = ('concepts', 'contexts', 'corpus', 'graded_concepts', 'embeddings', 'min_len', 'max_len')
        return {key: options[key] for key in keys}


def _merged(concepts, graded):
    merged = concepts.subset(concepts.ids())
    for concept in graded:
        if concept.id not in merged:
            merged.add(concept)
    return merged
