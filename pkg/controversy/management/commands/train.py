from django.core.management.base import CommandError

from controversy.artifacts import atomic_write
from controversy.conf import get_setting
from controversy.evaluation import balance_training_contexts
from controversy.management.base import (
    ToolkitCommand, read_concepts_file, read_contexts_file, read_embeddings_file,
)
from controversy.nb_estimator import dump_nb_model, train_nb
from controversy.nn_estimator import build_nn_model, dump_nn_model
from controversy.serializers import ESTIMATOR_CHOICES


class Command(ToolkitCommand):
    help = 'Train a Naive Bayes or nearest-neighbor controversy model'

    def add_arguments(self, parser):
        parser.add_argument('--concepts', required=True, help='Concept list with binary labels (CSV)')
        parser.add_argument('--contexts', help='Contexts file from ingest (nb)')
        parser.add_argument('--embeddings', help='Textual word-vector file (nn, nn-weighted)')
        parser.add_argument('--estimator', choices=ESTIMATOR_CHOICES, default='nb')
        parser.add_argument('--out', required=True, help='Model file to write')
        parser.add_argument('--alpha', type=float, default=get_setting('ALPHA'))
        parser.add_argument('--radius', type=float, default=get_setting('RADIUS'))
        parser.add_argument('--fallback-score', type=float, default=get_setting('FALLBACK_SCORE'))
        parser.add_argument('--keep-oov', action='store_true',
                            help='Score out-of-vocabulary tokens as unseen events instead of skipping them')
        parser.add_argument('--balance', action='store_true',
                            help='Downsample the larger class to equal sentence counts')
        parser.add_argument('--mask-token', default=get_setting('MASK_TOKEN'))
        parser.add_argument('--seed', type=int, default=get_setting('SEED'))

    def run(self, **options):
        estimator = options['estimator']
        if estimator == 'nb' and not options['contexts']:
            raise CommandError('--contexts is required for estimator nb')
        if estimator != 'nb' and not options['embeddings']:
            raise CommandError(f"--embeddings is required for estimator {estimator}")

        concepts = read_concepts_file(options['concepts'])
        labels = concepts.labels()

        if estimator == 'nb':
            contexts = read_contexts_file(options['contexts'])
            contexts = {cid: contexts.get(cid, []) for cid in labels}
            if options['balance']:
                contexts = balance_training_contexts(contexts, labels, options['seed'])

            model = train_nb(
                contexts,
                labels,
                alpha=options['alpha'],
                mask_token=options['mask_token'],
                skip_oov=not options['keep_oov'],
            )
            with atomic_write(options['out']) as stream:
                dump_nb_model(model, stream, self.config_echo(options))
            summary = (
                f"NB model: vocabulary {len(model.vocab)}, "
                f"tokens {model.total_pos} positive / {model.total_neg} negative"
            )
        else:
            table = read_embeddings_file(options['embeddings'])
            model = build_nn_model(
                [c for c in concepts if c.label is not None],
                table,
                radius=options['radius'],
                fallback_score=options['fallback_score'],
            )
            with atomic_write(options['out']) as stream:
                dump_nn_model(model, stream, self.config_echo(options),
                              weighted=estimator == 'nn-weighted')
            summary = f"NN model: {len(model.entries)} concepts, {len(model.skipped)} without embeddings"

        self.stdout.write(summary)
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['out']}"))
