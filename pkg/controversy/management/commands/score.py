import json

from django.core.management.base import CommandError

from controversy.artifacts import atomic_write, open_input
from controversy.embedding import concept_embedding
from controversy.exceptions import ArtifactFormatError, NoEmbeddingError
from controversy.management.base import (
    ToolkitCommand, read_concepts_file, read_contexts_file, read_embeddings_file,
)
from controversy.nb_estimator import MODEL_FORMAT as NB_FORMAT, load_nb_model, nb_concept_score
from controversy.nn_estimator import MODEL_FORMAT as NN_FORMAT, load_nn_model, nn_score


class Command(ToolkitCommand):
    help = 'Score concepts with a trained model'

    def add_arguments(self, parser):
        parser.add_argument('--model', required=True, help='Model file from train')
        parser.add_argument('--contexts', help='Contexts file (nb models)')
        parser.add_argument('--concepts', help='Concept list (required for nn models)')
        parser.add_argument('--embeddings', help='Textual word-vector file (nn models)')
        parser.add_argument('--out', required=True, help='Scores file to write')

    def run(self, **options):
        with open_input(options['model']) as stream:
            first_line = stream.readline()
            stream.seek(0)
            if first_line.startswith(NB_FORMAT):
                rows, unscorable, column = self._score_nb(stream, options)
            elif first_line.startswith(NN_FORMAT):
                rows, unscorable, column = self._score_nn(stream, options)
            else:
                raise ArtifactFormatError(f"{options['model']} is not a controversy model file")

        with atomic_write(options['out']) as stream:
            stream.write(f"#config\t{json.dumps(self.config_echo(options), sort_keys=True)}\n")
            stream.write(f"concept_id\tscore\t{column}\n")
            for concept_id, score, count in rows:
                stream.write(f"{concept_id}\t{score!r}\t{count}\n")
            stream.write('#unscorable\n')
            for concept_id, reason in unscorable:
                stream.write(f"{concept_id}\tunscorable: {reason}\n")

        if unscorable:
            self.stdout.write(f"{len(unscorable)} concepts unscorable")
        self.stdout.write(self.style.SUCCESS(f"Scored {len(rows)} concepts into {options['out']}"))

    def _score_nb(self, stream, options):
        if not options['contexts']:
            raise CommandError('--contexts is required to score with an nb model')
        model, _ = load_nb_model(stream)
        contexts = read_contexts_file(options['contexts'])
        if options['concepts']:
            concept_ids = read_concepts_file(options['concepts']).ids()
        else:
            concept_ids = list(contexts)

        rows = []
        unscorable = []
        for concept_id in concept_ids:
            concept_contexts = contexts.get(concept_id, [])
            if not concept_contexts:
                unscorable.append((concept_id, 'no contexts'))
                continue
            result = nb_concept_score(model, concept_contexts, concept_id)
            rows.append((concept_id, result.score, result.n_sentences))
        return rows, unscorable, 'n_sentences'

    def _score_nn(self, stream, options):
        if not options['concepts'] or not options['embeddings']:
            raise CommandError('--concepts and --embeddings are required to score with an nn model')
        model, header = load_nn_model(stream)
        table = read_embeddings_file(options['embeddings'])
        if table.dimension != model.dimension:
            raise CommandError(
                f"dimension mismatch: embeddings have dimension {table.dimension}, "
                f"model has dimension {model.dimension}"
            )

        rows = []
        unscorable = []
        for concept in read_concepts_file(options['concepts']):
            try:
                query = concept_embedding(table, concept)
            except NoEmbeddingError:
                unscorable.append((concept.id, 'no embedding'))
                continue
            if not query.vector.any():
                unscorable.append((concept.id, 'zero embedding'))
                continue
            rows.append((concept.id, nn_score(model, query, header['weighted']), query.covered_words))
        return rows, unscorable, 'covered_words'
