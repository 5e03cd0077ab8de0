"""
Nearest-neighbor estimator

Scores a concept by the labels of the labeled concepts whose embeddings lie
within a cosine-similarity radius of it, either as the plain fraction of
controversial neighbors or weighted by similarity.
"""

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .embedding import concept_embedding
from .exceptions import ArtifactFormatError, DimensionMismatchError, NoEmbeddingError

logger = logging.getLogger(__name__)

RADIUS = 0.3
FALLBACK_SCORE = 0.5

MODEL_FORMAT = '#controversy-nn-model'
MODEL_VERSION = 1


@dataclass(frozen=True)
class NNEntry:
    concept_id: str
    vector: np.ndarray = field(repr=False)
    label: int = 0


@dataclass(frozen=True)
class NNModel:
    """Labeled concept vectors plus the neighborhood radius"""
    entries: tuple
    dimension: int
    radius: float = RADIUS
    fallback_score: float = FALLBACK_SCORE
    skipped: tuple = ()

    def __post_init__(self):
        if not -1.0 < self.radius <= 1.0:
            raise ValueError(f"radius must lie in (-1, 1], got {self.radius}")
        for entry in self.entries:
            if entry.label not in (0, 1):
                raise ValueError(f"entry {entry.concept_id}: label must be 0 or 1")
            if entry.vector.shape != (self.dimension,):
                raise DimensionMismatchError(self.dimension, entry.vector.shape[0], entry.concept_id)

    @cached_property
    def _matrix(self):
        if not self.entries:
            return np.zeros((0, self.dimension))
        return np.vstack([entry.vector for entry in self.entries])

    @cached_property
    def _norms(self):
        return np.linalg.norm(self._matrix, axis=1)


def build_nn_model(train_concepts, table, radius=RADIUS, fallback_score=FALLBACK_SCORE):
    """
    Embed the labeled training concepts

    Args:
        train_concepts: Iterable of Concept, each with a binary label
        table: EmbeddingTable
        radius: Minimum cosine similarity for a neighbor (inclusive)
        fallback_score: Score when a query has no neighbor

    Returns:
        NNModel holding every training concept that has an embedding
    """
    entries = []
    skipped = []
    for concept in train_concepts:
        if concept.label is None:
            raise ValueError(f"training concept {concept.id} has no label")
        try:
            concept_vector = concept_embedding(table, concept)
        except NoEmbeddingError:
            skipped.append(concept.id)
            continue
        if not np.any(concept_vector.vector):
            skipped.append(concept.id)
            continue
        entries.append(NNEntry(concept.id, concept_vector.vector, concept.label))

    if not entries:
        raise NoEmbeddingError('no training concept has an embedding')
    if skipped:
        logger.warning('Skipped %d training concepts without embeddings', len(skipped))

    return NNModel(tuple(entries), table.dimension, radius, fallback_score, tuple(skipped))


def nn_neighbors(model, query):
    """
    Labeled concepts within the model radius of a query vector

    The query's own entry, if the model holds one, is never a neighbor.

    Args:
        model: NNModel
        query: ConceptVector

    Returns:
        List of (concept_id, label, similarity), most similar first
    """
    vector = np.asarray(query.vector, dtype=np.float64)
    if vector.shape != (model.dimension,):
        raise DimensionMismatchError(model.dimension, vector.shape[0], f"query {query.concept_id}")

    query_norm = np.linalg.norm(vector)
    if query_norm == 0:
        raise ValueError(f"query {query.concept_id} has a zero vector")

    similarities = np.clip(model._matrix @ vector / (model._norms * query_norm), -1.0, 1.0)

    neighbors = [
        (entry.concept_id, entry.label, float(similarity))
        for entry, similarity in zip(model.entries, similarities)
        if similarity >= model.radius and entry.concept_id != query.concept_id
    ]
    neighbors.sort(key=lambda n: (-n[2], n[0]))
    return neighbors


def nn_score(model, query, weighted=False):
    """
    Controversiality score of a query concept

    Args:
        model: NNModel
        query: ConceptVector
        weighted: Weight each neighbor by its cosine similarity

    Returns:
        Float in [0, 1]; the model fallback when there is no neighbor
    """
    neighbors = nn_neighbors(model, query)
    if not neighbors:
        return model.fallback_score

    if not weighted:
        return sum(label for _, label, _ in neighbors) / len(neighbors)

    clamped = sum(1 for _, _, similarity in neighbors if similarity < 0)
    if clamped:
        logger.warning(
            'Clamped %d negative similarities to 0 for %s (radius %s)',
            clamped, query.concept_id, model.radius,
        )

    total = sum(max(similarity, 0.0) for _, _, similarity in neighbors)
    if total == 0:
        return model.fallback_score
    positive = sum(max(similarity, 0.0) for _, label, similarity in neighbors if label == 1)
    return positive / total


def dump_nn_model(model, stream, config=None, weighted=False):
    """
    Write an NNModel as a versioned flat file

    Args:
        model: NNModel
        stream: Writable text stream
        config: Parameter record echoed into the file
        weighted: Whether scores from this model use similarity weights
    """
    stream.write(f"{MODEL_FORMAT}\t{MODEL_VERSION}\n")
    stream.write(f"#config\t{json.dumps(config or {}, sort_keys=True)}\n")
    header = {
        'dimension': model.dimension,
        'radius': repr(float(model.radius)),
        'fallback': repr(float(model.fallback_score)),
        'weighted': int(bool(weighted)),
        'skipped': len(model.skipped),
    }
    stream.write('\t'.join(f"{key}={value}" for key, value in header.items()) + '\n')
    for entry in model.entries:
        components = ' '.join(repr(float(x)) for x in entry.vector)
        stream.write(f"{entry.concept_id}\t{entry.label}\t{components}\n")


def load_nn_model(stream):
    """
    Read an NNModel written by dump_nn_model

    Args:
        stream: Text stream

    Returns:
        Tuple of (NNModel, header dictionary including 'weighted' and 'config')
    """
    lines = [line.rstrip('\n') for line in stream]
    if len(lines) < 3 or lines[0] != f"{MODEL_FORMAT}\t{MODEL_VERSION}":
        raise ArtifactFormatError('not a controversy NN model file (v1)')

    try:
        config = json.loads(lines[1].split('\t', 1)[1])
        header = dict(pair.split('=', 1) for pair in lines[2].split('\t'))
        dimension = int(header['dimension'])
        radius = float(header['radius'])
        fallback = float(header['fallback'])
        weighted = bool(int(header['weighted']))

        entries = []
        for line in lines[3:]:
            if not line:
                continue
            concept_id, label, components = line.split('\t')
            vector = np.array([float(x) for x in components.split()], dtype=np.float64)
            entries.append(NNEntry(concept_id, vector, int(label)))
    except (IndexError, KeyError, ValueError) as e:
        raise ArtifactFormatError(f"malformed NN model file: {e}")

    model = NNModel(tuple(entries), dimension, radius, fallback)
    return model, {'weighted': weighted, 'config': config, 'skipped': int(header.get('skipped', 0))}
