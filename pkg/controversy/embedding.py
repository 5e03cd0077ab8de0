"""
Embedding module

Loads pretrained word vectors in the textual format (one word followed by
its components per line) and derives concept vectors and cosine
similarities from them.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .corpus import tokenize
from .exceptions import DimensionMismatchError, EmbeddingFormatError, NoEmbeddingError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingTable:
    """Word -> dense vector map of fixed dimensionality"""
    dimension: int
    vectors: dict = field(repr=False)
    duplicates: int = 0

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError('embedding dimension must be positive')
        for word, vector in self.vectors.items():
            if vector.shape != (self.dimension,):
                raise DimensionMismatchError(self.dimension, vector.shape[0], f"word {word!r}")

    def __contains__(self, word):
        return word in self.vectors

    def __len__(self):
        return len(self.vectors)

    def get(self, word):
        return self.vectors.get(word)


@dataclass(frozen=True)
class ConceptVector:
    concept_id: str
    vector: np.ndarray = field(repr=False)
    covered_words: int = 1

    def __post_init__(self):
        if self.covered_words < 1:
            raise ValueError('a concept vector must cover at least one word')


def load_embeddings(stream):
    """
    Load a textual word-vector table

    A leading word2vec-style header ("<count> <dimension>") is skipped when
    the next line carries that many components.
    Later duplicates of a word override earlier ones.

    Args:
        stream: Iterable of text lines

    Returns:
        EmbeddingTable
    """
    vectors = {}
    dimension = None
    duplicates = 0

    for line_number, parts in _entries(stream):
        word, components = parts[0], parts[1:]
        if not components:
            raise EmbeddingFormatError(f"word {word!r} has no components", line_number)

        if dimension is None:
            dimension = len(components)
        elif len(components) != dimension:
            raise EmbeddingFormatError(
                f"expected {dimension} components, found {len(components)}", line_number
            )

        try:
            vector = np.array([float(value) for value in components], dtype=np.float64)
        except ValueError:
            raise EmbeddingFormatError(f"non-numeric component for word {word!r}", line_number)

        if word in vectors:
            duplicates += 1
        vectors[word] = vector

    if not vectors:
        raise EmbeddingFormatError('empty embedding table')

    if duplicates:
        logger.warning('Embedding table had %d duplicate words; later entries kept', duplicates)
    logger.info('Loaded %d vectors of dimension %d', len(vectors), dimension)

    return EmbeddingTable(dimension, vectors, duplicates)


def _entries(stream):
    # Line 1 counts as a header only when line 2 has the dimension it announces.
    candidate = None
    for line_number, line in enumerate(stream, start=1):
        parts = line.split()
        if not parts:
            continue
        if line_number == 1 and _looks_like_count_header(parts):
            candidate = parts
            continue
        if candidate is not None:
            if len(parts) - 1 != int(candidate[1]):
                yield 1, candidate
            candidate = None
        yield line_number, parts
    if candidate is not None:
        yield 1, candidate


def _looks_like_count_header(parts):
    return len(parts) == 2 and all(part.isdigit() for part in parts)


def concept_embedding(table, concept):
    """
    Average the vectors of a concept's title words

    Args:
        table: EmbeddingTable
        concept: Concept

    Returns:
        ConceptVector over the title words found in the table
    """
    words = tokenize(concept.title)
    covered = [table.get(word) for word in words if word in table]
    if not covered:
        raise NoEmbeddingError(f"no embedding for concept {concept.id!r} ({concept.title!r})")

    if len(covered) == 1:
        vector = covered[0].copy()
    else:
        vector = np.mean(covered, axis=0)
    return ConceptVector(concept.id, vector, len(covered))


def cosine_similarity(u, v):
    """
    Cosine similarity between two vectors

    Args:
        u: Vector
        v: Vector of the same dimension

    Returns:
        Float in [-1, 1]
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatchError(u.shape[0], v.shape[0])

    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0 or norm_v == 0:
        raise ValueError('cosine similarity is undefined for a zero vector')

    similarity = float(np.dot(u, v) / (norm_u * norm_v))
    return min(1.0, max(-1.0, similarity))
