"""
Synthetic corpora with a planted controversy signal

Positive concepts are referenced by sentences that draw a share of their
words from a small "dispute" vocabulary; negative concepts by sentences
that draw a much smaller share; everything else comes from a shared
background vocabulary. Optional theme vocabularies tie positives to a
category, and graded concepts mix positive-style and negative-style
sentences in proportion to a true score.
"""

from collections import Counter

import numpy as np

from .corpus import MASK_TOKEN, Concept, ConceptSet, Mention, RawSentence, tokenize
from .embedding import EmbeddingTable

DISPUTE_WORDS = (
    'dispute', 'protest', 'debate', 'opposed', 'critics', 'ban', 'rights', 'accused',
    'rejected', 'clash', 'contested', 'boycott', 'outrage', 'lawsuit', 'condemned',
)


def background_words(size):
    return tuple(f"word{i:04d}" for i in range(size))


def theme_words(category, size=10):
    stem = ''.join(ch for ch in category.lower() if ch.isalnum()) or 'theme'
    return tuple(f"{stem}{i:02d}" for i in range(size))


class PlantedCorpusGenerator:
    """Generator for planted-signal concept sets and corpora"""

    SENTENCE_LENGTH = (12, 20)
    BACKGROUND_SIZE = 200

    def __init__(self, seed=0, dispute_rate_pos=0.2, dispute_rate_neg=0.02,
                 contexts_per_concept=30, theme_rate=0.15):
        self.rng = np.random.default_rng(seed)
        self.dispute_rate_pos = dispute_rate_pos
        self.dispute_rate_neg = dispute_rate_neg
        self.contexts_per_concept = contexts_per_concept
        self.theme_rate = theme_rate
        self.background = background_words(self.BACKGROUND_SIZE)
        self.concepts = ConceptSet()
        self.sentences = []

    def add_labeled(self, n_pos, n_neg, categories=()):
        """
        Add positive and negative concepts with their sentences

        Positives are dealt round-robin over the given categories; their
        sentences also draw from the category's theme vocabulary.
        """
        for i in range(n_pos):
            category = categories[i % len(categories)] if categories else None
            concept = Concept(
                id=f"pos{i:03d}",
                title=f"pos{i:03d}",
                label=1,
                categories=frozenset({category}) if category else frozenset(),
            )
            theme = theme_words(category) if category else ()
            self._add_concept(concept, lambda: self._sentence_words(self.dispute_rate_pos, theme))

        for i in range(n_neg):
            concept = Concept(id=f"neg{i:03d}", title=f"neg{i:03d}", label=0)
            self._add_concept(concept, lambda: self._sentence_words(self.dispute_rate_neg))
        return self

    def add_graded(self, n_graded, contexts_per_concept=None):
        """
        Add concepts whose true score runs evenly from 0 to 1

        Each sentence is positive-style with probability equal to the true
        score; the grade is round(10 * true score).
        """
        count = contexts_per_concept or self.contexts_per_concept
        for i in range(n_graded):
            true_score = i / (n_graded - 1) if n_graded > 1 else 1.0
            concept = Concept(
                id=f"graded{i:03d}",
                title=f"graded{i:03d}",
                grade=int(round(10 * true_score)),
            )

            def words(true_score=true_score):
                rate = self.dispute_rate_pos if self.rng.random() < true_score else self.dispute_rate_neg
                return self._sentence_words(rate)

            self._add_concept(concept, words, count)
        return self

    def _add_concept(self, concept, make_words, count=None):
        self.concepts.add(concept)
        for _ in range(count or self.contexts_per_concept):
            words = make_words()
            position = int(self.rng.integers(0, len(words) + 1))
            before = ' '.join(words[:position])
            after = ' '.join(words[position:])
            start = len(before) + 1 if before else 0
            text = ' '.join(part for part in (before, concept.title, after) if part)
            line_number = len(self.sentences) + 1
            self.sentences.append(RawSentence(
                text,
                (Mention(concept.id, start, start + len(concept.title)),),
                f"synthetic:{line_number}",
            ))

    def _sentence_words(self, dispute_rate, theme=()):
        low, high = self.SENTENCE_LENGTH
        length = int(self.rng.integers(low, high + 1))
        words = []
        for _ in range(length):
            draw = self.rng.random()
            if draw < dispute_rate:
                words.append(DISPUTE_WORDS[self.rng.integers(len(DISPUTE_WORDS))])
            elif theme and draw < dispute_rate + self.theme_rate:
                words.append(theme[self.rng.integers(len(theme))])
            else:
                words.append(self.background[self.rng.integers(len(self.background))])
        return words


def planted_corpus(n_pos=40, n_neg=40, contexts_per_concept=30, dispute_rate_pos=0.2,
                   dispute_rate_neg=0.02, seed=0, categories=(), theme_rate=0.15,
                   n_graded=0, graded_contexts=None):
    """
    Generate a planted-signal concept set and corpus

    Args:
        n_pos: Number of controversial concepts
        n_neg: Number of non-controversial concepts
        contexts_per_concept: Sentences per concept
        dispute_rate_pos: Share of dispute words in positive sentences
        dispute_rate_neg: Share of dispute words in negative sentences
        seed: Generator seed
        categories: Category names dealt round-robin over the positives
        theme_rate: Share of theme words in positive sentences of a category
        n_graded: Number of graded (0-10) concepts to add
        graded_contexts: Sentences per graded concept

    Returns:
        Tuple of (ConceptSet, list of RawSentence)
    """
    generator = PlantedCorpusGenerator(
        seed, dispute_rate_pos, dispute_rate_neg, contexts_per_concept, theme_rate
    )
    generator.add_labeled(n_pos, n_neg, tuple(categories))
    if n_graded:
        generator.add_graded(n_graded, graded_contexts)
    return generator.concepts, generator.sentences


def count_vector_embeddings(concepts, contexts, mask_token=MASK_TOKEN):
    """
    Bag-of-context-word count vectors keyed by concept title word

    Args:
        concepts: ConceptSet whose titles are single words
        contexts: Dictionary of concept id -> list of MaskedContext
        mask_token: Token left out of the vectors

    Returns:
        EmbeddingTable with one vector per concept that has contexts
    """
    counts = {}
    vocabulary = set()
    for concept in concepts:
        concept_counts = Counter()
        for context in contexts.get(concept.id, []):
            concept_counts.update(token for token in context.tokens if token != mask_token)
        if concept_counts:
            counts[concept.id] = concept_counts
            vocabulary.update(concept_counts)

    index = {word: i for i, word in enumerate(sorted(vocabulary))}
    vectors = {}
    for concept in concepts:
        if concept.id not in counts:
            continue
        vector = np.zeros(len(index))
        for word, count in counts[concept.id].items():
            vector[index[word]] = count
        for word in tokenize(concept.title):
            vectors[word] = vector

    return EmbeddingTable(len(index), vectors)
