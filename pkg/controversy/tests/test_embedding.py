import io

import numpy as np
from django.test import SimpleTestCase

from controversy.corpus import Concept
from controversy.embedding import concept_embedding, cosine_similarity, load_embeddings
from controversy.exceptions import DimensionMismatchError, EmbeddingFormatError, NoEmbeddingError


class LoadEmbeddingsTests(SimpleTestCase):

    def test_loads_table(self):
        table = load_embeddings(io.StringIO('global 1 0 2\nwarming 0 1 0\n'))
        self.assertEqual(table.dimension, 3)
        self.assertEqual(len(table), 2)
        np.testing.assert_array_equal(table.get('global'), [1.0, 0.0, 2.0])

    def test_skips_count_header(self):
        table = load_embeddings(io.StringIO('2 2\na 1 0\nb 0 1\n'))
        self.assertEqual(table.dimension, 2)
        self.assertEqual(len(table), 2)

    def test_numeric_first_word_of_a_one_dimensional_table(self):
        table = load_embeddings(io.StringIO('1984 5\n1985 6\n'))
        self.assertEqual(table.dimension, 1)
        self.assertEqual(len(table), 2)
        np.testing.assert_array_equal(table.get('1984'), [5.0])

    def test_single_numeric_line_is_an_entry(self):
        table = load_embeddings(io.StringIO('7 3\n'))
        np.testing.assert_array_equal(table.get('7'), [3.0])

    def test_mismatched_line_is_reported(self):
        with self.assertRaises(EmbeddingFormatError) as ctx:
            load_embeddings(io.StringIO('a 1 0\nb 0 1 1\n'))
        self.assertEqual(ctx.exception.line_number, 2)

    def test_non_numeric_component(self):
        with self.assertRaises(EmbeddingFormatError):
            load_embeddings(io.StringIO('a 1 x\n'))

    def test_empty_table(self):
        with self.assertRaises(EmbeddingFormatError):
            load_embeddings(io.StringIO(''))

    def test_duplicates_keep_last(self):
        table = load_embeddings(io.StringIO('a 1 0\na 0 1\n'))
        self.assertEqual(table.duplicates, 1)
        np.testing.assert_array_equal(table.get('a'), [0.0, 1.0])


class ConceptEmbeddingTests(SimpleTestCase):

    def setUp(self):
        self.table = load_embeddings(io.StringIO('global 1 0\nwarming 0 1\n'))

    def test_mean_of_covered_words(self):
        result = concept_embedding(self.table, Concept('gw', 'Global warming denial'))
        np.testing.assert_allclose(result.vector, [0.5, 0.5])
        self.assertEqual(result.covered_words, 2)

    def test_single_word_is_a_copy(self):
        result = concept_embedding(self.table, Concept('g', 'Global'))
        result.vector[0] = 9.0
        self.assertEqual(self.table.get('global')[0], 1.0)

    def test_uncovered_title(self):
        with self.assertRaises(NoEmbeddingError):
            concept_embedding(self.table, Concept('x', 'Abortion'))


class CosineSimilarityTests(SimpleTestCase):

    def test_known_values(self):
        self.assertAlmostEqual(cosine_similarity([1, 0], [1, 0]), 1.0)
        self.assertAlmostEqual(cosine_similarity([1, 0], [0, 1]), 0.0)
        self.assertAlmostEqual(cosine_similarity([1, 2], [2, 1]), 0.8)
        self.assertAlmostEqual(cosine_similarity([1, 0], [-1, 0]), -1.0)

    def test_symmetric_bounded_and_scale_invariant(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            u, v = rng.normal(size=5), rng.normal(size=5)
            sim = cosine_similarity(u, v)
            self.assertEqual(sim, cosine_similarity(v, u))
            self.assertTrue(-1.0 <= sim <= 1.0)
            self.assertAlmostEqual(cosine_similarity(3.5 * u, v), sim, places=12)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            cosine_similarity([1, 0], [1, 0, 0])

    def test_zero_vector(self):
        with self.assertRaises(ValueError):
            cosine_similarity([0, 0], [1, 0])
