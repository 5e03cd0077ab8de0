import io

import numpy as np
from django.test import SimpleTestCase

from controversy.corpus import MaskedContext
from controversy.exceptions import ArtifactFormatError, EmptyClassError, UnscorableError
from controversy.nb_estimator import (
    NBModel, dump_nb_model, load_nb_model, nb_concept_score, nb_sentence_score, train_nb,
)


def _context(concept_id, *tokens):
    return MaskedContext(concept_id, tuple(tokens), 'test:1')


def _direct_posterior(model, tokens):
    vocab_size = len(model.vocab)
    p_pos = p_neg = 0.5
    scored = False
    for token in tokens:
        if token == model.mask_token or (token not in model.vocab and model.skip_oov):
            continue
        p_pos *= (model.count_pos.get(token, 0) + model.smoothing_alpha) / (model.total_pos + model.smoothing_alpha * vocab_size)
        p_neg *= (model.count_neg.get(token, 0) + model.smoothing_alpha) / (model.total_neg + model.smoothing_alpha * vocab_size)
        scored = True
    if not scored:
        return 0.5
    return p_pos / (p_pos + p_neg)


class TrainNBTests(SimpleTestCase):

    def setUp(self):
        self.contexts = {'x': [_context('x', 'a', 'b')], 'y': [_context('y', 'b', 'c')]}
        self.labels = {'x': 1, 'y': 0}

    def test_hand_counts(self):
        model = train_nb(self.contexts, self.labels)
        self.assertEqual(model.count_pos, {'a': 1, 'b': 1})
        self.assertEqual(model.count_neg, {'b': 1, 'c': 1})
        self.assertEqual((model.total_pos, model.total_neg), (2, 2))
        self.assertEqual(model.vocab, frozenset({'a', 'b', 'c'}))

    def test_mask_is_never_counted(self):
        contexts = {'x': [_context('x', '[MASK]', 'a')], 'y': [_context('y', 'b', '[MASK]')]}
        model = train_nb(contexts, self.labels)
        self.assertNotIn('[MASK]', model.vocab)

    def test_empty_negative_class(self):
        with self.assertRaises(EmptyClassError):
            train_nb({'x': [_context('x', 'a')], 'y': []}, self.labels)

    def test_mask_only_class_has_nothing_to_count(self):
        contexts = {'x': [_context('x', 'a', 'b')], 'y': [_context('y', '[MASK]'), _context('y', '[MASK]', '[MASK]')]}
        with self.assertRaisesMessage(EmptyClassError, 'non-controversial'):
            train_nb(contexts, self.labels)

    def test_unlabeled_concepts_are_ignored(self):
        contexts = dict(self.contexts, z=[_context('z', 'zzz')])
        self.assertNotIn('zzz', train_nb(contexts, self.labels).vocab)

    def test_order_independent(self):
        reversed_contexts = {key: list(reversed(value)) for key, value in reversed(list(self.contexts.items()))}
        self.assertEqual(train_nb(self.contexts, self.labels), train_nb(reversed_contexts, self.labels))

    def test_alpha_must_be_positive(self):
        with self.assertRaises(ValueError):
            train_nb(self.contexts, self.labels, alpha=0)


class NBScoreTests(SimpleTestCase):

    def setUp(self):
        self.model = train_nb(
            {'x': [_context('x', 'a', 'b')], 'y': [_context('y', 'b', 'c')]}, {'x': 1, 'y': 0}
        )

    def test_hand_computed_posterior(self):
        self.assertAlmostEqual(nb_sentence_score(self.model, _context('q', 'a')), 2 / 3)

    def test_balanced_token_scores_half(self):
        self.assertAlmostEqual(nb_sentence_score(self.model, _context('q', 'b', '[MASK]')), 0.5)

    def test_out_of_vocabulary_scores_half(self):
        self.assertEqual(nb_sentence_score(self.model, _context('q', 'zebra', 'yak')), 0.5)

    def test_out_of_vocabulary_kept_when_not_skipping(self):
        model = train_nb(
            {'x': [_context('x', 'a', 'b', 'd')], 'y': [_context('y', 'b', 'c')]}, {'x': 1, 'y': 0}, skip_oov=False,
        )
        # more positive mass: unseen words lean negative
        self.assertLess(nb_sentence_score(model, _context('q', 'zebra')), 0.5)

    def test_empty_vocabulary_scores_half(self):
        model = NBModel({}, {}, 0, 0)
        self.assertEqual(nb_sentence_score(model, _context('q', 'a', '[MASK]')), 0.5)
        self.assertEqual(nb_concept_score(model, [_context('q', 'a'), _context('q', 'b')]).score, 0.5)

    def test_long_sentence_does_not_underflow(self):
        score = nb_sentence_score(self.model, _context('q', *(['a'] * 2000)))
        self.assertTrue(0.0 < score <= 1.0)
        self.assertGreater(score, 0.99)

    def test_swapping_classes_complements_the_score(self):
        rng = np.random.default_rng(2)
        words = ['a', 'b', 'c', 'd', 'e']
        for _ in range(30):
            pos = [_context('x', *rng.choice(words, size=4)) for _ in range(3)]
            neg = [_context('y', *rng.choice(words, size=4)) for _ in range(3)]
            model = train_nb({'x': pos, 'y': neg}, {'x': 1, 'y': 0})
            swapped = train_nb({'x': pos, 'y': neg}, {'x': 0, 'y': 1})
            query = _context('q', *rng.choice(words, size=5))
            self.assertAlmostEqual(nb_sentence_score(model, query) + nb_sentence_score(swapped, query), 1.0, places=12)

    def test_matches_direct_probability_products(self):
        rng = np.random.default_rng(8)
        words = [f"t{i}" for i in range(6)]
        for _ in range(100):
            contexts = {
                'x': [_context('x', *rng.choice(words, size=int(rng.integers(1, 5)))) for _ in range(2)],
                'y': [_context('y', *rng.choice(words, size=int(rng.integers(1, 5)))) for _ in range(2)],
            }
            model = train_nb(contexts, {'x': 1, 'y': 0}, alpha=float(rng.uniform(0.1, 2.0)))
            tokens = list(rng.choice(words + ['unseen'], size=int(rng.integers(1, 5))))
            self.assertAlmostEqual(
                nb_sentence_score(model, _context('q', *tokens)), _direct_posterior(model, tokens), delta=1e-9,
            )


class NBConceptScoreTests(SimpleTestCase):

    def setUp(self):
        self.model = train_nb(
            {'x': [_context('x', 'a', 'b')], 'y': [_context('y', 'b', 'c')]}, {'x': 1, 'y': 0}
        )

    def test_single_context(self):
        result = nb_concept_score(self.model, [_context('q', 'a')])
        self.assertAlmostEqual(result.score, 2 / 3)
        self.assertEqual(result.concept_id, 'q')
        self.assertEqual(result.n_sentences, 1)

    def test_mean_of_complementary_sentences(self):
        result = nb_concept_score(self.model, [_context('q', 'a'), _context('q', 'c')])
        self.assertAlmostEqual(result.score, 0.5)

    def test_keeps_sentence_scores_on_request(self):
        result = nb_concept_score(self.model, [_context('q', 'a')], keep_sentences=True)
        self.assertEqual(len(result.per_sentence), 1)
        self.assertEqual(result.per_sentence[0][0], 'test:1')

    def test_empty_list(self):
        with self.assertRaises(UnscorableError):
            nb_concept_score(self.model, [], concept_id='q')


class NBModelFileTests(SimpleTestCase):

    def test_dump_and_load_preserve_counts(self):
        model = train_nb(
            {'x': [_context('x', 'a', 'b')], 'y': [_context('y', 'b', 'c')]}, {'x': 1, 'y': 0}, alpha=0.5,
        )
        stream = io.StringIO()
        dump_nb_model(model, stream, config={'alpha': 0.5})
        stream.seek(0)
        loaded, config = load_nb_model(stream)
        self.assertEqual(loaded, model)
        self.assertEqual(config, {'alpha': 0.5})

    def test_rejects_truncated_file(self):
        with self.assertRaises(ArtifactFormatError):
            load_nb_model(io.StringIO('#controversy-nb-model\t1\n'))
