import json

import numpy as np
from django.test import SimpleTestCase

from controversy.corpus import Concept, ConceptSet, MaskedContext, extract_contexts
from controversy.evaluation import (
    EvaluationReport, ExperimentConfig, FoldResult, accuracy, balance_training_contexts,
    graded_eval, iter_kfold_splits, leave_one_category_out_split, make_kfold_plan,
    median_split_binarize, pearson_correlation, render_report, run_experiment,
)
from controversy.exceptions import ControversyError, SplitError, ZeroVarianceError
from controversy.synthetic import count_vector_embeddings, planted_corpus
from controversy.tests.helpers import labeled_concepts


class ConstantEstimator:

    def fit(self, train_concepts, contexts):
        return self

    def score(self, concepts, contexts):
        return {concept.id: 0.5 for concept in concepts}, {}


class KFoldPlanTests(SimpleTestCase):

    def test_one_of_each_class_per_fold(self):
        plan = make_kfold_plan(labeled_concepts(10, 10), k=10, seed=0)
        for fold in range(10):
            ids = plan.fold_ids(fold)
            self.assertEqual(len(ids), 2)
            self.assertEqual(sorted(cid[0] for cid in ids), ['n', 'p'])

    def test_same_seed_same_plan(self):
        concepts = labeled_concepts(12, 15)
        self.assertEqual(make_kfold_plan(concepts, 4, seed=3), make_kfold_plan(concepts, 4, seed=3))

    def test_k_above_class_size(self):
        with self.assertRaises(SplitError):
            make_kfold_plan(labeled_concepts(10, 20), k=11)

    def test_k_below_two(self):
        with self.assertRaises(SplitError):
            make_kfold_plan(labeled_concepts(5, 5), k=1)

    def test_splits_partition_the_concepts(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n_pos, n_neg = int(rng.integers(5, 20)), int(rng.integers(5, 20))
            k = int(rng.integers(2, 6))
            concepts = labeled_concepts(n_pos, n_neg)
            plan = make_kfold_plan(concepts, k, seed=int(rng.integers(0, 1000)))
            seen = []
            for fold, train_ids, test_ids in iter_kfold_splits(plan):
                self.assertFalse(set(train_ids) & set(test_ids))
                self.assertEqual(set(train_ids) | set(test_ids), set(concepts.ids()))
                seen.extend(test_ids)
            self.assertEqual(sorted(seen), sorted(concepts.ids()))
            for label, count in ((1, n_pos), (0, n_neg)):
                sizes = [sum(1 for cid in plan.fold_ids(f) if concepts[cid].label == label) for f in range(k)]
                self.assertLessEqual(max(sizes) - min(sizes), 1)
                self.assertEqual(sum(sizes), count)


class MedianSplitTests(SimpleTestCase):

    def test_two_concepts(self):
        self.assertEqual(median_split_binarize({'a': 0.9, 'b': 0.1}), {'a': 1, 'b': 0})

    def test_ties_broken_by_id(self):
        scores = {cid: 0.5 for cid in 'dcba'}
        self.assertEqual(median_split_binarize(scores), {'a': 1, 'b': 1, 'c': 0, 'd': 0})

    def test_odd_count_favors_positive(self):
        self.assertEqual(sum(median_split_binarize({'a': 0.1, 'b': 0.2, 'c': 0.3}).values()), 2)

    def test_invariant_under_monotone_transforms(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            scores = {f"c{i}": float(x) for i, x in enumerate(rng.random(int(rng.integers(1, 30))))}
            expected = median_split_binarize(scores)
            for _ in range(10):
                scale, shift = float(rng.uniform(0.1, 10)), float(rng.uniform(-5, 5))
                transformed = {cid: scale * value + shift for cid, value in scores.items()}
                self.assertEqual(median_split_binarize(transformed), expected)
                self.assertEqual(median_split_binarize({cid: v ** 3 for cid, v in scores.items()}), expected)


class AccuracyTests(SimpleTestCase):

    def test_values(self):
        gold = {'a': 1, 'b': 0, 'c': 1, 'd': 0}
        self.assertEqual(accuracy(dict(gold), gold), 1.0)
        self.assertEqual(accuracy({cid: 1 - v for cid, v in gold.items()}, gold), 0.0)
        self.assertEqual(accuracy({'a': 1, 'b': 0, 'c': 1, 'd': 1}, gold), 0.75)

    def test_key_mismatch(self):
        with self.assertRaises(ValueError):
            accuracy({'a': 1}, {'b': 1})


class LeaveOneCategoryOutTests(SimpleTestCase):

    def setUp(self):
        self.concepts = ConceptSet([
            Concept('abortion', 'Abortion', label=1, categories=frozenset({'Religion', 'History'})),
            Concept('crusades', 'Crusades', label=1, categories=frozenset({'History'})),
            Concept('summer', 'Summer', label=0),
            Concept('tea', 'Tea', label=0),
            Concept('pencil', 'Pencil', label=0),
        ])

    def test_held_out_category_goes_to_test(self):
        train, test = leave_one_category_out_split(self.concepts, 'Religion', seed=0)
        self.assertIn('abortion', test)
        self.assertNotIn('abortion', train)
        self.assertIn('crusades', train)
        self.assertFalse(set(train) & set(test))

    def test_both_sides_balanced(self):
        train, test = leave_one_category_out_split(self.concepts, 'Religion', seed=0)
        self.assertEqual(sum(self.concepts[cid].label for cid in test), 1)
        self.assertEqual(len(test), 2)
        self.assertEqual(sum(self.concepts[cid].label for cid in train), 1)
        self.assertEqual(len(train), 2)

    def test_unknown_category(self):
        with self.assertRaises(SplitError):
            leave_one_category_out_split(self.concepts, 'Astrology')

    def test_not_enough_negatives(self):
        concepts = ConceptSet([
            Concept('a', 'A', label=1, categories=frozenset({'X'})),
            Concept('b', 'B', label=1, categories=frozenset({'X'})),
            Concept('n', 'N', label=0),
        ])
        with self.assertRaises(SplitError):
            leave_one_category_out_split(concepts, 'X')

    def test_not_enough_negatives_left_for_training(self):
        concepts = ConceptSet(
            [Concept(f"x{i}", 'X', label=1, categories=frozenset({'X'})) for i in range(3)]
            + [Concept(f"y{i}", 'Y', label=1, categories=frozenset({'Y'})) for i in range(3)]
            + [Concept(f"n{i}", 'N', label=0) for i in range(4)]
        )
        with self.assertRaisesMessage(SplitError, 'training side'):
            leave_one_category_out_split(concepts, 'X')

    def test_every_category_of_a_planted_corpus(self):
        categories = ('A', 'B', 'C')
        concepts, _ = planted_corpus(n_pos=12, n_neg=12, contexts_per_concept=1, categories=categories)
        for category in categories:
            train, test = leave_one_category_out_split(concepts, category, seed=0)
            self.assertFalse(set(train) & set(test))
            for side in (train, test):
                self.assertEqual(2 * sum(concepts[cid].label for cid in side), len(side))
            self.assertTrue(all(category in concepts[cid].categories for cid in test if concepts[cid].label))


class PearsonTests(SimpleTestCase):

    def test_values(self):
        self.assertAlmostEqual(pearson_correlation([1, 2, 3], [1, 2, 3]), 1.0)
        self.assertAlmostEqual(pearson_correlation([1, 2, 3], [-1, -2, -3]), -1.0)
        self.assertAlmostEqual(pearson_correlation([1, 2, 3], [2, 4, 7]), 0.9934, places=4)

    def test_constant_series(self):
        with self.assertRaises(ZeroVarianceError):
            pearson_correlation([0, 0, 0], [1, 2, 3])


class GradedEvalTests(SimpleTestCase):

    def test_all_grades_zero(self):
        with self.assertRaises(ZeroVarianceError):
            graded_eval({'a': 0.1, 'b': 0.9}, {'a': 0, 'b': 0})

    def test_threshold_selects_the_accuracy_set(self):
        grades = {'six': 6, 'five': 5, 'zero': 0}
        report = graded_eval({'six': 0.8, 'five': 0.7, 'zero': 0.1}, grades)
        self.assertEqual(report.per_fold[0].n_test, 2)
        self.assertEqual(report.aggregate_accuracy, 1.0)
        self.assertEqual(report.protocol, 'graded')

    def test_scores_proportional_to_grades(self):
        grades = {f"c{g}": g for g in range(11)}
        report = graded_eval({cid: g / 10 for cid, g in grades.items()}, grades)
        self.assertAlmostEqual(report.pearson, 1.0)

    def test_no_positive(self):
        with self.assertRaises(SplitError):
            graded_eval({'a': 0.1, 'b': 0.9}, {'a': 0, 'b': 3})

    def test_too_few_grade_zero_concepts(self):
        with self.assertRaises(SplitError):
            graded_eval({'a': 0.9, 'b': 0.8, 'c': 0.1}, {'a': 8, 'b': 9, 'c': 0})


class BalanceTests(SimpleTestCase):

    def test_larger_class_downsampled(self):
        contexts = {
            'p1': [MaskedContext('p1', ('a',), f"s:{i}") for i in range(4)],
            'p2': [MaskedContext('p2', ('a',), f"t:{i}") for i in range(4)],
            'n1': [MaskedContext('n1', ('b',), f"u:{i}") for i in range(3)],
        }
        labels = {'p1': 1, 'p2': 1, 'n1': 0}
        balanced = balance_training_contexts(contexts, labels, seed=2)
        self.assertEqual(len(balanced['p1']) + len(balanced['p2']), 3)
        self.assertEqual(len(balanced['n1']), 3)
        self.assertEqual(balanced, balance_training_contexts(contexts, labels, seed=2))


class ExperimentConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = ExperimentConfig.from_data({})
        self.assertEqual(config.k, 10)
        self.assertEqual(config.radius, 0.3)
        self.assertEqual(config.mask_token, '[MASK]')

    def test_invalid_estimator(self):
        with self.assertRaises(ControversyError):
            ExperimentConfig.from_data({'estimator': 'svm'})

    def test_nn_needs_a_table(self):
        config = ExperimentConfig.from_data({'estimator': 'nn'})
        with self.assertRaises(ControversyError):
            run_experiment(config, labeled_concepts(4, 4), {})


class ReportRenderingTests(SimpleTestCase):

    def test_rendering_is_byte_stable(self):
        report = EvaluationReport(
            protocol='kfold',
            per_fold=(FoldResult('0', 0.75, 8, 4, 0), FoldResult('1', 1.0, 8, 4, 0)),
            aggregate_accuracy=0.875,
            pearson=None,
            config_echo={'estimator': 'nb', 'seed': 0},
            seed=0,
        )
        rendered = render_report(report)
        self.assertEqual(rendered, render_report(report))
        document = json.loads(rendered)
        self.assertEqual(document['schema_version'], 1)
        self.assertEqual(document['per_fold'][1]['fold'], '1')
        self.assertIsNone(document['pearson'])


class PlantedCorpusProtocolTests(SimpleTestCase):
    """End-to-end runs on synthetic corpora whose signal is known"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.concepts, sentences = planted_corpus(
            n_pos=40, n_neg=40, contexts_per_concept=30, seed=0,
            categories=('Religion', 'Politics', 'Science', 'History'),
            n_graded=41, graded_contexts=120,
        )
        cls.contexts = extract_contexts(sentences, cls.concepts)

    def test_nb_kfold_recovers_planted_signal(self):
        config = ExperimentConfig.from_data({'estimator': 'nb', 'protocol': 'kfold', 'seed': 0})
        report = run_experiment(config, self.concepts, self.contexts)
        self.assertEqual(len(report.per_fold), 10)
        self.assertGreaterEqual(report.aggregate_accuracy, 0.9)

    def test_nn_kfold_on_count_vectors(self):
        concepts, sentences = planted_corpus(40, 40, 30, 0.2, 0.02, seed=0)
        contexts = extract_contexts(sentences, concepts)
        table = count_vector_embeddings(concepts, contexts)
        for estimator in ('nn', 'nn-weighted'):
            config = ExperimentConfig.from_data({'estimator': estimator, 'radius': 0.6, 'k': 10, 'seed': 0})
            report = run_experiment(config, concepts, contexts, table=table)
            self.assertEqual(len(report.per_fold), 10)
            self.assertGreaterEqual(report.aggregate_accuracy, 0.75)

    def test_leave_one_category_out_is_not_easier_than_kfold(self):
        kfold = run_experiment(ExperimentConfig.from_data({'seed': 0}), self.concepts, self.contexts)
        loco = run_experiment(
            ExperimentConfig.from_data({'protocol': 'loco', 'seed': 0}), self.concepts, self.contexts,
        )
        self.assertEqual(loco.protocol, 'leave_one_category_out')
        self.assertEqual([row.fold for row in loco.per_fold], ['History', 'Politics', 'Religion', 'Science'])
        self.assertLessEqual(loco.aggregate_accuracy, kfold.aggregate_accuracy + 0.02)

    def test_graded_scores_track_grades(self):
        config = ExperimentConfig.from_data({'protocol': 'graded', 'negative_sample': 3, 'seed': 0})
        report = run_experiment(config, self.concepts, self.contexts)
        self.assertGreaterEqual(report.pearson, 0.95)
        self.assertEqual(report.per_fold[0].n_train, 80)

    def test_constant_estimator_is_deterministic(self):
        config = ExperimentConfig.from_data({'seed': 5})
        first = run_experiment(config, self.concepts, self.contexts, estimator=ConstantEstimator())
        second = run_experiment(config, self.concepts, self.contexts, estimator=ConstantEstimator())
        self.assertEqual(first, second)
        # equal scores: the id tie-break ranks every neg* above every pos*
        self.assertEqual(first.aggregate_accuracy, 0.0)

    def test_same_seed_same_report_bytes(self):
        config = ExperimentConfig.from_data({'seed': 3, 'k': 5})
        self.assertEqual(
            render_report(run_experiment(config, self.concepts, self.contexts)),
            render_report(run_experiment(config, self.concepts, self.contexts)),
        )
