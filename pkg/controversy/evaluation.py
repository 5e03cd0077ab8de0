"""
Evaluation module

This module implements the validation protocols for the estimators:
- concept-level random k-fold with median-split binarization and accuracy
- leave-one-category-out, holding every concept of one category out of training
- graded evaluation (Pearson correlation and threshold accuracy) of a model
  trained on binary labels and applied to concepts graded 0-10
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from rest_framework.renderers import JSONRenderer

from .corpus import MASK_TOKEN, ConceptSet
from .embedding import concept_embedding
from .exceptions import (
    ControversyError, EmptyClassError, NoEmbeddingError, SplitError, ZeroVarianceError,
)
from .nb_estimator import ALPHA, nb_concept_score, train_nb
from .nn_estimator import FALLBACK_SCORE, RADIUS, build_nn_model, nn_score
from .serializers import EvaluationReportSerializer, RunConfigSerializer

logger = logging.getLogger(__name__)

K = 10
POSITIVE_THRESHOLD = 6
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one evaluation run"""
    estimator: str = 'nb'
    protocol: str = 'kfold'
    radius: float = RADIUS
    fallback_score: float = FALLBACK_SCORE
    alpha: float = ALPHA
    skip_oov: bool = True
    k: int = K
    seed: int = 0
    held_out_category: Optional[str] = None
    positive_threshold: int = POSITIVE_THRESHOLD
    negative_sample: Optional[int] = None
    balance: bool = True
    mask_token: str = MASK_TOKEN

    @classmethod
    def from_data(cls, data):
        """Validate a parameter dictionary and build the config from it"""
        serializer = RunConfigSerializer(data=data)
        if not serializer.is_valid():
            raise ControversyError(f"invalid run configuration: {dict(serializer.errors)}")
        return cls(**serializer.validated_data)

    def echo(self):
        return asdict(self)


@dataclass(frozen=True)
class FoldPlan:
    """Concept -> fold assignment for k-fold validation"""
    k: int
    assignments: dict
    seed: int

    def fold_ids(self, fold):
        return sorted(cid for cid, index in self.assignments.items() if index == fold)


@dataclass(frozen=True)
class FoldResult:
    fold: str
    accuracy: float
    n_train: int
    n_test: int
    n_unscored: int = 0


@dataclass(frozen=True)
class EvaluationReport:
    protocol: str
    per_fold: tuple
    aggregate_accuracy: float
    pearson: Optional[float]
    config_echo: dict
    seed: int
    schema_version: int = SCHEMA_VERSION


def derive_seed(seed, index):
    """Deterministic child seed for fold / category number index"""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _labels_of(concepts):
    if isinstance(concepts, ConceptSet):
        return concepts.labels()
    return dict(concepts)


def _score_value(score):
    return float(getattr(score, 'score', score))


def make_kfold_plan(concepts, k=K, seed=0):
    """
    Assign concepts to k folds, positives and negatives separately

    Each class is shuffled with the seed and dealt round-robin, so fold sizes
    within a class differ by at most one and every positive fold is paired
    with a similarly sized set of negatives.

    Args:
        concepts: Labeled ConceptSet, or dictionary of concept id -> 0/1
        k: Number of folds
        seed: Shuffle seed

    Returns:
        FoldPlan
    """
    labels = _labels_of(concepts)
    if k < 2:
        raise SplitError(f"k must be at least 2, got {k}")

    rng = np.random.default_rng(seed)
    assignments = {}
    for label in (1, 0):
        ids = sorted(cid for cid, value in labels.items() if value == label)
        if len(ids) < k:
            kind = 'positive' if label == 1 else 'negative'
            raise SplitError(f"k={k} exceeds the number of {kind} concepts ({len(ids)})")
        for position, index in enumerate(rng.permutation(len(ids))):
            assignments[ids[index]] = position % k

    return FoldPlan(k, dict(sorted(assignments.items())), seed)


def iter_kfold_splits(plan):
    """
    Yield (fold, train ids, test ids) for every fold of a plan

    Sentences follow their concept, so splitting ids splits the contexts.
    """
    for fold in range(plan.k):
        test_ids = plan.fold_ids(fold)
        test = set(test_ids)
        train_ids = sorted(cid for cid in plan.assignments if cid not in test)
        yield fold, train_ids, test_ids


def median_split_binarize(scores):
    """
    Label the higher-scored half positive and the rest negative

    Ties are broken by concept id; with an odd count the positive half gets
    the extra concept.

    Args:
        scores: Dictionary of concept id -> score (float or ConceptScore)

    Returns:
        Dictionary of concept id -> 0/1
    """
    ranked = sorted(scores, key=lambda cid: (-_score_value(scores[cid]), cid))
    n_positive = math.ceil(len(ranked) / 2)
    return {cid: int(position < n_positive) for position, cid in enumerate(ranked)}


def accuracy(predicted, gold):
    """
    Fraction of concepts whose predicted label equals the gold label

    Args:
        predicted: Dictionary of concept id -> 0/1
        gold: Dictionary with exactly the same keys

    Returns:
        Float in [0, 1]
    """
    if set(predicted) != set(gold):
        missing = sorted(set(gold) ^ set(predicted))
        raise ValueError(f"predicted and gold labels cover different concepts: {missing[:5]}")
    if not gold:
        raise ValueError('accuracy of an empty prediction set is undefined')
    return sum(predicted[cid] == gold[cid] for cid in gold) / len(gold)


def leave_one_category_out_split(concepts, held_out, seed=0):
    """
    Hold out every concept of one category

    Concepts carrying the held-out category are test concepts even when they
    also carry a training category. Uncategorized negatives are shared out
    by seeded sampling so that the test set, and then the training set, are
    label-balanced.

    Args:
        concepts: Labeled ConceptSet
        held_out: Category name
        seed: Sampling seed for the negatives

    Returns:
        Tuple of (train ids, test ids), each sorted
    """
    labeled = [c for c in concepts if c.label is not None]
    if not any(held_out in c.categories for c in labeled):
        raise SplitError(f"unknown category: {held_out!r}")

    test = [c for c in labeled if held_out in c.categories]
    train = [c for c in labeled if c.categories and held_out not in c.categories]
    train.extend(c for c in labeled if not c.categories and c.label == 1)

    pool = sorted(c.id for c in labeled if not c.categories and c.label == 0)
    pool = [pool[i] for i in np.random.default_rng(seed).permutation(len(pool))]

    test_needed = max(0, sum(c.label for c in test) - sum(1 - c.label for c in test))
    if test_needed > len(pool):
        raise SplitError(
            f"category {held_out!r} needs {test_needed} negatives, only {len(pool)} available"
        )
    test_ids = [c.id for c in test] + pool[:test_needed]

    remaining = pool[test_needed:]
    train_needed = max(0, sum(c.label for c in train) - sum(1 - c.label for c in train))
    if train_needed > len(remaining):
        raise SplitError(
            f"training side of {held_out!r} needs {train_needed} negatives, only {len(remaining)} left"
        )
    train_ids = [c.id for c in train] + remaining[:train_needed]

    return sorted(train_ids), sorted(test_ids)


def pearson_correlation(x, y):
    """
    Product-moment correlation of two equally long series

    Args:
        x: Sequence of reals
        y: Sequence of reals

    Returns:
        Float in [-1, 1]
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError('pearson correlation needs two series of equal length')
    if len(x) < 2:
        raise ValueError('pearson correlation needs at least two points')

    dx = x - x.mean()
    dy = y - y.mean()
    ss_x = float(np.dot(dx, dx))
    ss_y = float(np.dot(dy, dy))
    if ss_x == 0 or ss_y == 0:
        raise ZeroVarianceError('pearson correlation is undefined for a constant series')

    return min(1.0, max(-1.0, float(np.dot(dx, dy)) / math.sqrt(ss_x * ss_y)))


def graded_eval(scores, graded, positive_threshold=POSITIVE_THRESHOLD, negative_sample=None,
                seed=0, config_echo=None, n_train=0, n_unscored=0):
    """
    Compare scores with graded (0-10) labels

    Pearson correlation is taken over every scored concept. Accuracy is taken
    after a median split over the concepts graded at least positive_threshold
    plus a seeded sample of the concepts graded 0.

    Args:
        scores: Dictionary of concept id -> score (float or ConceptScore)
        graded: ConceptSet with grades, or dictionary of concept id -> grade
        positive_threshold: Lowest grade counted as controversial
        negative_sample: Number of grade-0 concepts to sample (default: as
            many as there are positives)
        seed: Sampling seed
        config_echo: Parameter record for the report

    Returns:
        EvaluationReport
    """
    grades = graded.grades() if isinstance(graded, ConceptSet) else dict(graded)
    values = {cid: _score_value(score) for cid, score in scores.items()}

    uncovered = sorted(cid for cid in values if cid not in grades)
    if uncovered:
        raise SplitError(f"scored concepts without a grade: {uncovered[:5]}")

    ids = sorted(values)
    pearson = pearson_correlation([grades[cid] for cid in ids], [values[cid] for cid in ids])

    positives = [cid for cid in ids if grades[cid] >= positive_threshold]
    zeros = [cid for cid in ids if grades[cid] == 0]
    if not positives:
        raise SplitError(f"no scored concept has grade >= {positive_threshold}")

    wanted = len(positives) if negative_sample is None else negative_sample
    if wanted > len(zeros):
        raise SplitError(f"requested {wanted} grade-0 concepts, only {len(zeros)} available")
    chosen = np.random.default_rng(seed).choice(len(zeros), size=wanted, replace=False)
    negatives = [zeros[i] for i in sorted(chosen)]

    gold = {cid: 1 for cid in positives}
    gold.update({cid: 0 for cid in negatives})
    predicted = median_split_binarize({cid: values[cid] for cid in gold})
    graded_accuracy = accuracy(predicted, gold)

    logger.info(
        'Graded evaluation: pearson %.4f, accuracy %.4f over %d positives / %d negatives',
        pearson, graded_accuracy, len(positives), len(negatives),
    )
    row = FoldResult('graded', graded_accuracy, n_train, len(gold), n_unscored)
    return EvaluationReport(
        protocol='graded',
        per_fold=(row,),
        aggregate_accuracy=graded_accuracy,
        pearson=pearson,
        config_echo=dict(config_echo or {}),
        seed=seed,
    )


def balance_training_contexts(contexts, labels, seed):
    """
    Downsample the larger class's sentences to the size of the smaller one

    Args:
        contexts: Dictionary of concept id -> list of MaskedContext
        labels: Dictionary of concept id -> 0/1
        seed: Sampling seed

    Returns:
        New dictionary of concept id -> list of MaskedContext
    """
    pools = {1: [], 0: []}
    for concept_id in sorted(contexts):
        label = labels.get(concept_id)
        if label is None:
            continue
        pools[label].extend((concept_id, i) for i in range(len(contexts[concept_id])))

    keep = set(pools[1]) | set(pools[0])
    larger, smaller = (1, 0) if len(pools[1]) > len(pools[0]) else (0, 1)
    surplus = len(pools[larger]) - len(pools[smaller])
    if surplus:
        dropped = np.random.default_rng(seed).choice(len(pools[larger]), size=surplus, replace=False)
        keep -= {pools[larger][i] for i in dropped}

    return {
        concept_id: [ctx for i, ctx in enumerate(contexts[concept_id]) if (concept_id, i) in keep]
        for concept_id in sorted(contexts)
        if labels.get(concept_id) is not None
    }


class NBEstimator:
    """Naive Bayes estimator with a fit / score interface"""

    def __init__(self, alpha=ALPHA, skip_oov=True, mask_token=MASK_TOKEN):
        self.alpha = alpha
        self.skip_oov = skip_oov
        self.mask_token = mask_token
        self.model = None

    def fit(self, train_concepts, contexts):
        labels = train_concepts.labels()
        self.model = train_nb(
            {cid: contexts.get(cid, []) for cid in labels},
            labels,
            alpha=self.alpha,
            mask_token=self.mask_token,
            skip_oov=self.skip_oov,
        )
        return self

    def score(self, concepts, contexts):
        """
        Args:
            concepts: ConceptSet to score
            contexts: Dictionary of concept id -> list of MaskedContext

        Returns:
            Tuple of (id -> ConceptScore, id -> reason for unscorable concepts)
        """
        scores = {}
        unscorable = {}
        for concept in concepts:
            concept_contexts = contexts.get(concept.id, [])
            if not concept_contexts:
                unscorable[concept.id] = 'no contexts'
                continue
            scores[concept.id] = nb_concept_score(self.model, concept_contexts, concept.id)
        return scores, unscorable


class NNEstimator:
    """Nearest-neighbor estimator with a fit / score interface"""

    def __init__(self, table, radius=RADIUS, fallback_score=FALLBACK_SCORE, weighted=False):
        self.table = table
        self.radius = radius
        self.fallback_score = fallback_score
        self.weighted = weighted
        self.model = None

    def fit(self, train_concepts, contexts=None):
        self.model = build_nn_model(
            [c for c in train_concepts if c.label is not None],
            self.table,
            self.radius,
            self.fallback_score,
        )
        return self

    def score(self, concepts, contexts=None):
        scores = {}
        unscorable = {}
        for concept in concepts:
            try:
                query = concept_embedding(self.table, concept)
            except NoEmbeddingError:
                unscorable[concept.id] = 'no embedding'
                continue
            if not np.any(query.vector):
                unscorable[concept.id] = 'no embedding'
                continue
            scores[concept.id] = nn_score(self.model, query, self.weighted)
        return scores, unscorable


def make_estimator(config, table=None):
    """
    Build the estimator named by a config

    Args:
        config: ExperimentConfig
        table: EmbeddingTable, required by the nn estimators

    Returns:
        NBEstimator or NNEstimator
    """
    if config.estimator == 'nb':
        return NBEstimator(config.alpha, config.skip_oov, config.mask_token)
    if config.estimator in ('nn', 'nn-weighted'):
        if table is None:
            raise ControversyError(f"estimator {config.estimator!r} needs an embedding table")
        return NNEstimator(table, config.radius, config.fallback_score,
                           weighted=config.estimator == 'nn-weighted')
    raise ControversyError(f"unknown estimator {config.estimator!r}; choose nb, nn or nn-weighted")


def _check_no_leakage(train_ids, test_ids, train_contexts):
    overlap = set(train_ids) & set(test_ids)
    if overlap:
        raise SplitError(f"concepts in both train and test: {sorted(overlap)[:5]}")
    test = set(test_ids)
    for concept_contexts in train_contexts.values():
        for context in concept_contexts:
            if context.concept_id in test:
                raise SplitError(f"training context of test concept {context.concept_id}")


def _require_both_classes(ids, labels, what):
    present = {labels[cid] for cid in ids}
    if present != {0, 1}:
        raise EmptyClassError(f"{what} set has a single class ({sorted(present)})")


def _run_split(name, estimator, concepts, contexts, train_ids, test_ids, seed, balance):
    labels = concepts.labels()
    _require_both_classes(train_ids, labels, f"split {name} training")
    _require_both_classes(test_ids, labels, f"split {name} test")

    train_contexts = {cid: contexts.get(cid, []) for cid in train_ids}
    if balance:
        train_contexts = balance_training_contexts(train_contexts, labels, seed)
    _check_no_leakage(train_ids, test_ids, train_contexts)

    estimator.fit(concepts.subset(train_ids), train_contexts)
    scores, unscorable = estimator.score(
        concepts.subset(test_ids), {cid: contexts.get(cid, []) for cid in test_ids}
    )
    if unscorable:
        logger.warning('Split %s: %d test concepts unscorable', name, len(unscorable))
    if not scores:
        raise SplitError(f"split {name}: no test concept could be scored")

    predicted = median_split_binarize(scores)
    fold_accuracy = accuracy(predicted, {cid: labels[cid] for cid in scores})
    logger.info('Split %s: accuracy %.4f on %d test concepts', name, fold_accuracy, len(scores))
    return FoldResult(str(name), fold_accuracy, len(train_ids), len(test_ids), len(unscorable))


def run_experiment(config, concepts, contexts, table=None, graded=None, estimator=None):
    """
    Run one evaluation protocol end to end

    Args:
        config: ExperimentConfig
        concepts: ConceptSet of labeled (and optionally graded) concepts
        contexts: Dictionary of concept id -> list of MaskedContext
        table: EmbeddingTable for the nn estimators
        graded: ConceptSet of graded concepts for the graded protocol
            (default: the concepts of `concepts` that carry a grade)
        estimator: Estimator object overriding the one named in the config

    Returns:
        EvaluationReport
    """
    estimator = estimator or make_estimator(config, table)
    echo = config.echo()

    if config.protocol == 'kfold':
        labeled = concepts.subset(concepts.labels())
        plan = make_kfold_plan(labeled, config.k, config.seed)
        rows = [
            _run_split(str(fold), estimator, labeled, contexts, train_ids, test_ids,
                       derive_seed(config.seed, fold), config.balance)
            for fold, train_ids, test_ids in iter_kfold_splits(plan)
        ]
        return _aggregate('kfold', rows, echo, config.seed)

    if config.protocol == 'loco':
        labeled = concepts.subset(concepts.labels())
        categories = (
            [config.held_out_category] if config.held_out_category else labeled.categories()
        )
        if not categories:
            raise SplitError('no concept carries a category')
        rows = []
        for index, category in enumerate(categories):
            train_ids, test_ids = leave_one_category_out_split(
                labeled, category, derive_seed(config.seed, index)
            )
            rows.append(_run_split(category, estimator, labeled, contexts, train_ids, test_ids,
                                   derive_seed(config.seed, index), config.balance))
        return _aggregate('leave_one_category_out', rows, echo, config.seed)

    if config.protocol == 'graded':
        graded = graded if graded is not None else ConceptSet(c for c in concepts if c.grade is not None)
        graded_ids = set(graded.ids())
        train = ConceptSet(c for c in concepts if c.label is not None and c.id not in graded_ids)
        labels = train.labels()
        _require_both_classes(list(labels), labels, 'graded training')

        train_contexts = {cid: contexts.get(cid, []) for cid in labels}
        if config.balance:
            train_contexts = balance_training_contexts(train_contexts, labels, config.seed)
        _check_no_leakage(list(labels), graded.ids(), train_contexts)

        estimator.fit(train, train_contexts)
        scores, unscorable = estimator.score(graded, {cid: contexts.get(cid, []) for cid in graded_ids})
        if unscorable:
            logger.warning('Graded: %d concepts unscorable', len(unscorable))
        return graded_eval(
            scores, graded,
            positive_threshold=config.positive_threshold,
            negative_sample=config.negative_sample,
            seed=config.seed,
            config_echo=echo,
            n_train=len(labels),
            n_unscored=len(unscorable),
        )

    raise ControversyError(f"unknown protocol {config.protocol!r}")


def _aggregate(protocol, rows, echo, seed):
    aggregate_accuracy = math.fsum(row.accuracy for row in rows) / len(rows)
    logger.info('%s: aggregate accuracy %.4f over %d splits', protocol, aggregate_accuracy, len(rows))
    return EvaluationReport(
        protocol=protocol,
        per_fold=tuple(rows),
        aggregate_accuracy=aggregate_accuracy,
        pearson=None,
        config_echo=echo,
        seed=seed,
    )


def report_document(report):
    """Plain dictionary form of a report, in the versioned schema"""
    return {
        'schema_version': report.schema_version,
        'protocol': report.protocol,
        'per_fold': [asdict(row) for row in report.per_fold],
        'aggregate_accuracy': report.aggregate_accuracy,
        'pearson': report.pearson,
        'seed': report.seed,
        'config': report.config_echo,
    }


def render_report(report):
    """
    Validate a report and render it as an indented JSON document

    Args:
        report: EvaluationReport

    Returns:
        Bytes
    """
    serializer = EvaluationReportSerializer(data=report_document(report))
    if not serializer.is_valid():
        raise ControversyError(f"invalid evaluation report: {dict(serializer.errors)}")
    return JSONRenderer().render(serializer.validated_data, renderer_context={'indent': 2}) + b'\n'
