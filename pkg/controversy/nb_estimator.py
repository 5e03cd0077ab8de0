"""
Naive Bayes estimator

A multinomial bag-of-words Naive Bayes model trained on the masked contexts
of controversial and non-controversial concepts. A sentence is scored by the
posterior probability that the concept it references is controversial,
under a fixed 0.5 class prior; a concept is scored by the mean over its
sentences.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, partial
from typing import Optional

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.naive_bayes import MultinomialNB

from .corpus import MASK_TOKEN
from .exceptions import ArtifactFormatError, EmptyClassError, UnscorableError

logger = logging.getLogger(__name__)

ALPHA = 1.0
PRIOR_POS = 0.5

MODEL_FORMAT = '#controversy-nb-model'
MODEL_VERSION = 1

# Row order of the classifier's per-class arrays (classes_ is sorted).
NEG, POS = 0, 1


def _countable_tokens(tokens, mask_token):
    return [token for token in tokens if token != mask_token]


def _vectorizer(mask_token, vocabulary=None):
    # Contexts arrive tokenized; the analyzer only drops the mask.
    return CountVectorizer(
        analyzer=partial(_countable_tokens, mask_token=mask_token),
        vocabulary=vocabulary,
        lowercase=False,
        token_pattern=None,
    )


@dataclass(frozen=True)
class NBModel:
    """Per-class token counts with add-alpha smoothing"""
    count_pos: dict = field(repr=False)
    count_neg: dict = field(repr=False)
    total_pos: int = 0
    total_neg: int = 0
    smoothing_alpha: float = ALPHA
    prior_pos: float = PRIOR_POS
    mask_token: str = MASK_TOKEN
    skip_oov: bool = True

    def __post_init__(self):
        if self.smoothing_alpha <= 0:
            raise ValueError('smoothing alpha must be positive')
        if self.prior_pos != PRIOR_POS:
            raise ValueError('the class prior is fixed at 0.5')
        if self.total_pos != sum(self.count_pos.values()) or self.total_neg != sum(self.count_neg.values()):
            raise ValueError('class totals disagree with the token counts')

    @cached_property
    def vocab(self):
        return frozenset(self.count_pos) | frozenset(self.count_neg)

    @cached_property
    def _vectorizer(self):
        return _vectorizer(self.mask_token, sorted(self.vocab))

    @cached_property
    def _classifier(self):
        # One aggregated row per class gives the same feature_count_ as the sentences did.
        tokens = sorted(self.vocab)
        counts = np.array([
            [self.count_neg.get(token, 0) for token in tokens],
            [self.count_pos.get(token, 0) for token in tokens],
        ])
        return MultinomialNB(alpha=self.smoothing_alpha, fit_prior=False, force_alpha=True).fit(
            counts, [NEG, POS]
        )

    @cached_property
    def _unseen_log_likelihoods(self):
        totals = np.array([self.total_neg, self.total_pos], dtype=np.float64)
        return np.log(self.smoothing_alpha) - np.log(totals + self.smoothing_alpha * len(self.vocab))


@dataclass(frozen=True)
class ConceptScore:
    concept_id: str
    score: float
    n_sentences: int
    per_sentence: Optional[tuple] = None


def train_nb(contexts, labels, alpha=ALPHA, mask_token=MASK_TOKEN, skip_oov=True):
    """
    Count token occurrences per class

    Args:
        contexts: Dictionary of concept id -> list of MaskedContext
        labels: Dictionary of concept id -> 0/1; unlabeled concepts are ignored
        alpha: Add-alpha smoothing constant
        mask_token: Token excluded from counting
        skip_oov: Ignore out-of-vocabulary tokens when scoring

    Returns:
        NBModel
    """
    if alpha <= 0:
        raise ValueError('alpha must be positive')

    documents = []
    targets = []
    for concept_id in sorted(contexts):
        label = labels.get(concept_id)
        if label is None:
            continue
        for context in contexts[concept_id]:
            documents.append(context.tokens)
            targets.append(label)

    for label, name in ((POS, 'controversial'), (NEG, 'non-controversial')):
        if label not in targets:
            raise EmptyClassError(f"no training contexts for the {name} class")
        if not any(_countable_tokens(doc, mask_token) for doc, target in zip(documents, targets) if target == label):
            raise EmptyClassError(f"training contexts of the {name} class hold no countable token")

    vectorizer = _vectorizer(mask_token)
    matrix = vectorizer.fit_transform(documents)
    classifier = MultinomialNB(alpha=alpha, fit_prior=False, force_alpha=True).fit(matrix, targets)

    tokens = vectorizer.get_feature_names_out()
    rows = {int(label): row for label, row in zip(classifier.classes_, classifier.feature_count_)}
    count_pos = {str(token): int(count) for token, count in zip(tokens, rows[POS]) if count}
    count_neg = {str(token): int(count) for token, count in zip(tokens, rows[NEG]) if count}

    logger.info(
        'Trained NB on %d positive / %d negative contexts, vocabulary %d',
        targets.count(POS), targets.count(NEG), len(tokens),
    )
    return NBModel(
        count_pos=dict(sorted(count_pos.items())),
        count_neg=dict(sorted(count_neg.items())),
        total_pos=sum(count_pos.values()),
        total_neg=sum(count_neg.values()),
        smoothing_alpha=alpha,
        mask_token=mask_token,
        skip_oov=skip_oov,
    )


def _sentence_scores(model, contexts):
    if not model.vocab:
        return np.full(len(contexts), 0.5)

    matrix = model._vectorizer.transform([context.tokens for context in contexts])
    scored = np.asarray(matrix.sum(axis=1)).ravel()

    if model.skip_oov:
        probabilities = model._classifier.predict_proba(matrix)[:, POS]
    else:
        unseen = np.array([
            sum(1 for token in context.tokens if token != model.mask_token and token not in model.vocab)
            for context in contexts
        ])
        joint = model._classifier.predict_joint_log_proba(matrix)
        joint = joint + np.outer(unseen, model._unseen_log_likelihoods)
        probabilities = np.exp(joint[:, POS] - np.logaddexp(joint[:, NEG], joint[:, POS]))
        scored = scored + unseen

    return np.where(scored > 0, probabilities, 0.5)


def nb_sentence_score(model, context):
    """
    Posterior probability that a context references a controversial concept

    Args:
        model: NBModel
        context: MaskedContext

    Returns:
        Float in (0, 1); 0.5 when no token can be scored
    """
    return float(_sentence_scores(model, [context])[0])


def nb_concept_score(model, contexts, concept_id=None, keep_sentences=False):
    """
    Average sentence score over a concept's contexts

    Args:
        model: NBModel
        contexts: Non-empty list of MaskedContext
        concept_id: Id reported in the result (defaults to the contexts' id)
        keep_sentences: Record (source_ref, score) per sentence

    Returns:
        ConceptScore
    """
    if not contexts:
        raise UnscorableError(f"no contexts for concept {concept_id!r}")

    concept_id = concept_id or contexts[0].concept_id
    scores = [float(score) for score in _sentence_scores(model, contexts)]
    per_sentence = None
    if keep_sentences:
        per_sentence = tuple(
            (context.source_ref, score) for context, score in zip(contexts, scores)
        )
    return ConceptScore(concept_id, math.fsum(scores) / len(scores), len(scores), per_sentence)


def dump_nb_model(model, stream, config=None):
    """
    Write an NBModel as a versioned flat file

    Args:
        model: NBModel
        stream: Writable text stream
        config: Parameter record echoed into the file
    """
    stream.write(f"{MODEL_FORMAT}\t{MODEL_VERSION}\n")
    stream.write(f"#config\t{json.dumps(config or {}, sort_keys=True)}\n")
    header = {
        'alpha': repr(float(model.smoothing_alpha)),
        'prior_pos': repr(float(model.prior_pos)),
        'total_pos': model.total_pos,
        'total_neg': model.total_neg,
        'vocab_size': len(model.vocab),
        'skip_oov': int(model.skip_oov),
        'mask_token': model.mask_token,
    }
    stream.write('\t'.join(f"{key}={value}" for key, value in header.items()) + '\n')
    for token in sorted(model.vocab):
        stream.write(f"{token}\t{model.count_pos.get(token, 0)}\t{model.count_neg.get(token, 0)}\n")


def load_nb_model(stream):
    """
    Read an NBModel written by dump_nb_model

    Args:
        stream: Text stream

    Returns:
        Tuple of (NBModel, config dictionary)
    """
    lines = [line.rstrip('\n') for line in stream]
    if len(lines) < 3 or lines[0] != f"{MODEL_FORMAT}\t{MODEL_VERSION}":
        raise ArtifactFormatError('not a controversy NB model file (v1)')

    try:
        config = json.loads(lines[1].split('\t', 1)[1])
        header = dict(pair.split('=', 1) for pair in lines[2].split('\t'))
        count_pos = {}
        count_neg = {}
        for line in lines[3:]:
            if not line:
                continue
            token, pos, neg = line.split('\t')
            if int(pos):
                count_pos[token] = int(pos)
            if int(neg):
                count_neg[token] = int(neg)

        model = NBModel(
            count_pos=count_pos,
            count_neg=count_neg,
            total_pos=int(header['total_pos']),
            total_neg=int(header['total_neg']),
            smoothing_alpha=float(header['alpha']),
            prior_pos=float(header['prior_pos']),
            mask_token=header['mask_token'],
            skip_oov=bool(int(header['skip_oov'])),
        )
    except (IndexError, KeyError, ValueError) as e:
        raise ArtifactFormatError(f"malformed NB model file: {e}")

    if len(model.vocab) != int(header['vocab_size']):
        raise ArtifactFormatError('NB model vocabulary size does not match its header')
    return model, config
