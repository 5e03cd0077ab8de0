"""
Lexical analysis

Ranks the words of positive (controversial) sentences by their information
gain with respect to the controversial / non-controversial sentence split,
using sentence-level word presence as the feature.
"""

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass

from .corpus import MASK_TOKEN
from .exceptions import EmptyClassError

logger = logging.getLogger(__name__)

MIN_DF = 5


@dataclass(frozen=True)
class WordGain:
    word: str
    gain: float
    df_pos: int
    df_neg: int

    @property
    def df(self):
        return self.df_pos + self.df_neg


def class_entropy(count_a, count_b):
    """Shannon entropy in bits of a two-class split given by its counts"""
    total = count_a + count_b
    entropy = 0.0
    for count in (count_a, count_b):
        if count:
            p = count / total
            entropy -= p * math.log2(p)
    return entropy


def information_gain(df_pos, df_neg, n_pos, n_neg):
    """
    Information gain of a presence feature over a binary class

    Args:
        df_pos: Positive sentences containing the word
        df_neg: Negative sentences containing the word
        n_pos: Positive sentences overall
        n_neg: Negative sentences overall

    Returns:
        Gain in bits, clamped at 0
    """
    total = n_pos + n_neg
    present = df_pos + df_neg
    absent = total - present

    conditional = 0.0
    if present:
        conditional += present / total * class_entropy(df_pos, df_neg)
    if absent:
        conditional += absent / total * class_entropy(n_pos - df_pos, n_neg - df_neg)

    return max(0.0, class_entropy(n_pos, n_neg) - conditional)


def information_gain_ranking(contexts, labels, min_df=MIN_DF, mask_token=MASK_TOKEN):
    """
    Rank words by information gain

    Only words present in at least one positive sentence and in at least
    min_df sentences overall are ranked.

    Args:
        contexts: Dictionary of concept id -> list of MaskedContext
        labels: Dictionary of concept id -> 0/1; each sentence takes its concept's label
        min_df: Minimum number of sentences a word must appear in
        mask_token: Token never ranked

    Returns:
        List of WordGain, highest gain first (ties: more frequent, then alphabetical)
    """
    if min_df < 1:
        raise ValueError('min_df must be at least 1')

    df_pos = Counter()
    df_neg = Counter()
    n_pos = 0
    n_neg = 0

    for concept_id, concept_contexts in contexts.items():
        label = labels.get(concept_id)
        if label is None:
            continue
        for context in concept_contexts:
            present = set(context.tokens)
            present.discard(mask_token)
            if label == 1:
                df_pos.update(present)
                n_pos += 1
            else:
                df_neg.update(present)
                n_neg += 1

    if n_pos == 0 or n_neg == 0:
        raise EmptyClassError(
            f"information gain needs sentences of both classes (positive {n_pos}, negative {n_neg})"
        )

    ranking = []
    for word, pos in df_pos.items():
        neg = df_neg.get(word, 0)
        if pos + neg < min_df:
            continue
        ranking.append(WordGain(word, information_gain(pos, neg, n_pos, n_neg), pos, neg))

    ranking.sort(key=lambda w: (-w.gain, -w.df, w.word))

    if not ranking:
        logger.warning('No word reaches min_df=%d; ranking is empty', min_df)
    else:
        logger.info('Ranked %d words over %d/%d sentences', len(ranking), n_pos, n_neg)
    return ranking


def write_ranking(ranking, stream, config=None):
    """
    Write a ranking as tab-separated text

    Args:
        ranking: List of WordGain
        stream: Writable text stream
        config: Parameter record echoed into the file
    """
    stream.write(f"#config\t{json.dumps(config or {}, sort_keys=True)}\n")
    stream.write('word\tgain\tdf_pos\tdf_neg\n')
    for entry in ranking:
        stream.write(f"{entry.word}\t{entry.gain:.12f}\t{entry.df_pos}\t{entry.df_neg}\n")
