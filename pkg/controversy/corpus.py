"""
Corpus module

This module turns a hyperlink-annotated sentence corpus into masked
contexts: the sentences that reference each target concept, with the
words of the reference replaced by a fixed mask token and the result
kept only when its length lies inside the configured window.
"""

import csv
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ArtifactFormatError, CorpusFormatError, MaskError, SpanError
from .serializers import ConceptRowSerializer, CorpusRecordSerializer

logger = logging.getLogger(__name__)

MASK_TOKEN = '[MASK]'
MIN_LEN = 10
MAX_LEN = 70

CONTEXTS_FORMAT = 'controversy-contexts'
CONTEXTS_VERSION = 1

# Letters and digits; underscores count as punctuation.
TOKEN_RE = re.compile(r'[^\W_]+')


@dataclass(frozen=True)
class Concept:
    """A titled entity whose controversiality is being estimated"""
    id: str
    title: str
    surface_forms: frozenset = frozenset()
    label: Optional[int] = None
    grade: Optional[int] = None
    categories: frozenset = frozenset()

    def __post_init__(self):
        if not self.id:
            raise ValueError('concept id must be non-empty')
        if self.label is not None and self.label not in (0, 1):
            raise ValueError(f"concept {self.id}: label must be 0 or 1, got {self.label}")
        if self.grade is not None and not 0 <= self.grade <= 10:
            raise ValueError(f"concept {self.id}: grade must lie in [0, 10], got {self.grade}")

    @property
    def all_surface_forms(self):
        """Title plus every listed alternative surface form"""
        return frozenset({self.title}) | self.surface_forms


class ConceptSet:
    """Concepts keyed by id, in insertion order"""

    def __init__(self, concepts=()):
        self._concepts = {}
        for concept in concepts:
            self.add(concept)

    def add(self, concept):
        if concept.id in self._concepts:
            raise ValueError(f"duplicate concept id: {concept.id}")
        self._concepts[concept.id] = concept

    def __iter__(self):
        return iter(self._concepts.values())

    def __len__(self):
        return len(self._concepts)

    def __contains__(self, concept_id):
        return concept_id in self._concepts

    def __getitem__(self, concept_id):
        return self._concepts[concept_id]

    def get(self, concept_id, default=None):
        return self._concepts.get(concept_id, default)

    def ids(self):
        return list(self._concepts)

    def labels(self):
        """Binary labels of the labeled concepts"""
        return {c.id: c.label for c in self if c.label is not None}

    def grades(self):
        return {c.id: c.grade for c in self if c.grade is not None}

    def categories(self):
        """Every category name carried by at least one concept, sorted"""
        names = set()
        for concept in self:
            names.update(concept.categories)
        return sorted(names)

    def subset(self, concept_ids):
        wanted = set(concept_ids)
        return ConceptSet(c for c in self if c.id in wanted)


@dataclass(frozen=True)
class Mention:
    concept_id: str
    start: int
    end: int


@dataclass(frozen=True)
class RawSentence:
    """One corpus sentence and the hyperlink anchors it contains"""
    text: str
    mentions: tuple = ()
    source_ref: str = ''

    def concept_ids(self):
        """Referenced concept ids, in first-mention order"""
        return list(dict.fromkeys(m.concept_id for m in self.mentions))

    def anchor_texts(self, concept_id):
        return frozenset(
            self.text[m.start:m.end] for m in self.mentions if m.concept_id == concept_id
        )


@dataclass(frozen=True)
class MaskedContext:
    """A tokenized sentence referencing a concept, with the reference masked"""
    concept_id: str
    tokens: tuple
    source_ref: str = ''


def tokenize(text):
    """
    Split text into lowercase word tokens

    Args:
        text: Any Unicode string

    Returns:
        List of tokens; punctuation is dropped, numerals are kept
    """
    return TOKEN_RE.findall(text.lower())


def parse_corpus(stream, source='corpus'):
    """
    Parse a line-delimited corpus into sentences

    Args:
        stream: Iterable of text lines, one JSON record per line
        source: Name used in the provenance of every sentence

    Returns:
        List of RawSentence in input order
    """
    sentences = []
    for line_number, line in enumerate(stream, start=1):
        line = line.rstrip('\r\n')
        if not line.strip():
            continue

        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusFormatError(f"invalid JSON: {e.msg}", line_number)

        serializer = CorpusRecordSerializer(data=record)
        if not serializer.is_valid():
            raise CorpusFormatError(f"invalid record: {dict(serializer.errors)}", line_number)

        text = serializer.validated_data['text']
        mentions = sorted(
            (Mention(m['concept'], m['start'], m['end']) for m in serializer.validated_data['mentions']),
            key=lambda m: (m.start, m.end),
        )
        _check_spans(text, mentions, line_number)

        sentences.append(RawSentence(text, tuple(mentions), f"{source}:{line_number}"))

    logger.info('Parsed %d sentences from %s', len(sentences), source)
    return sentences


def _check_spans(text, mentions, line_number):
    previous_end = 0
    for mention in mentions:
        if mention.end > len(text):
            raise SpanError(
                f"mention of {mention.concept_id!r} spans [{mention.start}, {mention.end}) "
                f"beyond text length {len(text)}",
                line_number,
            )
        if mention.start < previous_end:
            raise SpanError(
                f"mention of {mention.concept_id!r} at [{mention.start}, {mention.end}) "
                f"overlaps the previous mention",
                line_number,
            )
        previous_end = mention.end


def load_concepts(stream):
    """
    Read the concept list file

    Args:
        stream: Text stream of comma-separated rows with a header row
            (id, title, label, grade, categories, surface_forms)

    Returns:
        ConceptSet
    """
    reader = csv.DictReader(stream)
    concepts = ConceptSet()
    for row in reader:
        line_number = reader.line_num
        serializer = ConceptRowSerializer(data=row)
        if not serializer.is_valid():
            raise CorpusFormatError(f"invalid concept row: {dict(serializer.errors)}", line_number)

        data = serializer.validated_data
        try:
            concepts.add(Concept(
                id=data['id'],
                title=data['title'],
                surface_forms=_split_list(data.get('surface_forms', '')),
                label=data.get('label'),
                grade=data.get('grade'),
                categories=_split_list(data.get('categories', '')),
            ))
        except ValueError as e:
            raise CorpusFormatError(str(e), line_number)

    logger.info('Loaded %d concepts', len(concepts))
    return concepts


def _split_list(value):
    return frozenset(part.strip() for part in (value or '').split(';') if part.strip())


def write_corpus(sentences, stream):
    """Write sentences in the line-delimited corpus format read by parse_corpus"""
    for sentence in sentences:
        record = {
            'text': sentence.text,
            'mentions': [
                {'concept': m.concept_id, 'start': m.start, 'end': m.end}
                for m in sentence.mentions
            ],
        }
        stream.write(json.dumps(record, ensure_ascii=False) + '\n')


def write_concepts(concepts, stream):
    """Write a ConceptSet in the concept list format read by load_concepts"""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['id', 'title', 'label', 'grade', 'categories', 'surface_forms'])
    for concept in concepts:
        writer.writerow([
            concept.id,
            concept.title,
            '' if concept.label is None else concept.label,
            '' if concept.grade is None else concept.grade,
            ';'.join(sorted(concept.categories)),
            ';'.join(sorted(concept.surface_forms)),
        ])


def mask_mention(sentence, concept_id, mask_token=MASK_TOKEN):
    """
    Replace every mention of a concept with the mask token and tokenize

    Args:
        sentence: RawSentence containing at least one mention of concept_id
        concept_id: Concept whose mentions are masked
        mask_token: Token standing in for each mention

    Returns:
        MaskedContext (no length filter applied)
    """
    spans = [m for m in sentence.mentions if m.concept_id == concept_id]
    if not spans:
        raise MaskError(f"{sentence.source_ref or 'sentence'} does not mention {concept_id!r}")

    tokens = []
    cursor = 0
    for mention in spans:
        tokens.extend(tokenize(sentence.text[cursor:mention.start]))
        tokens.append(mask_token)
        cursor = mention.end
    tokens.extend(tokenize(sentence.text[cursor:]))

    return MaskedContext(concept_id, tuple(tokens), sentence.source_ref)


def mask_surface_forms(tokens, surface_forms, mask_token=MASK_TOKEN):
    """
    Mask unlinked occurrences of a concept's surface forms

    Every run of tokens equal to a tokenized surface form becomes one mask
    token; longer forms win over shorter ones at the same position.

    Args:
        tokens: Sequence of tokens
        surface_forms: Iterable of surface strings
        mask_token: Replacement token

    Returns:
        Tuple of tokens
    """
    forms = sorted(
        {tuple(tokenize(form)) for form in surface_forms} - {()},
        key=lambda form: (-len(form), form),
    )
    if not forms:
        return tuple(tokens)

    masked = []
    i = 0
    while i < len(tokens):
        for form in forms:
            if tuple(tokens[i:i + len(form)]) == form:
                masked.append(mask_token)
                i += len(form)
                break
        else:
            masked.append(tokens[i])
            i += 1
    return tuple(masked)


def mention_counts(sentences):
    """Number of hyperlink mentions per concept id"""
    counts = Counter()
    for sentence in sentences:
        for mention in sentence.mentions:
            counts[mention.concept_id] += 1
    return counts


def extract_contexts(sentences, concepts, min_len=MIN_LEN, max_len=MAX_LEN,
                     per_concept_cap=None, rng_seed=0, mask_token=MASK_TOKEN,
                     min_mentions=0):
    """
    Collect the masked contexts of every target concept

    Args:
        sentences: List of RawSentence
        concepts: ConceptSet of target concepts
        min_len: Minimum token count after masking (inclusive)
        max_len: Maximum token count after masking (inclusive)
        per_concept_cap: If set, keep a seeded uniform sample of this size
        rng_seed: Seed for the per-concept sample
        mask_token: Token replacing the concept's mentions
        min_mentions: Concepts linked fewer times than this get no contexts

    Returns:
        Dictionary of concept id -> list of MaskedContext, sorted by concept id
    """
    if min_len > max_len:
        raise ValueError(f"min_len {min_len} exceeds max_len {max_len}")
    if per_concept_cap is not None and per_concept_cap < 0:
        raise ValueError('per_concept_cap must be non-negative')

    contexts = {concept_id: [] for concept_id in concepts.ids()}
    rejected = 0

    for sentence in sentences:
        # A sentence referencing several targets yields one context per target.
        for concept_id in sentence.concept_ids():
            concept = concepts.get(concept_id)
            if concept is None:
                continue

            context = mask_mention(sentence, concept_id, mask_token)
            tokens = mask_surface_forms(
                context.tokens,
                concept.all_surface_forms | sentence.anchor_texts(concept_id),
                mask_token,
            )
            if min_len <= len(tokens) <= max_len:
                contexts[concept_id].append(MaskedContext(concept_id, tokens, context.source_ref))
            else:
                rejected += 1

    if min_mentions:
        counts = mention_counts(sentences)
        for concept_id in contexts:
            if counts[concept_id] < min_mentions:
                logger.warning(
                    'Concept %s has %d mentions (< %d); dropping its contexts',
                    concept_id, counts[concept_id], min_mentions,
                )
                contexts[concept_id] = []

    rng = np.random.default_rng(rng_seed)
    result = {}
    for concept_id in sorted(contexts):
        kept = contexts[concept_id]
        if per_concept_cap is not None and len(kept) > per_concept_cap:
            chosen = np.sort(rng.choice(len(kept), size=per_concept_cap, replace=False))
            kept = [kept[i] for i in chosen]
        result[concept_id] = kept

    logger.info(
        'Extracted %d contexts for %d concepts (%d outside length window)',
        sum(len(v) for v in result.values()), len(result), rejected,
    )
    return result


def write_contexts(contexts, stream, config=None):
    """
    Write contexts as JSON lines behind a versioned header

    Args:
        contexts: Dictionary of concept id -> list of MaskedContext
        stream: Writable text stream
        config: Parameter record echoed into the header
    """
    header = {
        'format': CONTEXTS_FORMAT,
        'version': CONTEXTS_VERSION,
        'config': config or {},
        'concepts': sorted(contexts),
    }
    stream.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + '\n')
    for concept_id in sorted(contexts):
        for context in contexts[concept_id]:
            record = {
                'concept': context.concept_id,
                'tokens': list(context.tokens),
                'source': context.source_ref,
            }
            stream.write(json.dumps(record, ensure_ascii=False) + '\n')


def read_contexts(stream):
    """
    Read a contexts file written by write_contexts

    Args:
        stream: Text stream

    Returns:
        Tuple of (contexts dictionary, header dictionary)
    """
    lines = iter(stream)
    try:
        header = json.loads(next(lines))
    except (StopIteration, json.JSONDecodeError):
        raise ArtifactFormatError('contexts file has no header line')

    if header.get('format') != CONTEXTS_FORMAT or header.get('version') != CONTEXTS_VERSION:
        raise ArtifactFormatError(
            f"unsupported contexts file: {header.get('format')} v{header.get('version')}"
        )

    contexts = {concept_id: [] for concept_id in header.get('concepts', [])}
    for line_number, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            context = MaskedContext(record['concept'], tuple(record['tokens']), record.get('source', ''))
        except (json.JSONDecodeError, KeyError, TypeError):
            raise ArtifactFormatError(f"contexts file line {line_number} is malformed")
        contexts.setdefault(context.concept_id, []).append(context)

    return contexts, header
