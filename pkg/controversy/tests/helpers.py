import json

from controversy.corpus import Concept, ConceptSet, Mention, RawSentence


def filler(n, prefix='w'):
    return ' '.join(f"{prefix}{i}" for i in range(n))


def sentence_with(title, concept_id, n_words, source='test:1', before=''):
    """RawSentence with one mention of concept_id followed by n_words filler words"""
    prefix = f"{before} " if before else ''
    text = f"{prefix}{title} {filler(n_words)}".rstrip()
    start = len(prefix)
    return RawSentence(text, (Mention(concept_id, start, start + len(title)),), source)


def record_line(text, mentions):
    return json.dumps({
        'text': text,
        'mentions': [{'concept': c, 'start': s, 'end': e} for c, s, e in mentions],
    })


def labeled_concepts(n_pos, n_neg, prefix_pos='p', prefix_neg='n'):
    concepts = [Concept(f"{prefix_pos}{i:02d}", f"{prefix_pos}{i:02d}", label=1) for i in range(n_pos)]
    concepts += [Concept(f"{prefix_neg}{i:02d}", f"{prefix_neg}{i:02d}", label=0) for i in range(n_neg)]
    return ConceptSet(concepts)
