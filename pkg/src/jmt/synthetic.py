"""Bundled synthetic corpus: 30-word vocabulary, 5 POS tags, 3 chunk types,
4 dependency labels, deterministic given a seed.

The annotations follow a tiny fixed grammar (determiners and attributive
adjectives attach to their noun, nouns and predicative adjectives to the
verb, the verb is the root), so a model with enough capacity can memorize
the training set; this is what the acceptance run measures.
"""

from __future__ import annotations

import numpy as np

from .data import AnnotatedSentence, SentencePair, Token

DETERMINERS = ("the", "a", "this", "that", "each", "some")
ADJECTIVES = ("red", "big", "old", "small", "happy", "green")
NOUNS = ("cat", "dog", "bird", "car", "tree", "house", "man", "woman",
         "fish", "book")
VERBS = ("sees", "likes", "finds", "takes", "makes", "holds")
COPULA = "is"
PERIOD = "."

DEFAULT_SEED = 20240915


def _noun_phrase(rng, with_adj):
    det = rng.choice(DETERMINERS)
    if with_adj:
        return [det, rng.choice(ADJECTIVES), rng.choice(NOUNS)]
    return [det, rng.choice(NOUNS)]


def _np_annotations(words, offset, verb_pos):
    """Tokens of one noun phrase; heads are 1-based absolute positions."""
    n = len(words)
    noun_pos = offset + n  # 1-based position of the head noun
    tokens = [Token(words[0], "DET", "B-NP", noun_pos, "det")]
    if n == 3:
        tokens.append(Token(words[1], "ADJ", "I-NP", noun_pos, "mod"))
    tokens.append(Token(words[-1], "NN", "E-NP", verb_pos, "mod"))
    return tokens


def _transitive(rng):
    subj = _noun_phrase(rng, rng.random() < 0.5)
    obj = _noun_phrase(rng, rng.random() < 0.5)
    verb = rng.choice(VERBS)
    verb_pos = len(subj) + 1
    tokens = _np_annotations(subj, 0, verb_pos)
    tokens.append(Token(verb, "VB", "S-VP", 0, "root"))
    tokens.extend(_np_annotations(obj, verb_pos, verb_pos))
    tokens.append(Token(PERIOD, ".", "O", verb_pos, "punct"))
    return AnnotatedSentence(tokens)


def _intransitive(rng):
    subj = _noun_phrase(rng, rng.random() < 0.5)
    verb_pos = len(subj) + 1
    tokens = _np_annotations(subj, 0, verb_pos)
    tokens.append(Token(rng.choice(VERBS), "VB", "S-VP", 0, "root"))
    tokens.append(Token(PERIOD, ".", "O", verb_pos, "punct"))
    return AnnotatedSentence(tokens)


def _predicative(rng):
    subj = _noun_phrase(rng, False)
    verb_pos = len(subj) + 1
    tokens = _np_annotations(subj, 0, verb_pos)
    tokens.append(Token(COPULA, "VB", "S-VP", 0, "root"))
    tokens.append(Token(rng.choice(ADJECTIVES), "ADJ", "S-ADJP", verb_pos,
                        "mod"))
    tokens.append(Token(PERIOD, ".", "O", verb_pos, "punct"))
    return AnnotatedSentence(tokens)


def sentences(n=50, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    makers = (_transitive, _intransitive, _predicative)
    return [makers[int(rng.integers(len(makers)))](rng) for _ in range(n)]


def _relatedness(premise, hypothesis):
    """1 + 4 * token-set Jaccard, snapped to the nearest half point."""
    a, b = set(premise), set(hypothesis)
    score = 1.0 + 4.0 * len(a & b) / len(a | b)
    return min(5.0, max(1.0, round(score * 2.0) / 2.0))


def pairs(n=40, seed=DEFAULT_SEED + 1):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        kind = i % 3
        if kind == 0:  # drop the adjectives: premise entails hypothesis
            premise = _transitive(rng)
            p = premise.forms
            h = [t.form for t in premise.tokens if t.pos != "ADJ"]
            label = "ENTAILMENT"
        elif kind == 1:  # swap the object noun
            premise = _transitive(rng)
            p = premise.forms
            h = list(p)
            obj = max(j for j, t in enumerate(premise.tokens)
                      if t.pos == "NN")
            others = [w for w in NOUNS if w != p[obj]]
            h[obj] = others[int(rng.integers(len(others)))]
            label = "CONTRADICTION"
        else:  # unrelated sentences
            p = _transitive(rng).forms
            h = _predicative(rng).forms
            label = "NEUTRAL"
        out.append(SentencePair(pair_id=f"syn{i:03d}", premise=p,
                                hypothesis=h,
                                relatedness=_relatedness(p, h),
                                entailment=label))
    return out


def collect_labels(sents):
    """(pos, chunk, dep) label tuples occurring in the sentences, sorted."""
    pos, chunk, dep = set(), set(), set()
    for sent in sents:
        for tok in sent.tokens:
            if tok.pos is not None:
                pos.add(tok.pos)
            if tok.chunk is not None:
                chunk.add(tok.chunk)
            if tok.deprel is not None:
                dep.add(tok.deprel)
    return tuple(sorted(pos)), tuple(sorted(chunk)), tuple(sorted(dep))
