"""Skip-gram with negative sampling, for word and character n-gram vectors.

In char_ngram mode the input vector of a word is the average of its unique
known n-gram vectors, and gradients are split evenly over those n-grams;
context (output) vectors are always per-word, with no character information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vocab import PRETRAIN_NGRAM_ORDERS, extract_char_ngrams


class SkipgramError(Exception):
    pass


@dataclass
class SkipgramConfig:
    dim: int = 100
    window: int = 1
    negatives: int = 15
    subsample: float = 1e-5
    epochs: int = 1
    lr: float = 0.05
    mode: str = "word"  # word | char_ngram
    ngram_orders: tuple = PRETRAIN_NGRAM_ORDERS
    seed: int = 0


def _sigmoid(x):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def pair_loss(v, ctx, negs):
    """-log sig(v.ctx) - sum_i log sig(-v.neg_i) for one training pair."""
    loss = -np.log(_sigmoid(np.dot(v, ctx)))
    for n in negs:
        loss -= np.log(_sigmoid(-np.dot(v, n)))
    return float(loss)


def pair_gradients(v, ctx, negs):
    """(loss, dv, dctx, [dneg_i]) for the per-pair objective."""
    dv = np.zeros_like(v)
    s = _sigmoid(np.dot(v, ctx))
    loss = -np.log(s)
    dctx = (s - 1.0) * v
    dv += (s - 1.0) * ctx
    dnegs = []
    for n in negs:
        sn = _sigmoid(np.dot(v, n))
        loss -= np.log(1.0 - sn)
        dnegs.append(sn * v)
        dv += sn * n
    return float(loss), dv, dctx, dnegs


class NegativeSampler:
    """Unigram^0.75 sampler over word ids."""

    def __init__(self, counts, power=0.75):
        weights = np.asarray(counts, dtype=float) ** power
        self._cdf = np.cumsum(weights)
        self._cdf /= self._cdf[-1]

    def draw(self, rng, n=1):
        return np.searchsorted(self._cdf, rng.random(n), side="right")


def train_skipgram(corpus, config):
    """Train on a token list; returns (entry tokens, input-side vectors).

    Entries are words in word mode and character n-grams in char_ngram mode.
    """
    corpus = list(corpus)
    if not corpus:
        raise SkipgramError("empty corpus")
    word_ids = {}
    counts = []
    ids = []
    for tok in corpus:
        wid = word_ids.setdefault(tok, len(word_ids))
        if wid == len(counts):
            counts.append(0)
        counts[wid] += 1
        ids.append(wid)
    words = list(word_ids)
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()

    rng = np.random.default_rng(config.seed)
    char_mode = config.mode == "char_ngram"
    if char_mode:
        gram_ids = {}
        word_grams = []
        for w in words:
            gids = []
            for gram in extract_char_ngrams(w, config.ngram_orders):
                gids.append(gram_ids.setdefault(gram, len(gram_ids)))
            word_grams.append(np.asarray(gids, dtype=np.intp))
        n_inputs = len(gram_ids)
        entries = list(gram_ids)
    else:
        n_inputs = len(words)
        entries = words
    vin = (rng.random((n_inputs, config.dim)) - 0.5) / config.dim
    vctx = np.zeros((len(words), config.dim))

    sampler = NegativeSampler(counts)
    keep_prob = np.ones(len(words))
    if config.subsample > 0:
        ratio = counts / total
        with np.errstate(divide="ignore"):
            keep_prob = np.minimum(1.0, np.sqrt(config.subsample / ratio))

    for _ in range(config.epochs):
        kept = [wid for wid in ids
                if keep_prob[wid] >= 1.0 or rng.random() < keep_prob[wid]]
        for pos, wid in enumerate(kept):
            lo = max(0, pos - config.window)
            hi = min(len(kept), pos + config.window + 1)
            for cpos in range(lo, hi):
                if cpos == pos:
                    continue
                ctx_id = kept[cpos]
                neg_ids = sampler.draw(rng, config.negatives)
                if char_mode:
                    grams = word_grams[wid]
                    if grams.size == 0:
                        continue
                    v = vin[grams].mean(axis=0)
                else:
                    v = vin[wid]
                _, dv, dctx, dnegs = pair_gradients(
                    v, vctx[ctx_id], [vctx[n] for n in neg_ids])
                vctx[ctx_id] -= config.lr * dctx
                for nid, dn in zip(neg_ids, dnegs):
                    vctx[nid] -= config.lr * dn
                if char_mode:
                    vin[grams] -= config.lr * dv / grams.size
                else:
                    vin[wid] -= config.lr * dv
    return entries, vin
