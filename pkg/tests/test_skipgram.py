"""Negative-sampling objective, sampler distribution, training modes."""

import numpy as np
import pytest

from jmt.skipgram import (NegativeSampler, SkipgramConfig, SkipgramError,
                          pair_gradients, pair_loss, train_skipgram)


def test_pair_loss_at_zero_vectors():
    """With all-zero vectors every sigmoid is 1/2, so the loss is
    (negatives + 1) * log 2."""
    v = np.zeros(4)
    negs = [np.zeros(4)] * 5
    assert np.isclose(pair_loss(v, np.zeros(4), negs), 6 * np.log(2.0))


def test_pair_loss_decreases_with_alignment():
    v = np.ones(3)
    aligned = pair_loss(v, np.ones(3), [np.zeros(3)])
    opposed = pair_loss(v, -np.ones(3), [np.zeros(3)])
    assert aligned < opposed


def test_pair_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    v = rng.standard_normal(4)
    ctx = rng.standard_normal(4)
    negs = [rng.standard_normal(4) for _ in range(3)]
    loss, dv, dctx, dnegs = pair_gradients(v, ctx, negs)
    assert np.isclose(loss, pair_loss(v, ctx, negs))
    step = 1e-6
    vectors = [v, ctx] + negs
    grads = [dv, dctx] + dnegs
    for vec, grad in zip(vectors, grads):
        for i in range(vec.size):
            orig = vec[i]
            vec[i] = orig + step
            hi = pair_loss(v, ctx, negs)
            vec[i] = orig - step
            lo = pair_loss(v, ctx, negs)
            vec[i] = orig
            num = (hi - lo) / (2 * step)
            assert abs(grad[i] - num) < 1e-6 * max(1.0, abs(num))


def test_sampler_follows_power_distribution():
    counts = [81, 16]  # 81^0.75 = 27, 16^0.75 = 8 -> p0 = 27/35
    sampler = NegativeSampler(counts)
    rng = np.random.default_rng(1)
    draws = sampler.draw(rng, 100000)
    assert abs(np.mean(draws == 0) - 27 / 35) < 0.02


def test_sampler_uniform_case():
    sampler = NegativeSampler([5, 5])
    rng = np.random.default_rng(2)
    draws = sampler.draw(rng, 100000)
    assert abs(np.mean(draws == 0) - 0.5) < 0.02


def test_word_mode_training_shapes_and_determinism():
    corpus = ("the cat sat on the mat the cat ran " * 20).split()
    cfg = SkipgramConfig(dim=8, epochs=1, negatives=3, seed=5,
                         subsample=0.0)
    e1, v1 = train_skipgram(corpus, cfg)
    e2, v2 = train_skipgram(corpus, cfg)
    assert e1 == e2 and np.array_equal(v1, v2)
    assert set(e1) == {"the", "cat", "sat", "on", "mat", "ran"}
    assert v1.shape == (6, 8)
    assert np.any(v1 != 0)


def test_char_mode_entries_are_ngrams():
    corpus = "ab ba ab ba".split()
    cfg = SkipgramConfig(dim=4, epochs=1, negatives=2, seed=0, subsample=0.0,
                         mode="char_ngram", ngram_orders=(1, 2))
    entries, vectors = train_skipgram(corpus, cfg)
    assert "a" in entries and "#B#a" in entries and "b#E#" in entries
    assert vectors.shape[0] == len(entries)


def test_words_with_shared_contexts_get_similar_vectors():
    # "a" and "c" both appear only next to "b"; "z" only next to "q".
    # Distributionally interchangeable words end up with closer input
    # vectors than unrelated ones.
    rng = np.random.default_rng(3)
    corpus = []
    for _ in range(400):
        r = rng.random()
        if r < 1 / 3:
            corpus += ["a", "b"]
        elif r < 2 / 3:
            corpus += ["c", "b"]
        else:
            corpus += ["z", "q"]
    cfg = SkipgramConfig(dim=6, epochs=5, negatives=4, seed=1, subsample=0.0,
                         lr=0.1)
    entries, vectors = train_skipgram(corpus, cfg)
    idx = {w: i for i, w in enumerate(entries)}

    def cos(u, v):
        return (u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))

    sim_ac = cos(vectors[idx["a"]], vectors[idx["c"]])
    sim_az = cos(vectors[idx["a"]], vectors[idx["z"]])
    assert sim_ac > sim_az


def test_empty_corpus_raises():
    with pytest.raises(SkipgramError):
        train_skipgram([], SkipgramConfig())


def test_subsampling_keep_probability():
    # a word with frequency ratio far above the threshold is mostly dropped:
    # keep prob = sqrt(t / ratio)
    corpus = ["x"] * 99 + ["y"]
    cfg = SkipgramConfig(dim=2, epochs=1, negatives=1, seed=0,
                         subsample=1e-2)
    # ratio(x) = 0.99, keep = sqrt(0.01/0.99) ~ 0.1; just assert it runs and
    # produces finite vectors
    _, vectors = train_skipgram(corpus, cfg)
    assert np.all(np.isfinite(vectors))
