"""Sentence-pair features, score distributions, Maxout heads."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jmt.graph import Graph
from jmt.semantic import (ENTAILMENT_CLASSES, RELATEDNESS_BINS, SemanticError,
                          entailment_features, entailment_nodes,
                          expected_score, gold_score_distribution,
                          maxout_layer_nodes, pair_feature_nodes,
                          relatedness_features, relatedness_nodes,
                          sentence_representation)

RNG = np.random.default_rng(77)


def test_sentence_representation_is_columnwise_max():
    h = np.array([[1.0, -2.0], [0.5, 3.0], [-4.0, 0.0]])
    assert np.array_equal(sentence_representation(h), [1.0, 3.0])


def test_relatedness_features_hand_value():
    a = np.array([1.0, -2.0])
    b = np.array([3.0, 1.0])
    d1 = relatedness_features(a, b)
    assert np.array_equal(d1, [2.0, 3.0, 3.0, -2.0])
    # symmetric in its arguments
    assert np.array_equal(d1, relatedness_features(b, a))


def test_entailment_features_keep_sign():
    a = np.array([1.0, -2.0])
    b = np.array([3.0, 1.0])
    d2 = entailment_features(a, b)
    assert np.array_equal(d2, [-2.0, -3.0, 3.0, -2.0])
    assert not np.array_equal(d2, entailment_features(b, a))


def test_gold_score_distribution_values():
    assert np.allclose(gold_score_distribution(3.0), [0, 0, 1, 0, 0])
    assert np.allclose(gold_score_distribution(3.5), [0, 0, 0.5, 0.5, 0])
    assert np.allclose(gold_score_distribution(1.0), [1, 0, 0, 0, 0])
    assert np.allclose(gold_score_distribution(5.0), [0, 0, 0, 0, 1])
    assert np.allclose(gold_score_distribution(4.25), [0, 0, 0, 0.75, 0.25])


def test_gold_score_distribution_range():
    with pytest.raises(SemanticError):
        gold_score_distribution(0.5)
    with pytest.raises(SemanticError):
        gold_score_distribution(5.1)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.0, 5.0, allow_nan=False))
def test_gold_distribution_expectation_identity(score):
    p = gold_score_distribution(score)
    assert abs(expected_score(p) - score) < 1e-12
    assert abs(p.sum() - 1.0) < 1e-12


def test_expected_score_hand_value():
    assert np.isclose(expected_score([0.1, 0.2, 0.4, 0.2, 0.1]), 3.0)


def test_pair_feature_nodes_match_numpy():
    a = RNG.standard_normal(4)
    b = RNG.standard_normal(4)
    g = Graph()
    an, bn = g.constant(a), g.constant(b)
    d1 = pair_feature_nodes(g, an, bn, signed=False)
    d2 = pair_feature_nodes(g, an, bn, signed=True)
    g.forward()
    assert np.allclose(d1.value, relatedness_features(a, b))
    assert np.allclose(d2.value, entailment_features(a, b))


def make_leaves(g, h=3, m=4, k=2, dl=3):
    vals = {
        "rel.maxout.W": RNG.standard_normal((k * m, 4 * h)) * 0.3,
        "rel.maxout.b": RNG.standard_normal(k * m) * 0.3,
        "rel.out.W": RNG.standard_normal((RELATEDNESS_BINS, m)) * 0.3,
        "rel.out.b": RNG.standard_normal(RELATEDNESS_BINS) * 0.3,
        "rel.labelemb": RNG.standard_normal((RELATEDNESS_BINS, dl)) * 0.3,
        "ent.maxout1.W": RNG.standard_normal((k * m, 4 * h + dl)) * 0.3,
        "ent.maxout1.b": RNG.standard_normal(k * m) * 0.3,
        "ent.maxout2.W": RNG.standard_normal((k * m, m)) * 0.3,
        "ent.maxout2.b": RNG.standard_normal(k * m) * 0.3,
        "ent.maxout3.W": RNG.standard_normal((k * m, m)) * 0.3,
        "ent.maxout3.b": RNG.standard_normal(k * m) * 0.3,
        "ent.out.W": RNG.standard_normal((len(ENTAILMENT_CLASSES), m)) * 0.3,
        "ent.out.b": RNG.standard_normal(len(ENTAILMENT_CLASSES)) * 0.3,
    }
    return {name: g.parameter(v, name) for name, v in vals.items()}, vals


def test_relatedness_and_entailment_heads():
    h, k = 3, 2
    g = Graph()
    leaves, _ = make_leaves(g, h=h, k=k)
    hs = g.constant(RNG.standard_normal(2 * h))
    hsp = g.constant(RNG.standard_normal(2 * h))
    d1 = pair_feature_nodes(g, hs, hsp, signed=False)
    d2 = pair_feature_nodes(g, hs, hsp, signed=True)
    rel = relatedness_nodes(g, d1, leaves, k)
    ent = entailment_nodes(g, d2, rel, leaves, k)
    g.forward()
    assert rel.shape == (RELATEDNESS_BINS,)
    assert ent.shape == (len(ENTAILMENT_CLASSES),)
    assert np.isclose(rel.value.sum(), 1.0, atol=1e-12)
    assert np.isclose(ent.value.sum(), 1.0, atol=1e-12)


def test_pair_head_gradients():
    h, k = 3, 2
    g = Graph()
    leaves, _ = make_leaves(g, h=h, k=k)
    hs = g.parameter(RNG.standard_normal(2 * h), "hs")
    hsp = g.parameter(RNG.standard_normal(2 * h), "hsp")
    d1 = pair_feature_nodes(g, hs, hsp, signed=False)
    d2 = pair_feature_nodes(g, hs, hsp, signed=True)
    rel = relatedness_nodes(g, d1, leaves, k)
    ent = entailment_nodes(g, d2, rel, leaves, k)
    loss = g.add(g.kl_divergence(rel, target=gold_score_distribution(3.5)),
                 g.cross_entropy(ent, targets=1))
    g.forward()
    assert g.check_gradients(loss) < 1e-4


def test_maxout_layer_reduces_width():
    g = Graph()
    W = g.parameter(RNG.standard_normal((8, 5)), "m.W")
    b = g.parameter(RNG.standard_normal(8), "m.b")
    x = g.constant(RNG.standard_normal(5))
    out = maxout_layer_nodes(g, x, {"m.W": W, "m.b": b}, "m", 4)
    g.forward()
    assert out.shape == (2,)
