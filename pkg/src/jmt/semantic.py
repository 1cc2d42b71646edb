"""Sentence-pair heads: relatedness regression-as-classification, entailment."""

from __future__ import annotations

import numpy as np

RELATEDNESS_BINS = 5
ENTAILMENT_CLASSES = ("ENTAILMENT", "CONTRADICTION", "NEUTRAL")


class SemanticError(Exception):
    pass


def sentence_representation(h_states):
    """Element-wise maximum over token states (plain numpy helper)."""
    return np.max(np.asarray(h_states, dtype=float), axis=0)


def relatedness_features(h_s, h_sp):
    """d1 = [|h_s - h_s'| ; h_s * h_s'], symmetric in its arguments."""
    h_s = np.asarray(h_s, dtype=float)
    h_sp = np.asarray(h_sp, dtype=float)
    return np.concatenate([np.abs(h_s - h_sp), h_s * h_sp])


def entailment_features(h_s, h_sp):
    """d2 keeps the signed subtraction so premise/hypothesis order shows."""
    h_s = np.asarray(h_s, dtype=float)
    h_sp = np.asarray(h_sp, dtype=float)
    return np.concatenate([h_s - h_sp, h_s * h_sp])


def gold_score_distribution(score):
    """Piecewise-linear 5-bin target whose expected value equals the score."""
    if not 1.0 <= score <= 5.0:
        raise SemanticError(f"relatedness score {score} outside [1, 5]")
    p = np.zeros(RELATEDNESS_BINS)
    floor = int(np.floor(score))
    if floor == score:
        p[floor - 1] = 1.0
    else:
        p[floor] = score - floor
        p[floor - 1] = floor - score + 1.0
    return p


def expected_score(prob):
    """Sum of bin index (1..5) times bin probability."""
    return float(np.dot(np.arange(1, RELATEDNESS_BINS + 1), prob))


def pair_feature_nodes(graph, h_s_node, h_sp_node, signed):
    """Graph version of d1/d2 from two pooled sentence nodes."""
    diff = graph.subtract(h_s_node, h_sp_node)
    if not signed:
        diff = graph.abs(diff)
    return graph.concat(diff, graph.elementwise_mul(h_s_node, h_sp_node))


def maxout_layer_nodes(graph, x_node, leaves, prefix, k):
    """One Maxout hidden layer: grouped max over k linear feature maps."""
    z = graph.add(graph.matmul(leaves[prefix + ".W"], x_node),
                  leaves[prefix + ".b"])
    return graph.maxout(z, k=k)


def relatedness_nodes(graph, d1_node, leaves, k, dropout_rate=0.0,
                      dropout_seed=0):
    """Single Maxout layer + softmax over the 5 score bins."""
    if dropout_rate > 0.0:
        d1_node = graph.dropout(d1_node, rate=dropout_rate, seed=dropout_seed)
    hidden = maxout_layer_nodes(graph, d1_node, leaves, "rel.maxout", k)
    logits = graph.add(graph.matmul(leaves["rel.out.W"], hidden),
                       leaves["rel.out.b"])
    return graph.softmax(logits)


def entailment_nodes(graph, d2_node, rel_prob_node, leaves, k,
                     dropout_rate=0.0, dropout_seed=0):
    """Three Maxout layers over [weighted relatedness label embedding; d2]."""
    rel_embed = graph.matmul(rel_prob_node, leaves["rel.labelemb"])
    feats = graph.concat(rel_embed, d2_node)
    if dropout_rate > 0.0:
        feats = graph.dropout(feats, rate=dropout_rate, seed=dropout_seed)
    x = feats
    for i in (1, 2, 3):
        x = maxout_layer_nodes(graph, x, leaves, f"ent.maxout{i}", k)
    logits = graph.add(graph.matmul(leaves["ent.out.W"], x),
                       leaves["ent.out.b"])
    return graph.softmax(logits)
