"""Token-level POS/chunk classification, label embeddings, IOBES, span F1."""

from __future__ import annotations

import numpy as np


def classifier_nodes(graph, h_node, leaves, prefix, dropout_rate=0.0,
                     dropout_seed=0):
    """softmax(ReLU hidden) over the rows of h_node; returns the prob node.

    leaves carries "<prefix>.hidden.W" [in, rh], "<prefix>.hidden.b" [rh],
    "<prefix>.out.W" [rh, C], "<prefix>.out.b" [C].
    """
    if dropout_rate > 0.0:
        h_node = graph.dropout(h_node, rate=dropout_rate, seed=dropout_seed)
    hidden = graph.relu(graph.add(graph.matmul(h_node,
                                               leaves[prefix + ".hidden.W"]),
                                  leaves[prefix + ".hidden.b"]))
    logits = graph.add(graph.matmul(hidden, leaves[prefix + ".out.W"]),
                       leaves[prefix + ".out.b"])
    return graph.softmax(logits)


def classify_tokens(h_states, params, prefix):
    """Plain numpy re-evaluation of classifier_nodes, used as an oracle."""
    h = np.asarray(h_states, dtype=float)
    hidden = np.maximum(h @ params[prefix + ".hidden.W"]
                        + params[prefix + ".hidden.b"], 0.0)
    logits = hidden @ params[prefix + ".out.W"] + params[prefix + ".out.b"]
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def weighted_label_embedding(prob_row, table):
    """Probability-weighted sum of label embedding rows."""
    return np.asarray(prob_row, dtype=float) @ np.asarray(table, dtype=float)


# -- IOBES ------------------------------------------------------------------

def spans_to_tags(spans, length):
    """(start, end, type) triples (end exclusive, non-overlapping) -> tags."""
    tags = ["O"] * length
    for start, end, kind in spans:
        if end - start == 1:
            tags[start] = "S-" + kind
        else:
            tags[start] = "B-" + kind
            for i in range(start + 1, end - 1):
                tags[i] = "I-" + kind
            tags[end - 1] = "E-" + kind
    return tags


def tags_to_spans(tags):
    """Lenient IOBES decode: never fails on an invalid sequence.

    Any I/E without an open span of the same type starts a new span; O and
    S close whatever is open; an unterminated span is closed at its last
    token.
    """
    spans = []
    start = None
    kind = None

    def close(end):
        nonlocal start, kind
        if start is not None:
            spans.append((start, end, kind))
            start, kind = None, None

    for i, tag in enumerate(tags):
        if tag == "O":
            close(i)
            continue
        mark, _, label = tag.partition("-")
        if mark == "S":
            close(i)
            spans.append((i, i + 1, label))
        elif mark == "B":
            close(i)
            start, kind = i, label
        elif mark == "I":
            if start is None or label != kind:
                close(i)
                start, kind = i, label
        elif mark == "E":
            if start is None or label != kind:
                close(i)
                start, kind = i, label
            spans.append((start, i + 1, kind))
            start, kind = None, None
        else:
            close(i)
    close(len(tags))
    return spans


def chunk_f1(gold_spans, predicted_spans):
    """Exact-match span (precision, recall, F1) over per-sentence span lists."""
    correct = 0
    n_gold = 0
    n_pred = 0
    for gold, pred in zip(gold_spans, predicted_spans):
        gold_set = set(gold)
        correct += sum(1 for s in pred if s in gold_set)
        n_gold += len(gold)
        n_pred += len(pred)
    precision = correct / n_pred if n_pred else 0.0
    recall = correct / n_gold if n_gold else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return precision, recall, f1
