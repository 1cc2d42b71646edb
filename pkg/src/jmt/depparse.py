"""Head selection, dependency labeling, well-formedness, and Eisner repair.

Heads are 0-based token indices with 0 meaning ROOT (so a token's head is in
{0} | {1..L}). The matching score between token t and head candidate j is
h_t . (W_d h_j), with a learned root vector standing in for h_root.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ROOT = 0

# gold POS tags treated as punctuation for attachment scoring
DEFAULT_PUNCT_TAGS = frozenset({"``", "''", ":", ",", "."})

_NEG = -1e30  # masks self-attachment / disallowed arcs without inf values


class ParseError(Exception):
    pass


@dataclass
class ParseResult:
    heads: list          # per-token head, 0 = ROOT
    labels: list         # per-token dependency label
    repaired: bool


def head_scores(h_states, W_d, r):
    """Score matrix m[t, j] over candidates 1..L plus the root column L+1.

    h_states is [L, 2h]; column j < L scores token j+1 as head, column L
    scores ROOT. The self column is masked.
    """
    h = np.asarray(h_states, dtype=float)
    aug = np.vstack([h, np.asarray(r, dtype=float)])
    m = (h @ np.asarray(W_d, dtype=float)) @ aug.T
    np.fill_diagonal(m[:, :h.shape[0]], _NEG)
    return m


def head_distribution(h_states, W_d, r):
    """Row-softmax of head_scores; p[t, t] is exactly 0."""
    m = head_scores(h_states, W_d, r)
    z = m - m.max(axis=1, keepdims=True)
    with np.errstate(under="ignore"):
        e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def self_mask_constant(L):
    """Additive mask used by the graph path to zero self-attachment."""
    mask = np.zeros((L, L + 1))
    np.fill_diagonal(mask[:, :L], _NEG)
    return mask


def greedy_heads(prob):
    """Argmax head per token from a [L, L+1] distribution; ties -> lowest."""
    L = prob.shape[0]
    heads = []
    for t in range(L):
        j = int(np.argmax(prob[t]))
        heads.append(ROOT if j == L else j + 1)
    return heads


def check_well_formed(heads):
    """Returns 'ok' | 'cyclic' | 'no_root' | 'multiple_roots'.

    A head assignment containing any cycle is 'cyclic' (a rootless
    assignment always contains one); otherwise the ROOT-attachment count
    decides between 'no_root', 'multiple_roots', and 'ok'.
    """
    L = len(heads)
    for t in range(1, L + 1):
        seen = set()
        node = t
        while node != ROOT:
            if node in seen:
                return "cyclic"
            seen.add(node)
            node = heads[node - 1]
    roots = [t for t, h in enumerate(heads) if h == ROOT]
    if not roots:
        return "no_root"
    if len(roots) > 1:
        return "multiple_roots"
    return "ok"


def eisner_decode(scores, L):
    """Maximum-score single-root projective tree under s[head, mod].

    scores is (L+1) x (L+1) with position 0 = ROOT; entries for mod >= 1,
    head != mod are used. Ties resolve deterministically (lowest split /
    lowest root candidate). Returns per-token heads (0 = ROOT).
    """
    if L < 1:
        raise ParseError("eisner_decode needs at least one token")
    s = np.asarray(scores, dtype=float)
    best_heads = None
    best_score = None
    for root_child in range(1, L + 1):
        restricted = s.copy()
        restricted[0, :] = _NEG
        restricted[0, root_child] = s[0, root_child]
        heads, total = _eisner(restricted, L)
        if heads[root_child - 1] != ROOT:
            continue
        if best_score is None or total > best_score:
            best_score, best_heads = total, heads
    if best_heads is None:  # unreachable: some root choice always works
        raise ParseError("no projective tree found")
    return best_heads


def _eisner(s, n):
    """Classic first-order Eisner over positions 0..n; returns (heads, score)."""
    size = n + 1
    # [i][j][dir]: dir 0 = head on right (j), dir 1 = head on left (i)
    incomplete = np.full((size, size, 2), -np.inf)
    complete = np.full((size, size, 2), -np.inf)
    inc_bp = np.zeros((size, size, 2), dtype=int)
    comp_bp = np.zeros((size, size, 2), dtype=int)
    for i in range(size):
        complete[i, i, 0] = complete[i, i, 1] = 0.0
    for span in range(1, size):
        for i in range(size - span):
            j = i + span
            # incomplete spans: arc between i and j
            pieces = complete[i, i:j, 1] + complete[i + 1:j + 1, j, 0]
            k = int(np.argmax(pieces))
            incomplete[i, j, 0] = pieces[k] + s[j, i]  # j -> i (head right)
            inc_bp[i, j, 0] = i + k
            incomplete[i, j, 1] = pieces[k] + s[i, j]  # i -> j (head left)
            inc_bp[i, j, 1] = i + k
            # complete spans
            pieces = complete[i, i:j, 0] + incomplete[i:j, j, 0]
            k = int(np.argmax(pieces))
            complete[i, j, 0] = pieces[k]
            comp_bp[i, j, 0] = i + k
            pieces = incomplete[i, i + 1:j + 1, 1] + complete[i + 1:j + 1, j, 1]
            k = int(np.argmax(pieces))
            complete[i, j, 1] = pieces[k]
            comp_bp[i, j, 1] = i + k + 1
    heads = [None] * n

    def backtrack(i, j, direction, is_complete):
        if i == j:
            return
        if is_complete:
            k = comp_bp[i, j, direction]
            if direction == 0:
                backtrack(i, k, 0, True)
                backtrack(k, j, 0, False)
            else:
                backtrack(i, k, 1, False)
                backtrack(k, j, 1, True)
        else:
            k = inc_bp[i, j, direction]
            if direction == 0:
                heads[i - 1] = j
            else:
                heads[j - 1] = i
            backtrack(i, k, 1, True)
            backtrack(k + 1, j, 0, True)

    backtrack(0, n, 1, True)
    total = float(complete[0, n, 1])
    return heads, total


def tree_score(scores, heads):
    """Total arc score of a head assignment under s[head, mod]."""
    s = np.asarray(scores, dtype=float)
    return float(sum(s[h, m + 1] for m, h in enumerate(heads)))


def parse_sentence(prob, label_fn=None):
    """Greedy parse with Eisner repair; prob is the [L, L+1] head distribution.

    label_fn(heads) -> per-token labels, re-invoked after a repair so labels
    match the final heads. The result always passes check_well_formed.
    """
    L = prob.shape[0]
    heads = greedy_heads(prob)
    repaired = False
    if check_well_formed(heads) != "ok":
        with np.errstate(divide="ignore"):
            logp = np.log(prob)
        scores = np.full((L + 1, L + 1), _NEG)
        for t in range(L):
            scores[0, t + 1] = logp[t, L]
            for j in range(L):
                if j != t:
                    scores[j + 1, t + 1] = logp[t, j]
        heads = eisner_decode(scores, L)
        repaired = True
    labels = label_fn(heads) if label_fn is not None else [None] * L
    return ParseResult(heads=heads, labels=labels, repaired=repaired)


def attachment_scores(gold_heads, gold_labels, pred_heads, pred_labels,
                      gold_pos, punct_tags=DEFAULT_PUNCT_TAGS):
    """(UAS, LAS) over non-punctuation tokens; punctuation = gold POS in set."""
    if not (len(gold_heads) == len(pred_heads) == len(gold_pos)):
        raise ParseError("attachment_scores: length mismatch")
    total = 0
    uas_hits = 0
    las_hits = 0
    for i in range(len(gold_heads)):
        if gold_pos[i] in punct_tags:
            continue
        total += 1
        if gold_heads[i] == pred_heads[i]:
            uas_hits += 1
            if gold_labels[i] == pred_labels[i]:
                las_hits += 1
    if total == 0:
        return 0.0, 0.0
    return uas_hits / total, las_hits / total
