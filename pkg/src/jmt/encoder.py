"""Bi-LSTM layers and per-layer input composition.

Each gate matrix is [h, h + gw]: the recurrent state is implicit (the first
h columns multiply the previous hidden state), so composed layer inputs carry
only the non-recurrent components. Forward and backward directions use
separate parameter sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GATES = ("i", "f", "o", "u")


class WiringError(Exception):
    pass


@dataclass
class LayerWiring:
    """Connectivity flags, fixed before training."""

    use_shortcut: bool = True          # x_t into layers >= 2
    use_label_embeddings: bool = True  # weighted label feed into layer inputs
    use_vertical: bool = True          # lower layer's h_t into the input


def lstm_step(g_t, prev_h, prev_c, params):
    """One LSTM step; params maps W_i..W_u, b_i..b_u with W [h, h+gw]."""
    z = np.concatenate([prev_h, g_t])
    h = prev_h.shape[0]
    if params["W_i"].shape != (h, z.shape[0]):
        raise WiringError(
            f"gate matrix {params['W_i'].shape} incompatible with "
            f"state {h} + input {g_t.shape[0]}")

    def gate(name, fn):
        return fn(params["W_" + name] @ z + params["b_" + name])

    sig = lambda x: 1.0 / (1.0 + np.exp(-x))
    i = gate("i", sig)
    f = gate("f", sig)
    o = gate("o", sig)
    u = gate("u", np.tanh)
    c_t = i * u + f * prev_c
    h_t = o * np.tanh(c_t)
    return h_t, c_t


def bilstm_run(inputs, params_fwd, params_bwd):
    """Step-loop bi-LSTM over a [L, gw] input matrix; returns [L, 2h].

    This is the plain reference path; the graph uses the fused kernels.
    """
    inputs = np.asarray(inputs, dtype=float)
    h = params_fwd["W_i"].shape[0]
    L = inputs.shape[0]
    out = np.empty((L, 2 * h))
    h_t, c_t = np.zeros(h), np.zeros(h)
    for t in range(L):
        h_t, c_t = lstm_step(inputs[t], h_t, c_t, params_fwd)
        out[t, :h] = h_t
    h_t, c_t = np.zeros(h), np.zeros(h)
    for t in range(L - 1, -1, -1):
        h_t, c_t = lstm_step(inputs[t], h_t, c_t, params_bwd)
        out[t, h:] = h_t
    return out


def bilstm_nodes(graph, g_node, leaves_fwd, leaves_bwd):
    """Build the fused bi-LSTM over a composed-input node; output [L, 2h]."""
    def run(leaves, reverse):
        args = [g_node] + [leaves["W_" + g] for g in GATES] \
            + [leaves["b_" + g] for g in GATES]
        return graph.build_node("lstm_seq", args, reverse=reverse)

    fwd = run(leaves_fwd, False)
    bwd = run(leaves_bwd, True)
    return graph.concat(fwd, bwd, axis=1)


def compose_input(graph, *, is_lowest, x=None, lower_h=None, label_feed=None,
                  wiring):
    """Concatenate the active components of a layer's input, [L, gw].

    The lowest active layer always receives x_t. Higher layers take the
    nearest lower active layer's hidden state (vertical connection), x_t
    (shortcut connection), and the summed weighted label embeddings of the
    active tagging tasks below. When every optional component is disabled
    the vertical connection is kept so the stack stays connected.
    """
    if is_lowest:
        if x is None:
            raise WiringError("lowest layer requires the word representation")
        return x
    comps = []
    if wiring.use_vertical and lower_h is not None:
        comps.append(lower_h)
    if wiring.use_shortcut and x is not None:
        comps.append(x)
    if wiring.use_label_embeddings and label_feed is not None:
        comps.append(label_feed)
    if not comps:
        if lower_h is None:
            raise WiringError("layer input is empty under the given wiring")
        comps.append(lower_h)
    if len(comps) == 1:
        return comps[0]
    return graph.concat(*comps, axis=1)


def compose_width(*, is_lowest, x_width, lower_width, label_width, wiring):
    """Width of compose_input's result, for parameter sizing."""
    if is_lowest:
        return x_width
    w = 0
    if wiring.use_vertical:
        w += lower_width
    if wiring.use_shortcut:
        w += x_width
    if wiring.use_label_embeddings:
        w += label_width
    if w == 0:
        w = lower_width
    return w
