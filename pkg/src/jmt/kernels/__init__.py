"""Hot LSTM kernels with backend selection at import time.

The compiled Cython extension is preferred; the pure-numpy fallback is used
when the extension is missing or when JMT_PURE_PYTHON=1 is set. Both backends
share the bulk BLAS work done here; only the sequential cell loop differs.
"""

import os

import numpy as np

from . import pure

if os.environ.get("JMT_PURE_PYTHON") == "1":
    _impl = pure
else:
    try:
        from . import _lstm as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND_NAME

_GATE_ORDER = "ifou"


def _stack(Wi, Wf, Wo, Wu, h):
    Wh = np.ascontiguousarray(np.vstack([W[:, :h] for W in (Wi, Wf, Wo, Wu)]))
    Wx = np.vstack([W[:, h:] for W in (Wi, Wf, Wo, Wu)])
    return Wh, Wx


def lstm_forward(g, Wi, Wf, Wo, Wu, bi, bf, bo, bu):
    """Run an LSTM over the rows of g.

    Each gate matrix is [h, h + gw]: the first h columns multiply the
    recurrent state, the rest multiply the row of g. Initial h and c are
    zero. Returns (H, cache) with H of shape [L, h].
    """
    L = g.shape[0]
    h = Wi.shape[0]
    Wh, Wx = _stack(Wi, Wf, Wo, Wu, h)
    b = np.concatenate([bi, bf, bo, bu])
    pre = np.ascontiguousarray(g @ Wx.T + b)
    H, I, F, O, U, C, TC = (np.empty((L, h)) for _ in range(7))
    _impl.cell_forward(pre, Wh, H, I, F, O, U, C, TC)
    cache = (g, Wh, Wx, H, I, F, O, U, C, TC, h)
    return H, cache


def lstm_backward(cache, dH):
    """Gradients of a summed loss w.r.t. lstm_forward inputs.

    Returns (dg, dWi, dWf, dWo, dWu, dbi, dbf, dbo, dbu).
    """
    g, Wh, Wx, H, I, F, O, U, C, TC, h = cache
    L = dH.shape[0]
    dpre = np.empty((L, 4 * h))
    _impl.cell_backward(I, F, O, U, C, TC, Wh, dH, dpre)
    dWx = dpre.T @ g
    dWh = dpre[1:].T @ H[:-1] if L > 1 else np.zeros_like(Wh)
    db = dpre.sum(axis=0)
    dg = dpre @ Wx
    out = [dg]
    for i in range(4):
        out.append(np.hstack([dWh[i * h:(i + 1) * h],
                              dWx[i * h:(i + 1) * h]]))
    for i in range(4):
        out.append(db[i * h:(i + 1) * h])
    return out
