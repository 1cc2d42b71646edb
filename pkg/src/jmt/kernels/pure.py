"""Pure-numpy LSTM cell loops, the fallback backend for the compiled kernel.

Both backends implement the same two entry points over a gate layout of
[input, forget, output, update] stacked along the 4h axis. The surrounding
bulk matrix products live in :mod:`jmt.kernels` and are shared.
"""

import numpy as np

BACKEND_NAME = "pure"


def cell_forward(pre, Wh, H, I, F, O, U, C, TC):
    L, h = H.shape
    c_prev = np.zeros(h)
    h_prev = np.zeros(h)
    with np.errstate(over="ignore"):
        for t in range(L):
            a = pre[t] + Wh @ h_prev
            I[t] = 1.0 / (1.0 + np.exp(-a[:h]))
            F[t] = 1.0 / (1.0 + np.exp(-a[h:2 * h]))
            O[t] = 1.0 / (1.0 + np.exp(-a[2 * h:3 * h]))
            U[t] = np.tanh(a[3 * h:])
            C[t] = I[t] * U[t] + F[t] * c_prev
            TC[t] = np.tanh(C[t])
            H[t] = O[t] * TC[t]
            c_prev = C[t]
            h_prev = H[t]


def cell_backward(I, F, O, U, C, TC, Wh, dH, dpre):
    L, h = dH.shape
    dh_carry = np.zeros(h)
    dc_carry = np.zeros(h)
    for t in range(L - 1, -1, -1):
        dh = dH[t] + dh_carry
        do = dh * TC[t]
        dc = dh * O[t] * (1.0 - TC[t] * TC[t]) + dc_carry
        di = dc * U[t]
        du = dc * I[t]
        c_prev = C[t - 1] if t > 0 else 0.0
        df = dc * c_prev
        dc_carry = dc * F[t]
        dpre[t, :h] = di * I[t] * (1.0 - I[t])
        dpre[t, h:2 * h] = df * F[t] * (1.0 - F[t])
        dpre[t, 2 * h:3 * h] = do * O[t] * (1.0 - O[t])
        dpre[t, 3 * h:] = du * (1.0 - U[t] * U[t])
        dh_carry = Wh.T @ dpre[t]
