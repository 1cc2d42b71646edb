# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled LSTM cell loops. Semantics match jmt.kernels.pure exactly."""

from libc.math cimport exp, tanh

import numpy as np

BACKEND_NAME = "compiled"


cdef inline double sigmoid(double x) nogil:
    return 1.0 / (1.0 + exp(-x))


def cell_forward(double[:, ::1] pre, double[:, ::1] Wh,
                 double[:, ::1] H, double[:, ::1] I, double[:, ::1] F,
                 double[:, ::1] O, double[:, ::1] U, double[:, ::1] C,
                 double[:, ::1] TC):
    cdef Py_ssize_t L = H.shape[0], h = H.shape[1]
    cdef Py_ssize_t t, j, k
    cdef double s, cp
    a_np = np.empty(4 * h, dtype=np.float64)
    cdef double[::1] a = a_np
    with nogil:
        for t in range(L):
            for j in range(4 * h):
                s = pre[t, j]
                if t > 0:
                    for k in range(h):
                        s += Wh[j, k] * H[t - 1, k]
                a[j] = s
            for j in range(h):
                I[t, j] = sigmoid(a[j])
                F[t, j] = sigmoid(a[h + j])
                O[t, j] = sigmoid(a[2 * h + j])
                U[t, j] = tanh(a[3 * h + j])
                cp = C[t - 1, j] if t > 0 else 0.0
                C[t, j] = I[t, j] * U[t, j] + F[t, j] * cp
                TC[t, j] = tanh(C[t, j])
                H[t, j] = O[t, j] * TC[t, j]


def cell_backward(double[:, ::1] I, double[:, ::1] F, double[:, ::1] O,
                  double[:, ::1] U, double[:, ::1] C, double[:, ::1] TC,
                  double[:, ::1] Wh, double[:, ::1] dH,
                  double[:, ::1] dpre):
    cdef Py_ssize_t L = dH.shape[0], h = dH.shape[1]
    cdef Py_ssize_t t, j, k
    cdef double dh, do, dc, di, du, df, cp, s
    carry_np = np.zeros(2 * h, dtype=np.float64)
    cdef double[::1] carry = carry_np  # [dh_carry; dc_carry]
    with nogil:
        for t in range(L - 1, -1, -1):
            for j in range(h):
                dh = dH[t, j] + carry[j]
                do = dh * TC[t, j]
                dc = dh * O[t, j] * (1.0 - TC[t, j] * TC[t, j]) + carry[h + j]
                di = dc * U[t, j]
                du = dc * I[t, j]
                cp = C[t - 1, j] if t > 0 else 0.0
                df = dc * cp
                carry[h + j] = dc * F[t, j]
                dpre[t, j] = di * I[t, j] * (1.0 - I[t, j])
                dpre[t, h + j] = df * F[t, j] * (1.0 - F[t, j])
                dpre[t, 2 * h + j] = do * O[t, j] * (1.0 - O[t, j])
                dpre[t, 3 * h + j] = du * (1.0 - U[t, j] * U[t, j])
            for k in range(h):
                s = 0.0
                for j in range(4 * h):
                    s += Wh[j, k] * dpre[t, j]
                carry[k] = s
