"""Times the sequential LSTM cell loop of both backends.

Usage: python benchmarks/bench_lstm.py [--length 20] [--hidden 30]
       [--repeats 200]

Defaults match the dimensions the model actually runs at, where the
compiled loop wins by avoiding per-step Python and NumPy dispatch
overhead. At much larger hidden sizes (~100+) the pure backend catches up
and eventually wins, because its per-step cost is dominated by BLAS
matmuls that the hand-written C loop cannot beat.
"""

import argparse
import time

import numpy as np

from jmt.kernels import pure

try:
    from jmt.kernels import _lstm as compiled
except ImportError:
    compiled = None


def make_inputs(rng, length, hidden):
    pre = rng.standard_normal((length, 4 * hidden))
    Wh = rng.standard_normal((4 * hidden, hidden)) * 0.1
    bufs = tuple(np.empty((length, hidden)) for _ in range(7))
    dH = rng.standard_normal((length, hidden))
    dpre = np.empty((length, 4 * hidden))
    return pre, Wh, bufs, dH, dpre


def bench(impl, pre, Wh, bufs, dH, dpre, repeats):
    H, I, F, O, U, C, TC = bufs
    start = time.perf_counter()
    for _ in range(repeats):
        impl.cell_forward(pre, Wh, H, I, F, O, U, C, TC)
        impl.cell_backward(I, F, O, U, C, TC, Wh, dH, dpre)
    return (time.perf_counter() - start) / repeats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=20)
    ap.add_argument("--hidden", type=int, default=30)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    inputs = make_inputs(rng, args.length, args.hidden)
    print(f"sequence length {args.length}, hidden {args.hidden}, "
          f"{args.repeats} repeats (forward + backward)")

    t_pure = bench(pure, *inputs, args.repeats)
    print(f"pure     : {t_pure * 1e3:8.3f} ms per call")
    if compiled is None:
        print("compiled : extension not built")
        return
    t_comp = bench(compiled, *inputs, args.repeats)
    # correctness cross-check before trusting the timing
    H_comp = inputs[2][0].copy()
    pure.cell_forward(inputs[0], inputs[1], *inputs[2])
    assert np.allclose(H_comp, inputs[2][0], atol=1e-12)
    print(f"compiled : {t_comp * 1e3:8.3f} ms per call "
          f"({t_pure / t_comp:.1f}x speedup)")


if __name__ == "__main__":
    main()
