"""Reverse-mode differentiable computation graph over float64 arrays.

The op catalog is fixed: exactly the operations the model needs. Values are
numpy arrays (0-d scalars, vectors, or row-major matrices). Shapes are checked
at build time; forward evaluates nodes in insertion order (inputs always
precede consumers), backward runs the reverse sweep accumulating gradients
into every node reachable from a parameter leaf.
"""

from __future__ import annotations

import numpy as np


class GraphError(Exception):
    pass


class ShapeError(GraphError):
    pass


class EvalError(GraphError):
    pass


def _sigmoid(x):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def _softmax_rows(x):
    z = x - np.max(x, axis=-1, keepdims=True)
    with np.errstate(under="ignore"):
        e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


class Node:
    __slots__ = ("graph", "idx", "op", "inputs", "attrs", "shape", "value",
                 "grad", "is_param", "needs_grad", "name", "cache")

    def __init__(self, graph, idx, op, inputs, attrs, shape, name=None):
        self.graph = graph
        self.idx = idx
        self.op = op
        self.inputs = inputs
        self.attrs = attrs
        self.shape = shape
        self.value = None
        self.grad = None
        self.is_param = False
        self.needs_grad = False
        self.name = name
        self.cache = None

    def __repr__(self):
        label = self.name or f"{self.op}#{self.idx}"
        return f"<Node {label} shape={self.shape}>"


# ---------------------------------------------------------------------------
# op catalog: kind -> (infer_shape, forward, backward)
# infer_shape(attrs, shapes) -> output shape, raising ShapeError
# forward(node, xs) -> ndarray
# backward(node, xs, grad) -> list of per-input gradients (None = no gradient)
# ---------------------------------------------------------------------------

def _infer_matmul(attrs, shapes):
    a, b = shapes
    tb = attrs.get("transpose_b", False)
    if len(a) == 1:
        if tb or len(b) != 2 or a[0] != b[0]:
            raise ShapeError(f"matmul mismatch: {a} x {b}")
        return (b[1],)
    if len(a) != 2:
        raise ShapeError(f"matmul left operand must be 2-d, got {a}")
    if tb:
        if len(b) != 2 or a[1] != b[1]:
            raise ShapeError(f"matmul (transposed) mismatch: {a} x {b}")
        return (a[0], b[0])
    if len(b) == 1:
        if a[1] != b[0]:
            raise ShapeError(f"matmul mismatch: {a} x {b}")
        return (a[0],)
    if len(b) != 2 or a[1] != b[0]:
        raise ShapeError(f"matmul mismatch: {a} x {b}")
    return (a[0], b[1])


def _fwd_matmul(node, xs):
    a, b = xs
    if node.attrs.get("transpose_b", False):
        return a @ b.T
    return a @ b


def _bwd_matmul(node, xs, g):
    a, b = xs
    if node.attrs.get("transpose_b", False):
        return [g @ b, g.T @ a]
    if a.ndim == 1:
        return [b @ g, np.outer(a, g)]
    if b.ndim == 1:
        return [np.outer(g, b), a.T @ g]
    return [g @ b.T, a.T @ g]


def _infer_add(attrs, shapes):
    a, b = shapes
    if a == b:
        return a
    if len(a) == 2 and len(b) == 1 and a[1] == b[0]:
        return a  # row-broadcast bias
    raise ShapeError(f"add mismatch: {a} + {b}")


def _bwd_add(node, xs, g):
    a, b = xs
    if a.shape == b.shape:
        return [g, g]
    return [g, g.sum(axis=0)]


def _infer_subtract(attrs, shapes):
    a, b = shapes
    if a != b:
        raise ShapeError(f"subtract mismatch: {a} - {b}")
    return a


def _infer_mul(attrs, shapes):
    a, b = shapes
    if a != b:
        raise ShapeError(f"elementwise_mul mismatch: {a} * {b}")
    return a


def _infer_concat(attrs, shapes):
    axis = attrs.get("axis", 0)
    if all(len(s) == 1 for s in shapes) and axis == 0:
        return (sum(s[0] for s in shapes),)
    # promote vectors to single rows when concatenating along axis 0
    rows = [(1, s[0]) if len(s) == 1 else s for s in shapes]
    if any(len(s) != 2 for s in rows):
        raise ShapeError(f"concat cannot combine shapes {shapes}")
    if axis == 0:
        w = rows[0][1]
        if any(s[1] != w for s in rows):
            raise ShapeError(f"concat axis 0 width mismatch: {shapes}")
        return (sum(s[0] for s in rows), w)
    if axis == 1:
        n = rows[0][0]
        if any(s[0] != n for s in rows):
            raise ShapeError(f"concat axis 1 row mismatch: {shapes}")
        return (n, sum(s[1] for s in rows))
    raise ShapeError(f"concat: bad axis {axis}")


def _fwd_concat(node, xs):
    axis = node.attrs.get("axis", 0)
    if len(node.shape) == 1:
        return np.concatenate(xs)
    xs2 = [x.reshape(1, -1) if x.ndim == 1 else x for x in xs]
    return np.concatenate(xs2, axis=axis)


def _bwd_concat(node, xs, g):
    axis = node.attrs.get("axis", 0)
    out = []
    off = 0
    for x in xs:
        if len(node.shape) == 1:
            n = x.shape[0]
            out.append(g[off:off + n])
        elif axis == 0:
            n = 1 if x.ndim == 1 else x.shape[0]
            piece = g[off:off + n]
            out.append(piece[0] if x.ndim == 1 else piece)
        else:
            n = x.shape[1]
            out.append(g[:, off:off + n])
        off += n
    return out


def _infer_maxout(attrs, shapes):
    (s,) = shapes
    k = attrs["k"]
    if s[-1] % k != 0:
        raise ShapeError(f"maxout: last dim {s[-1]} not divisible by pool {k}")
    return s[:-1] + (s[-1] // k,)


def _fwd_maxout(node, xs):
    (x,) = xs
    k = node.attrs["k"]
    grouped = x.reshape(x.shape[:-1] + (-1, k))
    idx = np.argmax(grouped, axis=-1)  # first max wins ties
    node.cache = idx
    return np.take_along_axis(grouped, idx[..., None], axis=-1)[..., 0]


def _bwd_maxout(node, xs, g):
    (x,) = xs
    k = node.attrs["k"]
    dg = np.zeros(x.shape[:-1] + (x.shape[-1] // k, k))
    np.put_along_axis(dg, node.cache[..., None], g[..., None], axis=-1)
    return [dg.reshape(x.shape)]


def _infer_softmax(attrs, shapes):
    (s,) = shapes
    if len(s) not in (1, 2):
        raise ShapeError(f"softmax wants a vector or matrix, got {s}")
    return s


def _bwd_softmax(node, xs, g):
    p = node.value
    if p.ndim == 1:
        return [p * (g - np.dot(g, p))]
    dot = np.sum(g * p, axis=1, keepdims=True)
    return [p * (g - dot)]


def _infer_row_max_pool(attrs, shapes):
    (s,) = shapes
    if len(s) != 2:
        raise ShapeError(f"row_max_pool wants a matrix, got {s}")
    return (s[1],)


def _fwd_row_max_pool(node, xs):
    (x,) = xs
    idx = np.argmax(x, axis=0)  # first max wins ties
    node.cache = idx
    return x[idx, np.arange(x.shape[1])]


def _bwd_row_max_pool(node, xs, g):
    (x,) = xs
    dg = np.zeros_like(x)
    dg[node.cache, np.arange(x.shape[1])] = g
    return [dg]


def _fwd_dropout(node, xs):
    (x,) = xs
    rate = node.attrs["rate"]
    if not node.graph.train_mode or rate == 0.0:
        node.cache = None
        return x
    rng = np.random.Generator(np.random.PCG64(node.attrs["seed"]))
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    node.cache = mask
    return x * mask


def _bwd_dropout(node, xs, g):
    if node.cache is None:
        return [g]
    return [g * node.cache]


def _infer_cross_entropy(attrs, shapes):
    (s,) = shapes
    targets = attrs["targets"]
    if len(s) == 1:
        if not np.isscalar(targets):
            raise ShapeError("cross_entropy on a vector wants a single target")
    elif len(s) == 2:
        if np.isscalar(targets) or len(targets) != s[0]:
            raise ShapeError(
                f"cross_entropy targets length mismatch for shape {s}")
    else:
        raise ShapeError(f"cross_entropy wants probabilities, got {s}")
    return ()


_P_FLOOR = 1e-300  # keeps log/1-over-p finite on underflowed probabilities


def _fwd_cross_entropy(node, xs):
    (p,) = xs
    t = node.attrs["targets"]
    if p.ndim == 1:
        return np.asarray(-np.log(max(p[t], _P_FLOOR)))
    rows = np.arange(p.shape[0])
    return np.asarray(-np.sum(np.log(np.maximum(p[rows, t], _P_FLOOR))))


def _bwd_cross_entropy(node, xs, g):
    (p,) = xs
    t = node.attrs["targets"]
    dp = np.zeros_like(p)
    if p.ndim == 1:
        dp[t] = -g / max(p[t], _P_FLOOR)
    else:
        rows = np.arange(p.shape[0])
        dp[rows, t] = -g / np.maximum(p[rows, t], _P_FLOOR)
    return [dp]


def _infer_kl(attrs, shapes):
    (s,) = shapes
    target = np.asarray(attrs["target"], dtype=float)
    if target.shape != s:
        raise ShapeError(f"kl_divergence target shape {target.shape} != {s}")
    return ()


def _fwd_kl(node, xs):
    (p,) = xs
    q = np.asarray(node.attrs["target"], dtype=float)
    nz = q > 0
    return np.asarray(np.sum(
        q[nz] * (np.log(q[nz]) - np.log(np.maximum(p[nz], _P_FLOOR)))))


def _bwd_kl(node, xs, g):
    (p,) = xs
    q = np.asarray(node.attrs["target"], dtype=float)
    dp = np.zeros_like(p)
    nz = q > 0
    dp[nz] = -g * q[nz] / np.maximum(p[nz], _P_FLOOR)
    return [dp]


def _infer_slice(attrs, shapes):
    (s,) = shapes
    if "rows" in attrs:
        n = len(attrs["rows"])
    else:
        start, stop = attrs["start"], attrs["stop"]
        if not (0 <= start <= stop <= s[0]):
            raise ShapeError(f"slice [{start}:{stop}] out of range for {s}")
        n = stop - start
    if "rows" in attrs and any(r < 0 or r >= s[0] for r in attrs["rows"]):
        raise ShapeError(f"slice row index out of range for {s}")
    return (n,) + s[1:]


def _fwd_slice(node, xs):
    (x,) = xs
    if "rows" in node.attrs:
        return x[np.asarray(node.attrs["rows"], dtype=np.intp)]
    return x[node.attrs["start"]:node.attrs["stop"]]


def _bwd_slice(node, xs, g):
    (x,) = xs
    dg = np.zeros_like(x)
    if "rows" in node.attrs:
        np.add.at(dg, np.asarray(node.attrs["rows"], dtype=np.intp), g)
    else:
        dg[node.attrs["start"]:node.attrs["stop"]] = g
    return [dg]


def _infer_lstm_seq(attrs, shapes):
    g, wi, wf, wo, wu, bi, bf, bo, bu = shapes
    if len(g) != 2:
        raise ShapeError(f"lstm_seq input must be [L, width], got {g}")
    h = wi[0]
    for w in (wi, wf, wo, wu):
        if len(w) != 2 or w[0] != h or w[1] != h + g[1]:
            raise ShapeError(
                f"lstm_seq gate matrix {w} incompatible with input {g}")
    for b in (bi, bf, bo, bu):
        if b != (h,):
            raise ShapeError(f"lstm_seq bias {b} incompatible with h={h}")
    return (g[0], h)


def _fwd_lstm_seq(node, xs):
    from . import kernels
    g = xs[0]
    if node.attrs.get("reverse", False):
        g = g[::-1]
    out, cache = kernels.lstm_forward(g, *xs[1:])
    node.cache = cache
    if node.attrs.get("reverse", False):
        out = out[::-1]
    return np.ascontiguousarray(out)


def _bwd_lstm_seq(node, xs, grad):
    from . import kernels
    rev = node.attrs.get("reverse", False)
    dh = grad[::-1] if rev else grad
    dg, *dparams = kernels.lstm_backward(node.cache, np.ascontiguousarray(dh))
    if rev:
        dg = dg[::-1]
    return [dg] + dparams


def _unary(fn, dfn):
    def fwd(node, xs):
        return fn(xs[0])

    def bwd(node, xs, g):
        return [g * dfn(xs[0], node.value)]

    return fwd, bwd


_sig_fwd, _sig_bwd = _unary(_sigmoid, lambda x, y: y * (1.0 - y))
_tanh_fwd, _tanh_bwd = _unary(np.tanh, lambda x, y: 1.0 - y * y)
_relu_fwd, _relu_bwd = _unary(lambda x: np.maximum(x, 0.0),
                              lambda x, y: (x > 0).astype(float))
_abs_fwd, _abs_bwd = _unary(np.abs, lambda x, y: np.sign(x))

_same = lambda attrs, shapes: shapes[0]

OP_CATALOG = {
    "matmul": (_infer_matmul, _fwd_matmul, _bwd_matmul),
    "add": (_infer_add, lambda n, xs: xs[0] + xs[1], _bwd_add),
    "subtract": (_infer_subtract, lambda n, xs: xs[0] - xs[1],
                 lambda n, xs, g: [g, -g]),
    "elementwise_mul": (_infer_mul, lambda n, xs: xs[0] * xs[1],
                        lambda n, xs, g: [g * xs[1], g * xs[0]]),
    "concat": (_infer_concat, _fwd_concat, _bwd_concat),
    "abs": (_same, _abs_fwd, _abs_bwd),
    "sigmoid": (_same, _sig_fwd, _sig_bwd),
    "tanh": (_same, _tanh_fwd, _tanh_bwd),
    "relu": (_same, _relu_fwd, _relu_bwd),
    "maxout": (_infer_maxout, _fwd_maxout, _bwd_maxout),
    "softmax": (_infer_softmax, lambda n, xs: _softmax_rows(xs[0]),
                _bwd_softmax),
    "row_max_pool": (_infer_row_max_pool, _fwd_row_max_pool,
                     _bwd_row_max_pool),
    "dropout": (_same, _fwd_dropout, _bwd_dropout),
    "cross_entropy": (_infer_cross_entropy, _fwd_cross_entropy,
                      _bwd_cross_entropy),
    "kl_divergence": (_infer_kl, _fwd_kl, _bwd_kl),
    "sum_squares": (lambda a, s: (), lambda n, xs: np.asarray(np.sum(xs[0] ** 2)),
                    lambda n, xs, g: [2.0 * g * xs[0]]),
    "scalar_scale": (_same, lambda n, xs: n.attrs["factor"] * xs[0],
                     lambda n, xs, g: [n.attrs["factor"] * g]),
    "slice": (_infer_slice, _fwd_slice, _bwd_slice),
    "lstm_seq": (_infer_lstm_seq, _fwd_lstm_seq, _bwd_lstm_seq),
}


class Graph:
    """A single-writer dynamic graph, rebuilt per sentence or batch."""

    def __init__(self, train_mode=False):
        self.nodes = []
        self.train_mode = train_mode

    # -- leaves --------------------------------------------------------
    def _leaf(self, value, name):
        arr = np.asarray(value, dtype=np.float64)
        node = Node(self, len(self.nodes), "leaf", [], {}, arr.shape, name)
        node.value = arr
        self.nodes.append(node)
        return node

    def constant(self, value, name=None):
        return self._leaf(value, name)

    def parameter(self, value, name):
        node = self._leaf(value, name)
        node.is_param = True
        node.needs_grad = True
        return node

    # -- construction ---------------------------------------------------
    def build_node(self, op_kind, inputs, name=None, **attrs):
        if op_kind not in OP_CATALOG:
            raise GraphError(f"unknown op_kind: {op_kind!r}")
        infer, _, _ = OP_CATALOG[op_kind]
        shape = infer(attrs, [n.shape for n in inputs])
        node = Node(self, len(self.nodes), op_kind, list(inputs), attrs,
                    shape, name)
        node.needs_grad = any(n.needs_grad for n in inputs)
        self.nodes.append(node)
        return node

    def __getattr__(self, op_kind):
        if op_kind in OP_CATALOG:
            return lambda *inputs, **attrs: self.build_node(
                op_kind, inputs, **attrs)
        raise AttributeError(op_kind)

    # -- evaluation -----------------------------------------------------
    def forward(self):
        for node in self.nodes:
            if node.op == "leaf":
                continue
            _, fwd, _ = OP_CATALOG[node.op]
            value = fwd(node, [n.value for n in node.inputs])
            if not np.all(np.isfinite(value)):
                raise EvalError(f"non-finite value in node {node!r}")
            node.value = value

    def backward(self, loss):
        if loss.shape != ():
            raise GraphError(f"loss must be scalar, got shape {loss.shape}")
        for node in self.nodes:
            node.grad = None
        loss.grad = np.ones(())
        for node in reversed(self.nodes):
            if node.grad is None or node.op == "leaf":
                continue
            _, _, bwd = OP_CATALOG[node.op]
            grads = bwd(node, [n.value for n in node.inputs], node.grad)
            for inp, g in zip(node.inputs, grads):
                if g is None or not inp.needs_grad:
                    continue
                if inp.grad is None:
                    inp.grad = np.zeros(inp.shape)
                inp.grad += g

    def parameters(self):
        return [n for n in self.nodes if n.is_param]

    def param_gradients(self):
        out = {}
        for n in self.parameters():
            out[n.name] = n.grad if n.grad is not None else np.zeros(n.shape)
        return out

    def check_gradients(self, loss, step=1e-5, max_entries=None, seed=0,
                        noise_floor=0.0):
        """Max relative error of analytic vs central-difference gradients.

        With max_entries set, at most that many entries per parameter are
        perturbed (chosen by a seeded draw), keeping large checks fast.

        Entries where the absolute disagreement is at most noise_floor are
        treated as exact matches.  Central differences in float64 carry an
        absolute rounding error of roughly |loss| * eps / step; gradients
        smaller than that cannot satisfy a relative criterion at any
        tolerance, so deep models with strongly attenuated paths need a small
        absolute floor (1e-9 is far above any real backpropagation bug).
        """
        self.forward()
        self.backward(loss)
        analytic = {n.idx: (np.zeros(n.shape) if n.grad is None else
                            n.grad.copy()) for n in self.parameters()}
        rng = np.random.default_rng(seed)
        worst = 0.0
        for node in self.parameters():
            flat = node.value.reshape(-1)
            aflat = analytic[node.idx].reshape(-1)
            if max_entries is not None and flat.size > max_entries:
                entries = rng.choice(flat.size, size=max_entries,
                                     replace=False)
            else:
                entries = range(flat.size)
            for i in entries:
                orig = flat[i]
                flat[i] = orig + step
                self.forward()
                hi = float(loss.value)
                flat[i] = orig - step
                self.forward()
                lo = float(loss.value)
                flat[i] = orig
                numeric = (hi - lo) / (2.0 * step)
                a = aflat[i]
                if abs(a - numeric) <= noise_floor:
                    continue
                err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
                worst = max(worst, err)
        self.forward()
        return worst
