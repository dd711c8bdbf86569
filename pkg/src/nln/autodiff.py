"""Minimal reverse-mode automatic differentiation over dense numpy arrays.

Graphs are built once from placeholder/parameter leaves and re-evaluated with
fresh bindings; all intermediate outputs are cached on the nodes so a backward
pass can run over the same evaluation.  Gradient accumulation is additive
across fan-out and buffers are zeroed at the start of each backward pass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

CE_CLIP = 1e-7

_counter = itertools.count()


class GraphError(ValueError):
    """Raised for malformed graphs: shape mismatches, unbound inputs, misuse."""


def _as_array(x):
    return np.asarray(x, dtype=np.float64)


class Node:
    """One operation in a DAG.  Caches its output value and a gradient buffer."""

    __slots__ = ("op", "inputs", "name", "value", "grad", "attrs", "uid")

    def __init__(self, op, inputs=(), name=None, value=None, **attrs):
        self.op = op
        self.inputs = tuple(inputs)
        self.name = name
        self.value = value
        self.grad = None
        self.attrs = attrs
        self.uid = next(_counter)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Node {self.op}{label} #{self.uid}>"

    # Operator sugar for scalar-ish graph building in tests.
    def __add__(self, other):
        return add(self, _lift(other))

    def __sub__(self, other):
        return subtract(self, _lift(other))

    def __mul__(self, other):
        return multiply(self, _lift(other))


def _lift(x):
    return x if isinstance(x, Node) else constant(x)


# ---------------------------------------------------------------------------
# Leaves


def placeholder(name):
    """Input leaf; its value comes from the bindings of forward_eval."""
    return Node("input", name=name)


def param(name, value):
    """Trainable leaf; holds its value across evaluations."""
    return Node("param", name=name, value=_as_array(value))


def constant(value):
    return Node("constant", value=_as_array(value))


# ---------------------------------------------------------------------------
# Ops


def add(a, b):
    return Node("add", (a, b))


def subtract(a, b):
    return Node("subtract", (a, b))


def multiply(a, b):
    return Node("multiply", (a, b))


def matmul(a, b):
    return Node("matmul", (a, b))


def sigmoid(a):
    return Node("sigmoid", (a,))


def hard_sigmoid(a):
    """hs(u) = min(1, max(0, u)); see clamp for the gradient convention."""
    return clamp(a, 0.0, 1.0)


def absolute(a):
    return Node("abs", (a,))


def clamp(a, lo, hi):
    return Node("clamp", (a,), lo=float(lo), hi=float(hi))


def reduce_prod(a, axis):
    return Node("reduce-product", (a,), axis=int(axis))


def reduce_sum(a, axis=None):
    return Node("reduce-sum", (a,), axis=axis)


def concat(nodes, axis=0):
    return Node("concat", tuple(nodes), axis=int(axis))


def gather(a, indices):
    """Flat gather: output[k] = a.ravel()[indices[k]] with indices any shape."""
    idx = np.asarray(indices, dtype=np.intp)
    return Node("gather", (a,), indices=idx)


def one_minus(a):
    return Node("one-minus", (a,))


def reshape(a, shape):
    return Node("reshape", (a,), shape=tuple(int(s) for s in shape))


def cross_entropy(prediction, target):
    """Mean binary cross-entropy; predictions clipped to [CE_CLIP, 1-CE_CLIP]."""
    return Node("cross-entropy", (prediction, target))


# ---------------------------------------------------------------------------
# Evaluation


def topo_order(root):
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if node.uid in seen:
            continue
        seen.add(node.uid)
        stack.append((node, True))
        for child in node.inputs:
            stack.append((child, False))
    return order


def _unbroadcast(grad, shape):
    """Sum a broadcasted gradient back down to the original shape."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _forward_node(node, bindings):
    op = node.op
    if op == "input":
        if node.name not in bindings:
            raise GraphError(f"unbound input {node.name!r} at {node!r}")
        node.value = _as_array(bindings[node.name])
        return
    if op in ("param", "constant"):
        return
    vals = [n.value for n in node.inputs]
    try:
        if op == "add":
            node.value = vals[0] + vals[1]
        elif op == "subtract":
            node.value = vals[0] - vals[1]
        elif op == "multiply":
            node.value = vals[0] * vals[1]
        elif op == "matmul":
            node.value = vals[0] @ vals[1]
        elif op == "sigmoid":
            with np.errstate(over="ignore"):  # exp overflow saturates exactly
                node.value = 1.0 / (1.0 + np.exp(-vals[0]))
        elif op == "abs":
            node.value = np.abs(vals[0])
        elif op == "clamp":
            node.value = np.clip(vals[0], node.attrs["lo"], node.attrs["hi"])
        elif op == "reduce-product":
            node.value = np.prod(vals[0], axis=node.attrs["axis"])
        elif op == "reduce-sum":
            node.value = np.sum(vals[0], axis=node.attrs["axis"])
        elif op == "concat":
            node.value = np.concatenate(vals, axis=node.attrs["axis"])
        elif op == "gather":
            node.value = vals[0].ravel()[node.attrs["indices"]]
        elif op == "one-minus":
            node.value = 1.0 - vals[0]
        elif op == "reshape":
            node.value = vals[0].reshape(node.attrs["shape"])
        elif op == "cross-entropy":
            p = np.clip(vals[0], CE_CLIP, 1.0 - CE_CLIP)
            t = vals[1]
            node.value = np.mean(-(t * np.log(p) + (1.0 - t) * np.log1p(-p)))
        else:
            raise GraphError(f"unknown op-kind {op!r}")
    except ValueError as exc:
        raise GraphError(f"shape mismatch at {node!r}: {exc}") from exc


def forward_eval(root, bindings=None):
    """Evaluate the DAG rooted at `root`, returning the root output array."""
    bindings = bindings or {}
    order = topo_order(root)
    named = {}
    for node in order:
        if node.op in ("input", "param") and node.name is not None:
            prev = named.setdefault(node.name, node)
            if prev is not node:
                raise GraphError(f"duplicate leaf name {node.name!r}")
    for node in order:
        _forward_node(node, bindings)
    return root.value


def _backward_node(node):
    op = node.op
    g = node.grad
    vals = [n.value for n in node.inputs]
    if op == "add":
        return [_unbroadcast(g, vals[0].shape), _unbroadcast(g, vals[1].shape)]
    if op == "subtract":
        return [_unbroadcast(g, vals[0].shape), _unbroadcast(-g, vals[1].shape)]
    if op == "multiply":
        return [
            _unbroadcast(g * vals[1], vals[0].shape),
            _unbroadcast(g * vals[0], vals[1].shape),
        ]
    if op == "matmul":
        return [g @ vals[1].T, vals[0].T @ g]
    if op == "sigmoid":
        y = node.value
        return [g * y * (1.0 - y)]
    if op == "abs":
        return [g * np.sign(vals[0])]
    if op == "clamp":
        lo, hi = node.attrs["lo"], node.attrs["hi"]
        inside = (vals[0] > lo) & (vals[0] < hi)
        return [g * inside]
    if op == "reduce-product":
        axis = node.attrs["axis"]
        x = vals[0]
        zero = x == 0.0
        nzeros = zero.sum(axis=axis, keepdims=True)
        safe = np.where(zero, 1.0, x)
        prod_nz = np.prod(safe, axis=axis, keepdims=True)
        grad_x = np.where(nzeros == 0, prod_nz / safe, 0.0)
        grad_x = np.where((nzeros == 1) & zero, prod_nz, grad_x)
        return [np.expand_dims(g, axis) * grad_x]
    if op == "reduce-sum":
        axis = node.attrs["axis"]
        x = vals[0]
        if axis is None:
            return [np.broadcast_to(g, x.shape).copy()]
        return [np.broadcast_to(np.expand_dims(g, axis), x.shape).copy()]
    if op == "concat":
        axis = node.attrs["axis"]
        sizes = [v.shape[axis] for v in vals]
        return list(np.split(g, np.cumsum(sizes)[:-1], axis=axis))
    if op == "gather":
        out = np.zeros(vals[0].size)
        np.add.at(out, node.attrs["indices"].ravel(), g.ravel())
        return [out.reshape(vals[0].shape)]
    if op == "one-minus":
        return [-g]
    if op == "reshape":
        return [g.reshape(vals[0].shape)]
    if op == "cross-entropy":
        # gradient flows through the clip so saturated predictions still learn
        p = np.clip(vals[0], CE_CLIP, 1.0 - CE_CLIP)
        t = vals[1]
        dp = (p - t) / (p * (1.0 - p)) / p.size
        return [g * dp, np.zeros_like(t)]
    raise GraphError(f"no gradient for op-kind {op!r}")


def backward(root):
    """Gradients of a scalar root w.r.t. every param leaf, by name."""
    if root.value is None:
        raise GraphError("backward called before forward_eval")
    if np.ndim(root.value) != 0:
        raise GraphError(f"backward requires a scalar root, got shape {np.shape(root.value)}")
    order = topo_order(root)
    for node in order:
        if node.value is None:
            raise GraphError(f"backward before forward at {node!r}")
        node.grad = np.zeros_like(node.value, dtype=np.float64)
    root.grad = np.asarray(1.0)
    for node in reversed(order):
        if not node.inputs:
            continue
        if not np.any(node.grad):
            continue
        for child, g in zip(node.inputs, _backward_node(node)):
            child.grad = child.grad + g
    return {n.name: n.grad for n in order if n.op == "param"}


def params_of(root):
    """All param leaves of a graph, by name."""
    return {n.name: n for n in topo_order(root) if n.op == "param"}


def check_gradients(root, bindings=None, perturbation=1e-5):
    """Max relative error of backward() against central finite differences."""
    if perturbation <= 0:
        raise GraphError("perturbation must be positive")
    bindings = bindings or {}
    forward_eval(root, bindings)
    analytic = backward(root)
    worst = 0.0
    for name, node in params_of(root).items():
        flat = node.value.reshape(-1)
        a = analytic[name].reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + perturbation
            hi = float(forward_eval(root, bindings))
            flat[i] = orig - perturbation
            lo = float(forward_eval(root, bindings))
            flat[i] = orig
            numeric = (hi - lo) / (2.0 * perturbation)
            denom = max(abs(a[i]), abs(numeric), 1e-8)
            worst = max(worst, abs(a[i] - numeric) / denom)
    forward_eval(root, bindings)
    return worst


# ---------------------------------------------------------------------------
# ADAM


@dataclass
class AdamState:
    """Bias-corrected first/second moments per parameter name."""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_step(params, grads, state, lr):
    """One ADAM update on a dict of parameter arrays; returns the new dict."""
    if lr <= 0:
        raise GraphError("learning rate must be positive")
    state.step += 1
    t = state.step
    out = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise GraphError(f"gradient shape {g.shape} != param shape {p.shape} for {name!r}")
        m = state.m.get(name, np.zeros_like(p))
        v = state.v.get(name, np.zeros_like(p))
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        state.m[name] = m
        state.v[name] = v
        m_hat = m / (1.0 - state.beta1**t)
        v_hat = v / (1.0 - state.beta2**t)
        out[name] = p - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return out


class Adam:
    """Convenience wrapper updating the param leaves of a graph in place."""

    def __init__(self, root, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.root = root
        self.lr = lr
        self.state = AdamState(beta1=beta1, beta2=beta2, eps=eps)
        self._params = params_of(root)

    def step(self, grads):
        values = {k: n.value for k, n in self._params.items()}
        new = adam_step(values, grads, self.state, self.lr)
        for k, n in self._params.items():
            n.value = new[k]
