"""Differentiable Boolean neurons: conjunction, disjunction, DNF/CNF, XOR.

Every neuron carries one membership weight per input, m_i = sigmoid(c * w_i),
gating whether that input takes part in the operation.  With crisp memberships
(raw weights saturated to +-W_CRISP) the layers compute exact Boolean
functions, which is what makes symbolic extraction possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad

DEFAULT_SCALE = 5.0
M_HI = 0.9
M_LO = 1e-3
# sigmoid(+-W_CRISP * c) saturates to exactly 1.0 / 0.0 in float64
W_CRISP = 40.0
PRUNE_EPS = 1e-6
EXTRACT_THRESHOLD = 0.5


def fuzzy_eval(kind, a, b=None):
    """Product/coproduct fuzzy algebra on scalars in [0, 1]."""
    for v in (a,) if b is None else (a, b):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"operand {v} outside [0, 1]")
    if kind == "not":
        if b is not None:
            raise ValueError("not is unary")
        return 1.0 - a
    if b is None:
        raise ValueError(f"{kind} is binary")
    if kind == "and":
        return a * b
    if kind == "or":
        return 1.0 - (1.0 - a) * (1.0 - b)
    raise ValueError(f"unknown kind {kind!r}")


def _sigmoid(z):
    with np.errstate(over="ignore"):  # exp overflow saturates exactly
        return 1.0 / (1.0 + np.exp(-z))


def _raw_from_membership(m, c):
    m = np.clip(m, 1e-12, 1.0 - 1e-12)
    return np.log(m / (1.0 - m)) / c


@dataclass
class MembershipWeights:
    """Raw trainable weights; memberships are sigmoid(c * w)."""

    w: np.ndarray
    c: float = DEFAULT_SCALE

    def memberships(self):
        return _sigmoid(self.c * self.w)

    @classmethod
    def from_memberships(cls, m, c=DEFAULT_SCALE):
        return cls(_raw_from_membership(np.asarray(m, dtype=float), c), c)

    @classmethod
    def crisp(cls, include, c=DEFAULT_SCALE):
        """Exact 0/1 memberships from a boolean inclusion mask."""
        inc = np.asarray(include, dtype=bool)
        return cls(np.where(inc, W_CRISP, -W_CRISP).astype(float), c)


def init_membership(neuron_count, n, on_count, seed, m_hi=M_HI, m_lo=M_LO, c=DEFAULT_SCALE):
    """Per neuron, a random on_count-subset of inputs near m_hi, rest near m_lo."""
    if not 0 <= on_count <= n:
        raise ValueError(f"on_count {on_count} outside [0, {n}]")
    rng = np.random.default_rng(seed)
    m = np.full((neuron_count, n), m_lo)
    for j in range(neuron_count):
        on = rng.choice(n, size=on_count, replace=False)
        m[j, on] = m_hi
    w = _raw_from_membership(m, c)
    # tiny jitter breaks ties between identically initialized neurons
    w = w + rng.normal(scale=0.01, size=w.shape)
    return MembershipWeights(w, c)


def init_membership_gaussian(neuron_count, n, seed, mean=0.0, std=1.0, c=DEFAULT_SCALE):
    """Zero-mean (or negative-mean, for wide inputs) normal initialization."""
    rng = np.random.default_rng(seed)
    return MembershipWeights(rng.normal(mean, std, size=(neuron_count, n)), c)


def sharpen(weights, factor):
    """Scale raw weights by factor > 1, pushing memberships toward {0, 1}."""
    if factor <= 1.0:
        raise ValueError("sharpening factor must exceed 1")
    weights.w = weights.w * factor
    return weights


# ---------------------------------------------------------------------------
# Layers


class _Layer:
    """Shared plumbing: a membership param node plus a crisp numpy fast path."""

    _n_instances = 0

    def __init__(self, n_in, units, weights=None, c=DEFAULT_SCALE, name=None):
        if weights is None:
            weights = init_membership(units, n_in, on_count=0, seed=0, c=c)
        if weights.w.shape != (units, n_in):
            raise ValueError(f"weight shape {weights.w.shape} != ({units}, {n_in})")
        self.n_in = n_in
        self.units = units
        self.c = weights.c
        if name is None:
            name = f"{type(self).__name__.lower()}_{_Layer._n_instances}"
            _Layer._n_instances += 1
        self.name = name
        self.w = ad.param(f"{name}/w", weights.w)

    @property
    def weights(self):
        return MembershipWeights(self.w.value, self.c)

    @weights.setter
    def weights(self, mw):
        self.w.value = np.asarray(mw.w, dtype=float)

    def memberships(self):
        return _sigmoid(self.c * self.w.value)

    def _m_node(self):
        return ad.sigmoid(ad.multiply(self.w, ad.constant(self.c)))

    def _check_len(self, x_cols):
        if x_cols != self.n_in:
            raise ValueError(f"input length {x_cols} != layer width {self.n_in}")


class ConjunctionLayer(_Layer):
    """O_j(x) = prod_i (1 - m_ji (1 - x_i))."""

    def build(self, x):
        # x: (batch, n) -> (batch, 1, n) so memberships (units, n) broadcast
        m = self._m_node()
        x3 = ad.reshape(x, (-1, 1, self.n_in))
        term = ad.one_minus(ad.multiply(m, ad.one_minus(x3)))
        return ad.reduce_prod(term, axis=-1)

    def forward_np(self, x):
        x = np.asarray(x, dtype=float)
        self._check_len(x.shape[-1])
        m = self.memberships()
        return np.prod(1.0 - m * (1.0 - x[..., None, :]), axis=-1)


class DisjunctionLayer(_Layer):
    """O_j(x) = 1 - prod_i (1 - m_ji x_i)."""

    def build(self, x):
        m = self._m_node()
        x3 = ad.reshape(x, (-1, 1, self.n_in))
        term = ad.one_minus(ad.multiply(m, x3))
        return ad.one_minus(ad.reduce_prod(term, axis=-1))

    def forward_np(self, x):
        x = np.asarray(x, dtype=float)
        self._check_len(x.shape[-1])
        m = self.memberships()
        return 1.0 - np.prod(1.0 - m * x[..., None, :], axis=-1)


class DnfNetwork:
    """Disjunction of `hidden` conjunctions; scalar output per example."""

    form = "dnf"

    def __init__(self, n_in, hidden, conj_weights=None, disj_weights=None, c=DEFAULT_SCALE, name=None):
        self.n_in = n_in
        self.hidden = hidden
        prefix = name or f"dnf_{_Layer._n_instances}"
        _Layer._n_instances += 1
        self.first = ConjunctionLayer(n_in, hidden, conj_weights, c, name=f"{prefix}/conj")
        self.second = DisjunctionLayer(hidden, 1, disj_weights, c, name=f"{prefix}/disj")

    def build(self, x):
        h = self.first.build(x)
        out = self.second.build(h)
        return ad.reshape(out, (-1,))

    def forward_np(self, x):
        return self.second.forward_np(self.first.forward_np(x))[..., 0]

    def param_nodes(self):
        return [self.first.w, self.second.w]


class CnfNetwork:
    """Conjunction of `hidden` disjunctions; scalar output per example."""

    form = "cnf"

    def __init__(self, n_in, hidden, disj_weights=None, conj_weights=None, c=DEFAULT_SCALE, name=None):
        self.n_in = n_in
        self.hidden = hidden
        prefix = name or f"cnf_{_Layer._n_instances}"
        _Layer._n_instances += 1
        self.first = DisjunctionLayer(n_in, hidden, disj_weights, c, name=f"{prefix}/disj")
        self.second = ConjunctionLayer(hidden, 1, conj_weights, c, name=f"{prefix}/conj")

    def build(self, x):
        h = self.first.build(x)
        out = self.second.build(h)
        return ad.reshape(out, (-1,))

    def forward_np(self, x):
        return self.second.forward_np(self.first.forward_np(x))[..., 0]

    def param_nodes(self):
        return [self.first.w, self.second.w]


def conj_forward(x, weights):
    """One-shot numpy evaluation of a conjunction layer."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    layer = ConjunctionLayer(weights.w.shape[1], weights.w.shape[0], weights)
    return layer.forward_np(x)


def disj_forward(x, weights):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    layer = DisjunctionLayer(weights.w.shape[1], weights.w.shape[0], weights)
    return layer.forward_np(x)


# ---------------------------------------------------------------------------
# XOR


def xor_sign_matrix(n):
    """Sliding-window sign pattern: k = n/2 rows over n columns.

    Row i (1-based) negates positions k+2-i .. n+1-i; position 1 is always
    positive and consecutive rows differ in exactly two positions.
    """
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    k = n // 2
    m = np.ones((k, n), dtype=float)
    for i in range(1, k + 1):
        lo = k + 2 - i  # 1-based, inclusive
        hi = n + 1 - i
        m[i - 1, lo - 1 : hi] = -1.0
    return m


class XorNeuron:
    """O(x) = prod_i hs(|x . (M_i * m)^T|); odd input lengths are zero-padded."""

    form = "xor"

    def __init__(self, n_in, weights=None, c=DEFAULT_SCALE, name=None):
        if n_in < 1:
            raise ValueError("n_in must be positive")
        self.n_in = n_in
        self.n_pad = n_in + (n_in % 2)
        self.k = self.n_pad // 2
        if weights is None:
            weights = MembershipWeights.crisp(np.ones(self.n_pad, dtype=bool), c)
        w = np.asarray(weights.w, dtype=float).reshape(-1)
        if w.size == n_in and n_in != self.n_pad:
            w = np.concatenate([w, [0.0]])
        if w.size != self.n_pad:
            raise ValueError(f"weight length {w.size} != padded length {self.n_pad}")
        self.c = weights.c
        if name is None:
            name = f"xor_{_Layer._n_instances}"
            _Layer._n_instances += 1
        self.name = name
        self.w = ad.param(f"{name}/w", w)
        # a zero-padded input never contributes, so only the first n_in columns
        # of the sign matrix are ever consulted
        self.sign = xor_sign_matrix(self.n_pad)
        self._signT = self.sign[:, : self.n_in].T.copy()  # (n_in, k)

    @property
    def weights(self):
        return MembershipWeights(self.w.value, self.c)

    def memberships(self):
        return _sigmoid(self.c * self.w.value)

    def build(self, x):
        m = ad.sigmoid(ad.multiply(self.w, ad.constant(self.c)))
        m_used = ad.gather(m, np.arange(self.n_in).reshape(-1, 1))
        smT = ad.multiply(ad.constant(self._signT), m_used)  # (n_in, k)
        f = ad.matmul(x, smT)  # (batch, k)
        g = ad.clamp(ad.absolute(f), 0.0, 1.0)
        return ad.reduce_prod(g, axis=-1)

    def forward_np(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_in:
            raise ValueError(f"input length {x.shape[-1]} != {self.n_in}")
        m = self.memberships()[: self.n_in]
        f = x @ (self._signT * m[:, None])
        return np.prod(np.clip(np.abs(f), 0.0, 1.0), axis=-1)

    def param_nodes(self):
        return [self.w]


def xor_forward(x, weights=None, c=DEFAULT_SCALE):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    neuron = XorNeuron(x.shape[-1], weights, c)
    return neuron.forward_np(x)


# ---------------------------------------------------------------------------
# Symbolic extraction and pruning


@dataclass
class ExtractedFormula:
    """Clauses as tuples of included input indices, plus a form tag.

    `constant` is set when the formula degenerates: an empty DNF is constant
    false unless some clause had no literals, in which case it is constant true.
    """

    form: str
    clauses: list
    constant: bool | None = None

    def eval_dnf(self, x):
        """Crisp DNF evaluation of the extracted clauses on binary rows."""
        x = np.atleast_2d(np.asarray(x))
        if self.constant is not None:
            return np.full(x.shape[0], float(self.constant))
        out = np.zeros(x.shape[0])
        for clause in self.clauses:
            out = np.maximum(out, np.all(x[:, list(clause)] > 0.5, axis=1).astype(float))
        return out


def extract_formula(net, threshold=EXTRACT_THRESHOLD):
    """Read the learned Boolean function out of near-binary memberships."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    if isinstance(net, XorNeuron):
        included = tuple(np.flatnonzero(net.memberships()[: net.n_in] > threshold))
        return ExtractedFormula("xor", [included])
    first_m = net.first.memberships() > threshold
    gate_m = net.second.memberships()[0] > threshold
    clauses = []
    saw_empty = False
    for j in range(net.hidden):
        if not gate_m[j]:
            continue
        lits = tuple(np.flatnonzero(first_m[j]))
        if not lits:
            saw_empty = True
            continue
        if lits not in clauses:
            clauses.append(lits)
    if net.form == "dnf":
        if saw_empty:
            # a memberless conjunction is constant 1, making the whole DNF true
            return ExtractedFormula("dnf", [], constant=True)
        if not clauses:
            return ExtractedFormula("dnf", [], constant=False)
        return ExtractedFormula("dnf", clauses)
    # CNF dual: an empty disjunction is constant 0, forcing the formula false
    if saw_empty:
        return ExtractedFormula("cnf", [], constant=False)
    if not clauses:
        return ExtractedFormula("cnf", [], constant=True)
    return ExtractedFormula("cnf", clauses)


def wire_dnf(n_in, clauses, c=DEFAULT_SCALE, name=None):
    """Hand-wire a crisp DNF network computing exactly the given clauses."""
    hidden = max(len(clauses), 1)
    conj_inc = np.zeros((hidden, n_in), dtype=bool)
    gate_inc = np.zeros((1, hidden), dtype=bool)
    for j, clause in enumerate(clauses):
        conj_inc[j, list(clause)] = True
        gate_inc[0, j] = True
    return DnfNetwork(
        n_in,
        hidden,
        conj_weights=MembershipWeights.crisp(conj_inc, c),
        disj_weights=MembershipWeights.crisp(gate_inc, c),
        c=c,
        name=name,
    )


def prune_formula(net, loss_fn, eps=PRUNE_EPS, repeat=False):
    """Greedy satisfiability-check pruning on a converged network.

    Each included membership is temporarily forced to 0 (ascending layer,
    neuron, input order); the removal is kept iff the loss rises by < eps.
    """
    layers = [net.first, net.second] if hasattr(net, "first") else [net]
    base = loss_fn()
    while True:
        removed = 0
        for layer in layers:
            w = layer.w.value
            for j in range(w.shape[0]) if w.ndim == 2 else [None]:
                row = w[j] if j is not None else w
                for i in range(row.shape[-1]):
                    if _sigmoid(layer.c * row[i]) <= EXTRACT_THRESHOLD:
                        continue
                    old = row[i]
                    row[i] = -W_CRISP
                    new_loss = loss_fn()
                    if new_loss - base < eps:
                        base = new_loss
                        removed += 1
                    else:
                        row[i] = old
        if not repeat or removed == 0:
            return net
