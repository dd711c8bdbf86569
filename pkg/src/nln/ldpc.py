"""LDPC decoding over the binary erasure channel with logic networks.

The message-passing state of each variable node is a one-hot vector over
{zero, one, erased}.  A check node can recover an erased neighbour exactly
when it is the only erased one, and the recovered value is the XOR of the
other neighbours -- both Boolean functions, so one decoding iteration is
expressible with conjunction/disjunction/XOR neurons.  `HandWiredDecoder`
realizes this with crisp weights (it matches the classical peeling decoder
symbol for symbol); `NlnDecoder` learns the same update functions from data,
and `MlpDecoder` is the perceptron baseline with the same wiring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from . import autodiff as ad
from . import layers as ll
from .mlp import Mlp

ERASED = 2


@dataclass(frozen=True)
class LdpcCode:
    """Regular (dv, dc) parity-check code given by its check-to-variable lists."""

    n: int
    dv: int
    dc: int
    check_vars: np.ndarray  # (m, dc) variable indices per check
    var_checks: np.ndarray  # (n, dv) check indices per variable

    @property
    def m(self):
        return self.check_vars.shape[0]

    def h_matrix(self):
        h = np.zeros((self.m, self.n), dtype=np.int8)
        for c, row in enumerate(self.check_vars):
            h[c, row] = 1
        return h


def gen_regular_code(n=48, dv=3, dc=6, seed=0):
    """Random regular code via socket permutation, resampled until simple."""
    if (n * dv) % dc:
        raise ValueError("n * dv must be divisible by dc")
    m = n * dv // dc
    rng = np.random.default_rng(seed)
    var_sockets = np.repeat(np.arange(n), dv)
    for _ in range(1000):
        edges = rng.permutation(var_sockets).reshape(m, dc)
        if all(len(set(row)) == dc for row in edges):
            break
    else:
        raise RuntimeError("could not sample a simple regular graph")
    check_vars = np.sort(edges, axis=1)
    var_checks = np.empty((n, dv), dtype=np.intp)
    for v in range(n):
        var_checks[v] = np.flatnonzero((check_vars == v).any(axis=1))[:dv]
    return LdpcCode(n, dv, dc, check_vars.astype(np.intp), var_checks)


def nullspace_basis(h):
    """GF(2) nullspace of the parity-check matrix, rows are basis codewords."""
    h = np.array(h, dtype=np.int8) % 2
    m, n = h.shape
    pivots = []
    row = 0
    for col in range(n):
        sel = np.flatnonzero(h[row:, col]) + row
        if sel.size == 0:
            continue
        if sel[0] != row:
            h[[row, sel[0]]] = h[[sel[0], row]]
        for r in range(m):
            if r != row and h[r, col]:
                h[r] ^= h[row]
        pivots.append(col)
        row += 1
        if row == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            if h[r, fc]:
                basis[i, pc] = 1
    return basis


def sample_codewords(code, batch, rng):
    basis = nullspace_basis(code.h_matrix())
    coeff = rng.integers(0, 2, size=(batch, basis.shape[0]), dtype=np.int8)
    return (coeff @ basis) % 2


def erase(bits, eps, rng):
    """Channel output symbols in {0, 1, ERASED}."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    out = np.array(bits, dtype=np.int8)
    out[rng.uniform(size=out.shape) < eps] = ERASED
    return out


def symbols_to_onehot(symbols):
    """(batch, n) symbols -> three (batch, n) indicator planes is0, is1, isE."""
    s = np.asarray(symbols)
    return (s == 0).astype(float), (s == 1).astype(float), (s == ERASED).astype(float)


def onehot_to_symbols(is0, is1, is_e):
    """Inverse of symbols_to_onehot for crisp planes."""
    return np.where(is_e > 0.5, ERASED, (is1 > 0.5).astype(np.int8)).astype(np.int8)


def peel_decode(code, symbols, max_iters=None):
    """Classical BEC peeling: repeatedly solve checks with one erased neighbour."""
    s = np.array(symbols, dtype=np.int8)
    if s.ndim == 1:
        return peel_decode(code, s[None])[0]
    max_iters = max_iters or code.n
    for _ in range(max_iters):
        neigh = s[:, code.check_vars]  # (batch, m, dc)
        erased = neigh == ERASED
        n_erased = erased.sum(axis=2)
        solvable = n_erased == 1  # (batch, m)
        if not solvable.any():
            break
        parity = np.where(neigh == 1, 1, 0).sum(axis=2) % 2  # garbage where >1 erased
        progressed = False
        for b, c in zip(*np.nonzero(solvable)):
            pos = np.flatnonzero(erased[b, c])[0]
            v = code.check_vars[c, pos]
            if s[b, v] == ERASED:
                s[b, v] = parity[b, c]
                progressed = True
        if not progressed:
            break
    return s


# ---------------------------------------------------------------------------
# Selection matrices shared by all three decoders


def _selection(src_cols, mapping):
    """0/1 matrix S with S[src, dst] = 1 for each (dst, src) in mapping."""
    sel = np.zeros((src_cols, len(mapping)))
    for dst, src in enumerate(mapping):
        sel[src, dst] = 1.0
    return sel


@dataclass
class _Wiring:
    """Precomputed selection matrices for one code."""

    check_in: np.ndarray  # (2n, m*dc*2(dc-1)) neighbour features per (check, pos)
    xor_in: np.ndarray  # (n, m*dc) is1 of each check's neighbours
    check_is1: np.ndarray  # (n, m*dc*dc) full neighbour is1 row per (check, pos)
    var_in: np.ndarray  # assembled variable features, see build()
    n_check_feat: int
    n_var_feat: int


def build_wiring(code):
    n, m, dc, dv = code.n, code.m, code.dc, code.dv
    # per (check, pos): unerased and isE of the other dc-1 neighbours, drawn
    # from the concatenated source [unerased | isE] of width 2n
    mapping = []
    for c in range(m):
        for j in range(dc):
            others = [code.check_vars[c, k] for k in range(dc) if k != j]
            mapping.extend(others)  # unerased block
            mapping.extend(n + v for v in others)  # isE block
    check_in = _selection(2 * n, mapping)

    xor_in = _selection(n, [v for c in range(m) for v in code.check_vars[c]])
    check_is1 = _selection(
        n, [v for c in range(m) for _ in range(dc) for v in code.check_vars[c]]
    )

    # per variable: [is0, is1, isE, flag_1..dv, val_1..dv, not-val, not-flag]
    # source layout: [is0 (n) | is1 (n) | isE (n) | flags (m*dc) | vals (m) |
    #                 nvals (m) | nflags (m*dc)]
    def flag_col(v, i):
        c = code.var_checks[v, i]
        pos = int(np.flatnonzero(code.check_vars[c] == v)[0])
        return 3 * n + c * dc + pos

    src_width = 3 * n + m * dc + 2 * m + m * dc
    mapping = []
    for v in range(n):
        row = [v, n + v, 2 * n + v]
        row += [flag_col(v, i) for i in range(dv)]
        row += [3 * n + m * dc + code.var_checks[v, i] for i in range(dv)]
        row += [3 * n + m * dc + m + code.var_checks[v, i] for i in range(dv)]
        row += [flag_col(v, i) + m * dc + 2 * m for i in range(dv)]
        mapping.extend(row)
    var_in = _selection(src_width, mapping)
    return _Wiring(check_in, xor_in, check_is1, var_in, 2 * (dc - 1), 3 + 4 * dv)


# ---------------------------------------------------------------------------
# Hand-wired decoder


class HandWiredDecoder:
    """Crisp NLN realization of one peeling iteration, batched over codewords.

    flag(c, j) = AND of "unerased" over the other neighbours of check c;
    val(c) = XOR of the neighbours' is1 bits (correct whenever it is used,
    because the single erased neighbour contributes 0 to the parity);
    the variable update keeps known values, adopts val through any flagged
    check, and stays erased only if no check flags it.
    """

    def __init__(self, code):
        self.code = code
        self.wiring = build_wiring(code)
        dv, dc = code.dv, code.dc
        nf = self.wiring.n_check_feat
        # flag: single conjunction over the dc-1 "unerased" features
        self.flag_net = ll.ConjunctionLayer(
            nf, 1, ll.MembershipWeights.crisp((np.arange(nf) < dc - 1)[None, :]), name="hw_flag"
        )
        self.val_net = ll.XorNeuron(dc, name="hw_val")
        nv = self.wiring.n_var_feat
        # feature order: is0, is1, isE, flags, vals, not-vals, not-flags
        f0, v0, nv0 = 3, 3 + dv, 3 + 2 * dv
        self.is1_net = ll.wire_dnf(
            nv, [(1,)] + [(2, f0 + i, v0 + i) for i in range(dv)], name="hw_is1"
        )
        self.is0_net = ll.wire_dnf(
            nv, [(0,)] + [(2, f0 + i, nv0 + i) for i in range(dv)], name="hw_is0"
        )
        mask = np.zeros(nv, dtype=bool)
        mask[2] = True
        mask[3 + 3 * dv :] = True  # isE and all not-flag features
        self.ise_net = ll.ConjunctionLayer(
            nv, 1, ll.MembershipWeights.crisp(mask[None, :]), name="hw_ise"
        )

    def step_np(self, is0, is1, is_e):
        code, w = self.code, self.wiring
        b = is0.shape[0]
        check_feat = np.concatenate([1.0 - is_e, is_e], axis=1) @ w.check_in
        flags = self.flag_net.forward_np(check_feat.reshape(-1, w.n_check_feat))
        flags = flags.reshape(b, code.m * code.dc)
        vals = self.val_net.forward_np((is1 @ w.xor_in).reshape(-1, code.dc)).reshape(b, code.m)
        src = np.concatenate([is0, is1, is_e, flags, vals, 1.0 - vals, 1.0 - flags], axis=1)
        var_feat = (src @ w.var_in).reshape(-1, w.n_var_feat)
        new_is1 = self.is1_net.forward_np(var_feat).reshape(b, code.n)
        new_is0 = self.is0_net.forward_np(var_feat).reshape(b, code.n)
        new_ise = self.ise_net.forward_np(var_feat)[:, 0].reshape(b, code.n)
        return new_is0, new_is1, new_ise

    def decode(self, symbols, iters=None):
        state = symbols_to_onehot(np.atleast_2d(symbols))
        prev = onehot_to_symbols(*state)
        for _ in range(iters or self.code.n):
            state = self.step_np(*state)
            cur = onehot_to_symbols(*state)
            if np.array_equal(cur, prev):  # crisp fixpoint reached
                break
            prev = cur
        return prev


# ---------------------------------------------------------------------------
# Trainable decoders


class NlnDecoder:
    """Same wiring as HandWiredDecoder with trainable logic networks."""

    def __init__(self, code, seed=0, hidden=8, t_train=3):
        self.code = code
        self.wiring = build_wiring(code)
        self.t_train = t_train
        dv, dc = code.dv, code.dc
        rng = np.random.default_rng(seed)
        nf, nv = self.wiring.n_check_feat, self.wiring.n_var_feat

        def dnf(name, n_in, on):
            net = ll.DnfNetwork(n_in, hidden, name=f"{name}_s{seed}")
            net.first.weights = ll.init_membership(hidden, n_in, on, int(rng.integers(2**31)))
            net.second.weights = ll.init_membership(1, hidden, 2, int(rng.integers(2**31)), m_hi=0.5)
            return net

        self.flag_net = dnf("ldpc_flag", nf, 3)
        w0 = ll._raw_from_membership(rng.uniform(0.45, 0.95, dc), ll.DEFAULT_SCALE)
        self.val_net = ll.XorNeuron(dc, ll.MembershipWeights(w0), name=f"ldpc_val_s{seed}")
        self.is1_net = dnf("ldpc_is1", nv, 2)
        self.is0_net = dnf("ldpc_is0", nv, 2)
        self.ise_net = dnf("ldpc_ise", nv, 2)

    def nets(self):
        return [self.flag_net, self.val_net, self.is1_net, self.is0_net, self.ise_net]

    def param_nodes(self):
        return [p for net in self.nets() for p in net.param_nodes()]

    # numpy evaluation, identical shape plumbing to the hand-wired decoder
    def step_np(self, is0, is1, is_e):
        code, w = self.code, self.wiring
        b = is0.shape[0]
        check_feat = np.concatenate([1.0 - is_e, is_e], axis=1) @ w.check_in
        flags = self.flag_net.forward_np(check_feat.reshape(-1, w.n_check_feat))
        flags = flags.reshape(b, code.m * code.dc)
        vals = self.val_net.forward_np((is1 @ w.xor_in).reshape(-1, code.dc)).reshape(b, code.m)
        src = np.concatenate([is0, is1, is_e, flags, vals, 1.0 - vals, 1.0 - flags], axis=1)
        var_feat = (src @ w.var_in).reshape(-1, w.n_var_feat)
        new_is1 = self.is1_net.forward_np(var_feat).reshape(b, code.n)
        new_is0 = self.is0_net.forward_np(var_feat).reshape(b, code.n)
        new_ise = self.ise_net.forward_np(var_feat).reshape(b, code.n)
        return new_is0, new_is1, new_ise

    def build_step(self, is0, is1, is_e, batch):
        code, w = self.code, self.wiring
        unerased = ad.one_minus(is_e)
        check_feat = ad.matmul(ad.concat([unerased, is_e], axis=1), ad.constant(w.check_in))
        flags = self.flag_net.build(ad.reshape(check_feat, (-1, w.n_check_feat)))
        flags = ad.reshape(flags, (batch, code.m * code.dc))
        vals = self.val_net.build(ad.reshape(ad.matmul(is1, ad.constant(w.xor_in)), (-1, code.dc)))
        vals = ad.reshape(vals, (batch, code.m))
        src = ad.concat(
            [is0, is1, is_e, flags, vals, ad.one_minus(vals), ad.one_minus(flags)], axis=1
        )
        var_feat = ad.reshape(ad.matmul(src, ad.constant(w.var_in)), (-1, w.n_var_feat))
        new_is1 = ad.reshape(self.is1_net.build(var_feat), (batch, code.n))
        new_is0 = ad.reshape(self.is0_net.build(var_feat), (batch, code.n))
        new_ise = ad.reshape(self.ise_net.build(var_feat), (batch, code.n))
        return new_is0, new_is1, new_ise

    def build_loss(self, batch):
        is0 = ad.placeholder("is0")
        is1 = ad.placeholder("is1")
        is_e = ad.placeholder("ise")
        bits = ad.placeholder("bits")
        state = (is0, is1, is_e)
        for _ in range(self.t_train):
            state = self.build_step(*state, batch)
        # implied bit probabilities: resolved mass plus half of any residual
        # erasure mass, so "still erased" scores log 2 instead of a clipped
        # log 0 and resolving an erasure correctly always lowers the loss;
        # scoring both planes keeps the zero side trained as well
        half_e = ad.multiply(ad.constant(np.array(0.5)), state[2])
        p1 = ad.add(state[1], half_e)
        p0 = ad.add(state[0], half_e)
        total = ad.add(ad.cross_entropy(p1, bits), ad.cross_entropy(p0, ad.one_minus(bits)))
        return ad.multiply(total, ad.constant(np.array(0.5)))

    def decode(self, symbols, iters):
        """Iterate the learned update with hard symbol decisions between
        rounds; committing to {0, 1, erased} keeps repeated application from
        drifting the way raw fuzzy states do."""
        s = np.array(np.atleast_2d(symbols), dtype=np.int8)
        for _ in range(iters):
            planes = self.step_np(*symbols_to_onehot(s))
            s = np.argmax(np.stack(planes), axis=0).astype(np.int8)
        return symbols_to_onehot(s)


class MlpDecoder:
    """Perceptron message passing with the same wiring and feature layout."""

    def __init__(self, code, seed=0, hidden=200, t_train=3):
        self.code = code
        self.wiring = build_wiring(code)
        self.t_train = t_train
        rng = np.random.default_rng(seed)
        nf, nv = self.wiring.n_check_feat, self.wiring.n_var_feat
        self.check_mlp = Mlp([nf + code.dc, hidden, 2], seed=int(rng.integers(2**31)),
                             name=f"ldpc_cmlp_s{seed}")
        self.var_mlp = Mlp([nv, hidden, 3], seed=int(rng.integers(2**31)),
                           name=f"ldpc_vmlp_s{seed}")

    def param_nodes(self):
        return self.check_mlp.param_nodes() + self.var_mlp.param_nodes()

    def _check_inputs_np(self, is1, is_e):
        code, w = self.code, self.wiring
        feat = np.concatenate([1.0 - is_e, is_e], axis=1) @ w.check_in
        feat = feat.reshape(-1, w.n_check_feat)
        neigh1 = (is1 @ w.check_is1).reshape(-1, code.dc)
        return np.concatenate([feat, neigh1], axis=1)

    def step_np(self, is0, is1, is_e):
        code, w = self.code, self.wiring
        b = is0.shape[0]
        msg = self.check_mlp.forward_np(self._check_inputs_np(is1, is_e))
        flags = msg[:, 0].reshape(b, code.m * code.dc)
        vals = msg[:, 1].reshape(b, code.m, code.dc).mean(axis=2)
        src = np.concatenate([is0, is1, is_e, flags, vals, 1.0 - vals, 1.0 - flags], axis=1)
        out = self.var_mlp.forward_np((src @ w.var_in).reshape(-1, w.n_var_feat))
        return (
            out[:, 0].reshape(b, code.n),
            out[:, 1].reshape(b, code.n),
            out[:, 2].reshape(b, code.n),
        )

    def build_step(self, is0, is1, is_e, batch):
        code, w = self.code, self.wiring
        unerased = ad.one_minus(is_e)
        feat = ad.matmul(ad.concat([unerased, is_e], axis=1), ad.constant(w.check_in))
        feat = ad.reshape(feat, (-1, w.n_check_feat))
        neigh1 = ad.matmul(is1, ad.constant(w.check_is1))
        neigh1 = ad.reshape(neigh1, (-1, code.dc))
        msg = self.check_mlp.build(ad.concat([feat, neigh1], axis=1))
        flag_sel = np.zeros((2, 1))
        flag_sel[0, 0] = 1.0
        val_sel = np.zeros((2, 1))
        val_sel[1, 0] = 1.0
        flags = ad.reshape(ad.matmul(msg, ad.constant(flag_sel)), (batch, code.m * code.dc))
        vals_full = ad.reshape(ad.matmul(msg, ad.constant(val_sel)), (batch, code.m, code.dc))
        avg = ad.constant(np.full((code.dc, 1), 1.0 / code.dc))
        vals = ad.reshape(
            ad.matmul(ad.reshape(vals_full, (batch * code.m, code.dc)), avg), (batch, code.m)
        )
        src = ad.concat(
            [is0, is1, is_e, flags, vals, ad.one_minus(vals), ad.one_minus(flags)], axis=1
        )
        var_feat = ad.reshape(ad.matmul(src, ad.constant(w.var_in)), (-1, w.n_var_feat))
        out = self.var_mlp.build(var_feat)
        cols = [np.zeros((3, 1)) for _ in range(3)]
        for i in range(3):
            cols[i][i, 0] = 1.0
        return tuple(
            ad.reshape(ad.matmul(out, ad.constant(cols[i])), (batch, code.n)) for i in (0, 1, 2)
        )

    def build_loss(self, batch):
        is0 = ad.placeholder("is0")
        is1 = ad.placeholder("is1")
        is_e = ad.placeholder("ise")
        bits = ad.placeholder("bits")
        state = (is0, is1, is_e)
        for _ in range(self.t_train):
            state = self.build_step(*state, batch)
        # same erasure-mass handling as the logic decoder
        half_e = ad.multiply(ad.constant(np.array(0.5)), state[2])
        p1 = ad.add(state[1], half_e)
        p0 = ad.add(state[0], half_e)
        total = ad.add(ad.cross_entropy(p1, bits), ad.cross_entropy(p0, ad.one_minus(bits)))
        return ad.multiply(total, ad.constant(np.array(0.5)))

    def decode(self, symbols, iters):
        state = symbols_to_onehot(np.atleast_2d(symbols))
        for _ in range(iters):
            state = self.step_np(*state)
        return state


# ---------------------------------------------------------------------------
# Training and evaluation


@dataclass
class LdpcTrainConfig:
    model: str = "nln"  # nln | mlp
    seed: int = 0
    eps: float = 0.3
    batch: int = 50
    steps: int = 1500
    lr: float = 0.01
    t_train: int = 3
    hidden: int = 8
    mlp_hidden: int = 200
    timing: bool = True

    def to_dict(self):
        return asdict(self)


def train_decoder(code, cfg):
    """Train a decoder on random erased codewords; returns (decoder, losses)."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.model == "nln":
        dec = NlnDecoder(code, seed=cfg.seed, hidden=cfg.hidden, t_train=cfg.t_train)
    elif cfg.model == "mlp":
        dec = MlpDecoder(code, seed=cfg.seed, hidden=cfg.mlp_hidden, t_train=cfg.t_train)
    else:
        raise ValueError(f"unknown model {cfg.model!r}")
    loss_node = dec.build_loss(cfg.batch)
    opt = ad.Adam(loss_node, lr=cfg.lr)
    basis = nullspace_basis(code.h_matrix())
    losses = []
    for step in range(1, cfg.steps + 1):
        coeff = rng.integers(0, 2, size=(cfg.batch, basis.shape[0]), dtype=np.int8)
        bits = (coeff @ basis) % 2
        is0, is1, is_e = symbols_to_onehot(erase(bits, cfg.eps, rng))
        bindings = {"is0": is0, "is1": is1, "ise": is_e, "bits": bits.astype(float)}
        loss = float(ad.forward_eval(loss_node, bindings))
        grads = ad.backward(loss_node)
        opt.step(grads)
        if step % 50 == 0 or step == cfg.steps:
            losses.append([step, float(np.round(loss, 6))])
    return dec, losses


def eval_ber(code, decoder, eps, iters, n_samples, seed=0, chunk=500):
    """Bit error rate with the decision rule bit_hat = [is1 > is0].

    An unresolved erasure decodes to 0, so it counts as an error half the time.
    """
    rng = np.random.default_rng(seed)
    errors = 0
    total = 0
    basis = nullspace_basis(code.h_matrix())
    remaining = n_samples
    while remaining > 0:
        b = min(chunk, remaining)
        remaining -= b
        coeff = rng.integers(0, 2, size=(b, basis.shape[0]), dtype=np.int8)
        bits = (coeff @ basis) % 2
        received = erase(bits, eps, rng)
        out = decoder.decode(received, iters)
        if isinstance(out, tuple):
            is0, is1, _ = out
            est = (is1 > is0).astype(np.int8)
        else:  # decoders that return symbols directly; erased decodes to 0
            est = (out == 1).astype(np.int8)
        errors += int((est != bits).sum())
        total += b * code.n
    return errors / total


@dataclass
class BerReport:
    model: str
    seed: int
    config: dict
    eps: float
    points: list  # [iters, ber] pairs
    losses: list = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    def to_csv(self):
        lines = ["iters,ber"]
        lines += [f"{it},{ber}" for it, ber in self.points]
        return "\n".join(lines) + "\n"
