"""Synthetic Boolean-function learning benchmarks.

Two tasks: learning randomly generated DNF targets under biased Bernoulli
inputs, and learning parity with a single XOR neuron; each has an MLP baseline
trained through the same harness.  Logic networks receive the input together
with its complement so negated literals are expressible; extraction maps
indices >= n back to negated inputs.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import autodiff as ad
from . import layers as ll
from .mlp import Mlp


@dataclass(frozen=True)
class RandomDnfTarget:
    """Ground-truth DNF: clauses of (input index, polarity) literals."""

    n: int
    clauses: tuple

    def __post_init__(self):
        if not self.clauses:
            raise ValueError("target needs at least one clause")
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            idxs = [i for i, _ in clause]
            if len(set(idxs)) != len(idxs):
                raise ValueError("clause contains both polarities of an index")

    def eval(self, x):
        x = np.atleast_2d(np.asarray(x))
        out = np.zeros(x.shape[0], dtype=float)
        for clause in self.clauses:
            hit = np.ones(x.shape[0], dtype=bool)
            for i, positive in clause:
                hit &= (x[:, i] > 0.5) == positive
            out = np.maximum(out, hit.astype(float))
        return out


def gen_random_dnf(n, clause_count, max_clause_size, seed):
    if not 1 <= max_clause_size <= n:
        raise ValueError("max_clause_size must lie in [1, n]")
    if clause_count < 1:
        raise ValueError("clause_count must be positive")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(clause_count):
        size = int(rng.integers(1, max_clause_size + 1))
        idxs = rng.choice(n, size=size, replace=False)
        clauses.append(tuple((int(i), bool(rng.integers(2))) for i in sorted(idxs)))
    return RandomDnfTarget(n, tuple(clauses))


def sample_batch(n, p, batch, rng):
    """Independent Bernoulli(p) bits, shape (batch, n)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    return (rng.uniform(size=(batch, n)) < p).astype(float)


def with_complements(x):
    return np.concatenate([x, 1.0 - x], axis=1)


def all_binary(n):
    return np.array(list(itertools.product([0.0, 1.0], repeat=n)))


def eval_error_count(predict, xs, labels):
    """Thresholded-prediction mismatches against the labels."""
    if len(xs) == 0:
        raise ValueError("empty test set")
    pred = (np.asarray(predict(xs)).reshape(-1) > 0.5).astype(float)
    return int(np.sum(pred != np.asarray(labels).reshape(-1)))


@dataclass
class BenchConfig:
    model: str = "nln-dnf"
    n: int = 10
    seed: int = 0
    lr: float = 0.001
    steps: int = 2000
    batch: int = 50
    p: float = 0.75
    hidden: int = 200
    target_clauses: int = 4
    target_max_clause: int = 3
    eval_every: int = 25
    mlp_hidden: int = 1000
    scale: float = 12.0  # membership sharpness c
    conj_on: int = 1  # memberships near 1 per conjunction unit at init
    gate_on: int = 0  # gate memberships near gate_hi at init; 0 = all of them
    gate_hi: float = 0.25
    timing: bool = True

    def to_dict(self):
        return asdict(self)


@dataclass
class BenchReport:
    name: str
    seed: int
    config: dict
    steps: int
    losses: list
    test_errors: list
    converged: bool
    seconds: float

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    def table(self):
        lines = [f"{self.name} (seed {self.seed})"]
        lines.append(f"{'step':>8} {'loss':>12} {'test errors':>12}")
        for (s, l), (_, e) in zip(self.losses, self.test_errors):
            lines.append(f"{s:>8} {l:>12.6f} {e:>12}")
        lines.append(f"converged: {self.converged}  seconds: {self.seconds}")
        return "\n".join(lines)


@dataclass
class BenchResult:
    report: BenchReport
    model: object
    target: object = None
    predict: object = None


# how many consecutive zero-error evaluations count as converged
CONVERGE_STREAK = 5
TEST_SET_SIZE = 10000
EXHAUSTIVE_LIMIT = 12


def _round6(x):
    return float(np.round(float(x), 6))


def _train(model_build, predict, sampler, xs_test, y_test, cfg, rng, name):
    """Shared streaming-batch training loop; returns a BenchReport."""
    t0 = time.perf_counter()
    x_in = ad.placeholder("x")
    y_in = ad.placeholder("y")
    out = model_build(x_in)
    if out.op != "reshape":
        out = ad.reshape(out, (-1,))
    loss_node = ad.cross_entropy(out, y_in)
    opt = ad.Adam(loss_node, lr=cfg.lr)
    losses, test_errors = [], []
    streak = 0
    converged = False
    for step in range(1, cfg.steps + 1):
        xb, yb = sampler(rng)
        loss = ad.forward_eval(loss_node, {"x": xb, "y": yb})
        grads = ad.backward(loss_node)
        opt.step(grads)
        if step % cfg.eval_every == 0 or step == cfg.steps:
            err = eval_error_count(predict, xs_test, y_test)
            losses.append([step, _round6(loss)])
            test_errors.append([step, err])
            streak = streak + 1 if err == 0 else 0
            if streak >= CONVERGE_STREAK:
                converged = True
                break
    seconds = round(time.perf_counter() - t0, 3) if cfg.timing else 0.0
    report = BenchReport(
        name=name,
        seed=cfg.seed,
        config=cfg.to_dict(),
        steps=losses[-1][0] if losses else 0,
        losses=losses,
        test_errors=test_errors,
        converged=converged,
        seconds=seconds,
    )
    return report


def run_dnf_benchmark(cfg):
    """Random-DNF learning under Bernoulli(p) inputs; NLN-DNF or MLP."""
    if cfg.model not in ("nln-dnf", "mlp"):
        raise ValueError(f"unknown model {cfg.model!r}")
    rng = np.random.default_rng(cfg.seed)
    target = gen_random_dnf(cfg.n, cfg.target_clauses, cfg.target_max_clause, int(rng.integers(2**31)))
    if 2**cfg.n <= 2**EXHAUSTIVE_LIMIT:
        xs_test = all_binary(cfg.n)
    else:
        xs_test = sample_batch(cfg.n, cfg.p, TEST_SET_SIZE, rng)
    y_test = target.eval(xs_test)

    if cfg.model == "nln-dnf":
        net = ll.DnfNetwork(2 * cfg.n, cfg.hidden, c=cfg.scale, name=f"bench_dnf_s{cfg.seed}")
        net.first.weights = ll.init_membership(
            cfg.hidden, 2 * cfg.n, on_count=cfg.conj_on, seed=int(rng.integers(2**31)), c=cfg.scale
        )
        if cfg.gate_on:
            # start with most gates near zero (wide-disjunction init)
            net.second.weights = ll.init_membership(
                1, cfg.hidden, on_count=cfg.gate_on, seed=int(rng.integers(2**31)),
                m_hi=cfg.gate_hi, c=cfg.scale,
            )
        else:
            gate_seed = int(rng.integers(2**31))
            m = np.full((1, cfg.hidden), cfg.gate_hi)
            w = ll._raw_from_membership(m, cfg.scale)
            w += np.random.default_rng(gate_seed).normal(scale=0.01, size=w.shape)
            net.second.weights = ll.MembershipWeights(w, cfg.scale)
        build = lambda x: net.build(x)
        predict = lambda xs: net.forward_np(with_complements(xs))
        encode = with_complements
        model = net
    else:
        model = Mlp([cfg.n, cfg.mlp_hidden, 1], seed=int(rng.integers(2**31)), name=f"bench_mlp_s{cfg.seed}")
        build = model.build
        predict = model.forward_np
        encode = lambda x: x

    def sampler(r):
        xb = sample_batch(cfg.n, cfg.p, cfg.batch, r)
        return encode(xb), target.eval(xb)

    report = _train(build, predict, sampler, xs_test, y_test, cfg, rng, name=f"dnf-{cfg.model}")
    return BenchResult(report, model, target=target, predict=predict)


def run_xor_benchmark(cfg):
    """Parity learning: a single XOR neuron, or a rectifier MLP baseline."""
    if cfg.model not in ("nln-xor", "mlp"):
        raise ValueError(f"unknown model {cfg.model!r}")
    rng = np.random.default_rng(cfg.seed)
    if cfg.n <= EXHAUSTIVE_LIMIT:
        xs_test = all_binary(cfg.n)
    else:
        xs_test = sample_batch(cfg.n, 0.5, TEST_SET_SIZE, rng)
    y_test = xs_test.sum(axis=1) % 2

    if cfg.model == "nln-xor":
        n_pad = cfg.n + cfg.n % 2
        # parity is the all-memberships-on function; starting the memberships
        # fairly high keeps the product of |f_i| windows away from the
        # vanishing-gradient regime at large n
        w0 = ll._raw_from_membership(rng.uniform(0.7, 0.98, n_pad), ll.DEFAULT_SCALE)
        model = ll.XorNeuron(cfg.n, ll.MembershipWeights(w0), name=f"bench_xor_s{cfg.seed}")
        build = model.build
        predict = model.forward_np
    else:
        width = 4 * cfg.n
        model = Mlp([cfg.n, width, width, 1], seed=int(rng.integers(2**31)), name=f"bench_xmlp_s{cfg.seed}")
        build = model.build
        predict = model.forward_np

    def sampler(r):
        xb = sample_batch(cfg.n, 0.5, cfg.batch, r)
        return xb, xb.sum(axis=1) % 2

    report = _train(build, predict, sampler, xs_test, y_test, cfg, rng, name=f"xor-{cfg.model}")
    return BenchResult(report, model, predict=predict)


def bit_error_rate(result, n, seed=0):
    """Held-out bit error rate of a finished XOR run."""
    rng = np.random.default_rng(seed)
    xs = all_binary(n) if n <= EXHAUSTIVE_LIMIT else sample_batch(n, 0.5, TEST_SET_SIZE, rng)
    labels = xs.sum(axis=1) % 2
    return eval_error_count(result.predict, xs, labels) / len(xs)
