"""Neural ILP solver: grounding, fuzzy forward chaining, training, extraction.

Each intensional predicate p carries a logic network F_p over the atoms that
may appear in its defining clauses (its input list).  One chaining step
gathers, for every substitution of p's variables by constants, the fuzzy
values of those atoms from the previous valuation snapshot, evaluates F_p,
and fuzzy-ORs the result into the valuation entry of the head ground atom.
Snapshot (Jacobi) semantics make the result independent of enumeration order.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from . import layers as ll
from .logic import (
    UNDEFINED,
    Atom,
    Clause,
    Const,
    Fn,
    LearnedProgram,
    Var,
    VARIABLE_NAMES,
    crisp_forward_chain,
    eval_fn_term,
    ground_atom,
    resolve_term,
    verify_program,
)


@dataclass(frozen=True)
class PredicateSignature:
    name: str
    arity: int
    kind: str  # "extensional" | "intensional"
    num_vars: int = 0  # var(p) >= arity, intensional only
    form: str = "dnf"  # dnf | cnf | xor
    hidden: int = 4

    def __post_init__(self):
        if self.kind not in ("extensional", "intensional"):
            raise ValueError(f"bad kind {self.kind!r}")
        if self.kind == "intensional" and self.num_vars < self.arity:
            raise ValueError(f"var({self.name}) = {self.num_vars} < arity {self.arity}")


@dataclass
class TaskSpec:
    """A complete ILP problem over a finite constant domain."""

    name: str
    constants: tuple  # declaration order fixes valuation layout
    predicates: tuple  # PredicateSignatures, extensional first
    facts: frozenset  # ground (pred, args) pairs
    target: str
    positive: frozenset  # arg tuples of the target predicate
    negative: frozenset | None  # None means closed-world
    t_max: int
    use_functions: bool = False

    def __post_init__(self):
        names = [p.name for p in self.predicates]
        if len(set(names)) != len(names):
            raise ValueError("duplicate predicate names")
        by_name = {p.name: p for p in self.predicates}
        if self.target not in by_name or by_name[self.target].kind != "intensional":
            raise ValueError(f"target {self.target!r} must be a declared intensional predicate")
        if self.negative is not None and self.positive & self.negative:
            raise ValueError("positive and negative examples overlap")
        cset = set(self.constants)
        for pred, args in self.facts:
            if pred not in by_name or by_name[pred].kind != "extensional":
                raise ValueError(f"fact for non-extensional predicate {pred!r}")
            if len(args) != by_name[pred].arity:
                raise ValueError(f"arity mismatch in fact {pred}{args}")
        for args in self.positive:
            for a in args:
                if a not in cset:
                    raise ValueError(f"undeclared constant {a!r} in examples")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")

    def signature(self, name):
        for p in self.predicates:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def extensional(self):
        return tuple(p for p in self.predicates if p.kind == "extensional")

    @property
    def intensional(self):
        return tuple(p for p in self.predicates if p.kind == "intensional")

    def negative_examples(self):
        """Explicit negatives, or every unlabeled ground target atom (closed world)."""
        if self.negative is not None:
            return self.negative
        arity = self.signature(self.target).arity
        universe = set(itertools.product(self.constants, repeat=arity))
        return frozenset(universe - set(self.positive))


# ---------------------------------------------------------------------------
# Grounding


def perm(symbols, n):
    """All |S|^n ordered tuples with repetition, in lexicographic order."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return list(itertools.product(symbols, repeat=n))


def canonical_vars(n):
    return [Var(VARIABLE_NAMES[i]) for i in range(n)]


def terms(sig, variables, use_functions=False):
    """All atoms p(args) with args drawn from the variables (and their h/t)."""
    if not variables:
        raise ValueError("need at least one variable")
    candidates = list(variables)
    if use_functions:
        for v in variables:
            candidates.append(Fn("h", v.name))
            candidates.append(Fn("t", v.name))
    return [Atom(sig.name, args) for args in perm(candidates, sig.arity)]


def build_input_list(sig, task):
    """The fixed, ordered atom list wired into F_p: extensional then intensional."""
    variables = canonical_vars(sig.num_vars)
    atoms = []
    for q in task.extensional + task.intensional:
        atoms.extend(terms(q, variables, task.use_functions))
    return atoms


@dataclass
class GroundingIndex:
    """Flat gather positions into the valuation layout, per substitution."""

    pred: str
    input_atoms: list
    indices: np.ndarray  # (|C|^var, n_atoms) intp
    n_head: int  # |C|^arity
    n_rest: int  # |C|^(var - arity)


class ValuationLayout:
    """Concatenated layout: extensional blocks, intensional blocks, [0, 1] slots."""

    def __init__(self, task):
        self.task = task
        self.const_index = {c: i for i, c in enumerate(task.constants)}
        self.offsets = {}
        off = 0
        for sig in task.extensional + task.intensional:
            self.offsets[sig.name] = off
            off += len(task.constants) ** sig.arity
        self.zero_slot = off
        self.one_slot = off + 1
        self.size = off + 2
        self._arities = {p.name: p.arity for p in task.predicates}
        self._kinds = {p.name: p.kind for p in task.predicates}

    def position(self, pred, args):
        """Flat slot of a ground atom; falls back to the 0/1 slots when the
        atom lies outside the dense blocks (e.g. symbol-valued list parts)."""
        if any(a is UNDEFINED for a in args):
            return self.zero_slot
        if all(a in self.const_index for a in args):
            idx = 0
            for a in args:
                idx = idx * len(self.task.constants) + self.const_index[a]
            return self.offsets[pred] + idx
        if self._kinds[pred] == "extensional":
            return self.one_slot if (pred, tuple(args)) in self.task.facts else self.zero_slot
        return self.zero_slot

    def extensional_vector(self):
        """Fixed binary values for all extensional blocks (dense part only)."""
        n = len(self.task.constants)
        vec = np.zeros(self.size)
        vec[self.one_slot] = 1.0
        for sig in self.task.extensional:
            base = self.offsets[sig.name]
            for pred, args in self.task.facts:
                if pred != sig.name:
                    continue
                if all(a in self.const_index for a in args):
                    idx = 0
                    for a in args:
                        idx = idx * n + self.const_index[a]
                    vec[base + idx] = 1.0
        return vec

    def intensional_slice(self, name):
        sig = self.task.signature(name)
        base = self.offsets[name]
        return base, base + len(self.task.constants) ** sig.arity


def build_grounding_index(sig, task, layout=None):
    layout = layout or ValuationLayout(task)
    atoms = build_input_list(sig, task)
    n_const = len(task.constants)
    subs = perm(task.constants, sig.num_vars)
    indices = np.empty((len(subs), len(atoms)), dtype=np.intp)
    var_names = [v.name for v in canonical_vars(sig.num_vars)]
    # resolve each input atom once per substitution
    for r, sub in enumerate(subs):
        binding = dict(zip(var_names, sub))
        for c, atom in enumerate(atoms):
            args = [resolve_term(t, binding) for t in atom.args]
            indices[r, c] = layout.position(atom.pred, args)
    return GroundingIndex(
        pred=sig.name,
        input_atoms=atoms,
        indices=indices,
        n_head=n_const**sig.arity,
        n_rest=n_const ** (sig.num_vars - sig.arity),
    )


# ---------------------------------------------------------------------------
# Networks and the fuzzy chain


def make_network(sig, n_in, seed, c=ll.DEFAULT_SCALE, on_count=1):
    if sig.form == "dnf":
        net = ll.DnfNetwork(n_in, sig.hidden, c=c, name=f"F_{sig.name}_{seed}")
        net.first.weights = ll.init_membership(sig.hidden, n_in, on_count, seed)
        net.second.weights = ll.init_membership(1, sig.hidden, min(sig.hidden, 2), seed + 1, m_hi=0.5)
        return net
    if sig.form == "cnf":
        net = ll.CnfNetwork(n_in, sig.hidden, c=c, name=f"F_{sig.name}_{seed}")
        net.first.weights = ll.init_membership(sig.hidden, n_in, on_count, seed)
        net.second.weights = ll.init_membership(1, sig.hidden, min(sig.hidden, 2), seed + 1, m_hi=0.5)
        return net
    if sig.form == "xor":
        rng = np.random.default_rng(seed)
        n_pad = n_in + n_in % 2
        w0 = ll._raw_from_membership(rng.uniform(0.4, 0.9, n_pad), c)
        return ll.XorNeuron(n_in, ll.MembershipWeights(w0, c), name=f"F_{sig.name}_{seed}")
    raise ValueError(f"unknown network form {sig.form!r}")


class IlpModel:
    """Differentiable forward-chaining model for one task."""

    def __init__(self, task, networks=None, seed=0):
        self.task = task
        self.layout = ValuationLayout(task)
        self.indices = {
            sig.name: build_grounding_index(sig, task, self.layout) for sig in task.intensional
        }
        if networks is None:
            networks = {}
            for i, sig in enumerate(task.intensional):
                n_in = len(self.indices[sig.name].input_atoms)
                # wide groundings need several active memberships per
                # conjunction so unit outputs start small; one active
                # membership leaves the fuzzy OR over the many rest
                # substitutions saturated at 1 and the loss pinned
                on_count = 1 if n_in < 100 else 3
                networks[sig.name] = make_network(
                    sig, n_in, seed=seed * 131 + i * 7 + 1, on_count=on_count
                )
        self.networks = networks
        self._loss_node = None

    # -- fuzzy chain (numpy path) ------------------------------------------

    def run_forward_chain_np(self, t_max=None, in_place=False):
        """Valuation dict after t_max chaining steps, numpy only.

        The default evaluates every predicate against a snapshot of the
        previous step, which is order-independent; in_place=True updates the
        valuation as each predicate is processed (declaration order).
        """
        t_max = t_max or self.task.t_max
        state = self.layout.extensional_vector()
        vals = {
            sig.name: np.zeros(len(self.task.constants) ** sig.arity)
            for sig in self.task.intensional
        }
        history = [dict(vals)]
        for _ in range(t_max):
            flat = state.copy()
            for name, y in vals.items():
                lo, hi = self.layout.intensional_slice(name)
                flat[lo:hi] = y
            new_vals = {}
            for sig in self.task.intensional:
                gi = self.indices[sig.name]
                x = flat[gi.indices]
                out = self.networks[sig.name].forward_np(x)
                grouped = out.reshape(gi.n_head, gi.n_rest)
                contrib = 1.0 - np.prod(1.0 - grouped, axis=1)
                new_vals[sig.name] = 1.0 - (1.0 - vals[sig.name]) * (1.0 - contrib)
                if in_place:
                    lo, hi = self.layout.intensional_slice(sig.name)
                    flat[lo:hi] = new_vals[sig.name]
            vals = new_vals
            history.append(dict(vals))
        return vals, history

    # -- fuzzy chain (graph path) ------------------------------------------

    def build_loss(self):
        """Cross-entropy over labeled target positions after t_max steps."""
        if self._loss_node is not None:
            return self._loss_node
        task = self.task
        base = ad.constant(self.layout.extensional_vector())
        y_nodes = {
            sig.name: ad.constant(np.zeros(len(task.constants) ** sig.arity))
            for sig in task.intensional
        }
        slices = {s.name: self.layout.intensional_slice(s.name) for s in task.intensional}
        for _ in range(task.t_max):
            # overwrite the intensional blocks of the flat state via masking
            flat = base
            for name, y in y_nodes.items():
                lo, hi = slices[name]
                mask = np.zeros(self.layout.size)
                mask[lo:hi] = 1.0
                scatter = np.zeros((hi - lo, self.layout.size))
                scatter[np.arange(hi - lo), np.arange(lo, hi)] = 1.0
                flat = ad.add(flat, ad.matmul(ad.reshape(y, (1, -1)), ad.constant(scatter)))
            flat = ad.reshape(flat, (-1,))
            new_nodes = {}
            for sig in task.intensional:
                gi = self.indices[sig.name]
                x = ad.gather(flat, gi.indices)
                out = self.networks[sig.name].build(x)
                grouped = ad.reshape(out, (gi.n_head, gi.n_rest))
                keep = ad.reduce_prod(ad.one_minus(grouped), axis=1)
                contrib = ad.one_minus(keep)
                old = y_nodes[sig.name]
                new_nodes[sig.name] = ad.one_minus(
                    ad.multiply(ad.one_minus(old), ad.one_minus(contrib))
                )
            y_nodes = new_nodes
        target_y = y_nodes[task.target]
        pos_idx, labels = self.labeled_positions()
        pred = ad.gather(target_y, pos_idx)
        self._loss_node = ad.cross_entropy(pred, ad.constant(labels))
        self._final_y = y_nodes
        return self._loss_node

    def labeled_positions(self):
        task = self.task
        n = len(task.constants)
        cindex = self.layout.const_index

        def flat(args):
            idx = 0
            for a in args:
                idx = idx * n + cindex[a]
            return idx

        pos = sorted(task.positive, key=repr)
        neg = sorted(task.negative_examples(), key=repr)
        if not pos and not neg:
            raise ValueError("no labeled positions")
        idx = np.array([flat(a) for a in pos] + [flat(a) for a in neg], dtype=np.intp)
        labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))])
        return idx, labels

    def loss_np(self):
        """Loss via the numpy chain (used by pruning)."""
        vals, _ = self.run_forward_chain_np()
        idx, labels = self.labeled_positions()
        p = np.clip(vals[self.task.target][idx], ad.CE_CLIP, 1 - ad.CE_CLIP)
        return float(np.mean(-(labels * np.log(p) + (1 - labels) * np.log1p(-p))))


# ---------------------------------------------------------------------------
# Extraction and wiring


def extract_program(networks, task, threshold=ll.EXTRACT_THRESHOLD):
    """Clauses read off near-binary memberships, one per included conjunction."""
    model_indices = {}
    clauses = []
    for sig in task.intensional:
        net = networks[sig.name]
        atoms = model_indices.get(sig.name)
        if atoms is None:
            atoms = build_input_list(sig, task)
        head = Atom(sig.name, tuple(canonical_vars(sig.arity)))
        formula = ll.extract_formula(net, threshold)
        if formula.form != "dnf":
            raise ValueError("extraction to clauses requires DNF predicate networks")
        for lits in formula.clauses:
            # a head variable missing from the body simply ranges over all
            # constants, matching the grounded network's behaviour
            clauses.append(Clause(head, tuple(atoms[i] for i in lits)))
    return LearnedProgram(clauses)


def wire_program(program, task, c=ll.DEFAULT_SCALE):
    """Crisp networks realizing a clause program exactly (for oracles)."""
    networks = {}
    for sig in task.intensional:
        atoms = build_input_list(sig, task)
        pos = {a: i for i, a in enumerate(atoms)}
        own = [cl for cl in program.clauses if cl.head.pred == sig.name]
        clause_idx = []
        for cl in own:
            try:
                clause_idx.append(tuple(pos[a] for a in cl.body))
            except KeyError as exc:
                raise ValueError(f"body atom {exc} not in input list of {sig.name}") from exc
        networks[sig.name] = ll.wire_dnf(len(atoms), clause_idx, c=c, name=f"wired_{sig.name}_{id(program) % 10**6}")
    return networks


# ---------------------------------------------------------------------------
# Training


@dataclass
class TrainConfig:
    lr: float = 0.05
    max_steps: int = 1500
    restarts: int = 5
    stop_loss: float = 1e-4
    prune_eps: float = 1e-6
    seed: int = 0
    log_every: int = 0  # 0 disables progress output
    try_every: int = 200  # attempt symbolic extraction at this cadence
    try_loss: float = 0.05  # ... once the loss is at least this low


@dataclass
class SolveResult:
    success: bool
    program: LearnedProgram | None
    loss: float
    seed: int
    steps: int
    restarts_used: int
    seconds: float = 0.0


def _attempt_extraction(model, task, config):
    """Round to a crisp program, prune, verify; restores weights on failure.

    Recursion re-amplifies the output of a partially-open clause gate across
    chain steps, so a gate can settle well below 1/2 while the fuzzy loss is
    already near zero.  Gate rounding is therefore tried at several
    thresholds; every candidate must pass crisp verification, so a too-eager
    threshold can never yield a wrong result.
    """
    snapshot = [(node, node.value.copy()) for net in model.networks.values()
                for node in net.param_nodes()]
    for gate_threshold in (0.5, 0.3, 0.15):
        for net in model.networks.values():
            conj = net.first.weights.memberships() > ll.EXTRACT_THRESHOLD
            gate = net.second.weights.memberships() > gate_threshold
            net.first.weights = ll.MembershipWeights.crisp(conj, net.first.c)
            net.second.weights = ll.MembershipWeights.crisp(gate, net.second.c)
        for net in model.networks.values():
            ll.prune_formula(net, model.loss_np, eps=config.prune_eps)
        program = extract_program(model.networks, task)
        report = verify_program(program, task)
        if report["entails_all_positives"] and report["rejects_all_negatives"]:
            return program
        for node, value in snapshot:
            node.value = value.copy()
    return None


def train_ilp(task, config=None):
    """Gradient-train predicate networks until a verified program emerges."""
    config = config or TrainConfig()
    best_loss = np.inf
    t0 = time.perf_counter()
    for attempt in range(config.restarts):
        seed = config.seed + 1000 * attempt
        model = IlpModel(task, seed=seed)
        loss_node = model.build_loss()
        opt = ad.Adam(loss_node, lr=config.lr)
        loss = np.inf
        program = None
        step = 0
        for step in range(1, config.max_steps + 1):
            loss = float(ad.forward_eval(loss_node))
            if config.log_every and step % config.log_every == 0:
                print(f"  restart {attempt} step {step} loss {loss:.6f}")
            done = loss < config.stop_loss
            if done or (step % config.try_every == 0 and loss < config.try_loss):
                program = _attempt_extraction(model, task, config)
                if program is not None or done:
                    break
            grads = ad.backward(loss_node)
            opt.step(grads)
        best_loss = min(best_loss, loss)
        if program is None and loss < config.try_loss:
            program = _attempt_extraction(model, task, config)
        if program is not None:
            final_loss = model.loss_np()
            program.metadata = {
                "loss": final_loss,
                "seed": seed,
                "steps": step,
                "task": task.name,
            }
            return SolveResult(
                True, program, final_loss, seed, step, attempt + 1,
                round(time.perf_counter() - t0, 3),
            )
    return SolveResult(False, None, float(best_loss), config.seed, 0, config.restarts,
                       round(time.perf_counter() - t0, 3))
