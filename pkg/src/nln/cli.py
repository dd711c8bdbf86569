"""Command-line entry point: experiments, checkpoints, reports.

Exit codes: 0 success, 1 solver/verification failure, 2 usage or validation
error.  Every run is reproducible byte-for-byte from (subcommand, flags,
seed); wall-clock timing is therefore disabled in emitted reports.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import autodiff as ad
from . import layers as ll
from .boolbench import BenchConfig, run_dnf_benchmark, run_xor_benchmark
from .ilp_core import TrainConfig, train_ilp
from .ilp_tasks import BUILTIN_TASKS, get_task, task_from_json
from .ldpc import (
    BerReport,
    HandWiredDecoder,
    LdpcTrainConfig,
    MlpDecoder,
    NlnDecoder,
    eval_ber,
    gen_regular_code,
    train_decoder,
)
from .logic import parse_program, verify_program

CHECKPOINT_SCHEMA = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, param_nodes, config, module, seed, steps):
    doc = {
        "schema": CHECKPOINT_SCHEMA,
        "module": module,
        "config": config,
        "seed": seed,
        "steps": steps,
        "weights": {
            node.name: {"shape": list(node.value.shape), "values": node.value.ravel().tolist()}
            for node in param_nodes
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if doc.get("schema") != CHECKPOINT_SCHEMA:
        raise CheckpointError(f"unsupported checkpoint schema {doc.get('schema')!r}")
    weights = {}
    for name, entry in doc.get("weights", {}).items():
        arr = np.array(entry["values"], dtype=float)
        if arr.size != int(np.prod(entry["shape"])):
            raise CheckpointError(f"weight {name!r}: {arr.size} values for shape {entry['shape']}")
        weights[name] = arr.reshape(entry["shape"])
    doc["weights"] = weights
    return doc


def restore_params(param_nodes, weights):
    for node in param_nodes:
        if node.name not in weights:
            raise CheckpointError(f"checkpoint is missing weights for {node.name!r}")
        if weights[node.name].shape != node.value.shape:
            raise CheckpointError(f"shape mismatch for {node.name!r}")
        node.value = weights[node.name]


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_bench(args):
    cfg = BenchConfig(
        model=args.model,
        n=args.n,
        seed=args.seed,
        lr=args.lr,
        steps=args.steps,
        timing=False,
    )
    if args.task == "dnf":
        if cfg.model == "nln-xor":
            print("bench dnf supports models nln-dnf and mlp", file=sys.stderr)
            return 2
        result = run_dnf_benchmark(cfg)
    else:
        if cfg.model == "nln-dnf":
            cfg.model = "nln-xor"
        result = run_xor_benchmark(cfg)
    report = result.report
    _emit(report.to_json() if args.json else report.table(), args.out)
    return 0


def _load_task(name_or_path):
    if name_or_path in BUILTIN_TASKS:
        return get_task(name_or_path)
    try:
        with open(name_or_path) as fh:
            return task_from_json(fh.read())
    except OSError as exc:
        raise ValueError(
            f"unknown task {name_or_path!r} (not builtin, not a readable file): {exc}"
        ) from exc


def cmd_ilp_solve(args):
    task = _load_task(args.task)
    cfg = TrainConfig(
        lr=args.lr, max_steps=args.steps, restarts=args.restarts, seed=args.seed
    )
    result = train_ilp(task, cfg)
    verify = None
    if result.success:
        verify = verify_program(result.program, task)
    payload = {
        "task": task.name,
        "seed": args.seed,
        "success": result.success,
        "loss": round(result.loss, 6),
        "steps": result.steps,
        "restarts": result.restarts_used,
        "program": str(result.program) if result.success else None,
        "verify": verify,
    }
    if args.json:
        _emit(json.dumps(payload, sort_keys=True), args.out)
    elif result.success:
        _emit(str(result.program), args.out)
    else:
        _emit(f"no verified program for {task.name} within {args.restarts} restarts "
              f"(best loss {result.loss:.6f})", args.out)
    ok = result.success and verify["entails_all_positives"] and verify["rejects_all_negatives"]
    return 0 if ok else 1


def cmd_ilp_verify(args):
    task = _load_task(args.task)
    text = sys.stdin.read() if args.program == "-" else open(args.program).read()
    program = parse_program(text)
    report = verify_program(program, task)
    if args.json:
        _emit(json.dumps({"task": task.name, **report}, sort_keys=True), args.out)
    else:
        _emit(
            f"entails: {str(report['entails_all_positives']).lower()}, "
            f"rejects: {str(report['rejects_all_negatives']).lower()}",
            args.out,
        )
    return 0 if report["entails_all_positives"] and report["rejects_all_negatives"] else 1


def cmd_ldpc_train(args):
    cfg = LdpcTrainConfig(
        model=args.model, seed=args.seed, lr=args.lr, steps=args.steps, timing=False
    )
    code = gen_regular_code(seed=args.code_seed)
    decoder, losses = train_decoder(code, cfg)
    config = dict(cfg.to_dict(), code_seed=args.code_seed)
    path = args.out or f"ldpc_{args.model}_s{args.seed}.json"
    save_checkpoint(path, decoder.param_nodes(), config, "ldpc", args.seed, cfg.steps)
    summary = {"checkpoint": path, "losses": losses, "seed": args.seed, "model": args.model}
    print(json.dumps(summary, sort_keys=True) if args.json
          else f"wrote {path}; final loss {losses[-1][1]}")
    return 0


def _decoder_from_checkpoint(path):
    doc = load_checkpoint(path)
    if doc["module"] != "ldpc":
        raise CheckpointError(f"checkpoint module {doc['module']!r} is not 'ldpc'")
    cfg = doc["config"]
    code = gen_regular_code(seed=cfg.get("code_seed", 0))
    if cfg["model"] == "nln":
        dec = NlnDecoder(code, seed=cfg["seed"], hidden=cfg["hidden"], t_train=cfg["t_train"])
    else:
        dec = MlpDecoder(code, seed=cfg["seed"], hidden=cfg["mlp_hidden"], t_train=cfg["t_train"])
    restore_params(dec.param_nodes(), doc["weights"])
    return code, dec, cfg


def cmd_ldpc_eval(args):
    if args.checkpoint:
        code, decoder, cfg = _decoder_from_checkpoint(args.checkpoint)
        model = cfg["model"]
    else:
        code = gen_regular_code(seed=args.code_seed)
        decoder, model = HandWiredDecoder(code), "hand-wired"
    iters = [int(t) for t in args.iters.split(",")]
    points = [[t, eval_ber(code, decoder, args.eps, t, args.samples, seed=args.seed)] for t in iters]
    report = BerReport(
        model=model,
        seed=args.seed,
        config={"eps": args.eps, "samples": args.samples, "iters": iters},
        eps=args.eps,
        points=points,
    )
    if args.json:
        _emit(report.to_json(), args.out)
    else:
        _emit(report.to_csv(), args.out)
    return 0


GRADCHECK_TOL = 1e-5
GRADCHECK_FORMS = ("conjunction", "disjunction", "dnf", "cnf", "xor")


def gradcheck_graph(form, seed):
    """A small randomly weighted graph of the given form plus input bindings.

    Inputs stay away from 0/1 so the XOR clamp is not at a kink.
    """
    rng = np.random.default_rng(seed)
    n = 6
    xv = rng.uniform(0.1, 0.9, size=(4, n))
    x = ad.placeholder("x")
    uid = f"gc_{form}_{seed}_{rng.integers(2**31)}"
    if form == "conjunction":
        layer = ll.ConjunctionLayer(n, 3, ll.MembershipWeights(rng.normal(0, 0.4, (3, n))), name=uid)
        node = layer.build(x)
    elif form == "disjunction":
        layer = ll.DisjunctionLayer(n, 3, ll.MembershipWeights(rng.normal(0, 0.4, (3, n))), name=uid)
        node = layer.build(x)
    elif form in ("dnf", "cnf"):
        cls = ll.DnfNetwork if form == "dnf" else ll.CnfNetwork
        net = cls(n, 4, name=uid)
        net.first.weights = ll.MembershipWeights(rng.normal(0, 0.4, (4, n)))
        net.second.weights = ll.MembershipWeights(rng.normal(0, 0.4, (1, 4)))
        node = net.build(x)
    elif form == "xor":
        neuron = ll.XorNeuron(n, ll.MembershipWeights(rng.normal(0, 0.4, n)), name=uid)
        # scale inputs down so |f| < 1 keeps the clamp away from its upper
        # kink, and resample any row that lands near the |.| kink at zero
        m = neuron.memberships()[:n]
        for _ in range(100):
            xv = rng.uniform(0.1, 0.9, size=(4, n)) * (0.8 / n)
            f = xv @ (neuron._signT * m[:, None])
            if np.abs(f).min() > 0.02:
                break
        node = neuron.build(x)
    else:
        raise ValueError(f"unknown form {form!r}")
    return ad.reduce_sum(node), {"x": xv}


def cmd_gradcheck(args):
    worst = {}
    for i in range(args.points):
        for form in GRADCHECK_FORMS:
            node, bindings = gradcheck_graph(form, args.seed + 1000 * i)
            err = ad.check_gradients(node, bindings)
            worst[form] = max(worst.get(form, 0.0), err)
    ok = all(err < GRADCHECK_TOL for err in worst.values())
    if args.json:
        _emit(json.dumps({"seed": args.seed, "worst": worst, "ok": ok}, sort_keys=True), args.out)
    else:
        lines = [f"{form:12s} max rel error {err:.3e}" for form, err in worst.items()]
        lines.append(f"gradcheck {'ok' if ok else 'FAILED'} (tolerance {GRADCHECK_TOL})")
        _emit("\n".join(lines), args.out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser


def build_parser():
    parser = argparse.ArgumentParser(prog="nln", description="neural-logic workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, lr=0.001):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lr", type=float, default=lr)
        p.add_argument("--out", default=None)
        p.add_argument("--json", action="store_true")

    bench = sub.add_parser("bench", help="Boolean-function learning benchmarks")
    bench_sub = bench.add_subparsers(dest="task", required=True)
    for task, default_model, default_n, default_steps in (
        ("dnf", "nln-dnf", 10, 2000),
        ("xor", "nln-xor", 20, 20000),
    ):
        p = bench_sub.add_parser(task)
        p.add_argument("--model", default=default_model,
                       choices=["nln-dnf", "nln-xor", "mlp"])
        p.add_argument("--n", type=int, default=default_n)
        p.add_argument("--steps", type=int, default=default_steps)
        common(p)
        p.set_defaults(func=cmd_bench, task=task)

    ilp = sub.add_parser("ilp", help="inductive logic programming")
    ilp_sub = ilp.add_subparsers(dest="action", required=True)
    solve = ilp_sub.add_parser("solve")
    solve.add_argument("task", help="builtin task name or task-file path")
    solve.add_argument("--steps", type=int, default=1500)
    solve.add_argument("--restarts", type=int, default=5)
    common(solve, lr=0.05)
    solve.set_defaults(func=cmd_ilp_solve)
    verify = ilp_sub.add_parser("verify")
    verify.add_argument("task", help="builtin task name or task-file path")
    verify.add_argument("program", help="program file path, or - for stdin")
    common(verify)
    verify.set_defaults(func=cmd_ilp_verify)

    ldpc = sub.add_parser("ldpc", help="erasure-channel decoding")
    ldpc_sub = ldpc.add_subparsers(dest="action", required=True)
    train = ldpc_sub.add_parser("train")
    train.add_argument("--model", default="nln", choices=["nln", "mlp"])
    train.add_argument("--steps", type=int, default=1500)
    train.add_argument("--code-seed", type=int, default=0)
    common(train, lr=0.01)
    train.set_defaults(func=cmd_ldpc_train)
    evalp = ldpc_sub.add_parser("eval")
    evalp.add_argument("--checkpoint", default=None,
                       help="trained decoder; omit to evaluate the hand-wired one")
    evalp.add_argument("--eps", type=float, default=0.3)
    evalp.add_argument("--iters", default="3,10")
    evalp.add_argument("--samples", type=int, default=10000)
    evalp.add_argument("--code-seed", type=int, default=0)
    common(evalp)
    evalp.set_defaults(func=cmd_ldpc_eval)

    gc = sub.add_parser("gradcheck", help="finite-difference gradient audit")
    gc.add_argument("--points", type=int, default=100)
    common(gc)
    gc.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit 2 for usage errors and 0 for --help
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except (CheckpointError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
