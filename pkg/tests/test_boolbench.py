import json

import numpy as np
import pytest

from nln.boolbench import (
    BenchConfig,
    RandomDnfTarget,
    all_binary,
    gen_random_dnf,
    run_dnf_benchmark,
    run_xor_benchmark,
    sample_batch,
    with_complements,
)


def test_all_binary():
    xs = all_binary(3)
    assert xs.shape == (8, 3)
    assert len({tuple(r) for r in xs}) == 8


def test_with_complements():
    x = np.array([[0.0, 1.0]])
    fx = with_complements(x)
    np.testing.assert_array_equal(fx, [[0.0, 1.0, 1.0, 0.0]])


def test_sample_batch_bias():
    rng = np.random.default_rng(0)
    xs = sample_batch(10, 0.75, 4000, rng)
    assert xs.shape == (4000, 10)
    assert 0.7 < xs.mean() < 0.8


def test_gen_random_dnf_deterministic():
    t1 = gen_random_dnf(10, 4, 3, seed=7)
    t2 = gen_random_dnf(10, 4, 3, seed=7)
    assert t1 == t2
    assert t1 != gen_random_dnf(10, 4, 3, seed=8)
    assert len(t1.clauses) == 4
    assert all(1 <= len(c) <= 3 for c in t1.clauses)


def test_random_dnf_target_eval():
    target = RandomDnfTarget(3, (((0, True), (1, False)),))
    xs = all_binary(3)
    got = target.eval(xs)
    want = ((xs[:, 0] > 0.5) & (xs[:, 1] < 0.5)).astype(float)
    np.testing.assert_array_equal(got, want)


def test_random_dnf_target_validation():
    with pytest.raises(ValueError):
        RandomDnfTarget(3, ())
    with pytest.raises(ValueError):
        RandomDnfTarget(3, (((0, True), (0, False)),))


def test_dnf_benchmark_smoke_small():
    cfg = BenchConfig(n=4, seed=0, steps=300, eval_every=100, target_clauses=2,
                      target_max_clause=2, timing=False)
    result = run_dnf_benchmark(cfg)
    rep = result.report
    assert rep.seconds == 0.0
    assert rep.name == "dnf-nln-dnf"
    assert len(rep.losses) == len(rep.test_errors)
    payload = json.loads(rep.to_json())
    assert payload["seed"] == 0
    # errors are counted over the exhaustive 2^n inputs
    assert all(0 <= e <= 16 for _, e in rep.test_errors)


def test_dnf_benchmark_mlp_smoke():
    cfg = BenchConfig(model="mlp", n=4, seed=0, steps=100, eval_every=50,
                      mlp_hidden=16, timing=False)
    rep = run_dnf_benchmark(cfg).report
    assert rep.name == "dnf-mlp"
    assert len(rep.losses) >= 2


def test_xor_benchmark_smoke():
    cfg = BenchConfig(model="nln-xor", n=4, seed=1, steps=200, eval_every=100,
                      timing=False)
    rep = run_xor_benchmark(cfg).report
    assert rep.name == "xor-nln-xor"
    assert all(0 <= e <= 16 for _, e in rep.test_errors)


def test_reports_byte_identical_across_runs():
    cfg = BenchConfig(n=4, seed=3, steps=120, eval_every=60, timing=False)
    a = run_dnf_benchmark(cfg).report.to_json()
    b = run_dnf_benchmark(cfg).report.to_json()
    assert a == b
