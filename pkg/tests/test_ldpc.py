import json

import numpy as np
import pytest

from nln.ldpc import (
    ERASED,
    BerReport,
    HandWiredDecoder,
    LdpcTrainConfig,
    MlpDecoder,
    NlnDecoder,
    erase,
    eval_ber,
    gen_regular_code,
    nullspace_basis,
    onehot_to_symbols,
    peel_decode,
    sample_codewords,
    symbols_to_onehot,
    train_decoder,
)


@pytest.fixture(scope="module")
def code():
    return gen_regular_code(n=24, dv=3, dc=6, seed=0)


def test_code_degrees(code):
    assert code.n == 24
    m = code.h_matrix()
    assert m.shape == (12, 24)
    assert (m.sum(axis=1) == 6).all()
    assert (m.sum(axis=0) == 3).all()


def test_code_is_simple(code):
    for vars_ in code.check_vars:
        assert len(set(vars_)) == len(vars_)


def test_codewords_satisfy_checks(code):
    rng = np.random.default_rng(0)
    words = sample_codewords(code, 20, rng)
    m = code.h_matrix()
    assert ((words @ m.T) % 2 == 0).all()
    # the code is non-trivial: some sampled word is nonzero
    assert words.any()


def test_nullspace_basis(code):
    m = code.h_matrix()
    basis = nullspace_basis(m)
    assert basis.shape[0] >= code.n - m.shape[0]
    assert ((basis @ m.T) % 2 == 0).all()


def test_erase_rate():
    rng = np.random.default_rng(1)
    bits = np.zeros((200, 100), dtype=int)
    sym = erase(bits, 0.3, rng)
    rate = (sym == ERASED).mean()
    assert 0.27 < rate < 0.33


def test_onehot_round_trip():
    sym = np.array([[0, 1, ERASED, 1]])
    is0, is1, is_e = symbols_to_onehot(sym)
    np.testing.assert_array_equal(is0, [[1.0, 0.0, 0.0, 0.0]])
    np.testing.assert_array_equal(is1, [[0.0, 1.0, 0.0, 1.0]])
    np.testing.assert_array_equal(is_e, [[0.0, 0.0, 1.0, 0.0]])
    np.testing.assert_array_equal(onehot_to_symbols(is0, is1, is_e), sym)


def test_peel_decode_recovers_light_erasures(code):
    rng = np.random.default_rng(2)
    words = sample_codewords(code, 50, rng)
    sym = erase(words, 0.1, rng)
    decoded = peel_decode(code, sym)
    # light erasures on a (3,6) code nearly always peel off completely
    assert (decoded[decoded != ERASED] == words[decoded != ERASED]).all()
    assert (decoded == ERASED).mean() < 0.05


def test_handwired_matches_peeling(code):
    rng = np.random.default_rng(3)
    words = sample_codewords(code, 100, rng)
    dec = HandWiredDecoder(code)
    for eps in (0.2, 0.4):
        sym = erase(words, eps, rng)
        np.testing.assert_array_equal(dec.decode(sym), peel_decode(code, sym))


def test_nln_decoder_step_shapes(code):
    dec = NlnDecoder(code, seed=0)
    rng = np.random.default_rng(0)
    words = sample_codewords(code, 5, rng)
    sym = erase(words, 0.3, rng)
    is0, is1, is_e = dec.decode(sym, iters=2)
    assert is0.shape == sym.shape == is1.shape == is_e.shape
    assert ((is0 >= 0) & (is0 <= 1)).all()


def test_train_decoder_reduces_loss(code):
    cfg = LdpcTrainConfig(model="nln", seed=0, steps=100, batch=10, t_train=1,
                          hidden=4, timing=False)
    dec, losses = train_decoder(code, cfg)
    assert [s for s, _ in losses] == [50, 100]
    assert losses[-1][1] < losses[0][1]


def test_mlp_decoder_trains(code):
    cfg = LdpcTrainConfig(model="mlp", seed=0, steps=100, batch=10, t_train=1,
                          mlp_hidden=20, timing=False)
    dec, losses = train_decoder(code, cfg)
    assert isinstance(dec, MlpDecoder)
    assert losses[-1][1] < losses[0][1]


def test_eval_ber_handwired(code):
    dec = HandWiredDecoder(code)
    ber1 = eval_ber(code, dec, eps=0.2, iters=1, n_samples=200, seed=0)
    ber10 = eval_ber(code, dec, eps=0.2, iters=10, n_samples=200, seed=0)
    # more iterations cannot hurt an exact peeling decoder
    assert ber10 <= ber1
    assert ber10 < 0.1


def test_ber_report_serialization():
    rep = BerReport(model="nln", seed=0, config={}, eps=0.3,
                    points=[[3, 0.01], [10, 0.005]])
    payload = json.loads(rep.to_json())
    assert payload["eps"] == 0.3
    assert rep.to_csv() == "iters,ber\n3,0.01\n10,0.005\n"


def test_unknown_model_rejected(code):
    with pytest.raises(ValueError):
        train_decoder(code, LdpcTrainConfig(model="cnn"))
