"""Erasure-channel decoding experiment on the (3,6) n=48 code.

Checks the hand-wired decoder against classical peeling, then trains the
NLN and MLP decoders at t_train=3 and compares their bit error rates at
t=3 vs t=10 message-passing iterations (eps=0.3).
"""

import numpy as np

from nln.ldpc import (
    HandWiredDecoder,
    LdpcTrainConfig,
    erase,
    eval_ber,
    gen_regular_code,
    peel_decode,
    sample_codewords,
    train_decoder,
)


def main():
    code = gen_regular_code(seed=0)
    rng = np.random.default_rng(0)
    hand = HandWiredDecoder(code)
    mismatches = 0
    for eps in (0.2, 0.3, 0.4):
        words = sample_codewords(code, 1000, rng)
        received = erase(words, eps, rng)
        mismatches += int((hand.decode(received) != peel_decode(code, received)).sum())
    print(f"hand-wired vs peeling mismatches over 3000 trials: {mismatches}")

    for model in ("nln", "mlp"):
        cfg = LdpcTrainConfig(model=model, seed=0, timing=False)
        decoder, losses = train_decoder(code, cfg)
        ber3 = eval_ber(code, decoder, eps=0.3, iters=3, n_samples=10000, seed=1)
        ber10 = eval_ber(code, decoder, eps=0.3, iters=10, n_samples=10000, seed=1)
        print(f"{model}: final loss={losses[-1][1]} BER(t=3)={ber3:.5f} BER(t=10)={ber10:.5f}")


if __name__ == "__main__":
    main()
