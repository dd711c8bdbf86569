"""Dense rectifier MLP baseline built on the same autodiff engine.

relu is expressed as (u + |u|) / 2 so the engine's op set stays minimal.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad


class Mlp:
    """Fully connected net, relu hidden activations, sigmoid outputs."""

    def __init__(self, widths, seed, name="mlp"):
        if len(widths) < 2:
            raise ValueError("need at least input and output widths")
        rng = np.random.default_rng(seed)
        self.widths = list(widths)
        self.name = name
        self.params = []
        for i, (a, b) in enumerate(zip(widths[:-1], widths[1:])):
            scale = np.sqrt(2.0 / a)
            self.params.append(ad.param(f"{name}/W{i}", rng.normal(0, scale, (a, b))))
            self.params.append(ad.param(f"{name}/b{i}", np.zeros((1, b))))

    def build(self, x):
        h = x
        n_layers = len(self.widths) - 1
        for i in range(n_layers):
            w, b = self.params[2 * i], self.params[2 * i + 1]
            z = ad.add(ad.matmul(h, w), b)
            if i < n_layers - 1:
                h = ad.multiply(ad.add(z, ad.absolute(z)), ad.constant(0.5))
            else:
                h = ad.sigmoid(z)
        return h

    def forward_np(self, x):
        h = np.asarray(x, dtype=float)
        n_layers = len(self.widths) - 1
        for i in range(n_layers):
            w = self.params[2 * i].value
            b = self.params[2 * i + 1].value
            z = h @ w + b
            h = np.maximum(z, 0.0) if i < n_layers - 1 else 1.0 / (1.0 + np.exp(-z))
        return h

    def param_nodes(self):
        return list(self.params)
