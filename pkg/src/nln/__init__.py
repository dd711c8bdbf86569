"""Neural logic network workbench.

Differentiable Boolean layers (conjunction, disjunction, XOR) over membership
weights, a neural ILP solver based on fuzzy forward chaining, and benchmark
harnesses for Boolean-function learning and LDPC erasure decoding.
"""

__version__ = "0.1.0"
