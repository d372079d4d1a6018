"""Random test-matrix helpers shared across the suite."""

import numpy as np


def random_matrix(rng, rows, cols, scale=1.0):
    return (rng.normal(size=(rows, cols)) * scale).astype(np.float32)


def unit_rows(rng, rows, cols):
    x = rng.normal(size=(rows, cols))
    return (x / np.linalg.norm(x, axis=1, keepdims=True)).astype(np.float32)
