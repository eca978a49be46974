import math

import numpy as np


def simplex_etf(n: int) -> np.ndarray:
    """n×(n+1) equiangular tight frame: unit-norm columns with pairwise inner
    products exactly -1/n (scaled Helmert rows). Gram eigenvalues over any
    k-support are {1 - (k-1)/n, 1 + 1/n}, so its RIP constants are known in
    closed form."""
    Np = n + 1
    H = np.zeros((n, Np))
    for j in range(1, Np):
        H[j - 1, :j] = 1.0
        H[j - 1, j] = -j
        H[j - 1] /= math.sqrt(j * (j + 1))
    return math.sqrt((n + 1) / n) * H
