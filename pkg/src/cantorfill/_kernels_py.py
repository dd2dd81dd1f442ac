"""Reference implementations of the subset-table kernels (numpy + Python)."""

import itertools

import numpy as np


def popcounts(nbits):
    pop = np.zeros(1, dtype=np.uint8)
    for _ in range(nbits):
        pop = np.concatenate((pop, pop + 1))
    return pop


def subset_max_transform(h, nbits):
    if h.shape[0] != 1 << nbits:
        raise ValueError("table length must be 2**nbits")
    for i in range(nbits):
        view = h.reshape(-1, 2, 1 << i)
        np.maximum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])


def _lex_key(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def min_at_popcount(best, nbits, n):
    if n < 0 or n > nbits:
        raise ValueError("n outside 0..nbits")
    idx = np.flatnonzero(popcounts(nbits) == n)
    vals = best[idx]
    v = int(vals.min())
    ties = idx[vals == v]
    return v, min((int(s) for s in ties), key=_lex_key)


def first_filling_combination(best, nbits, m, need):
    if m < 0 or m > nbits:
        raise ValueError("bad subset size")
    for combo in itertools.combinations(range(nbits), m):
        b = 0
        for i in combo:
            b |= 1 << i
        sub = b
        while True:
            if best[sub] < need[bin(sub).count("1")]:
                break
            if sub == 0:
                return b
            sub = (sub - 1) & b
    return -1
