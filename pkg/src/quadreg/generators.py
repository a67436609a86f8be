"""Seeded generators of structured test sets and random factors."""

from __future__ import annotations

import numpy as np

from .factors import QuadraticFactor
from .gf import group, is_independent


def random_symmetric_matrix(p, n, rng):
    M = rng.integers(0, p, size=(n, n))
    M = (M + M.T) % p  # diagonal doubles, still uniform enough for tests
    return tuple(tuple(int(v) for v in row) for row in M)


def random_factor(p, n, lmax, qmax, rng) -> QuadraticFactor:
    """Random factor with l <= lmax independent vectors and q <= qmax
    distinct symmetric matrices."""
    l = int(rng.integers(0, lmax + 1))
    q = int(rng.integers(0, qmax + 1))
    L = []
    guard = 0
    while len(L) < l and guard < 200:
        v = tuple(int(c) for c in rng.integers(0, p, size=n))
        if any(v) and is_independent(L + [v], p):
            L.append(v)
        guard += 1
    Q = []
    guard = 0
    while len(Q) < q and guard < 200:
        M = random_symmetric_matrix(p, n, rng)
        if any(any(row) for row in M) and M not in Q:
            Q.append(M)
        guard += 1
    return QuadraticFactor(p, n, L, Q)


def generate_set(kind: str, params: dict, seed: int, p: int, n: int) -> np.ndarray:
    """kinds: random(density), atom-union(factor, labels),
    quadratic-variety(M, value), coset(L, a)."""
    g = group(p, n)
    rng = np.random.default_rng(seed)
    if kind == "random":
        density = float(params.get("density", 0.5))
        return rng.random(g.size) < density
    if kind == "atom-union":
        B = QuadraticFactor(p, n, params.get("L", []), params.get("Q", []))
        mask = np.zeros(g.size, dtype=bool)
        for lab in params["labels"]:
            label = (tuple(lab["a"]), tuple(lab["b"]))
            mask |= B.atom_indicator(label)
        return mask
    if kind == "quadratic-variety":
        M = params["M"]
        value = int(params.get("value", 0))
        B = QuadraticFactor(p, n, [], [M])
        return B.atom_indicator(((), (value,)))
    if kind == "coset":
        L = params["L"]
        a = params["a"]
        B = QuadraticFactor(p, n, L, [])
        return B.atom_indicator((tuple(a), ()))
    raise ValueError(f"unknown set kind {kind!r}")
