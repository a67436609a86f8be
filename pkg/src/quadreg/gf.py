"""Exact linear algebra over F_p and the ambient group F_p^n.

Vectors are tuples of ints in [0, p-1], matrices are tuples of row-tuples.
Group elements are also stored in an encoded form: a single int whose
little-endian base-p digits are the coordinates (coord[0] least significant).
That makes dense length-p^n arrays usable as functions on the group.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

_SMALL_PRIMES = {3, 5, 7, 11, 13, 17, 19, 23}


def check_odd_prime(p: int) -> None:
    if p not in _SMALL_PRIMES:
        raise ValueError(f"p must be a small odd prime, got {p}")


class Group:
    """The group F_p^n with precomputed encode/decode and addition tables."""

    def __init__(self, p: int, n: int):
        check_odd_prime(p)
        if n < 1:
            raise ValueError("n must be >= 1")
        self.p = p
        self.n = n
        self.size = p ** n
        # coords[i] = decoded vector of the element encoded as i, shape (size, n)
        digits = np.empty((self.size, n), dtype=np.int64)
        idx = np.arange(self.size)
        for k in range(n):
            digits[:, k] = (idx // (p ** k)) % p
        self.coords = digits
        self._powers = np.array([p ** k for k in range(n)], dtype=np.int64)
        # add[a, b] = encoding of (decode(a) + decode(b)) mod p
        self.add = (
            ((digits[:, None, :] + digits[None, :, :]) % p) @ self._powers
        )
        self.neg = (((-digits) % p) @ self._powers).astype(np.int64)

    def encode(self, vec) -> int:
        return int(sum((v % self.p) * self.p ** i for i, v in enumerate(vec)))

    def decode(self, idx: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[idx])

    def elements(self):
        return range(self.size)

    def __repr__(self):
        return f"Group(p={self.p}, n={self.n})"


@lru_cache(maxsize=None)
def group(p: int, n: int) -> Group:
    return Group(p, n)


# --- exact row reduction ----------------------------------------------------

def rref(rows, p):
    """Reduced row-echelon form. Input: iterable of row tuples/lists.
    Returns (list of nonzero echelon rows, rank)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], 0
    ncols = len(mat[0])
    pivot_row = 0
    for col in range(ncols):
        # find pivot
        piv = None
        for r in range(pivot_row, len(mat)):
            if mat[r][col] % p != 0:
                piv = r
                break
        if piv is None:
            continue
        mat[pivot_row], mat[piv] = mat[piv], mat[pivot_row]
        inv = pow(mat[pivot_row][col] % p, -1, p)
        mat[pivot_row] = [(inv * v) % p for v in mat[pivot_row]]
        for r in range(len(mat)):
            if r != pivot_row and mat[r][col] % p != 0:
                c = mat[r][col] % p
                mat[r] = [(a - c * b) % p for a, b in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
        if pivot_row == len(mat):
            break
    ech = [tuple(r) for r in mat[:pivot_row]]
    return ech, pivot_row


def mat_rank(rows, p) -> int:
    return rref(rows, p)[1]


def row_space_basis(rows, p):
    """Echelon basis of the row space."""
    return rref(rows, p)[0]


def orth_complement_basis(U, p):
    """Basis of ker(U)^perp = the row space of U (U symmetric in our uses,
    but this works for any matrix)."""
    return row_space_basis(U, p)


def is_independent(vectors, p) -> bool:
    vs = list(vectors)
    return mat_rank(vs, p) == len(vs)


def extend_to_independent(L, V, p):
    """Greedy: append vectors of V (in order) to L when they enlarge the span.
    L must already be independent."""
    L = [tuple(v) for v in L]
    if not is_independent(L, p):
        raise ValueError("base list L is linearly dependent")
    out = list(L)
    rank = len(out)
    for v in V:
        cand = out + [tuple(v)]
        r = mat_rank(cand, p)
        if r > rank:
            out = cand
            rank = r
    return out


def mat_mul_vec(M, v, p):
    return tuple(sum(mij * vj for mij, vj in zip(row, v)) % p for row in M)


def dot(u, v, p):
    return sum(a * b for a, b in zip(u, v)) % p


def quad_form(M, x, p):
    return dot(x, mat_mul_vec(M, x, p), p)


def bilinear(M, x, y, p):
    return dot(x, mat_mul_vec(M, y, p), p)


def all_vectors(p, n):
    """All of F_p^n in encoded order (little-endian base p)."""
    g = group(p, n)
    return [g.decode(i) for i in range(g.size)]


def mat_rank_bruteforce(rows, p) -> int:
    """Oracle for tests: size of a maximal independent subset of rows,
    checked by enumerating span sizes. Only sane for few/short rows."""
    rows = [tuple(r) for r in rows]
    span = {tuple([0] * len(rows[0]))} if rows else {()}
    rank = 0
    for r in rows:
        if r in span:
            continue
        # enlarge span by r
        span = {tuple((a + c * b) % p for a, b in zip(s, r))
                for s in span for c in range(p)}
        rank += 1
    return rank
