"""Binary strings, discrepancy, the tau / f_sigma recursions, growth
functions, chain validation and the closed-form complexity bounds.

Everything here is exact: growth functions with rational parameters are
evaluated in fractions.Fraction so the exhaustive lemma sweeps have no
float drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import gf
from .factors import QuadraticFactor, combine_matrices


@dataclass(frozen=True)
class GrowthFunction:
    """rho(x) = K*x (kind 'linear') or C*x^d (kind 'poly')."""
    kind: str
    C: Fraction
    d: int = 1

    def __call__(self, x):
        if self.kind not in ("linear", "poly"):
            raise ValueError(f"unknown growth kind {self.kind}")
        return self.C * x ** self.d

    def describe(self) -> str:
        if self.kind == "linear":
            return f"linear:{self.C}"
        return f"poly:{self.C},{self.d}"

    @staticmethod
    def parse(text: str) -> "GrowthFunction":
        kind, _, params = text.partition(":")
        if kind == "linear":
            return GrowthFunction("linear", Fraction(params))
        if kind == "poly":
            c, d = params.split(",")
            return GrowthFunction("poly", Fraction(c), int(d))
        raise ValueError(f"bad growth function syntax: {text!r}")


def linear_growth(K) -> GrowthFunction:
    return GrowthFunction("linear", Fraction(K))


def poly_growth(C, d) -> GrowthFunction:
    return GrowthFunction("poly", Fraction(C), int(d))


# -- binary strings ----------------------------------------------------------

def disc(s) -> int:
    """Sum of the +-1 entries."""
    assert all(b in (-1, 1) for b in s)
    return sum(s)


def ones_count(s) -> int:
    return sum(1 for b in s if b == 1)


def all_strings(length: int):
    return product((-1, 1), repeat=length)


# -- recursions --------------------------------------------------------------

def tau(rho, i: int, x, y):
    """tau_0(x,y) = x; tau_{j+1}(x,y) = tau_j + rho(tau_j + y - j)."""
    if i < 0:
        raise ValueError("i must be >= 0")
    t = Fraction(x) if isinstance(x, int) else x
    for j in range(i):
        t = t + rho(t + y - j)
    return t


def f_sigma(rho, s):
    """f_<> = (0,0); appending +1 gives (a+1, b+1); appending -1 gives
    (a + rho(a+b), b-1)."""
    a, b = Fraction(0), Fraction(0)
    for bit in s:
        if bit == 1:
            a, b = a + 1, b + 1
        elif bit == -1:
            a, b = a + rho(a + b), b - 1
        else:
            raise ValueError("string entries must be +-1")
    return a, b


def tau_closed_bound(C, k, i, x, y):
    """Closed-form domination of tau_i(x,y) for rho(z) <= C z^k (z >= 1),
    rho(z) >= z: 2^{i k^i} C^{i k^i} (x+y)^{k^i}."""
    e = k ** i
    return (Fraction(2) * C) ** (i * e) * Fraction(x + y) ** e


def corollary_chain_bound(C, d: int, m: int, k: int):
    """(l-bound, q-bound) for a realizable chain of length m with k addition
    steps: ((2C)^{(m-k) d^{m-k}} (2k)^{d^{m-k}}, 2k - m)."""
    if not (1 <= m and 0 <= k <= m):
        raise ValueError("need m >= 1 and 0 <= k <= m")
    e = d ** (m - k)
    lbound = (Fraction(2) * C) ** ((m - k) * e) * Fraction(2 * k) ** e
    return lbound, 2 * k - m


# -- chain validation --------------------------------------------------------

@dataclass
class ChainRecord:
    sigma: tuple
    factors: list  # length len(sigma)+1, factors[0] trivial


def _is_valid_deletion(B: QuadraticFactor, B2: QuadraticFactor, rho) -> bool:
    """Does B -> B2 match some rho-matrix deletion of B?"""
    if B2.q != B.q - 1 or B2.n != B.n or B2.p != B.p:
        return False
    p = B.p
    demand = rho(B.l + B.q)
    for coeffs in product(range(p), repeat=B.q):
        if all(c == 0 for c in coeffs):
            continue
        U = combine_matrices(B.Q, coeffs, p)
        if gf.mat_rank(U, p) >= demand:
            continue
        for kill in range(B.q):
            if coeffs[kill] == 0:
                continue
            if B.Q[:kill] + B.Q[kill + 1:] != B2.Q:
                continue
            # L2 must contain L, be minimal, and span L + rowspace(U)
            if B2.L[: B.l] != B.L:
                continue
            target = list(B.L) + list(gf.row_space_basis(U, p))
            dim = gf.mat_rank(target, p)
            if len(B2.L) != dim:
                continue
            if gf.mat_rank(list(B2.L) + target, p) != dim:
                continue
            return True
    return False


def _is_valid_addition(B: QuadraticFactor, B2: QuadraticFactor) -> bool:
    """+1 step: at most one new linear and one new quadratic generator,
    appended after the existing ones."""
    if B2.n != B.n or B2.p != B.p:
        return False
    if B2.L[: B.l] != B.L or B2.Q[: B.q] != B.Q:
        return False
    return B2.l - B.l <= 1 and B2.q - B.q <= 1 and B2.l >= B.l and B2.q >= B.q


def validate_chain(rho, chain: ChainRecord) -> bool:
    sigma = tuple(chain.sigma)
    fs = chain.factors
    if len(fs) != len(sigma) + 1:
        return False
    if fs[0].l != 0 or fs[0].q != 0:
        return False
    for i, bit in enumerate(sigma):
        if bit == 1:
            if not _is_valid_addition(fs[i], fs[i + 1]):
                return False
        elif bit == -1:
            if not _is_valid_deletion(fs[i], fs[i + 1], rho):
                return False
        else:
            return False
    # complexity bounds along the chain
    for i in range(len(sigma) + 1):
        prefix = sigma[:i]
        if not (0 <= fs[i].q <= disc(prefix)):
            return False
        a, b = f_sigma(rho, prefix)
        if not (fs[i].l <= a and fs[i].q <= b):
            return False
    return True
