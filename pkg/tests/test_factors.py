import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadreg import gf
from quadreg.chains import linear_growth
from quadreg.factors import (QuadraticFactor, factor_from_dict, factor_rank,
                             factor_to_dict, find_low_rank_combination,
                             rank_refine, refines, rho_matrix_delete,
                             trivial_factor)
from quadreg.generators import random_factor

from conftest import seeded_factors


def test_constructor_validation():
    with pytest.raises(ValueError):
        QuadraticFactor(3, 2, [], [[[1, 2], [1, 1]]])  # not symmetric
    with pytest.raises(ValueError):
        QuadraticFactor(3, 2, [(1, 0), (2, 0)], [])  # dependent L
    M = [[1, 0], [0, 1]]
    with pytest.raises(ValueError):
        QuadraticFactor(3, 2, [], [M, M])  # repeated matrix
    with pytest.raises(ValueError):
        QuadraticFactor(3, 2, [(1,)], [])  # wrong length


@given(st.integers(0, 10 ** 9))
@settings(max_examples=50, deadline=None)
def test_atoms_partition_group(seed):
    rng = np.random.default_rng(seed)
    B = random_factor(3, 2, 2, 2, rng)
    total = 0
    for e in B.all_labels():
        total += len(B.enumerate_atom(e))
    assert total == B.grp.size


@given(st.integers(0, 10 ** 9))
@settings(max_examples=50, deadline=None)
def test_label_of_matches_codes(seed):
    rng = np.random.default_rng(seed)
    B = random_factor(3, 2, 2, 2, rng)
    g = B.grp
    for x in range(g.size):
        lab = B.atom_label_of(g.decode(x))
        assert B.label_to_code(lab) == int(B.label_codes()[x])
        assert B.code_to_label(B.label_to_code(lab)) == lab


@given(st.integers(0, 10 ** 9))
@settings(max_examples=50, deadline=None)
def test_beta_q_symmetric_bilinear(seed):
    rng = np.random.default_rng(seed)
    B = random_factor(3, 3, 0, 2, rng)
    p, g = B.p, B.grp
    x, y, z = (g.decode(int(i)) for i in rng.integers(0, g.size, size=3))
    assert B.beta_Q(x, y) == B.beta_Q(y, x)
    yz = tuple((a + b) % p for a, b in zip(y, z))
    got = B.beta_Q(x, yz)
    expect = tuple((a + b) % p for a, b in zip(B.beta_Q(x, y), B.beta_Q(x, z)))
    assert got == expect


def test_bq_tables_match_scalar():
    B = QuadraticFactor(3, 2, [], [[[1, 2], [2, 0]], [[0, 1], [1, 1]]])
    g = B.grp
    tabs = B.bq_tables()
    for x in range(g.size):
        for y in range(g.size):
            assert tuple(int(tabs[i, x, y]) for i in range(B.q)) == \
                B.beta_Q(g.decode(x), g.decode(y))


def test_factor_rank_trivial_and_single():
    assert factor_rank(trivial_factor(3, 4)) == 4
    B = QuadraticFactor(3, 2, [], [[[1, 2], [2, 1]]])
    assert B.rank() == 1


@given(st.integers(0, 10 ** 9))
@settings(max_examples=30, deadline=None)
def test_factor_rank_is_min_over_combinations(seed):
    from itertools import product

    from quadreg.factors import combine_matrices
    rng = np.random.default_rng(seed)
    B = random_factor(3, 3, 0, 2, rng)
    if B.q == 0:
        assert B.rank() == B.n
        return
    best = min(gf.mat_rank_bruteforce(combine_matrices(B.Q, c, B.p), B.p)
               for c in product(range(B.p), repeat=B.q)
               if any(c))
    assert B.rank() == best


def test_rank_refine_spec_example():
    # [DERIVED] spec worked example: Q = {diag(1,1,0,0)} at p=3, n=4 with
    # rho(x) = 3x.  rank(diag(1,1,0,0)) = 2 < rho(1) = 3, so the matrix is
    # deleted and L picks up the 2-dimensional row space: complexity (2,0).
    B = QuadraticFactor(3, 4, [], [np.diag([1, 1, 0, 0]).tolist()])
    rho = linear_growth(3)
    B2, deletions, feasible = rank_refine(B, rho)
    assert B2.complexity() == (2, 0)
    assert deletions == 1
    # at q=0 the demand rho(2)=6 exceeds n=4: flagged infeasible
    assert feasible is False


def test_rank_refine_noop_when_high_rank():
    B = QuadraticFactor(3, 2, [], [[[1, 0], [0, 1]]])  # rank 2
    B2, deletions, feasible = rank_refine(B, linear_growth(1))
    assert B2 == B and deletions == 0 and feasible is True


def test_rho_matrix_delete_guards():
    with pytest.raises(ValueError):
        rho_matrix_delete(trivial_factor(3, 2), linear_growth(1))
    B = QuadraticFactor(3, 2, [], [[[1, 0], [0, 1]]])
    assert find_low_rank_combination(B, linear_growth(1)) is None
    with pytest.raises(ValueError):
        rho_matrix_delete(B, linear_growth(1))


def test_delete_keeps_low_rank_information():
    # the deleted combination's value is recoverable from the new linear
    # forms, so the refined factor refines the original
    B = QuadraticFactor(3, 3, [], [np.diag([1, 0, 0]).tolist(),
                                   np.diag([0, 1, 0]).tolist()])
    rho = linear_growth(2)  # demand rank >= 4 > n: everything is low-rank
    B2 = rho_matrix_delete(B, rho)
    assert B2.q == B.q - 1
    assert refines(B2, B)
    Bf, _, _ = rank_refine(B, rho)
    assert refines(Bf, B)


def test_refines_basic():
    B = QuadraticFactor(3, 2, [(1, 0)], [[[1, 0], [0, 1]]])
    coarse_l = QuadraticFactor(3, 2, [(1, 0)], [])
    coarse_q = QuadraticFactor(3, 2, [], [[[1, 0], [0, 1]]])
    assert refines(B, coarse_l)
    assert refines(B, coarse_q)
    assert refines(B, trivial_factor(3, 2))
    assert not refines(coarse_l, coarse_q)


def test_serialization_roundtrip():
    for B in seeded_factors(3, 2, 5, 2, 2, seed=7):
        assert factor_from_dict(factor_to_dict(B)) == B
