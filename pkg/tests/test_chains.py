from fractions import Fraction

import numpy as np
import pytest

from quadreg import chains
from quadreg.chains import (ChainRecord, GrowthFunction, all_strings,
                            corollary_chain_bound, disc, f_sigma,
                            linear_growth, ones_count, poly_growth, tau,
                            tau_closed_bound, validate_chain)
from quadreg.factors import QuadraticFactor, rho_matrix_delete, trivial_factor

RHOS = [linear_growth(1), linear_growth(2), poly_growth(1, 2), poly_growth(3, 2)]


def test_growth_parse_describe():
    for text in ["linear:1", "linear:2", "poly:1,2", "poly:3,2", "linear:1/2"]:
        r = GrowthFunction.parse(text)
        assert GrowthFunction.parse(r.describe()) == r
    assert GrowthFunction.parse("poly:3,2")(2) == 12
    assert linear_growth(2)(Fraction(5, 2)) == 5
    with pytest.raises(ValueError):
        GrowthFunction.parse("exp:2")


def test_disc_and_ones():
    assert disc((1, 1, -1)) == 1
    assert ones_count((1, 1, -1)) == 2
    assert disc(()) == 0
    with pytest.raises(AssertionError):
        disc((1, 0))


def test_tau_worked_example():
    # [DERIVED] spec worked example: rho(z) = 2z gives tau_2(5,3) = 67
    rho = linear_growth(2)
    assert tau(rho, 0, 5, 3) == 5
    assert tau(rho, 1, 5, 3) == 21
    assert tau(rho, 2, 5, 3) == 67


def test_f_sigma_worked_example():
    # [DERIVED] spec worked example: rho(z) = z, sigma = (1,1,-1) -> (6,1)
    assert f_sigma(linear_growth(1), (1, 1, -1)) == (6, 1)
    assert f_sigma(linear_growth(1), ()) == (0, 0)
    assert f_sigma(linear_growth(1), (1,)) == (1, 1)


def test_f_sigma_all_ones_prefix():
    # k leading ones give exactly (k, k)
    for rho in RHOS:
        for k in range(1, 6):
            assert f_sigma(rho, (1,) * k) == (k, k)


def test_tau_matches_theta_string():
    # f_{theta} = (tau_{m-k}(k,k), 2k-m) for the front-loaded string
    for rho in RHOS:
        for k in range(1, 5):
            for m in range(k, 2 * k + 1):
                theta = (1,) * k + (-1,) * (m - k)
                a, b = f_sigma(rho, theta)
                assert a == tau(rho, m - k, k, k)
                assert b == 2 * k - m


def test_closed_bounds_monotone_sanity():
    b = tau_closed_bound(Fraction(2), 1, 2, 5, 3)
    assert b == (4 ** 2) * 8  # (2C)^{i k^i} (x+y)^{k^i} with k=1
    lb, qb = corollary_chain_bound(Fraction(2), 1, 3, 2)
    assert qb == 1
    assert lb == 4 * 4  # (2C)^{(m-k) d^{m-k}} (2k)^{d^{m-k}} = 4^1 * 4^1
    with pytest.raises(ValueError):
        corollary_chain_bound(Fraction(2), 1, 0, 0)


def build_sample_chain():
    # trivial -> add (v, M) -> add M2 -> delete under rho(x)=3x
    p, n = 3, 3
    rho = linear_growth(3)
    B0 = trivial_factor(p, n)
    B1 = QuadraticFactor(p, n, [(1, 0, 0)], [np.diag([1, 1, 1]).tolist()])
    B2 = QuadraticFactor(p, n, [(1, 0, 0)],
                         [np.diag([1, 1, 1]).tolist(), np.diag([1, 1, 0]).tolist()])
    B3 = rho_matrix_delete(B2, rho)
    return rho, ChainRecord(sigma=(1, 1, -1), factors=[B0, B1, B2, B3])


def test_validate_chain_accepts_valid():
    rho, rec = build_sample_chain()
    assert validate_chain(rho, rec)


def test_validate_chain_rejects_tampering():
    rho, rec = build_sample_chain()
    # wrong start
    bad = ChainRecord(rec.sigma, [rec.factors[1]] + rec.factors[1:])
    assert not validate_chain(rho, bad)
    # wrong length
    bad = ChainRecord(rec.sigma[:-1], rec.factors)
    assert not validate_chain(rho, bad)
    # deletion step replaced by an unrelated factor
    wrong = QuadraticFactor(3, 3, [(0, 0, 1)], [])
    bad = ChainRecord(rec.sigma, rec.factors[:-1] + [wrong])
    assert not validate_chain(rho, bad)


def test_validate_chain_empty():
    assert validate_chain(linear_growth(1),
                          ChainRecord((), [trivial_factor(3, 2)]))


def test_all_strings_count():
    assert sum(1 for _ in all_strings(4)) == 16
    assert list(all_strings(0)) == [()]
