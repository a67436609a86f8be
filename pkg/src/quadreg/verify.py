"""Verification-suite runner: every exhaustive identity check from the
module invariants, at level "quick" (tiny instances) or "full" (adds the
n=3 items).  Emits diagnostics CSVs (size-lemma ratios, norm-equivalence
diffs) next to the machine-readable pass/fail report.
"""

from __future__ import annotations

import csv
import os
from fractions import Fraction
from itertools import product

import numpy as np

from . import gf, gowers, localnorms, vc2
from .chains import (GrowthFunction, all_strings, corollary_chain_bound, disc,
                     f_sigma, linear_growth, ones_count, poly_growth, tau,
                     tau_closed_bound)
from .factors import QuadraticFactor, trivial_factor
from .generators import generate_set, random_factor
from .gf import group
from .localnorms import (LocalLabelTuple, all_local_labels, fibre_size,
                         k111_members, norm_P_eighth, norm_TW_eighth,
                         omega_count, omega_predicted, sigma_label,
                         trivial_local_label)
from .regularity import index, pythagoras_check


# -- helpers -----------------------------------------------------------------

def span_set(vectors, p, n):
    span = {(0,) * n}
    for v in vectors:
        v = tuple(v)
        if v in span:
            continue
        span = {tuple((a + c * b) % p for a, b in zip(s, v))
                for s in span for c in range(p)}
    return span


def count_bad_w_tuples(B: QuadraticFactor, tuples: int = 4) -> int:
    """Number of (w_1..w_t) in G^t with L u {M w_i} not independent.
    DFS over w's with the current span as memo key."""
    g = B.grp
    p, n = B.p, B.n
    base = frozenset(span_set(B.L, p, n))
    mats = [np.array(M, dtype=np.int64) for M in B.Q]
    E = g.coords
    mw = [((E @ M.T) % p) for M in mats]  # mw[i][w] = M_i w (decoded rows)
    memo = {}

    def good(span, depth):
        key = (span, depth)
        if key in memo:
            return memo[key]
        if depth == 0:
            memo[key] = 1
            return 1
        total = 0
        for w in range(g.size):
            s = set(span)
            ok = True
            for i in range(len(mats)):
                v = tuple(int(c) for c in mw[i][w])
                if v in s:
                    ok = False
                    break
                s = {tuple((a + c * b) % p for a, b in zip(t, v))
                     for t in s for c in range(p)}
            if ok:
                total += good(frozenset(s), depth - 1)
        memo[key] = total
        return total

    return g.size ** tuples - good(base, tuples)


def count_bad_x(B: QuadraticFactor, S) -> int:
    """|{x : L u {Mw: w in S} u {Mx} not independent}| by brute force."""
    p, n = B.p, B.n
    g = B.grp
    base = list(B.L)
    for w in S:
        wd = g.decode(w)
        for M in B.Q:
            base.append(gf.mat_mul_vec(M, wd, p))
    base_rank = gf.mat_rank(base, p)
    assert base_rank == len(base), "S does not keep the base independent"
    bad = 0
    for x in range(g.size):
        xd = g.decode(x)
        vecs = base + [gf.mat_mul_vec(M, xd, p) for M in B.Q]
        if gf.mat_rank(vecs, p) < len(vecs):
            bad += 1
    return bad


# -- checks ------------------------------------------------------------------

def check_rank_oracle(level):
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        rows = rng.integers(0, 3, size=(int(rng.integers(1, 6)), n))
        rows = [tuple(int(v) for v in r) for r in rows]
        if gf.mat_rank(rows, 3) != gf.mat_rank_bruteforce(rows, 3):
            return {"ok": False, "detail": f"rank mismatch on {rows}"}
        cols = list(zip(*rows))
        if gf.mat_rank(rows, 3) != gf.mat_rank(cols, 3):
            return {"ok": False, "detail": "rank != transpose rank"}
    return {"ok": True}


def check_atoms_partition(level):
    rng = np.random.default_rng(5)
    n = 3 if level == "full" else 2
    for _ in range(10):
        B = random_factor(3, n, 2, 1, rng)
        sizes = sum(len(B.enumerate_atom(lab)) for lab in B.all_labels())
        if sizes != B.grp.size:
            return {"ok": False, "detail": f"atoms don't cover G for {B}"}
    return {"ok": True}


def check_constraints_equivalence(level):
    rng = np.random.default_rng(7)
    for _ in range(3):
        B = random_factor(3, 2, 2, 1, rng)
        N = B.grp.size
        idx = np.arange(N)
        X, H1, H2, H3 = np.meshgrid(idx, idx, idx, idx, indexing="ij")
        for e in B.all_labels():
            a = localnorms.omega_member_definitional_bulk(B, e, X, H1, H2, H3)
            b = localnorms.omega_member_constraints_bulk(B, e, X, H1, H2, H3)
            if not np.array_equal(a, b):
                return {"ok": False, "detail": f"disagreement for {B}, {e}"}
    if level == "full":
        B = random_factor(3, 4, 2, 2, rng)
        N = B.grp.size
        T = 10 ** 5
        X, H1, H2, H3 = (rng.integers(0, N, size=T) for _ in range(4))
        e = B.atom_label_of(B.grp.decode(int(rng.integers(0, N))))
        a = localnorms.omega_member_definitional_bulk(B, e, X, H1, H2, H3)
        b = localnorms.omega_member_constraints_bulk(B, e, X, H1, H2, H3)
        if not np.array_equal(a, b):
            return {"ok": False, "detail": "random disagreement at n=4"}
    return {"ok": True}


def check_omega_identity(level):
    rng = np.random.default_rng(13)
    n = 3 if level == "full" else 2
    for _ in range(5):
        B = random_factor(3, n, 1, 1, rng)
        for e in B.all_labels():
            ind = B.atom_indicator(e).astype(np.int64)
            if omega_count(B, e) != gowers.u3_eighth_naive(ind, B.grp):
                return {"ok": False, "detail": f"omega mismatch {B} {e}"}
    return {"ok": True}


def check_sigma1(level):
    rng = np.random.default_rng(17)
    B = random_factor(3, 2, 1, 1, rng)
    for d in all_local_labels(B):
        e = sigma_label(B, d)
        code = B.label_to_code(e)
        lc = B.label_codes()
        for (x, y, z) in k111_members(B, d)[:50]:
            s = B.grp.add[B.grp.add[x, y], z]
            if lc[s] != code:
                return {"ok": False, "detail": f"triple sums outside atom {d}"}
    return {"ok": True}


def check_psi(level):
    g = group(3, 1)
    from collections import Counter
    fibres = Counter()
    for t in product(range(g.size), repeat=6):
        fibres[localnorms.psi_map(g, *t)] += 1
    if set(fibres.values()) != {g.size ** 2}:
        return {"ok": False, "detail": "fibre sizes off"}
    if len(fibres) != g.size ** 4:
        return {"ok": False, "detail": "psi not surjective"}
    return {"ok": True}


def check_rewritenorm(level):
    rng = np.random.default_rng(19)
    for n in (1, 2):
        g = group(3, n)
        for _ in range(3):
            f = rng.uniform(-1, 1, g.size)
            lhs = gowers.u3_eighth_naive(f, g)
            rhs = gowers.rewrite_sum_g6(f, g) / g.size ** 2
            if abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs)):
                return {"ok": False, "detail": f"rewrite identity off at n={n}"}
    return {"ok": True}


def check_chains(level):
    cap = 10 if level == "full" else 7
    rhos = [(linear_growth(1), Fraction(2), 1), (linear_growth(2), Fraction(2), 1),
            (poly_growth(1, 2), Fraction(2), 2), (poly_growth(3, 2), Fraction(3), 2)]
    for rho, C, dd in rhos:
        for m in range(cap + 1):
            for s in all_strings(m):
                a, b = f_sigma(rho, s)
                if disc(s) >= 0:
                    k = ones_count(s)
                    if m >= 1:
                        lb, qb = corollary_chain_bound(C, dd, m, k)
                        if a > lb or b != 2 * k - m:
                            return {"ok": False, "detail": f"chain bound {s}"}
    return {"ok": True}


def check_vc2_baselines(level):
    g = group(3, 2)
    empty = np.zeros(g.size, dtype=bool)
    full = np.ones(g.size, dtype=bool)
    if vc2.vc2_dim(empty, g)[0] != 0 or vc2.vc2_dim(full, g)[0] != 0:
        return {"ok": False, "detail": "empty/full baseline broken"}
    rng = np.random.default_rng(23)
    for _ in range(10):
        A = rng.random(g.size) < 0.5
        t = int(rng.integers(0, g.size))
        shifted = A[g.add[g.neg[t], :]]
        if vc2.vc2_dim(A, g, 2) != vc2.vc2_dim(shifted, g, 2):
            return {"ok": False, "detail": "translation variance"}
    return {"ok": True}


def check_badcount1(level):
    rng = np.random.default_rng(29)
    n = 3 if level == "full" else 2
    tried = 0
    for _ in range(30):
        B = random_factor(3, n, 1, 1, rng)
        r = B.rank()
        for k in (0, 1):
            if k == 0:
                S = []
            else:
                S = [int(rng.integers(0, B.grp.size))]
                base = list(B.L)
                for w in S:
                    wd = B.grp.decode(w)
                    for M in B.Q:
                        base.append(gf.mat_mul_vec(M, wd, B.p))
                if gf.mat_rank(base, B.p) < len(base):
                    continue
            bad = count_bad_x(B, S)
            bound = B.p ** (n + B.l + (k + 1) * B.q - r)
            if bad > bound:
                return {"ok": False,
                        "detail": f"badcount1 violated: {bad} > {bound}"}
            tried += 1
    return {"ok": tried > 0, "detail": f"{tried} instances"}


def check_omegagood(level):
    rng = np.random.default_rng(31)
    n = 3 if level == "full" else 2
    for _ in range(6):
        B = random_factor(3, n, 1, 1, rng)
        r = B.rank()
        bad = count_bad_w_tuples(B)
        bound = 14 * B.p ** (4 * n + B.l + 4 * B.q - r)
        if bad > bound:
            return {"ok": False, "detail": f"omegagood violated: {bad} > {bound}"}
    return {"ok": True}


def check_pythagoras(level):
    rng = np.random.default_rng(37)
    g = group(3, 2)
    for _ in range(20):
        A = rng.random(g.size) < rng.uniform(0.2, 0.8)
        kp = int(rng.integers(1, 4))
        labels = rng.integers(0, kp, size=g.size)
        parts = [np.nonzero(labels == i)[0] for i in range(kp)
                 if np.any(labels == i)]
        sub = rng.integers(0, 2, size=g.size)
        refined = []
        for P in parts:
            for v in (0, 1):
                Q = P[sub[P] == v]
                if len(Q):
                    refined.append(Q)
        pythagoras_check(A, parts, refined, g.size)
    return {"ok": True}


# -- diagnostics CSVs --------------------------------------------------------

def write_size_diagnostics(path, level):
    """Observed vs predicted sizes: atoms, fibres, omega counts, and the
    weighted triple-product average (should hover near 1 at high rank)."""
    rng = np.random.default_rng(41)
    n = 3 if level == "full" else 2
    rows = []
    for fi in range(3):
        B = random_factor(3, n, 1, 1, rng)
        r = B.rank()
        pred_atom = float(B.p) ** (B.n - B.l - B.q)
        for e in B.all_labels():
            rows.append({
                "factor": fi, "rank": r, "kind": "atom",
                "label": str(e), "observed": len(B.enumerate_atom(e)),
                "predicted": pred_atom,
            })
        for dp in product(range(B.p), repeat=B.q):
            rows.append({
                "factor": fi, "rank": r, "kind": "fibre",
                "label": str(dp), "observed": fibre_size(B, dp),
                "predicted": float(B.p) ** (2 * B.n - B.q),
            })
        for e in B.all_labels():
            rows.append({
                "factor": fi, "rank": r, "kind": "omega",
                "label": str(e), "observed": omega_count(B, e),
                "predicted": omega_predicted(B),
            })
        # weighted triple-product average vs 1 on a sample of label tuples
        N = B.grp.size
        for d in list(all_local_labels(B))[:5]:
            sizes = [len(B.enumerate_atom(lab)) for lab in (d.d_a, d.d_b, d.d_c)]
            fibres = [fibre_size(B, x) for x in (d.d_ab, d.d_ac, d.d_bc)]
            if 0 in sizes or 0 in fibres:
                continue
            k111 = len(k111_members(B, d))
            denom = 1.0
            for s in sizes:
                denom *= s
            for s in fibres:
                denom *= s
            rows.append({
                "factor": fi, "rank": r, "kind": "triple_product_avg",
                "label": str(d), "observed": k111 * float(N) ** 6 / denom / N ** 3,
                "predicted": 1.0,
            })
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["factor", "rank", "kind", "label",
                                           "observed", "predicted"])
        w.writeheader()
        w.writerows(rows)


def write_norm_equivalence_diagnostics(path, level):
    """norm-equivalence diffs for nontrivial factors (never asserted)."""
    rng = np.random.default_rng(43)
    n = 3 if level == "full" else 2
    rows = []
    for fi in range(2):
        B = random_factor(3, n, 1, 1, rng)
        f = rng.uniform(-1, 1, B.grp.size)
        count = 0
        for d in all_local_labels(B):
            if count >= 6:
                break
            e = sigma_label(B, d)
            rep = localnorms.norm_equivalence_report(f, B, e, d)
            if rep["degenerate"]:
                continue
            count += 1
            rows.append({
                "factor": fi, "rank": rep["rank"], "label": str(e),
                "atom_size": rep["atom_size"],
                "omega_count": rep["omega_count"],
                "omega_predicted": rep["omega_predicted"],
                "normP8": rep["p8"], "normTW8": rep["tw8"],
                "diff": rep["diff"],
            })
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["factor", "rank", "label",
                                           "atom_size", "omega_count",
                                           "omega_predicted", "normP8",
                                           "normTW8", "diff"])
        w.writeheader()
        w.writerows(rows)


CHECKS = [
    ("rank_oracle", check_rank_oracle),
    ("atoms_partition", check_atoms_partition),
    ("constraints_equivalence", check_constraints_equivalence),
    ("omega_identity", check_omega_identity),
    ("sigma_label_sum", check_sigma1),
    ("psi_fibres", check_psi),
    ("rewrite_identity", check_rewritenorm),
    ("chain_bounds", check_chains),
    ("vc2_baselines", check_vc2_baselines),
    ("badcount1_bound", check_badcount1),
    ("omegagood_bound", check_omegagood),
    ("pythagoras", check_pythagoras),
]


def verify_suite(level: str = "quick", out_dir: str | None = None) -> dict:
    if level not in ("quick", "full"):
        raise ValueError("level must be quick or full")
    results = {}
    ok = True
    for name, fn in CHECKS:
        res = fn(level)
        results[name] = res
        ok = ok and res["ok"]
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        write_size_diagnostics(os.path.join(out_dir, "size_diagnostics.csv"), level)
        write_norm_equivalence_diagnostics(
            os.path.join(out_dir, "norm_equivalence.csv"), level)
    return {"ok": ok, "level": level, "checks": results}
