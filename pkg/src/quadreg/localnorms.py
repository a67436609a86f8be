"""Local U^3 norms relative to a quadratic factor: the cube-tuple sets
Omega_B, the label-constrained sets K111/K222, the label sum Sigma(d), the
change of variables Psi, the restricted-norm (atom-normalized) and the
weighted-expectation (fibre-weighted) eighth powers, and the machinery
relating them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import gowers
from .factors import QuadraticFactor


class DegenerateLabelError(ValueError):
    """A referenced atom or fibre is empty, so the weighted expectation is
    undefined (the mu normalizers divide by the fibre size)."""


@dataclass(frozen=True)
class LocalLabelTuple:
    """d = (d1, d2): atom labels (d_a, d_b, d_c) plus pair values
    (d_ab, d_ac, d_bc) in F_p^q."""
    d_a: tuple
    d_b: tuple
    d_c: tuple
    d_ab: tuple
    d_ac: tuple
    d_bc: tuple


def trivial_local_label(B: QuadraticFactor) -> LocalLabelTuple:
    zero = ((0,) * B.l, (0,) * B.q)
    zq = (0,) * B.q
    return LocalLabelTuple(zero, zero, zero, zq, zq, zq)


def all_local_labels(B: QuadraticFactor):
    labels = list(B.all_labels())
    pairs = list(product(range(B.p), repeat=B.q))
    for d_a in labels:
        for d_b in labels:
            for d_c in labels:
                for d_ab in pairs:
                    for d_ac in pairs:
                        for d_bc in pairs:
                            yield LocalLabelTuple(d_a, d_b, d_c, d_ab, d_ac, d_bc)


def sigma_label(B: QuadraticFactor, d: LocalLabelTuple):
    """The atom label of x+y+z for any (x,y,z) in K111(d):
    d_a + d_b + d_c + 2(0|d_ab) + 2(0|d_ac) + 2(0|d_bc); only the quadratic
    coordinates pick up the pair contributions."""
    p = B.p
    lin = tuple((a + b + c) % p
                for a, b, c in zip(d.d_a[0], d.d_b[0], d.d_c[0]))
    quad = tuple((a + b + c + 2 * (u + v + w)) % p
                 for a, b, c, u, v, w in zip(d.d_a[1], d.d_b[1], d.d_c[1],
                                             d.d_ab, d.d_ac, d.d_bc))
    return (lin, quad)


# -- Omega_B -----------------------------------------------------------------

def _cube_points(grp, x, h1, h2, h3):
    a = grp.add
    return (x, a[x, h1], a[x, h2], a[x, h3],
            a[a[x, h1], h2], a[a[x, h1], h3], a[a[x, h2], h3],
            a[a[a[x, h1], h2], h3])


def omega_member_definitional(B: QuadraticFactor, e, x, h1, h2, h3) -> bool:
    """All eight cube points lie in atom B(e)."""
    code = B.label_to_code(e)
    lc = B.label_codes()
    return all(lc[pt] == code for pt in _cube_points(B.grp, x, h1, h2, h3))


def omega_member_constraints(B: QuadraticFactor, e, x, h1, h2, h3) -> bool:
    """Equivalent predicate: x in B(e); h_i in L(0); 2 b_Q(x,h_i) = -b_Q(h_i,h_i);
    b_Q(h_i,h_j) = 0 for i != j."""
    p = B.p
    lc = B.label_codes()
    if lc[x] != B.label_to_code(e):
        return False
    hs = [B.grp.decode(h) for h in (h1, h2, h3)]
    xd = B.grp.decode(x)
    for h in hs:
        if any(v != 0 for v in B.beta_L(h)):
            return False
        bxh = B.beta_Q(xd, h)
        bhh = B.beta_Q(h, h)
        if any((2 * a + b) % p != 0 for a, b in zip(bxh, bhh)):
            return False
    for i in range(3):
        for j in range(i + 1, 3):
            if any(v != 0 for v in B.beta_Q(hs[i], hs[j])):
                return False
    return True


def omega_member_definitional_bulk(B, e, X, H1, H2, H3) -> np.ndarray:
    code = B.label_to_code(e)
    lc = B.label_codes()
    pts = _cube_points(B.grp, np.asarray(X), np.asarray(H1),
                       np.asarray(H2), np.asarray(H3))
    ok = np.ones(np.shape(pts[0]), dtype=bool)
    for pt in pts:
        ok &= lc[pt] == code
    return ok


def omega_member_constraints_bulk(B, e, X, H1, H2, H3) -> np.ndarray:
    p = B.p
    X = np.asarray(X)
    lc = B.label_codes()
    ok = lc[X] == B.label_to_code(e)
    lin0 = _linear_zero_mask(B)
    bq = B.bq_tables() if B.q else None
    Hs = [np.asarray(H) for H in (H1, H2, H3)]
    for H in Hs:
        ok &= lin0[H]
        if B.q:
            for i in range(B.q):
                ok &= (2 * bq[i][X, H] + bq[i][H, H]) % p == 0
    if B.q:
        for a in range(3):
            for b in range(a + 1, 3):
                for i in range(B.q):
                    ok &= bq[i][Hs[a], Hs[b]] == 0
    return ok


def _linear_zero_mask(B: QuadraticFactor) -> np.ndarray:
    """Indicator over encoded elements of membership in L(0)."""
    g = B.grp
    mask = np.ones(g.size, dtype=bool)
    for r in B.L:
        mask &= (g.coords @ np.array(r, dtype=np.int64)) % B.p == 0
    return mask


def _omega_h_sets(B: QuadraticFactor, e):
    """For each x in B(e): the encoded h's satisfying the single-h
    constraints, plus the pairwise-orthogonality matrix over those h's."""
    atom = B.enumerate_atom(e)
    lin0 = np.nonzero(_linear_zero_mask(B))[0]
    bq = B.bq_tables() if B.q else None
    for x in atom:
        if B.q:
            ok = np.ones(len(lin0), dtype=bool)
            for i in range(B.q):
                ok &= (2 * bq[i][x, lin0] + bq[i][lin0, lin0]) % B.p == 0
            hs = lin0[ok]
            pair_ok = np.ones((len(hs), len(hs)), dtype=bool)
            for i in range(B.q):
                pair_ok &= bq[i][np.ix_(hs, hs)] == 0
        else:
            hs = lin0
            pair_ok = np.ones((len(hs), len(hs)), dtype=bool)
        yield int(x), hs, pair_ok


def omega_count(B: QuadraticFactor, e) -> int:
    """|Omega_{B(e)}| by constrained enumeration; equals the eighth-power
    cube sum of the atom indicator."""
    total = 0
    for _x, hs, pair_ok in _omega_h_sets(B, e):
        P = pair_ok.astype(np.int64)
        total += int(np.einsum("ab,ac,bc->", P, P, P))
    return total


def omega_predicted(B: QuadraticFactor) -> float:
    return float(B.p) ** (4 * B.n - 4 * B.l - 7 * B.q)


def omega_members(B: QuadraticFactor, e):
    """Explicit list of (x,h1,h2,h3) tuples; tiny instances only."""
    out = []
    for x, hs, pair_ok in _omega_h_sets(B, e):
        m = len(hs)
        for i in range(m):
            for j in range(m):
                if not pair_ok[i, j]:
                    continue
                for k in range(m):
                    if pair_ok[i, k] and pair_ok[j, k]:
                        out.append((x, int(hs[i]), int(hs[j]), int(hs[k])))
    return out


# -- the two local norms -----------------------------------------------------

def norm_P_eighth(f, B: QuadraticFactor, e) -> float:
    """u3_eighth(f * 1_{B(e)}) / |Omega_{B(e)}|, with a 0 fallback when the
    numerator vanishes (covers empty atoms)."""
    v = gowers.as_values(f, B.grp).astype(np.float64)
    restricted = v * B.atom_indicator(e)
    num = gowers.u3_eighth_fast(restricted, B.grp)
    if abs(num) < 1e-12:
        return 0.0
    return num / omega_count(B, e)


def fibre_size(B: QuadraticFactor, d_pair) -> int:
    """|{(x,y) in G^2 : beta_Q(x,y) = d_pair}|."""
    if B.q == 0:
        return B.grp.size ** 2
    bq = B.bq_tables()
    ok = np.ones((B.grp.size, B.grp.size), dtype=bool)
    for i in range(B.q):
        ok &= bq[i] == d_pair[i]
    return int(ok.sum())


def _pair_mask(B, members, d_pair, others=None):
    """Boolean mask over `members` of beta_Q(x, m) == d_pair for all x in
    `others` (encoded)."""
    ok = np.ones(len(members), dtype=bool)
    if B.q == 0:
        return ok
    bq = B.bq_tables()
    for x in others:
        for i in range(B.q):
            ok &= bq[i][x, members] == d_pair[i]
    return ok


def k222_sum(f, B: QuadraticFactor, d: LocalLabelTuple):
    """sum over K222(d) of prod_{i,j,k} f(x_i+y_j+z_k), by constraint
    propagation: for each pair (x1,x2) in B(d_a)^2 the (y,z) sum is
    ||W W^T||_F^2 for W[y,z] = f-products gated by the cross constraints."""
    g = B.grp
    v = gowers.as_values(f, g).astype(np.float64)
    Xa = B.enumerate_atom(d.d_a)
    Yb = B.enumerate_atom(d.d_b)
    Zc = B.enumerate_atom(d.d_c)
    bq = B.bq_tables() if B.q else None
    total = 0.0
    for x1 in Xa:
        for x2 in Xa:
            ys = Yb[_pair_mask(B, Yb, d.d_ab, (x1, x2))]
            if len(ys) == 0:
                continue
            zs = Zc[_pair_mask(B, Zc, d.d_ac, (x1, x2))]
            if len(zs) == 0:
                continue
            # W[y, z] = f(x1+y+z) f(x2+y+z) * [beta_Q(y,z) = d_bc]
            s1 = g.add[g.add[x1, ys][:, None], zs[None, :]]
            s2 = g.add[g.add[x2, ys][:, None], zs[None, :]]
            W = v[s1] * v[s2]
            if B.q:
                cross = np.ones(W.shape, dtype=bool)
                for i in range(B.q):
                    cross &= bq[i][np.ix_(ys, zs)] == d.d_bc[i]
                W = W * cross
            M = W @ W.T
            total += float((M * M).sum())
    return total


def k222_members(B: QuadraticFactor, d: LocalLabelTuple):
    """Explicit 6-tuples (x1,x2,y1,y2,z1,z2) of K222(d); tiny n only."""
    g = B.grp
    Xa = B.enumerate_atom(d.d_a)
    Yb = B.enumerate_atom(d.d_b)
    Zc = B.enumerate_atom(d.d_c)
    bq = B.bq_tables() if B.q else None
    out = []
    for x1 in Xa:
        for x2 in Xa:
            ys = Yb[_pair_mask(B, Yb, d.d_ab, (x1, x2))]
            zs = Zc[_pair_mask(B, Zc, d.d_ac, (x1, x2))]
            for y1 in ys:
                for y2 in ys:
                    for z1 in zs:
                        for z2 in zs:
                            if B.q:
                                bad = False
                                for y in (y1, y2):
                                    for z in (z1, z2):
                                        for i in range(B.q):
                                            if bq[i][y, z] != d.d_bc[i]:
                                                bad = True
                                if bad:
                                    continue
                            out.append((int(x1), int(x2), int(y1), int(y2),
                                        int(z1), int(z2)))
    return out


def k111_members(B: QuadraticFactor, d: LocalLabelTuple):
    """Triples (x,y,z) with the three atom labels and three pair values."""
    bq = B.bq_tables() if B.q else None
    out = []
    for x in B.enumerate_atom(d.d_a):
        for y in B.enumerate_atom(d.d_b):
            if B.q and any(bq[i][x, y] != d.d_ab[i] for i in range(B.q)):
                continue
            for z in B.enumerate_atom(d.d_c):
                if B.q and (any(bq[i][x, z] != d.d_ac[i] for i in range(B.q))
                            or any(bq[i][y, z] != d.d_bc[i] for i in range(B.q))):
                    continue
                out.append((int(x), int(y), int(z)))
    return out


def norm_TW_eighth(f, B: QuadraticFactor, d: LocalLabelTuple) -> float:
    """The weighted 6-fold expectation: two independent draws from each of
    the three atoms, with fibre-indicator weights mu_Gamma = |G|^2/|Gamma| 1_Gamma
    on all twelve cross pairs.  Expanding the twelve mu factors gives

        |G|^24 * (prod atom sizes)^-2 * (prod fibre sizes)^-4 * k222_sum.
    """
    sizes = [len(B.enumerate_atom(lab)) for lab in (d.d_a, d.d_b, d.d_c)]
    fibres = [fibre_size(B, dp) for dp in (d.d_ab, d.d_ac, d.d_bc)]
    if any(s == 0 for s in sizes) or any(s == 0 for s in fibres):
        raise DegenerateLabelError(f"empty atom or fibre for {d}")
    N = B.grp.size
    s = k222_sum(f, B, d)
    norm = float(N) ** 24
    for sz in sizes:
        norm /= float(sz) ** 2
    for fb in fibres:
        norm /= float(fb) ** 4
    return norm * s


# -- change of variables -----------------------------------------------------

def psi_map(grp, x1, x2, y1, y2, z1, z2):
    """(x1+y1+z1, x2-x1, y2-y1, z2-z1), all encoded."""
    a, neg = grp.add, grp.neg
    return (a[a[x1, y1], z1], a[x2, neg[x1]], a[y2, neg[y1]], a[z2, neg[z1]])


def preimage_intersection(B: QuadraticFactor, d: LocalLabelTuple, e,
                          w, ha, hb, hc):
    """Psi^{-1}(w,ha,hb,hc) intersected with K222(d), via the X/Y
    parametrization: the 6-tuples are
    (x, x+ha, y, y+hb, w-x-y, w-x-y+hc) for x in X, y in Y with
    beta_Q(x,y) = d_ab, where X and Y carry the displayed constraints.
    Requires Sigma(d) = e and (w,ha,hb,hc) in Omega_{B(e)}."""
    assert sigma_label(B, d) == e
    p, g = B.p, B.grp
    had = g.decode(ha)
    hbd = g.decode(hb)
    hcd = g.decode(hc)
    wd = g.decode(w)

    def xset():
        out = []
        target = tuple((a + b + c) % p
                       for a, b, c in zip(d.d_a[1], d.d_ac, d.d_ab))
        for x in B.enumerate_atom(d.d_a):
            xd = g.decode(x)
            if any(v != 0 for v in B.beta_Q(xd, hbd)):
                continue
            if any(v != 0 for v in B.beta_Q(xd, hcd)):
                continue
            if any((2 * a + b) % p != 0
                   for a, b in zip(B.beta_Q(xd, had), B.beta_Q(had, had))):
                continue
            if B.beta_Q(xd, wd) != target:
                continue
            out.append(int(x))
        return out

    def yset():
        out = []
        target = tuple((a + b + c) % p
                       for a, b, c in zip(d.d_b[1], d.d_bc, d.d_ab))
        for y in B.enumerate_atom(d.d_b):
            yd = g.decode(y)
            if any(v != 0 for v in B.beta_Q(yd, had)):
                continue
            if any(v != 0 for v in B.beta_Q(yd, hcd)):
                continue
            if any((2 * a + b) % p != 0
                   for a, b in zip(B.beta_Q(yd, hbd), B.beta_Q(hbd, hbd))):
                continue
            if B.beta_Q(yd, wd) != target:
                continue
            out.append(int(y))
        return out

    out = set()
    a, neg = g.add, g.neg
    for x in xset():
        for y in yset():
            if B.q and B.beta_Q(g.decode(x), g.decode(y)) != d.d_ab:
                continue
            z = a[a[w, neg[x]], neg[y]]
            out.add((x, int(a[x, ha]), y, int(a[y, hb]), int(z), int(a[z, hc])))
    return out


# -- reporting ---------------------------------------------------------------

def norm_equivalence_report(f, B: QuadraticFactor, e, d: LocalLabelTuple) -> dict:
    """Both eighth powers and their difference; never asserted for nontrivial
    factors (the equivalence error depends on an unspecified rank constant)."""
    assert sigma_label(B, d) == e
    p8 = norm_P_eighth(f, B, e)
    try:
        tw8 = norm_TW_eighth(f, B, d)
        degenerate = False
    except DegenerateLabelError:
        tw8 = float("nan")
        degenerate = True
    oc = omega_count(B, e)
    return {
        "p8": p8,
        "tw8": tw8,
        "diff": tw8 - p8 if not degenerate else float("nan"),
        "degenerate": degenerate,
        "rank": B.rank(),
        "omega_count": oc,
        "omega_predicted": omega_predicted(B),
        "atom_size": int(len(B.enumerate_atom(e))),
    }
