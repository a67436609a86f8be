"""Energy-increment machinery: the index (mean-square density) potential,
the quadratic-phase correlation oracle, the global decomposition and the
cylinder decomposition, plus the end-to-end assembly that extracts an
approximating union of atoms.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import gf, gowers, localnorms
from .chains import ChainRecord, GrowthFunction, disc, ones_count, validate_chain
from .factors import QuadraticFactor, rank_refine, rho_matrix_delete, trivial_factor
from .gf import Group, group


class OracleFailure(RuntimeError):
    def __init__(self, cells, state=None):
        super().__init__(f"no inverse witness for {len(cells)} cell(s)")
        self.cells = cells
        self.state = state


class BudgetExceeded(RuntimeError):
    def __init__(self, state=None):
        super().__init__("step budget exceeded")
        self.state = state


@dataclass
class RunConfig:
    c_inv: int = 4
    exhaustive_cap: int = 10 ** 7
    attempts: int = 2000
    max_steps: int | None = None
    seed: int = 0
    oracle: str = "exhaustive"  # or "randomized"
    threads: int | None = None

    def threshold(self, delta: float) -> float:
        return delta ** self.c_inv / self.c_inv

    def budget(self, delta: float) -> int:
        if self.max_steps is not None:
            return self.max_steps
        return int(np.ceil(self.c_inv ** 2 * delta ** (-2 * self.c_inv - 2)))

    def nthreads(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        return max(1, int(os.environ.get("QUADREG_THREADS", "1")))


def _pmap(fn, items, config: RunConfig):
    """Deterministic parallel map over disjoint cells."""
    items = list(items)
    k = config.nthreads()
    if k <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


# -- index / Pythagoras ------------------------------------------------------

def index(A: np.ndarray, parts, N: int) -> Fraction:
    """(1/p^n) sum over parts of (|A cap P|/|P|)^2 |P|, exact."""
    total = Fraction(0)
    for P in parts:
        sz = len(P)
        if sz == 0:
            continue
        hits = int(np.count_nonzero(A[P]))
        total += Fraction(hits * hits, sz)
    return total / N


def refinement_sum(A: np.ndarray, parts, refined_parts, N: int) -> Fraction:
    """(1/p^n) sum_P sum_{P' <= P} (alpha_P - alpha_P')^2 |P'|, exact."""
    owner = {}
    for i, P in enumerate(parts):
        for x in P:
            owner[int(x)] = i
    alphas = [Fraction(int(np.count_nonzero(A[P])), len(P)) for P in parts]
    total = Fraction(0)
    for Pp in refined_parts:
        i = owner[int(Pp[0])]
        a_new = Fraction(int(np.count_nonzero(A[Pp])), len(Pp))
        total += (alphas[i] - a_new) ** 2 * len(Pp)
    return total / N


def pythagoras_check(A: np.ndarray, parts, refined_parts, N: int) -> Fraction:
    diff = index(A, refined_parts, N) - index(A, parts, N)
    rs = refinement_sum(A, parts, refined_parts, N)
    assert diff == rs, f"index identity violated: {diff} != {rs}"
    return diff


# -- correlation oracle ------------------------------------------------------

@dataclass
class InverseWitness:
    M: tuple  # symmetric matrix (rows of tuples)
    r: tuple  # linear part
    c: int
    correlation: float


def _monomial_design(grp: Group):
    """Columns: x_i x_j (i <= j), then x_i, then 1; values mod p per element."""
    E = grp.coords
    p, n = grp.p, grp.n
    cols = []
    pairs = []
    for i in range(n):
        for j in range(i, n):
            cols.append((E[:, i] * E[:, j]) % p)
            pairs.append((i, j))
    for i in range(n):
        cols.append(E[:, i] % p)
    cols.append(np.ones(grp.size, dtype=np.int64))
    return np.stack(cols, axis=1), pairs


def poly_values(grp: Group, M, r, c) -> np.ndarray:
    """psi(x) = x^T M x + r.x + c over all encoded x."""
    E = grp.coords
    Mv = np.array(M, dtype=np.int64)
    rv = np.array(r, dtype=np.int64)
    return (np.einsum("xi,ij,xj->x", E, Mv, E) + E @ rv + c) % grp.p


def correlation(f, grp: Group, members: np.ndarray, M, r, c=0) -> float:
    """|sum_{x in atom} f(x) w^{psi(x)}| / |atom|."""
    if len(members) == 0:
        raise ValueError("empty atom")
    v = gowers.as_values(f, grp)
    psi = poly_values(grp, M, r, c)[members]
    w = np.exp(2j * np.pi * psi / grp.p)
    return float(abs((v[members] * w).sum()) / len(members))


def _coeffs_to_matrix(grp: Group, quad_coeffs, pairs):
    """Monomial coefficients for x_i x_j (i<=j) -> symmetric M with
    x^T M x equal to that polynomial (off-diagonals halved; p odd)."""
    p, n = grp.p, grp.n
    inv2 = pow(2, -1, p)
    M = [[0] * n for _ in range(n)]
    for coeff, (i, j) in zip(quad_coeffs, pairs):
        if i == j:
            M[i][i] = coeff % p
        else:
            M[i][j] = M[j][i] = (coeff * inv2) % p
    return tuple(tuple(row) for row in M)


def _best_linear_part(f_masked: np.ndarray, grp: Group, quad_vals: np.ndarray):
    """For fixed quadratic part, the best linear part r maximizing
    |sum f(x) w^{quad(x) + r.x}| comes straight off the character sums of
    g = f * w^{quad}: the modulus at frequency s equals the sum with
    r = -s."""
    g = f_masked * np.exp(2j * np.pi * quad_vals / grp.p)
    # direct multi-axis transform on the complex values
    cube = g.reshape((grp.p,) * grp.n)
    from .gowers import _dft_matrix
    W = _dft_matrix(grp.p)
    for axis in range(grp.n):
        cube = np.tensordot(W, cube, axes=([1], [axis]))
        cube = np.moveaxis(cube, 0, axis)
    mags = np.abs(cube.reshape(grp.size))
    s = int(np.argmax(mags))
    r = tuple(int((-ci) % grp.p) for ci in grp.coords[s])
    return r, float(mags[s])


def inverse_oracle(f, grp: Group, members: np.ndarray, delta: float,
                   config: RunConfig, rng=None):
    """Search for a quadratic polynomial whose phase correlates with f on the
    atom at level >= delta^C/C.  Exhaustive over all p^{n(n+1)/2} quadratic
    parts (the linear part is optimized exactly via character sums, the
    constant only rotates phase) when the polynomial count fits the cap;
    otherwise randomized restarts over sparse quadratic parts.
    """
    if len(members) == 0:
        return None
    p, n = grp.p, grp.n
    v = gowers.as_values(f, grp).astype(np.float64)
    mask = np.zeros(grp.size, dtype=np.float64)
    mask[members] = 1.0
    fm = v * mask
    design, pairs = _monomial_design(grp)
    nquad = n * (n + 1) // 2
    total_polys = p ** (nquad + n + 1)
    best = None
    threshold = config.threshold(delta)

    def consider(quad_coeffs):
        nonlocal best
        quad_vals = (design[:, :nquad] @ np.array(quad_coeffs, dtype=np.int64)) % p
        r, mag = _best_linear_part(fm, grp, quad_vals)
        corr = mag / len(members)
        if best is None or corr > best[0] + 1e-15:
            M = _coeffs_to_matrix(grp, quad_coeffs, pairs)
            best = (corr, M, r)

    if config.oracle == "exhaustive" and total_polys <= config.exhaustive_cap:
        for quad_coeffs in product(range(p), repeat=nquad):
            consider(quad_coeffs)
    else:
        rng = rng or np.random.default_rng(config.seed)
        consider((0,) * nquad)
        for _ in range(config.attempts):
            support = rng.integers(1, max(2, nquad // 2 + 1))
            coeffs = [0] * nquad
            for idx in rng.choice(nquad, size=min(support, nquad), replace=False):
                coeffs[idx] = int(rng.integers(1, p))
            consider(tuple(coeffs))
    if best is None or best[0] < threshold:
        return None
    corr, M, r = best
    return InverseWitness(M=M, r=r, c=0, correlation=corr)


# -- cylinder cells ----------------------------------------------------------

@dataclass
class CylinderCell:
    factor: QuadraticFactor
    label: tuple
    sigma: tuple
    members: np.ndarray
    chain: list = field(default_factory=list)  # factor history incl. current
    density: float = 0.0
    normP8: float = 0.0
    uniform: bool = True

    def key(self):
        return (self.factor.l, self.factor.q, self.factor.label_to_code(self.label))


def _initial_cell(A: np.ndarray, p: int, n: int) -> CylinderCell:
    B0 = trivial_factor(p, n)
    g = group(p, n)
    cell = CylinderCell(factor=B0, label=((), ()), sigma=(),
                        members=np.arange(g.size), chain=[B0])
    return cell


def _refresh_cell_stats(A: np.ndarray, cell: CylinderCell, delta: float):
    g = cell.factor.grp
    P = cell.members
    cell.density = float(np.count_nonzero(A[P])) / len(P)
    f = np.zeros(g.size, dtype=np.float64)
    f[P] = A[P].astype(np.float64) - cell.density
    if np.max(np.abs(f)) < 1e-15:
        cell.normP8 = 0.0
    else:
        num = gowers.u3_eighth_fast(f, g)
        oc = localnorms.omega_count(cell.factor, cell.label)
        cell.normP8 = num / oc if oc else 0.0
    cell.uniform = cell.normP8 < delta ** 8


def _split_cell(cell: CylinderCell, new_factor: QuadraticFactor, bit: int):
    """Children = atoms of new_factor inside the cell."""
    codes = new_factor.label_codes()[cell.members]
    out = []
    for code in np.unique(codes):
        members = cell.members[codes == code]
        out.append(CylinderCell(
            factor=new_factor,
            label=new_factor.code_to_label(int(code)),
            sigma=cell.sigma + (bit,),
            members=members,
            chain=cell.chain + [new_factor],
        ))
    return out


def _low_rank(cell: CylinderCell, rho) -> bool:
    B = cell.factor
    if B.q == 0:
        return False  # nothing deletable; rank is n by convention
    return B.rank() < rho(B.l + B.q)


@dataclass
class StepRecord:
    step: int
    kind: int  # +1 or -1
    index_before: Fraction
    index_after: Fraction
    nonuniform_mass: int
    deletions: int
    witnesses: int
    jensen_bound: Fraction  # exact lower bound for the gain on +1 steps
    corr_bound: float       # float bound from achieved correlations


def _cells_index(A, cells, N) -> Fraction:
    return index(A, [c.members for c in cells], N)


def cylinder_decompose(A, delta: float, rho, config: RunConfig,
                       p: int | None = None, n: int | None = None):
    """Iteratively refine a partition of G into atoms of per-cell factors:
    type -1 steps delete a low-rank matrix from every low-rank cell's factor,
    type +1 steps split every non-uniform cell along an inverse witness.
    Stops when no cell is low-rank and the non-uniform mass is <= delta |G|.

    Returns (cells, report) where report carries the per-step trace.
    """
    A = np.asarray(A, dtype=bool)
    if p is None or n is None:
        raise ValueError("p and n required")
    g = group(p, n)
    if A.shape != (g.size,):
        raise ValueError("set indicator has wrong length")
    rng = np.random.default_rng(config.seed)
    cells = [_initial_cell(A, p, n)]
    for c in cells:
        _refresh_cell_stats(A, c, delta)
    trace: list[StepRecord] = []
    budget = config.budget(delta)
    step = 0
    while True:
        low = [c for c in cells if _low_rank(c, rho)]
        nonuni = [c for c in cells if not c.uniform]
        mass = sum(len(c.members) for c in nonuni)
        if not low and mass <= delta * g.size:
            break
        if step >= budget:
            raise BudgetExceeded(state={"cells": cells, "trace": trace})
        ind_before = _cells_index(A, cells, g.size)
        if low:
            # type -1: one deletion per low-rank cell, deterministic order
            new_cells = []
            deletions = 0
            low_ids = {id(c) for c in low}
            for c in sorted(cells, key=lambda c: c.key()):
                if id(c) in low_ids:
                    B2 = rho_matrix_delete(c.factor, rho)
                    new_cells.extend(_split_cell(c, B2, -1))
                    deletions += 1
                else:
                    new_cells.append(c)
            kind = -1
            witnesses = 0
            jensen = Fraction(0)
            corr_bound = 0.0
        else:
            # type +1: energy step on all non-uniform cells
            new_cells, witnesses, corr_sum = _energy_split(
                A, cells, nonuni, delta, config, rng)
            kind = 1
            deletions = 0
            # Jensen: gain >= ((1/p^n) sum |alpha' - alpha| |P'|)^2, exact;
            # the achieved-correlation version is logged too (it is smaller)
            jensen = _jensen_square(A, cells, new_cells, g.size)
            corr_bound = (corr_sum / g.size) ** 2
        for c in new_cells:
            _refresh_cell_stats(A, c, delta)
        ind_after = _cells_index(A, new_cells, g.size)
        assert ind_after >= ind_before, "index decreased"
        if kind == 1:
            assert ind_after - ind_before >= jensen, "gain below Jensen bound"
        trace.append(StepRecord(step=step, kind=kind, index_before=ind_before,
                                index_after=ind_after, nonuniform_mass=mass,
                                deletions=deletions, witnesses=witnesses,
                                jensen_bound=jensen, corr_bound=corr_bound))
        cells = new_cells
        step += 1
    report = {
        "steps": len(trace),
        "trace": trace,
        "final_index": _cells_index(A, cells, g.size),
        "nonuniform_mass": sum(len(c.members) for c in cells if not c.uniform),
        "cells": len(cells),
    }
    return cells, report


def _jensen_square(A, cells, new_cells, N) -> Fraction:
    """((1/p^n) sum_{P'} |alpha_{P'} - alpha_P| |P'|)^2, exact; a lower bound
    for the index gain by Cauchy-Schwarz with total weight 1."""
    owner = {}
    alphas = []
    for i, c in enumerate(cells):
        alphas.append(Fraction(int(np.count_nonzero(A[c.members])), len(c.members)))
        for x in c.members:
            owner[int(x)] = i
    s = Fraction(0)
    for c in new_cells:
        i = owner[int(c.members[0])]
        a_new = Fraction(int(np.count_nonzero(A[c.members])), len(c.members))
        s += abs(a_new - alphas[i]) * len(c.members)
    return (s / N) ** 2


def _energy_split(A, cells, nonuni, delta, config, rng):
    """Split each non-uniform cell along an oracle witness; untouched cells
    keep their factor but do not grow sigma."""
    g = cells[0].factor.grp
    failures = []
    plans = {}

    def search(cell):
        f = np.zeros(g.size, dtype=np.float64)
        f[cell.members] = A[cell.members].astype(np.float64) - cell.density
        return inverse_oracle(f, g, cell.members, delta, config, rng=rng)

    results = _pmap(search, nonuni, config)
    for cell, wit in zip(nonuni, results):
        if wit is None:
            failures.append(cell)
        else:
            plans[id(cell)] = wit
    if failures:
        raise OracleFailure(failures, state={"cells": cells})
    new_cells = []
    corr_sum = 0.0
    for cell in sorted(cells, key=lambda c: c.key()):
        wit = plans.get(id(cell))
        if wit is None:
            new_cells.append(cell)
            continue
        B = cell.factor
        newL = list(B.L)
        if gf.mat_rank(newL + [wit.r], B.p) > len(newL):
            newL.append(wit.r)
        newQ = list(B.Q)
        if wit.M not in newQ and any(any(row) for row in wit.M):
            newQ.append(wit.M)
        B2 = QuadraticFactor(B.p, B.n, newL, newQ)
        new_cells.extend(_split_cell(cell, B2, +1))
        corr_sum += wit.correlation * len(cell.members)
    return new_cells, len(plans), corr_sum


# -- global decomposition ----------------------------------------------------

def global_decompose(A, delta: float, rho, config: RunConfig,
                     p: int | None = None, n: int | None = None):
    """Single-factor energy increment: refine one quadratic factor until the
    atoms where 1_A - alpha has large local norm cover < delta |G|."""
    A = np.asarray(A, dtype=bool)
    g = group(p, n)
    rng = np.random.default_rng(config.seed)
    B = trivial_factor(p, n)
    B, _, _ = rank_refine(B, rho)
    trace = []
    budget = config.budget(delta)
    step = 0
    while True:
        bad, mass = _nonuniform_atoms(A, B, delta)
        if mass <= delta * g.size:
            break
        if step >= budget:
            raise BudgetExceeded(state={"factor": B, "trace": trace})
        parts_before = _atom_parts(B)
        ind_before = index(A, parts_before, g.size)
        newL, newQ = list(B.L), list(B.Q)
        witnesses = 0
        failures = []

        def search(item):
            label, members = item
            density = float(np.count_nonzero(A[members])) / len(members)
            f = np.zeros(g.size, dtype=np.float64)
            f[members] = A[members].astype(np.float64) - density
            return inverse_oracle(f, g, members, delta, config, rng=rng)

        results = _pmap(search, bad, config)
        for (label, members), wit in zip(bad, results):
            if wit is None:
                failures.append(label)
                continue
            witnesses += 1
            if gf.mat_rank(newL + [wit.r], B.p) > gf.mat_rank(newL, B.p):
                newL.append(wit.r)
            if wit.M not in newQ and any(any(row) for row in wit.M):
                newQ.append(wit.M)
        if failures:
            raise OracleFailure(failures, state={"factor": B, "trace": trace})
        B2 = QuadraticFactor(B.p, B.n, newL, newQ)
        B2, deletions, feasible = rank_refine(B2, rho)
        ind_after = index(A, _atom_parts(B2), g.size)
        trace.append({
            "step": step,
            "index_before": ind_before,
            "index_after": ind_after,
            "nonuniform_mass": mass,
            "witnesses": witnesses,
            "deletions": deletions,
        })
        B = B2
        step += 1
    report = {
        "steps": len(trace),
        "trace": trace,
        "complexity": B.complexity(),
        "rank": B.rank(),
        "nonuniform_mass": _nonuniform_atoms(A, B, delta)[1],
    }
    return B, report


def _atom_parts(B: QuadraticFactor):
    codes = B.label_codes()
    return [np.nonzero(codes == c)[0] for c in np.unique(codes)]


def _nonuniform_atoms(A, B: QuadraticFactor, delta):
    g = B.grp
    bad = []
    mass = 0
    codes = B.label_codes()
    for code in np.unique(codes):
        members = np.nonzero(codes == code)[0]
        label = B.code_to_label(int(code))
        density = float(np.count_nonzero(A[members])) / len(members)
        f = np.zeros(g.size, dtype=np.float64)
        f[members] = A[members].astype(np.float64) - density
        if np.max(np.abs(f)) < 1e-15:
            continue
        oc = localnorms.omega_count(B, label)
        n8 = gowers.u3_eighth_fast(f, g) / oc if oc else 0.0
        if n8 >= delta ** 8:
            bad.append((label, members))
            mass += len(members)
    return bad, mass


# -- assembly ----------------------------------------------------------------

def assemble_main(A, delta: float, rho, k: int, config: RunConfig,
                  p: int | None = None, n: int | None = None,
                  mu: float | None = None, epsilon: float | None = None):
    """End-to-end pipeline: cylinder decomposition at parameter mu, union of
    the cell factors, rank refinement, homogeneity statistics, and the
    approximating set Y = union of atoms with density > 1/2.

    The theory-prescribed mu = ((eps^2/8)^{k^2 2^{k^2}})/2 with
    eps = (delta/120)^{k+2} is astronomically small; desk-scale runs override
    it (default: mu = delta).  The quadratic-complexity-reduction step of the
    pipeline is a pass-through.
    """
    A = np.asarray(A, dtype=bool)
    g = group(p, n)
    if epsilon is None:
        epsilon = (delta / 120) ** (k + 2)
    mu_paper = ((epsilon ** 2 / 8) ** (k * k * 2 ** (k * k))) / 2
    if mu is None:
        mu = delta
    cells, rep = cylinder_decompose(A, mu, rho, config, p=p, n=n)
    keep = [c for c in cells if c.uniform]
    Qs = []
    Ls = []
    for c in keep:
        for M in c.factor.Q:
            if M not in Qs:
                Qs.append(M)
        Ls.extend(c.factor.L)
    L = gf.extend_to_independent([], Ls, p)
    B = QuadraticFactor(p, n, L, Qs)
    B, deletions, feasible = rank_refine(B, rho)
    # quadratic-complexity reduction step: pass-through
    eps_hom = min(max(epsilon, 1e-9), 0.5)
    codes = B.label_codes()
    Y = np.zeros(g.size, dtype=bool)
    hom_mass = 0
    for code in np.unique(codes):
        members = np.nonzero(codes == code)[0]
        density = np.count_nonzero(A[members]) / len(members)
        if density > 0.5:
            Y[members] = True
        if density <= eps_hom or density >= 1 - eps_hom:
            hom_mass += len(members)
    report = {
        "cylinder": rep,
        "mu_used": mu,
        "mu_paper": mu_paper,
        "epsilon": epsilon,
        "complexity": B.complexity(),
        "rank": B.rank(),
        "rank_feasible": feasible,
        "deletions_in_refine": deletions,
        "sym_diff": int(np.count_nonzero(A ^ Y)),
        "sym_diff_frac": float(np.count_nonzero(A ^ Y)) / g.size,
        "homogeneous_mass_frac": hom_mass / g.size,
    }
    return B, Y, report


def cell_chain_record(cell: CylinderCell) -> ChainRecord:
    return ChainRecord(sigma=tuple(cell.sigma), factors=list(cell.chain))


def validate_cells(cells, rho, N: int) -> None:
    """Output invariants of the cylinder decomposition."""
    seen = np.zeros(N, dtype=np.int64)
    for c in cells:
        seen[c.members] += 1
        atom = c.factor.enumerate_atom(c.label)
        assert np.array_equal(np.sort(c.members), atom), "cell is not its atom"
        assert disc(c.sigma) >= 0
        if c.factor.q > 0:
            assert c.factor.rank() >= rho(c.factor.l + c.factor.q)
        assert validate_chain(rho, cell_chain_record(c)), "invalid chain"
    assert np.all(seen == 1), "cells do not partition G"
