"""Command-line entry point.

Subcommands: decompose, verify, vc2, chain-bounds, norms, gen.
Exit codes for decompose: 0 success, 2 oracle-failure, 3 budget-exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import io, localnorms, vc2 as vc2mod
from .chains import GrowthFunction, all_strings, f_sigma, tau
from .factors import factor_from_dict
from .generators import generate_set
from .gf import group
from .regularity import (BudgetExceeded, OracleFailure, RunConfig,
                         cylinder_decompose, global_decompose)
from .verify import verify_suite


def _config_from_args(args) -> RunConfig:
    return RunConfig(seed=args.seed, oracle=args.oracle,
                     max_steps=args.max_steps)


def cmd_decompose(args) -> int:
    A, p, n = io.set_from_dict(io.load_json(args.set))
    if args.p and args.p != p or args.n and args.n != n:
        print("warning: --p/--n differ from the set file; using the file's",
              file=sys.stderr)
    rho = GrowthFunction.parse(args.rho)
    config = _config_from_args(args)
    os.makedirs(args.out, exist_ok=True)
    try:
        if args.mode == "global":
            B, report = global_decompose(A, args.delta, rho, config, p=p, n=n)
            out = {"mode": "global", "factor": io.factor_to_dict(B),
                   "complexity": list(report["complexity"]),
                   "rank": report["rank"],
                   "nonuniform_mass": report["nonuniform_mass"]}
            io.save_json(os.path.join(args.out, "partition.json"), out)
            trace = report["trace"]
            rows = [{"step": t["step"],
                     "index_before": float(t["index_before"]),
                     "index_after": float(t["index_after"]),
                     "nonuniform_mass": t["nonuniform_mass"],
                     "deletions": t["deletions"],
                     "witnesses": t["witnesses"],
                     "kind": 1} for t in trace]
        else:
            cells, report = cylinder_decompose(A, args.delta, rho, config,
                                               p=p, n=n)
            io.save_json(os.path.join(args.out, "partition.json"),
                         io.cells_to_dict(cells, p, n))
            rows = [{"step": t.step, "kind": t.kind,
                     "index_before": float(t.index_before),
                     "index_after": float(t.index_after),
                     "nonuniform_mass": t.nonuniform_mass,
                     "deletions": t.deletions,
                     "witnesses": t.witnesses} for t in report["trace"]]
    except OracleFailure as e:
        print(f"oracle-failure: {e}", file=sys.stderr)
        return 2
    except BudgetExceeded as e:
        print(f"budget-exceeded: {e}", file=sys.stderr)
        return 3
    with open(os.path.join(args.out, "trace.csv"), "w", newline="") as fh:
        fields = ["step", "kind", "index_before", "index_after",
                  "nonuniform_mass", "deletions", "witnesses"]
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow(r)
    return 0


def cmd_verify(args) -> int:
    report = verify_suite(args.level, out_dir=args.out)
    print(io.dumps_canonical(
        {k: v["ok"] for k, v in report["checks"].items()} | {"ok": report["ok"]}))
    return 0 if report["ok"] else 1


def cmd_vc2(args) -> int:
    A, p, n = io.set_from_dict(io.load_json(args.set))
    g = group(p, n)
    vd = vc2mod.vc_dim(A, g, min(args.kmax, vc2mod.KMAX_HARD))
    v2, saturated = vc2mod.vc2_dim(A, g, min(args.kmax, vc2mod.KMAX_HARD))
    witnesses = {}
    if v2 >= 1:
        _, wit = vc2mod.vc2_dim_at_least(A, g, v2, witness=True)
        witnesses["vc2"] = {"a": list(wit[0]), "b": list(wit[1]),
                            "c_by_pattern": wit[2]}
    print(io.dumps_canonical({"vc_dim": vd, "vc2_dim": v2,
                              "saturated": saturated,
                              "witnesses": witnesses}))
    return 0


def cmd_chain_bounds(args) -> int:
    rho = GrowthFunction.parse(args.rho)
    w = csv.writer(sys.stdout)
    w.writerow(["sigma", "a", "b"])
    for m in range(args.length + 1):
        for s in all_strings(m):
            a, b = f_sigma(rho, s)
            w.writerow(["".join("+" if x == 1 else "-" for x in s),
                        float(a), float(b)])
    w.writerow([])
    w.writerow(["tau_i", "x", "y", "value"])
    for i in range(args.tau_imax + 1):
        for x in range(args.tau_xmax + 1):
            for y in range(i, args.tau_xmax + 1):
                w.writerow([i, x, y, float(tau(rho, i, x, y))])
    return 0


def cmd_norms(args) -> int:
    B = factor_from_dict(io.load_json(args.factor))
    f, p, n = io.function_from_dict(io.load_json(args.function))
    assert (p, n) == (B.p, B.n), "function and factor live on different groups"
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["label", "atom_size", "omega_count",
                                           "omega_predicted", "normP8",
                                           "normTW8", "diff"])
        w.writeheader()
        for e in B.all_labels():
            oc = localnorms.omega_count(B, e)
            p8 = localnorms.norm_P_eighth(f, B, e)
            # canonical local-label with d_a = e and everything else zero
            zero = ((0,) * B.l, (0,) * B.q)
            zq = (0,) * B.q
            d = localnorms.LocalLabelTuple(e, zero, zero, zq, zq, zq)
            try:
                tw8 = localnorms.norm_TW_eighth(f, B, d)
                diff = tw8 - p8
            except localnorms.DegenerateLabelError:
                tw8, diff = "degenerate", ""
            w.writerow({"label": str(e),
                        "atom_size": len(B.enumerate_atom(e)),
                        "omega_count": oc,
                        "omega_predicted": localnorms.omega_predicted(B),
                        "normP8": p8, "normTW8": tw8, "diff": diff})
    return 0


def cmd_gen(args) -> int:
    params = json.loads(args.params) if args.params else {}
    A = generate_set(args.kind, params, args.seed, args.p, args.n)
    io.save_json(args.out, io.set_to_dict(A, args.p, args.n))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadreg")
    sub = ap.add_subparsers(dest="cmd", required=True)

    d = sub.add_parser("decompose", help="energy-increment decompositions")
    d.add_argument("--mode", choices=["global", "cylinder"], default="cylinder")
    d.add_argument("--set", required=True)
    d.add_argument("--p", type=int, default=None)
    d.add_argument("--n", type=int, default=None)
    d.add_argument("--delta", type=float, required=True)
    d.add_argument("--rho", default="linear:1")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--oracle", choices=["exhaustive", "randomized"],
                   default="exhaustive")
    d.add_argument("--max-steps", type=int, default=None)
    d.add_argument("--out", required=True)
    d.set_defaults(fn=cmd_decompose)

    v = sub.add_parser("verify", help="run the invariant verification suite")
    v.add_argument("--level", choices=["quick", "full"], default="quick")
    v.add_argument("--out", default=None, help="directory for diagnostics CSVs")
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("vc2", help="VC / VC2 dimension of a set")
    c.add_argument("--set", required=True)
    c.add_argument("--kmax", type=int, default=2)
    c.set_defaults(fn=cmd_vc2)

    cb = sub.add_parser("chain-bounds", help="tau / f_sigma tables as CSV")
    cb.add_argument("--rho", default="linear:1")
    cb.add_argument("--length", type=int, default=4)
    cb.add_argument("--tau-imax", type=int, default=3)
    cb.add_argument("--tau-xmax", type=int, default=5)
    cb.set_defaults(fn=cmd_chain_bounds)

    nm = sub.add_parser("norms", help="per-atom local norm table")
    nm.add_argument("--factor", required=True)
    nm.add_argument("--function", required=True)
    nm.add_argument("--out", required=True)
    nm.set_defaults(fn=cmd_norms)

    gn = sub.add_parser("gen", help="generate a test set")
    gn.add_argument("--kind", required=True,
                    choices=["random", "atom-union", "quadratic-variety", "coset"])
    gn.add_argument("--params", default=None, help="JSON parameter object")
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--p", type=int, required=True)
    gn.add_argument("--n", type=int, required=True)
    gn.add_argument("--out", required=True)
    gn.set_defaults(fn=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
