"""Flat-file JSON formats: sets, functions, factors, partitions.
All output is canonically ordered (sorted keys) so diffs are meaningful."""

from __future__ import annotations

import json

import numpy as np

from .factors import QuadraticFactor, factor_from_dict, factor_to_dict
from .gf import group


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_json(path, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_canonical(obj))


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


# -- sets / functions --------------------------------------------------------

def set_to_dict(A, p: int, n: int) -> dict:
    mask = np.asarray(A, dtype=bool)
    return {
        "p": p,
        "n": n,
        "kind": "indicator",
        "elements": sorted(int(i) for i in np.nonzero(mask)[0]),
    }


def function_to_dict(values, p: int, n: int) -> dict:
    return {"p": p, "n": n, "kind": "dense",
            "values": [float(v) for v in values]}


def function_from_dict(d: dict):
    g = group(d["p"], d["n"])
    if d["kind"] == "indicator":
        v = np.zeros(g.size, dtype=np.float64)
        v[np.asarray(d["elements"], dtype=np.int64)] = 1.0
        return v, d["p"], d["n"]
    if d["kind"] == "dense":
        v = np.asarray(d["values"], dtype=np.float64)
        if v.shape != (g.size,):
            raise ValueError("dense values of wrong length")
        return v, d["p"], d["n"]
    raise ValueError(f"unknown function kind {d['kind']!r}")


def set_from_dict(d: dict):
    v, p, n = function_from_dict(d)
    return v.astype(bool), p, n


# -- partitions --------------------------------------------------------------

def cells_to_dict(cells, p: int, n: int) -> dict:
    out = []
    for c in sorted(cells, key=lambda c: (c.factor.l, c.factor.q,
                                          c.factor.label_to_code(c.label))):
        out.append({
            "factor": factor_to_dict(c.factor),
            "label": {"a": list(c.label[0]), "b": list(c.label[1])},
            "sigma": list(c.sigma),
            "members": sorted(int(x) for x in c.members),
            "density": c.density,
            "normP8": c.normP8,
            "uniform": bool(c.uniform),
        })
    return {"p": p, "n": n, "cells": out}
