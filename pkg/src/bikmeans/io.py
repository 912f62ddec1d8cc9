"""CSV / JSON formats shared by the CLI subcommands.

Every JSON document carries ``"schema": 1``. Dumps use sorted keys and
``repr`` floats so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import ClusteringError, KMedianInstance, PointSet
from .lp import FractionalSolution

SCHEMA = 1


class FormatError(ClusteringError):
    pass


def read_points_csv(path) -> PointSet:
    rows = []
    with open(path, newline="") as fh:
        for line in csv.reader(fh):
            if not line or all(not c.strip() for c in line):
                continue
            try:
                rows.append([float(c) for c in line])
            except ValueError as e:
                raise FormatError(f"{path}: non-numeric entry in row {len(rows) + 1}") from e
    if not rows:
        raise FormatError(f"{path}: no points")
    if len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: rows have different lengths")
    return PointSet(np.array(rows))


def write_points_csv(path, X: PointSet):
    with open(path, "w", newline="") as fh:
        for row in X.points:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _plain(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (tuple, set, frozenset)):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from e
    if d.get("schema") != SCHEMA:
        raise FormatError(f"{path}: expected schema {SCHEMA}, got {d.get('schema')!r}")
    return d


def instance_to_dict(inst: KMedianInstance) -> dict:
    d = {"schema": SCHEMA, "metric": inst.metric,
         "demands": inst.demands.points.tolist(), "centers": inst.centers.points.tolist()}
    if inst.metric != "sqeuclidean":
        d["dist"] = inst.dist.tolist()
    if inst.back_map is not None:
        d["back_map"] = list(inst.back_map)
    return d


def instance_from_dict(d: dict) -> KMedianInstance:
    metric = d.get("metric", "sqeuclidean")
    demands, centers = PointSet(np.array(d["demands"])), PointSet(np.array(d["centers"]))
    if metric == "sqeuclidean":
        dist = None
    elif metric == "table":
        dist = np.array(d["dist"], dtype=float)
    else:
        raise FormatError(f"unsupported metric {metric!r}")
    return KMedianInstance(demands, centers, dist=dist, back_map=d.get("back_map"), metric=metric)


def fractional_to_dict(sol: FractionalSolution, **extra) -> dict:
    xs, js = np.nonzero(sol.served)
    return {"schema": SCHEMA, "k": sol.k, "value": sol.lp_value,
            "copies": [{"center": int(c), "weight": float(w)}
                       for c, w in zip(sol.copy_center, sol.weight)],
            "z": [[int(x), int(j), float(sol.weight[j])] for x, j in zip(xs, js)],
            **extra}


def fractional_from_dict(d: dict, inst: KMedianInstance) -> FractionalSolution:
    centers = np.array([c["center"] for c in d["copies"]], dtype=int)
    weight = np.array([c["weight"] for c in d["copies"]], dtype=float)
    if centers.size and (centers.min() < 0 or centers.max() >= inst.n_centers):
        raise FormatError("solution refers to centers outside the instance")
    served = np.zeros((inst.n_demands, centers.size), dtype=bool)
    for x, j, _ in d["z"]:
        served[int(x), int(j)] = True
    return FractionalSolution(k=int(d["k"]), copy_center=centers, weight=weight,
                              served=served, dist=inst.dist[centers].T.copy())
