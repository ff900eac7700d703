"""File formats: TSV edge lists, node-type files, parameter JSON."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ._validation import balanced_two_types, check_adjacency
from .model import BlockAlpha, FullAlpha, ModelParams, ParametricAlpha


def write_graph_tsv(path, adj) -> None:
    """Edge list: header line `n=<count>`, then one `i<TAB>j` line per edge (i<j)."""
    a = check_adjacency(adj)
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    lines = [f"n={n}"]
    for i, j in zip(*iu):
        if a[i, j]:
            lines.append(f"{i}\t{j}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph_tsv(path) -> np.ndarray:
    text = Path(path).read_text().strip().splitlines()
    if not text or not text[0].startswith("n="):
        raise ValueError(f"{path}: first line must be a header of form n=<count>")
    n = int(text[0][2:])
    adj = np.zeros((n, n), dtype=bool)
    for line in text[1:]:
        line = line.strip()
        if not line:
            continue
        i_s, j_s = line.split("\t")
        i, j = int(i_s), int(j_s)
        if not (0 <= i < j < n):
            raise ValueError(f"{path}: bad edge ({i}, {j}) for n={n}")
        adj[i, j] = adj[j, i] = True
    return adj


def write_types(path, types) -> None:
    Path(path).write_text("\n".join(str(int(t)) for t in np.asarray(types)) + "\n")


def read_types(path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    return np.array([int(ln) for ln in lines], dtype=np.int64)


def resolve_types_arg(spec: str, n: int) -> np.ndarray:
    """CLI types argument: either the literal `balanced2` or a path to a types file."""
    if spec == "balanced2":
        return balanced_two_types(n)
    t = read_types(spec)
    if t.shape[0] != n:
        raise ValueError(f"types file {spec} has {t.shape[0]} entries, expected n={n}")
    return t


def params_to_dict(params: ModelParams) -> dict:
    a = params.alpha
    if isinstance(a, FullAlpha):
        alpha = {"variant": "full", "payload": {"matrix": a.matrix.tolist()}}
    elif isinstance(a, ParametricAlpha):
        alpha = {
            "variant": "parametric",
            "payload": {"theta_edge": a.theta_edge, "theta_match": a.theta_match},
        }
    elif isinstance(a, BlockAlpha):
        alpha = {
            "variant": "block",
            "payload": {"boundaries": a.boundaries.tolist(), "values": a.values.tolist()},
        }
    else:
        raise TypeError(f"unknown alpha spec {type(a)!r}")
    return {"alpha": alpha, "beta": params.beta}


def params_from_dict(d: dict) -> ModelParams:
    try:
        variant = d["alpha"]["variant"]
        payload = d["alpha"]["payload"]
        beta = float(d["beta"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed params object: {exc}") from exc
    if variant == "full":
        alpha = FullAlpha(np.asarray(payload["matrix"], dtype=float))
    elif variant == "parametric":
        alpha = ParametricAlpha(float(payload["theta_edge"]), float(payload["theta_match"]))
    elif variant == "block":
        alpha = BlockAlpha(
            np.asarray(payload["boundaries"], dtype=float),
            np.asarray(payload["values"], dtype=float),
        )
    else:
        raise ValueError(f"unknown alpha variant {variant!r}")
    return ModelParams(alpha=alpha, beta=beta)


def write_params_json(path, params: ModelParams) -> None:
    Path(path).write_text(json.dumps(params_to_dict(params), sort_keys=True, indent=2) + "\n")


def read_params_json(path) -> ModelParams:
    return params_from_dict(json.loads(Path(path).read_text()))
