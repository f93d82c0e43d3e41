"""JSON graph files, configuration loading and result serialisation."""
import json
import os

import numpy as np

from .affinity import AffinityConfig
from .errors import ConfigError, GraphError
from .graph import AttributedGraph
from .matcher import MatchConfig

ENV_PREFIX = "TPGMATCH_"

# key -> parser; these may come from a config file, an env var or a flag
SOLVER_KEYS = {
    "solver_rtol": float,
    "solver_max_iter_factor": int,
    "lp_max_pivots": int,
    "max_tpg_nodes": int,
    "prune_eps": float,
    "lp_method": str,
}
AFFINITY_KEYS = {"node_kernel": str, "edge_kernel": str, "bandwidth": float}
MATCH_KEYS = {"model": str, "discretize": lambda v: _parse_bool(v)}
CONFIG_KEYS = {**AFFINITY_KEYS, **MATCH_KEYS, **SOLVER_KEYS}


def _parse_bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def graph_from_dict(d):
    if not isinstance(d, dict):
        raise GraphError("graph JSON must be an object")
    unknown = set(d) - {"directed", "nodes", "edges"}
    if unknown:
        raise GraphError(f"unknown graph keys: {sorted(unknown)}")
    try:
        directed = d.get("directed", True)
        if not isinstance(directed, bool):
            raise GraphError("'directed' must be a boolean")
        nodes = [n["attr"] for n in d["nodes"]]
        edges = d.get("edges", [])
        pairs = [(int(e["src"]), int(e["dst"])) for e in edges]
        attrs = [e.get("attr", []) for e in edges]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph JSON: {exc!r}") from exc
    dims = {len(a) for a in attrs}
    if len(dims) > 1:
        raise GraphError("edge attributes must share one dimension")
    edge_attrs = np.array(attrs, dtype=float).reshape(len(pairs), dims.pop() if dims else 0)
    if nodes and all(isinstance(a, list) and a and isinstance(a[0], list) for a in nodes):
        node_attrs = [np.array(a, dtype=float) for a in nodes]
    else:
        try:
            node_attrs = np.array(nodes, dtype=float).reshape(len(nodes), -1) if nodes else np.zeros((0, 0))
        except ValueError as exc:
            raise GraphError(f"node attributes must share one dimension: {exc}") from exc
    return AttributedGraph(node_attrs, pairs, edge_attrs, directed=directed)


def graph_to_dict(g):
    if g.node_kind == "vector":
        nodes = [{"attr": row.tolist()} for row in g.node_attrs]
    else:
        nodes = [{"attr": a.tolist()} for a in g.node_attrs]
    edges, attrs = (g.edges, g.edge_attrs) if g.directed else g.undirected_edges()
    return {
        "directed": g.directed,
        "nodes": nodes,
        "edges": [{"src": int(s), "dst": int(t), "attr": a.tolist()}
                  for (s, t), a in zip(edges, attrs)],
    }


def load_graph(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise GraphError(f"{path}: {exc.strerror}") from exc
    return graph_from_dict(data)


def save_graph(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph_to_dict(g), fh, indent=1)
        fh.write("\n")


def load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def env_overrides(environ=None):
    environ = os.environ if environ is None else environ
    out = {}
    for key, parse in CONFIG_KEYS.items():
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            try:
                out[key] = parse(raw)
            except ValueError as exc:
                raise ConfigError(f"{ENV_PREFIX}{key.upper()}: {exc}") from exc
    return out


def make_match_config(*layers):
    """Merge dicts left to right (later wins) into a :class:`MatchConfig`."""
    merged = {}
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})
    unknown = set(merged) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    aff = AffinityConfig(**{k: merged.pop(k) for k in list(merged) if k in AFFINITY_KEYS})
    if "discretize" in merged:
        merged["discretize"] = _parse_bool(merged["discretize"])
    return MatchConfig(affinity=aff, **merged)


def write_result(result, path, timings=True):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(timings=timings), fh, indent=1)
        fh.write("\n")
