"""Synthetic matching experiments: random graph pairs, metrics, sweeps."""
import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .affinity import assignment_matrix, build_affinity_matrix, qap_objective
from .errors import TPGMatchError
from .graph import AttributedGraph
from .matcher import METHOD_LABELS, MatchConfig, canonical_model, match

SWEEP_PARAMS = ("n_outlier", "sigma", "rho")
CSV_HEADER = ("sweep_param", "sweep_value", "method", "mean_accuracy",
              "mean_norm_objective", "mean_time_ms", "trials")
DEFAULT_METHODS = ("pairwise", "random_walk", "backtrackless")


class TrialError(TPGMatchError):
    def __init__(self, msg, trial=None, sweep_value=None):
        super().__init__(msg)
        self.trial = trial
        self.sweep_value = sweep_value


@dataclass(frozen=True)
class SyntheticConfig:
    n_inlier: int = 20
    n_outlier: int = 0
    sigma: float = 0.0
    rho: float = 1.0
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_inlier", int(self.n_inlier))
        object.__setattr__(self, "n_outlier", int(self.n_outlier))
        if self.n_inlier < 1 or self.n_outlier < 0:
            raise ValueError("need n_inlier >= 1 and n_outlier >= 0")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def trial_rng(seed, trial):
    """Counter-based stream for one trial, independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def gen_synthetic_pair(cfg, trial):
    """Return ``(pattern, target, ground_truth)`` for one trial.

    Inliers occupy the first ``n_inlier`` pattern indices. Target nodes are
    shuffled, and ``ground_truth`` lists ``(pattern_node, target_node)`` for
    every inlier.
    """
    rng = trial_rng(cfg.seed, trial)
    n_in, n_out = cfg.n_inlier, cfg.n_outlier
    n = n_in + n_out

    lab1 = rng.uniform(size=n)
    lab2 = np.concatenate([lab1[:n_in] + rng.normal(0.0, cfg.sigma, n_in),
                           rng.uniform(size=n_out)])

    off_diag = ~np.eye(n_in, dtype=bool)
    shared = (rng.random((n_in, n_in)) < cfg.rho) & off_diag
    src, dst = np.nonzero(shared)
    w1 = rng.uniform(size=len(src))
    w2 = w1 + rng.normal(0.0, cfg.sigma, len(src))

    def outlier_arcs():
        touch = np.zeros((n, n), bool)
        touch[n_in:, :] = True
        touch[:, n_in:] = True
        np.fill_diagonal(touch, False)
        keep = touch & (rng.random((n, n)) < cfg.rho)
        s, d = np.nonzero(keep)
        return s, d, rng.uniform(size=len(s))

    os1, od1, ow1 = outlier_arcs()
    os2, od2, ow2 = outlier_arcs()
    perm = rng.permutation(n)

    g1 = AttributedGraph(lab1.reshape(-1, 1),
                         np.column_stack([np.concatenate([src, os1]), np.concatenate([dst, od1])]),
                         np.concatenate([w1, ow1]).reshape(-1, 1))
    g2 = AttributedGraph(lab2.reshape(-1, 1),
                         np.column_stack([np.concatenate([src, os2]), np.concatenate([dst, od2])]),
                         np.concatenate([w2, ow2]).reshape(-1, 1)).permuted(perm)
    truth = [(i, int(perm[i])) for i in range(n_in)]
    return g1, g2, truth


def accuracy(assignment, ground_truth):
    """Fraction of ground-truth pairs present in ``assignment``."""
    truth = {tuple(p) for p in ground_truth}
    if not truth:
        raise ValueError("ground truth is empty")
    found = {tuple(p) for p in (assignment or [])}
    return len(truth & found) / len(truth)


def objective_score(K, assignment, n1, n2):
    """Raw QAP objective of a discrete assignment."""
    return qap_objective(K, assignment_matrix(assignment or [], n1, n2))


def normalize_scores(raw, reference=None):
    """Divide by a ground-truth reference objective, else by the batch maximum."""
    raw = np.asarray(raw, dtype=float)
    denom = reference if reference is not None else (raw.max() if raw.size else 0.0)
    if denom is None or denom <= 0:
        return np.zeros_like(raw)
    return raw / denom


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    method: str
    accuracy: float
    objective: float
    norm_objective: float
    time_ms: float


def run_trial(cfg, trial, methods=DEFAULT_METHODS, match_cfg=None, timing=True):
    g1, g2, truth = gen_synthetic_pair(cfg, trial)
    base = match_cfg or MatchConfig()
    K = build_affinity_matrix(g1, g2, base.affinity)
    ref = objective_score(K, truth, g1.node_count, g2.node_count)
    out = []
    for method in methods:
        mcfg = replace(base, model=canonical_model(method), discretize=True)
        t0 = time.perf_counter()
        res = match(g1, g2, mcfg)
        elapsed = (time.perf_counter() - t0) * 1e3 if timing else float("nan")
        raw = res.objective_qap
        out.append(TrialOutcome(trial, mcfg.model, accuracy(res.assignment, truth), raw,
                                float(normalize_scores([raw], ref)[0]), elapsed))
    return out


def _run_task(args):
    cfg, trial, methods, match_cfg, timing = args
    try:
        return run_trial(cfg, trial, methods, match_cfg, timing)
    except Exception as exc:  # re-raised with the trial id attached
        return exc


def run_sweep(base, param, values, methods=DEFAULT_METHODS, match_cfg=None, jobs=1, timing=True):
    """Mean accuracy / normalized objective / time per sweep value and method.

    Rows come out in ``(sweep value, method)`` order whatever ``jobs`` is.
    A failing trial aborts the sweep with :class:`TrialError`.
    """
    if param not in SWEEP_PARAMS:
        raise ValueError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    methods = [canonical_model(m) for m in methods]
    tasks, keys = [], []
    for v in values:
        cfg = replace(base, **{param: int(v) if param == "n_outlier" else float(v)})
        for t in range(base.trials):
            tasks.append((cfg, t, tuple(methods), match_cfg, timing))
            keys.append((v, t))
    if jobs is None or jobs < 1:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(tasks) == 1:
        results = []
        for task, key in zip(tasks, keys):
            r = _run_task(task)
            results.append(r)
            if isinstance(r, Exception):
                break
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_task, tasks))
    for (v, t), r in zip(keys, results):
        if isinstance(r, Exception):
            raise TrialError(f"trial {t} at {param}={v} failed: {r}", trial=t, sweep_value=v) from r

    rows = []
    for v in values:
        block = [o for (vv, _), r in zip(keys, results) if vv == v for o in r]
        for m in methods:
            sel = [o for o in block if o.method == m]
            rows.append({
                "sweep_param": param,
                "sweep_value": v,
                "method": METHOD_LABELS[m],
                "mean_accuracy": float(np.mean([o.accuracy for o in sel])),
                "mean_norm_objective": float(np.mean([o.norm_objective for o in sel])),
                "mean_time_ms": float(np.mean([o.time_ms for o in sel])),
                "trials": len(sel),
            })
    return rows


def _fmt(x):
    if isinstance(x, float):
        return "nan" if np.isnan(x) else f"{x:.6f}"
    return str(x)


def sweep_csv(rows):
    """Serialise sweep rows with a fixed header and number format."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r["sweep_param"], format(r["sweep_value"], "g"), r["method"],
                    _fmt(r["mean_accuracy"]), _fmt(r["mean_norm_objective"]),
                    _fmt(r["mean_time_ms"]), r["trials"]])
    return buf.getvalue()
