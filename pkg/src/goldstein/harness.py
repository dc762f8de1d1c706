"""Experiment runner: JSON config in, CSV traces, JSON summary and figures out."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .approx import HeuristicConfig, minimize_heuristic
from .descent import RunConfig, minimize_bisection, minimize_fast
from .ledger import OracleLedger
from .objectives import InstanceSpec, builtin, make_max_quadratics
from .oracles import ExactOracle
from .plotting import plot_convergence
from .trace import write_csv

log = logging.getLogger(__name__)

ALGORITHMS = ("alg3", "alg4", "alg7")


@dataclass
class ExperimentConfig:
    objective: dict
    algorithm: str
    betas: list[float] = field(default_factory=lambda: [0.25])
    x0: list[float] | dict | None = None
    output_dir: str = "out"
    L: float | None = None
    max_oracle_calls: int = 500
    stop_eps: float = 0.0
    tol: float = 1e-10
    n: int = 100
    seed: int = 0
    workers: int = 1
    figures: bool = True

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.algorithm != "alg3" and not self.betas:
            raise ValueError("a beta sweep needs at least one beta")
        if any(not b > 0 for b in self.betas):
            raise ValueError("betas must be positive")
        if self.algorithm == "alg4" and any(b > 1 for b in self.betas):
            raise ValueError("alg4 needs betas in (0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_objective(spec: dict):
    spec = dict(spec)
    if "instance" in spec:
        return make_max_quadratics(InstanceSpec.from_json(spec["instance"]))
    name = spec.pop("builtin", None)
    if name is None:
        raise ValueError("objective needs 'builtin' or 'instance'")
    return builtin(name, alpha=spec.get("alpha", 1.0), dim=spec.get("dim", 1),
                   slopes=spec.get("slopes"), intercepts=spec.get("intercepts"))


def random_unit_sphere(seed: int, dim: int) -> np.ndarray:
    z = np.random.Generator(np.random.PCG64(seed)).standard_normal(dim)
    return z / np.linalg.norm(z)


def initial_point(x0, dim: int) -> np.ndarray:
    if x0 is None:
        return random_unit_sphere(0, dim)
    if isinstance(x0, dict):
        return random_unit_sphere(int(x0["random_unit_sphere"]), dim)
    x = np.asarray(x0, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"x0 must have {dim} coordinates")
    return x


def _run_one(cfg: ExperimentConfig, f, x0, beta):
    L = cfg.L if cfg.L is not None else f.lipschitz
    ledger = OracleLedger()
    if cfg.algorithm == "alg7":
        hc = HeuristicConfig(L=L, tol=cfg.tol, beta=beta, n=cfg.n, seed=cfg.seed)
        x, trace = minimize_heuristic(f, x0, hc, ledger)
        total = ledger.approx_calls
    else:
        rc = RunConfig(L=L, max_oracle_calls=cfg.max_oracle_calls,
                       beta=1.0 if beta is None else beta, stop_eps=cfg.stop_eps)
        algo = minimize_bisection if cfg.algorithm == "alg3" else minimize_fast
        x, trace = algo(f, x0, rc, ExactOracle(f, ledger))
        total = ledger.goldstein_calls
    return x, trace, ledger, total


def _tag(cfg, beta):
    return cfg.algorithm if beta is None else f"{cfg.algorithm}_beta{beta:g}"


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every beta of the sweep and persist the results.

    Writes ``trace_<tag>.csv`` per run, ``summary.json`` and, when enabled,
    the three convergence figures. A run that raises is recorded with its
    error and does not stop the others.
    """
    f = build_objective(cfg.objective)
    x0 = initial_point(cfg.x0, f.dim)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    betas = [None] if cfg.algorithm == "alg3" else list(cfg.betas)

    def job(beta):
        try:
            return beta, _run_one(cfg, f, x0, beta), None
        except Exception as exc:  # recorded per run; the sweep continues
            log.exception("run %s failed", _tag(cfg, beta))
            return beta, None, exc

    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        results = list(pool.map(job, betas))

    runs, traces, labels = [], [], []
    for beta, res, exc in results:
        tag = _tag(cfg, beta)
        entry = {"tag": tag, "beta": beta, "seed": cfg.seed, "algorithm": cfg.algorithm}
        if exc is not None:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            runs.append(entry)
            continue
        x, trace, ledger, total = res
        csv_name = f"trace_{tag}.csv"
        write_csv(trace, out / csv_name)
        last = trace.rows[-1]
        entry.update({
            "trace": csv_name,
            "initial_gap": trace.initial_gap,
            "initial_dist": trace.initial_dist,
            "final_gap": last.gap,
            "final_dist": last.dist,
            "accepted_steps": len(trace.steps),
            "total_calls": total,
            "total_goldstein_calls": ledger.goldstein_calls,
            "total_approx_calls": ledger.approx_calls,
            "total_subgrad_evals": ledger.subgrad_evals,
            "total_value_evals": ledger.value_evals,
            "stop_reason": trace.stop_reason,
            "final_x": [float(v) for v in x],
        })
        runs.append(entry)
        traces.append(trace)
        labels.append(tag if beta is None else rf"$\beta = {beta:g}$")

    figures = []
    if cfg.figures and traces:
        views = [("dist", "calls"), ("gap", "calls")]
        if any(t.rows[-1].s_subgrad for t in traces):
            views.append(("dist", "evals"))
        for y, xaxis in views:
            name = f"fig_{y}_vs_{xaxis}.svg"
            plot_convergence(traces, labels, y=y, x=xaxis, out=out / name)
            figures.append(name)

    summary = {"config": _config_dict(cfg), "runs": runs, "figures": figures}
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _config_dict(cfg):
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
