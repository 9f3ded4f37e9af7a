"""Task execution for configured runs."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import diagnostics as dg
from .config import ConfigError, RunConfig, lower_symbols, validate
from .identities import ADJUDICATED, SUITE, adjudicate, identity_residual, random_instance
from .operators import WindowError
from .symbols import SymbolError

SCHEMA_VERSION = 1


@dataclass
class TaskResult:
    id: str
    kind: str
    passed: bool
    result: dict
    curves: list = field(default_factory=list)  # (task, angle, radius, tag, value, error_bar)
    table: list = field(default_factory=list)   # residual rows (identities)
    seconds: float = 0.0


@dataclass
class Report:
    config: dict
    tasks: list
    wall_clock: float
    tool_version: str = __version__

    @property
    def exit_code(self) -> int:
        return 0 if all(t.passed for t in self.tasks) else 1

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "hankellab", "version": self.tool_version},
            "config": self.config,
            "tasks": [
                {"id": t.id, "kind": t.kind, "passed": t.passed, "result": t.result}
                for t in self.tasks
            ],
            "summary": summarize_tasks([(t.id, t.kind, t.passed, t.result) for t in self.tasks]),
            "timing": {
                "wall_clock_s": self.wall_clock,
                "tasks_s": {t.id: t.seconds for t in self.tasks},
            },
        }


def summarize_tasks(rows) -> dict:
    outcomes = {}
    for tid, kind, passed, result in rows:
        outcomes[tid] = {"kind": kind, "passed": passed, "outcome": result.get("outcome")}
    failed = sorted(t for t, o in outcomes.items() if not o["passed"])
    return {
        "tasks": outcomes,
        "n_tasks": len(outcomes),
        "failed": failed,
        "exit_code": 1 if failed else 0,
    }


def _net(task: dict, symbols) -> dg.RadialNet:
    lo, hi = task.get("levels", [1, 12])
    levels = range(lo, hi + 1)
    eps = task.get("kernel_eps", 1e-12)
    of = task.get("out_factor", 8)
    if "angles" in task:
        return dg.RadialNet(tuple(task["angles"]), tuple(1 - 2.0 ** -j for j in levels), eps, of)
    return dg.RadialNet.default(dg.jump_angles(*symbols), task.get("n_angles", 64), levels, eps, of)


def _curve_rows(prefix: str, curve: dg.SweepCurve) -> list:
    return [(prefix, *row) for row in curve.rows()]


def _verdict_result(v: dg.Verdict, expect) -> tuple[bool, dict]:
    res = v.to_dict()
    res["expect"] = expect
    passed = expect is None or v.outcome == expect
    return passed, res


def _run_identities(task, cfg: RunConfig, syms) -> TaskResult:
    seed = task.get("seed", cfg.seed)
    count = task.get("count", 100)
    degree = task.get("degree", 8)
    N = task.get("window", 64)
    tol = task.get("tolerance", 1e-12)
    win_tol = task.get("win_tol", 1e-10)
    lose_tol = task.get("lose_tol", 1e-2)
    rng = np.random.default_rng(seed)
    table = []
    worst = {}
    winners = {name: {} for name in ADJUDICATED}
    loser_min = {name: np.inf for name in ADJUDICATED}
    for i in range(count):
        f, g, z = random_instance(rng, degree)
        for ident in SUITE:
            rep = identity_residual(ident, f, g, z, N)
            table.append((i, rep.identity, rep.window, rep.working_window, rep.residual, rep.certified))
            worst[rep.identity] = max(worst.get(rep.identity, 0.0), rep.residual)
        for name in ADJUDICATED:
            adj = adjudicate(name, f, g, z, N, win_tol, lose_tol)
            key = adj.winner or "none"
            winners[name][key] = winners[name].get(key, 0) + 1
            for ident, res in adj.residuals.items():
                table.append((i, ident, N, None, res, True))
                if ident == adj.winner:
                    worst[ident] = max(worst.get(ident, 0.0), res)
            loser_min[name] = min(loser_min[name], adj.loser_residual)
    unique = {name: (list(w) if len(w) == 1 and "none" not in w else None) for name, w in winners.items()}
    passed = all(r <= tol for r in worst.values()) and all(u is not None for u in unique.values())
    result = {
        "outcome": "pass" if passed else "fail",
        "seed": seed, "count": count, "degree": degree, "window": N, "tolerance": tol,
        "max_residual": dict(sorted(worst.items())),
        "adjudication": {
            name: {"winners": winners[name], "winner": unique[name][0] if unique[name] else None,
                   "min_loser_residual": loser_min[name]}
            for name in ADJUDICATED
        },
    }
    return TaskResult(task["id"], "identities", passed, result, table=table)


def _run_dilation(task, cfg, syms) -> TaskResult:
    if "pairs" in task:
        spec = [(syms[a], syms[b]) for a, b in task["pairs"]]
    else:
        spec = [(syms[task["f"]], syms[task["g"]])]
    angle = float(task.get("angle", 0.0))
    lo, hi = task.get("levels", [4, 10])
    levels = list(range(lo, hi + 1))
    form = task.get("form", "gram")
    noise = float(task.get("noise", 1.5))
    vals = dg.dilation_curve(spec, angle, levels, form=form, method=task.get("method", "lowrank"),
                             eps=task.get("eps", 1e-13))
    radii = [1 - 2.0 ** -j for j in levels]
    expect = task.get("expect")
    monotone = all(b <= noise * a for a, b in zip(vals, vals[1:]))
    third = vals[-max(1, len(vals) // 3):]
    flat = min(third) > 0 and max(third) / min(third) <= 2.0
    outcome = "decreasing" if monotone and vals[-1] < vals[0] else ("plateau" if flat else "unclear")
    passed = expect is None or (expect == "decreasing" and monotone and vals[-1] < vals[0]) or (
        expect == "plateau" and flat)
    result = {"outcome": outcome, "expect": expect, "angle": angle, "form": form, "noise": noise,
              "radii": radii, "residuals": vals, "certified": True}
    curves = [(task["id"], angle, r, f"dilation_{form}", v, 0.0) for r, v in zip(radii, vals)]
    return TaskResult(task["id"], "dilation", passed, result, curves=curves)


def _run_task(task, cfg, syms) -> TaskResult:
    kind = task["kind"]
    th = dg.Thresholds(**task.get("thresholds", {}))
    expect = task.get("expect")
    if kind == "identities":
        return _run_identities(task, cfg, syms)
    if kind == "dilation":
        return _run_dilation(task, cfg, syms)
    if kind == "hartman":
        kw = {k: task[k] for k in ("sizes", "ks", "tau_compact", "tau_noncompact") if k in task}
        if "stability" in task:
            kw["stable"] = task["stability"]
        v = dg.hartman_verdict(syms[task["symbol"]], **kw)
        passed, res = _verdict_result(v, expect)
        return TaskResult(task["id"], kind, passed, res)
    if kind in ("zheng", "product"):
        f, g = syms[task["f"]], syms[task["g"]]
        net = _net(task, (f, g))
        fn = dg.zheng_pair_verdict if kind == "zheng" else dg.product_verdict
        v = fn(f, g, net, th)
    else:
        args = [syms[task[k]] for k in ("f1", "g1", "f2", "g2")]
        v = dg.sum_product_verdict(*args, _net(task, args), th)
    passed, res = _verdict_result(v, expect)
    curves = []
    for name, curve in sorted(v.curves().items()):
        curves += _curve_rows(f"{task['id']}:{name}", curve)
    if kind == "product" and "dilation_levels" in task:
        lo, hi = task["dilation_levels"]
        res["dilation"] = {
            str(a): dg.dilation_curve((f, g), a, range(lo, hi + 1)) for a in v.evidence["net"]["boundary_angles"]
        }
    return TaskResult(task["id"], kind, passed, res, curves=curves)


def run(cfg: RunConfig, progress=None) -> Report:
    """Execute every task in order.  Raises :class:`ConfigError` before any work on bad input."""
    validate(cfg)
    syms = lower_symbols(cfg)
    start = time.perf_counter()
    results = []
    for task in cfg.tasks:
        t0 = time.perf_counter()
        try:
            res = _run_task(task, cfg, syms)
        except (SymbolError, WindowError) as exc:
            raise ConfigError(f"task {task['id']}: {exc}") from exc
        res.seconds = time.perf_counter() - t0
        results.append(res)
        if progress:
            progress(res)
    return Report(cfg.echo(), results, time.perf_counter() - start)
