"""Run configuration: TOML files, validation and the ``paper-suite`` preset."""
from __future__ import annotations

import copy
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .diagnostics import Thresholds
from .lang import LoweringError, SymbolSyntaxError, lower
from .symbols import SymbolError

OUTPUT_ENV = "HANKELLAB_OUTPUT_DIR"

TASK_KINDS = ("identities", "hartman", "zheng", "product", "sum_product", "dilation")

# symbol-valued keys per task kind
SYMBOL_KEYS = {
    "identities": (),
    "hartman": ("symbol",),
    "zheng": ("f", "g"),
    "product": ("f", "g"),
    "sum_product": ("f1", "g1", "f2", "g2"),
    "dilation": (),
}

NET_KEYS = {"angles", "n_angles", "levels", "kernel_eps", "out_factor"}
COMMON_KEYS = {"kind", "id", "expect", "thresholds"}
TASK_KEYS = {
    "identities": {"count", "degree", "window", "tolerance", "win_tol", "lose_tol", "seed"},
    "hartman": {"symbol", "sizes", "ks", "tau_compact", "tau_noncompact", "stability"},
    "zheng": {"f", "g"} | NET_KEYS,
    "product": {"f", "g", "dilation_levels"} | NET_KEYS,
    "sum_product": {"f1", "g1", "f2", "g2"} | NET_KEYS,
    "dilation": {"pairs", "f", "g", "angle", "levels", "form", "method", "noise", "eps"},
}
EXPECTATIONS = {
    "identities": (),
    "hartman": ("compact", "noncompact", "inconclusive"),
    "zheng": ("compact", "noncompact", "inconclusive"),
    "product": ("compact", "noncompact", "inconclusive"),
    "sum_product": ("compact", "noncompact", "inconclusive"),
    "dilation": ("decreasing", "plateau"),
}


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps it to exit code 2."""


@dataclass
class RunConfig:
    symbols: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)
    output_dir: str = "reports"
    seed: int = 0
    preset: str | None = None

    def echo(self) -> dict:
        return {
            "symbols": dict(sorted(self.symbols.items())),
            "tasks": copy.deepcopy(self.tasks),
            "output_dir": str(self.output_dir),
            "seed": self.seed,
            "preset": self.preset,
        }


PAPER_NET = {"n_angles": 16, "levels": [1, 10]}

PAPER_SUITE = {
    "symbols": {
        "poly": "trigpoly(-3: 1, -1: 0.5, 2: 1)",
        "smooth": "decay(2)",
        "halfarc": "arc(0, pi)",
        "a": "arc(-0.5, 0.5)",
        "b": "arc(pi - 0.5, pi + 0.5)",
        "unitarc": "arc(0, 1)",
        "one": "1",
        "neg_unitarc": "-arc(0, 1)",
        "two_unitarc": "2 * arc(0, 1)",
    },
    "tasks": [
        {"kind": "identities", "id": "identities", "count": 100, "degree": 8, "window": 64},
        {"kind": "hartman", "id": "hartman-poly", "symbol": "poly", "expect": "compact"},
        {"kind": "hartman", "id": "hartman-smooth", "symbol": "smooth", "expect": "compact"},
        {"kind": "hartman", "id": "hartman-arc", "symbol": "halfarc", "expect": "noncompact"},
        {"kind": "zheng", "id": "zheng-disjoint", "f": "a", "g": "b", "expect": "compact", **PAPER_NET},
        {"kind": "zheng", "id": "zheng-shared", "f": "unitarc", "g": "unitarc", "expect": "noncompact", **PAPER_NET},
        {"kind": "product", "id": "product-poly", "f": "poly", "g": "b", "expect": "compact", **PAPER_NET},
        {"kind": "product", "id": "product-pair-a", "f": "a", "g": "b", "expect": "compact", **PAPER_NET},
        {"kind": "product", "id": "product-pair-b", "f": "a", "g": "one", "expect": "noncompact", **PAPER_NET},
        {"kind": "sum_product", "id": "sum-cancel", "f1": "unitarc", "g1": "one", "f2": "neg_unitarc",
         "g2": "one", "expect": "compact", **PAPER_NET},
        {"kind": "sum_product", "id": "sum-double", "f1": "unitarc", "g1": "one", "f2": "two_unitarc",
         "g2": "one", "expect": "noncompact", **PAPER_NET},
        {"kind": "dilation", "id": "dilation-poly", "f": "poly", "g": "b", "angle": 0.0,
         "levels": [4, 10], "expect": "decreasing"},
        {"kind": "dilation", "id": "dilation-pair-b", "f": "a", "g": "one", "angle": 0.5,
         "levels": [4, 10], "expect": "plateau"},
    ],
}

PRESETS = {"paper-suite": PAPER_SUITE}


def load_config(path: str | os.PathLike) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    raw = copy.deepcopy(raw)
    unknown = set(raw) - {"symbols", "tasks", "output_dir", "seed", "preset"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    preset = raw.get("preset")
    symbols, tasks = {}, []
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; available: {', '.join(PRESETS)}")
        symbols.update(PRESETS[preset]["symbols"])
        tasks.extend(copy.deepcopy(PRESETS[preset]["tasks"]))
    user_symbols = raw.get("symbols", {})
    if not isinstance(user_symbols, dict):
        raise ConfigError("[symbols] must be a table of name = \"expression\"")
    symbols.update(user_symbols)
    user_tasks = raw.get("tasks", [])
    if not isinstance(user_tasks, list):
        raise ConfigError("tasks must be an array of tables ([[tasks]])")
    tasks.extend(user_tasks)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    cfg = RunConfig(symbols, tasks, str(raw.get("output_dir", "reports")), seed, preset)
    validate(cfg)
    return cfg


def _task_symbol_names(task: dict) -> list[str]:
    names = [task[k] for k in SYMBOL_KEYS[task["kind"]] if k in task]
    if task["kind"] == "dilation":
        if "pairs" in task:
            for pair in task["pairs"]:
                if not (isinstance(pair, list) and len(pair) == 2):
                    raise ConfigError(f"task {task['id']}: pairs must be [f, g] name lists")
                names.extend(pair)
        else:
            names.extend(task.get(k) for k in ("f", "g"))
    return names


def validate(cfg: RunConfig) -> None:
    """Check names, kinds and keys; raise :class:`ConfigError` naming the culprit."""
    for name, expr in cfg.symbols.items():
        if not isinstance(expr, str):
            raise ConfigError(f"symbol {name!r}: expression must be a string")
    seen = set()
    for i, task in enumerate(cfg.tasks):
        if not isinstance(task, dict):
            raise ConfigError(f"task #{i + 1} is not a table")
        kind = task.get("kind")
        if kind not in TASK_KINDS:
            raise ConfigError(f"task #{i + 1}: unknown kind {kind!r}; expected one of {', '.join(TASK_KINDS)}")
        task.setdefault("id", f"{kind}-{i + 1}")
        if task["id"] in seen:
            raise ConfigError(f"duplicate task id {task['id']!r}")
        seen.add(task["id"])
        extra = set(task) - COMMON_KEYS - TASK_KEYS[kind]
        if extra:
            raise ConfigError(f"task {task['id']}: unknown keys {', '.join(sorted(extra))}")
        for k in SYMBOL_KEYS[kind]:
            if k not in task:
                raise ConfigError(f"task {task['id']}: missing symbol key {k!r}")
        for name in _task_symbol_names(task):
            if name is None:
                raise ConfigError(f"task {task['id']}: dilation needs f and g or pairs")
            if name not in cfg.symbols:
                raise ConfigError(f"task {task['id']}: undefined symbol {name!r}")
        expect = task.get("expect")
        if expect is not None and expect not in EXPECTATIONS[kind]:
            raise ConfigError(f"task {task['id']}: expect must be one of {EXPECTATIONS[kind]}")
        th = task.get("thresholds", {})
        try:
            Thresholds(**th)
        except TypeError as exc:
            raise ConfigError(f"task {task['id']}: bad thresholds ({exc})") from exc
        for key in ("levels", "dilation_levels"):
            lv = task.get(key)
            if lv is not None and not (isinstance(lv, list) and len(lv) == 2 and 0 <= lv[0] <= lv[1]):
                raise ConfigError(f"task {task['id']}: {key} must be [first, last] with 0 <= first <= last")


def lower_symbols(cfg: RunConfig) -> dict:
    """Parse and lower every symbol once; errors name the offending symbol."""
    out = {}
    for name, expr in cfg.symbols.items():
        try:
            out[name] = lower(expr)
        except (SymbolSyntaxError, LoweringError, SymbolError) as exc:
            raise ConfigError(f"symbol {name!r} = {expr!r}: {exc}") from exc
    return out


def resolve_output_dir(cfg: RunConfig, override: str | None = None) -> Path:
    return Path(override or os.environ.get(OUTPUT_ENV) or cfg.output_dir)
