"""Command line front end (``hankellab``).

Exit codes: 0 when every task met its thresholds, 1 when some task did not,
2 for configuration or symbol errors (no report is written then).
"""
from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, RunConfig, config_from_dict, load_config, resolve_output_dir
from .report import ReportError, report_emit
from .runner import run

log = logging.getLogger("hankellab")


def _net_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--angles", type=float, nargs="+", help="explicit boundary angles (radians)")
    p.add_argument("--n-angles", type=int, default=64, help="uniform angles added to the jump angles")
    p.add_argument("--levels", type=int, nargs=2, default=[1, 12], metavar=("FIRST", "LAST"),
                   help="radii 1 - 2^-j for j in FIRST..LAST")
    p.add_argument("--kernel-eps", type=float, default=1e-12)


def _net_task(ns) -> dict:
    task = {"n_angles": ns.n_angles, "levels": list(ns.levels), "kernel_eps": ns.kernel_eps}
    if ns.angles:
        task["angles"] = list(ns.angles)
    return task


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hankellab", description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output-dir", help="report directory (overrides config and $HANKELLAB_OUTPUT_DIR)")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("-q", "--quiet", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a TOML config")
    p.add_argument("config")

    p = sub.add_parser("check-identities", help="identity suite on seeded random trig polys")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--window", type=int, default=64)

    p = sub.add_parser("compactness", help="compactness verdict for H_f from finite sections")
    p.add_argument("expr")
    p.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])

    p = sub.add_parser("product", help="verdict for H_f T_g")
    p.add_argument("f")
    p.add_argument("g")
    _net_args(p)

    p = sub.add_parser("sum-product", help="verdict for H_f1 T_g1 + H_f2 T_g2")
    for name in ("f1", "g1", "f2", "g2"):
        p.add_argument(name)
    _net_args(p)
    return ap


def config_for(ns) -> RunConfig:
    if ns.command == "run":
        cfg = load_config(ns.config)
        if ns.seed is not None:
            cfg.seed = ns.seed
        return cfg
    raw = {"seed": ns.seed or 0}
    if ns.command == "check-identities":
        raw["tasks"] = [{"kind": "identities", "id": "identities", "count": ns.count,
                         "degree": ns.degree, "window": ns.window}]
    elif ns.command == "compactness":
        raw["symbols"] = {"f": ns.expr}
        raw["tasks"] = [{"kind": "hartman", "id": "hartman", "symbol": "f", "sizes": ns.sizes}]
    elif ns.command == "product":
        raw["symbols"] = {"f": ns.f, "g": ns.g}
        raw["tasks"] = [{"kind": "product", "id": "product", "f": "f", "g": "g", **_net_task(ns)}]
    else:
        raw["symbols"] = {k: getattr(ns, k) for k in ("f1", "g1", "f2", "g2")}
        raw["tasks"] = [{"kind": "sum_product", "id": "sum-product", "f1": "f1", "g1": "g1",
                         "f2": "f2", "g2": "g2", **_net_task(ns)}]
    return config_from_dict(raw)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if ns.quiet else logging.INFO, format="%(message)s")
    try:
        cfg = config_for(ns)
        out_dir = resolve_output_dir(cfg, ns.output_dir)
        report = run(cfg, progress=lambda r: log.info(
            "%-22s %-12s %-13s %6.1fs", r.id, r.kind, r.result.get("outcome"), r.seconds))
    except ConfigError as exc:
        print(f"hankellab: error: {exc}", file=sys.stderr)
        return 2
    try:
        paths = report_emit(report, out_dir)
    except ReportError as exc:
        print(f"hankellab: error: {exc}", file=sys.stderr)
        return 2
    failed = [t.id for t in report.tasks if not t.passed]
    log.info("%d task(s), %d failed; report: %s", len(report.tasks), len(failed), paths[-1] if paths else "-")
    for tid in failed:
        log.warning("FAILED %s", tid)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
