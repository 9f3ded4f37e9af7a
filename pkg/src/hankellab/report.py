"""Report files: a JSON document per run plus CSV curves and residual tables.

JSON layout (``schema_version`` 1), keys sorted::

    schema_version  int
    tool            {name, version}
    config          echo of the resolved configuration
    tasks           [{id, kind, passed, result}]
    summary         {tasks: {id: {kind, passed, outcome}}, n_tasks, failed, exit_code}
    timing          {wall_clock_s, tasks_s}   # the only non-deterministic block

Curve CSV columns: ``task, angle, radius, tag, value, error_bar``.
Identity CSV columns: ``instance, identity, window, working_window, residual, certified``.
"""
from __future__ import annotations

import csv
import json
import time
from pathlib import Path

from .diagnostics import jsonable
from .runner import Report, summarize_tasks

CURVE_HEADER = ("task", "angle", "radius", "tag", "value", "error_bar")
TABLE_HEADER = ("instance", "identity", "window", "working_window", "residual", "certified")


class ReportError(OSError):
    pass


def timestamp() -> str:
    return time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if x is None else x for x in row])


def report_emit(report: Report, out_dir, formats=("json", "csv"), stamp: str | None = None) -> list[Path]:
    """Write the report; returns the created paths."""
    out = Path(out_dir)
    stamp = stamp or timestamp()
    paths = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if "csv" in formats:
            for t in report.tasks:
                if t.curves:
                    p = out / f"{_safe(t.id)}-{stamp}.csv"
                    _write_csv(p, CURVE_HEADER, t.curves)
                    paths.append(p)
                if t.table:
                    p = out / f"{_safe(t.id)}-residuals-{stamp}.csv"
                    _write_csv(p, TABLE_HEADER, t.table)
                    paths.append(p)
        if "json" in formats:
            p = out / f"report-{stamp}.json"
            doc = jsonable(report.to_dict())
            doc["files"] = [q.name for q in paths]
            p.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
            paths.append(p)
    except OSError as exc:
        raise ReportError(f"cannot write report to {exc.filename or out}: {exc.strerror}") from exc
    return paths


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())


def summarize(doc: dict) -> dict:
    """Recompute the summary block from a loaded report's task records."""
    return jsonable(summarize_tasks(
        [(t["id"], t["kind"], t["passed"], t["result"]) for t in doc["tasks"]]
    ))
