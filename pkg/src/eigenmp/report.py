"""Run reports with deterministic JSON/CSV serialization.

Identical config and seed produce byte-identical files: floats are rounded
to 12 significant digits, keys sorted, record order fixed by insertion, and
no wall-clock data enters the serialized output (timings go to the console
only).
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

from . import __version__


def _round_floats(obj):
    if isinstance(obj, float):
        return float("%.12g" % obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    try:
        return float("%.12g" % float(obj))
    except (TypeError, ValueError):
        return str(obj)


@dataclass
class Report:
    command: str
    seed: int = 0
    backend: str = ""
    meta: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    def add(self, record):
        self.records.append(_round_floats(record))
        return record

    def as_dict(self):
        return {
            "meta": _round_floats(
                {"version": __version__, "command": self.command, "seed": self.seed,
                 "backend": self.backend, **self.meta}
            ),
            "records": self.records,
        }


_CSV_SCHEMAS = {
    "eigen": ("method", "domain", "h", "eps", "lambda_lo", "lambda_hi", "iterations"),
    "certificate": ("lambda", "margin", "classification", "samples", "positivity", "ok"),
    "mp": ("holds", "max_positive_part", "iterations", "decided"),
    "barrier": ("xi", "delta", "band_width", "min_residual", "verified"),
    "fixture": ("name", "claim", "computed", "verdict"),
    "validate": ("operator", "check", "samples", "violations", "max_relative_error", "ok"),
}


def _fmt_cell(v):
    if isinstance(v, float):
        return "%.12g" % v
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt_cell(x) for x in v)
    return "" if v is None else str(v)


def emit(report, outdir, formats=("json", "csv")):
    """Write the report files; returns the list of paths written."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    if "json" in formats:
        path = os.path.join(outdir, "report.json")
        with open(path, "w") as fh:
            json.dump(report.as_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")
        written.append(path)
    if "csv" in formats:
        by_type = {}
        for rec in report.records:
            by_type.setdefault(rec.get("type", "misc"), []).append(rec)
        for rtype, recs in sorted(by_type.items()):
            if rtype == "fichera":
                path = os.path.join(outdir, "fichera.csv")
                with open(path, "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(("point", "dAd", "drift", "status", "component"))
                    for rec in recs:
                        for s in rec.get("samples", []):
                            w.writerow(
                                (_fmt_cell(s["point"]), _fmt_cell(s["dAd"]),
                                 _fmt_cell(s["drift"]), s["status"], s["component"])
                            )
                written.append(path)
                continue
            if rtype == "witness":
                path = os.path.join(outdir, "witness.csv")
                with open(path, "w", newline="") as fh:
                    w = csv.writer(fh)
                    w.writerow(("x", "y", "value"))
                    for rec in recs:
                        for row in rec["nodes"]:
                            w.writerow(tuple(_fmt_cell(v) for v in row))
                written.append(path)
                continue
            schema = _CSV_SCHEMAS.get(rtype)
            if schema is None:
                continue
            path = os.path.join(outdir, "%s.csv" % rtype)
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(schema)
                for rec in recs:
                    w.writerow(tuple(_fmt_cell(rec.get(k)) for k in schema))
            written.append(path)
    return written


def witness_record(grid, values):
    """Witness field as a serializable record (node coordinates + value)."""
    pts = grid.coords()
    rows = []
    for i in range(grid.size):
        if values[i] != 0.0:
            x = pts[i]
            rows.append((float(x[0]), float(x[1]) if grid.dim > 1 else 0.0, float(values[i])))
    return {"type": "witness", "nodes": rows}
