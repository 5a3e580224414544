"""Aggregate statistics over stored run records.

Everything here is computed from :class:`RunRecord` objects alone, so a sweep's
CSV can always be regenerated from its record files.
"""

import csv
import glob
import io
import math
from dataclasses import dataclass

from .driver import RunRecord, improvement_rate

COLUMNS = (
    "axis_value",
    "mean_residual",
    "std_residual",
    "mean_improvement_rate",
    "mean_best_objective",
    "n_runs",
    "n_failed",
)
HEADER_NOTE = "# std_residual is the population standard deviation over seeds"


@dataclass
class AggregateRow:
    axis_value: str
    mean_residual: float
    std_residual: float
    mean_improvement_rate: float
    mean_best_objective: float
    n_runs: int
    n_failed: int


def mean_std(values):
    """Mean and population standard deviation; ``(None, None)`` if empty."""
    values = list(values)
    if not values:
        return None, None
    m = math.fsum(values) / len(values)
    var = math.fsum((v - m) ** 2 for v in values) / len(values)
    return m, math.sqrt(var)


def _sweep_meta(rec):
    meta = rec.meta.get("sweep") or {}
    return {
        "value": str(meta.get("value", "")),
        "value_index": int(meta.get("value_index", 0)),
        "role": meta.get("role", "cell"),
        "is_baseline": bool(meta.get("is_baseline", False)),
        "group": str(meta.get("group", "")),
    }


def aggregate(records):
    """One :class:`AggregateRow` per sweep value, in sweep order.

    Incomplete records are counted in ``n_failed`` and left out of the means.
    The improvement rate pairs each cell with the baseline run of the same
    group and seed.
    """
    baselines = {}
    for rec in records:
        m = _sweep_meta(rec)
        if m["is_baseline"] and rec.complete:
            baselines[(m["group"], rec.seed)] = rec.best_objective
    groups = {}
    for rec in records:
        m = _sweep_meta(rec)
        if m["role"] != "cell":
            continue
        groups.setdefault((m["value_index"], m["value"]), []).append((m, rec))
    rows = []
    for (_, value), members in sorted(groups.items()):
        ok = [(m, r) for m, r in members if r.complete]
        resid = [r.best_residual for _, r in ok if r.best_residual is not None]
        rates = []
        for m, r in ok:
            base = baselines.get((m["group"], r.seed))
            if base is not None and base != 0:
                rates.append(improvement_rate(r.best_objective, base))
        mean_r, std_r = mean_std(resid)
        mean_rate, _ = mean_std(rates)
        mean_obj, _ = mean_std(r.best_objective for _, r in ok)
        rows.append(AggregateRow(value, mean_r, std_r, mean_rate, mean_obj, len(ok), len(members) - len(ok)))
    return rows


def _fmt(v):
    return "" if v is None else repr(v)


def to_csv(rows):
    buf = io.StringIO()
    buf.write(HEADER_NOTE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([r.axis_value, _fmt(r.mean_residual), _fmt(r.std_residual),
                    _fmt(r.mean_improvement_rate), _fmt(r.mean_best_objective), r.n_runs, r.n_failed])
    return buf.getvalue()


def load_records(patterns):
    paths = []
    for pat in patterns:
        found = sorted(glob.glob(pat))
        paths.extend(found if found else [])
    records = []
    for p in sorted(set(paths)):
        with open(p, encoding="utf-8") as fh:
            records.append(RunRecord.from_jsonl(fh.read()))
    return records
