"""
CSV rendering of a cohort report.

The file has two sections separated by a blank line, each with its own
header row: per-case long-format records, then one aggregate row per
(variant, strategy, method, metric). NA values are empty with ``is_na=1``.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from ..core import InputError
from ..report import CohortReport, MetricRecord, aggregate

RECORD_HEADER = [
    "case_id",
    "variant",
    "detection_strategy",
    "localisation_method",
    "metric",
    "value",
    "is_na",
]
AGGREGATE_HEADER = [
    "variant",
    "detection_strategy",
    "localisation_method",
    "metric",
    "mean",
    "std",
    "na_count",
    "n",
    "summary",
]


def _num(v) -> str:
    return "" if v is None else repr(float(v))


def report_to_csv(report: CohortReport, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_HEADER)
    for r in report.records:
        w.writerow(
            [r.case_id, r.variant, r.strategy, r.method, r.metric, _num(r.value), int(r.value is None)]
        )
    buf.write("\n")
    w.writerow(AGGREGATE_HEADER)
    for (variant, strategy, method, metric), a in report.aggregates.items():
        w.writerow(
            [variant, strategy, method, metric, _num(a.mean), _num(a.std), a.na_count, a.n, a.format()]
        )
    return buf.getvalue()


def write_report_csv(report: CohortReport, path, comment: str | None = None) -> None:
    Path(path).write_text(report_to_csv(report, comment), encoding="utf-8")


def read_report_csv(path) -> CohortReport:
    """Load the per-case records and recompute the aggregates."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    try:
        end = lines.index("")
    except ValueError:
        end = len(lines)
    rows = list(csv.reader(lines[:end]))
    if not rows or rows[0] != RECORD_HEADER:
        raise InputError(f"{path}: missing or unexpected record header")
    records = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(RECORD_HEADER):
            raise InputError(f"{path}: record row {i} has {len(row)} fields")
        case_id, variant, strategy, method, metric, value, is_na = row
        try:
            v = None if is_na == "1" else float(value)
        except ValueError:
            raise InputError(f"{path}: record row {i}: bad value {value!r}") from None
        records.append(MetricRecord(case_id, variant, strategy, method, metric, v))
    return aggregate(records)
