"""Report files: row CSV, JSON, per-trace CSV, and aligned markdown tables."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import bench
from .bench import ExperimentReport, ReportRow

ROW_FIELDS = ("label", "profile", "phantom", "setting", "value", "std", "units", "flag")

# Hardware reference table per experiment, for side-by-side markdown.
_REFERENCE = {
    "range": (bench.HW_RANGE_ERROR_CM, "cm"),
    "noise": (bench.HW_BASELINE_MM, "deg"),
    "displacement": (bench.HW_DISPLACEMENT_ERROR_MM, "mm"),
}

TITLES = {
    "range": "Range estimation error (cm), mean ± std over sub-intervals",
    "noise": "Baseline noise (mm), std of the static-target displacement",
    "displacement": "Peak-to-peak displacement error (mm)",
    "vitals": "Vital-sign estimation",
}


def _num(v):
    return "" if v is None else repr(float(v))


def write_rows_csv(report: ExperimentReport, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROW_FIELDS)
        for r in report.rows:
            d = r.as_dict()
            w.writerow([_num(d[k]) if k in ("value", "std") else d[k] for k in ROW_FIELDS])


def write_series_csv(columns: dict, path):
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=np.float64) for n in names])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow([repr(float(x)) for x in row])


def read_series_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    names, body = rows[0], np.array(rows[1:], dtype=np.float64).reshape(-1, len(rows[0]))
    return {n: body[:, i] for i, n in enumerate(names)}


def report_to_json(report: ExperimentReport) -> str:
    doc = {
        "experiment": report.experiment.value,
        "seed": report.seed,
        "version": report.version,
        "notes": report.notes,
        "rows": [r.as_dict() for r in report.rows],
        "series": sorted(report.series),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> ExperimentReport:
    doc = json.loads(text)
    rows = [ReportRow(**r) for r in doc["rows"]]
    return ExperimentReport(bench.Experiment(doc["experiment"]), rows, doc["seed"],
                            doc["version"], list(doc["notes"]))


def write_bench_outputs(report: ExperimentReport, outdir) -> list[Path]:
    """``<exp>_report.csv``, ``<exp>_report.json`` and one CSV per trace."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    exp = report.experiment.value
    written = [outdir / f"{exp}_report.csv", outdir / f"{exp}_report.json"]
    write_rows_csv(report, written[0])
    written[1].write_text(report_to_json(report))
    for name, cols in sorted(report.series.items()):
        p = outdir / f"series_{name}.csv"
        write_series_csv(cols, p)
        written.append(p)
    return written


def _fmt(v, digits):
    text = f"{v:.{digits}f}"
    # No "-0.000" for values that round to zero.
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def _cell(row: ReportRow):
    if row.std is not None:
        return f"{_fmt(row.value, 3)} ± {_fmt(row.std, 3)}"
    if row.units == "ratio":
        return _fmt(row.value, 3)
    return _fmt(row.value, 4 if abs(row.value) < 1 else 3)


def markdown_table(header, body) -> str:
    """Aligned pipe table; first column left-aligned, the rest right-aligned."""
    widths = [max(len(str(x)) for x in col) for col in zip(header, *body)]

    def line(cells):
        out = [str(c).ljust(w) if i == 0 else str(c).rjust(w)
               for i, (c, w) in enumerate(zip(cells, widths))]
        return "| " + " | ".join(out) + " |"

    rule = "|" + "|".join(("-" * (w + 1) + ":") if i else (":" + "-" * (w + 1))
                          for i, w in enumerate(widths)) + "|"
    return "\n".join([line(header), rule] + [line(r) for r in body])


def pivot(report: ExperimentReport):
    """Rows keyed by (phantom, setting) or metric, one column per radar."""
    profiles = list(dict.fromkeys(r.profile for r in report.rows))
    keys, cells = [], {}
    for r in report.rows:
        key = (r.label.split("/", 1)[1] if report.experiment == bench.Experiment.VITALS
               else f"{r.phantom}, {r.setting}")
        if key not in keys:
            keys.append(key)
        cells[(key, r.profile)] = _cell(r) + (f" ({r.flag})" if r.flag else "")
    header = ["setting"] + profiles
    body = [[k] + [cells.get((k, p), "") for p in profiles] for k in keys]
    return header, body


def reference_table(experiment: str):
    if experiment not in _REFERENCE:
        return None
    table, unit = _REFERENCE[experiment]
    header = ["setting"] + list(bench.PROFILES)
    body = []
    for (phantom, setting), vals in table.items():
        cells = [f"{v[0]:.2f} ± {v[1]:.2f}" if isinstance(v, tuple) else f"{v:.3f}"
                 for v in vals]
        body.append([f"{phantom}, {setting:g} {unit}"] + cells)
    return header, body


def markdown_report(reports: list[ExperimentReport]) -> str:
    parts = []
    for rep in reports:
        exp = rep.experiment.value
        parts.append(f"## {TITLES[exp]}\n")
        parts.append(f"seed {rep.seed}, toolkit {rep.version}\n")
        parts.append(markdown_table(*pivot(rep)) + "\n")
        ref = reference_table(exp)
        if ref:
            parts.append("Hardware reference measurements, for comparison:\n")
            parts.append(markdown_table(*ref) + "\n")
        for note in rep.notes:
            parts.append(f"Note: {note}\n")
    return "\n".join(parts)


def assemble(outdir) -> list[Path]:
    """Collect every ``*_report.json`` in ``outdir`` into tables and plot data.

    Writes ``report.md`` plus ``displacement_traces.csv`` (long format,
    one block per trace) and ``rolling_rates.csv`` (per-window HR/RR with
    truth) when the matching series files exist.
    """
    outdir = Path(outdir)
    order = {e: i for i, e in enumerate(("range", "noise", "displacement", "vitals"))}
    files = sorted(outdir.glob("*_report.json"),
                   key=lambda p: order.get(p.name.split("_report")[0], 99))
    if not files:
        raise FileNotFoundError(f"no *_report.json files in {outdir}")
    reports = [report_from_json(p.read_text()) for p in files]
    written = [outdir / "report.md"]
    written[0].write_text(markdown_report(reports))

    for prefix, target, key in (("series_displacement_", "displacement_traces.csv", "trace"),
                                ("series_rolling_", "rolling_rates.csv", "profile")):
        parts = sorted(outdir.glob(f"{prefix}*.csv"))
        if not parts:
            continue
        with open(outdir / target, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = None
            for p in parts:
                with open(p, newline="") as src:
                    rows = list(csv.reader(src))
                if header is None:
                    header = rows[0]
                    w.writerow([key] + header)
                name = p.stem[len(prefix):]
                for r in rows[1:]:
                    w.writerow([name] + r)
        written.append(outdir / target)
    return written
