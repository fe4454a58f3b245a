"""plot: draw mean-square errors against step size on log-log axes.

Usage:
    plot --out figure.png --slope 0.8 table_a.csv:label_a table_b.csv ...

Each CSV must be an error table with header ``N,h,eps,M,seed`` and a trailing
``#``-comment metadata line carrying at least ``fitted_rate=...``.  One marker
series is drawn per file; a dashed reference line with the requested slope is
anchored at the first series' last (finest-step) point.  Output is
deterministic for fixed inputs: no timestamps are embedded.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "sfide-plot"

import matplotlib.pyplot as plt
import numpy as np

_COLUMNS = ("N", "h", "eps", "M", "seed")
_MARKERS = ("o", "s", "^", "D", "v", "P", "X")


class SchemaError(ValueError):
    """The input file does not match the error-table CSV schema."""


@dataclass(frozen=True)
class ErrorTableData:
    path: str
    h: np.ndarray
    eps: np.ndarray
    metadata: dict


@dataclass(frozen=True)
class PlotJob:
    input_csvs: list
    labels: list
    reference_slope: float
    output_image: str
    title: str = "mean-square error vs step size"

    def __post_init__(self):
        if len(self.input_csvs) != len(self.labels):
            raise ValueError("input_csvs and labels must have equal lengths")
        if not self.reference_slope > 0:
            raise ValueError("reference_slope must be positive")


def _parse_metadata(comment: str) -> dict:
    body = comment.lstrip("#").strip()
    meta = {}
    for item in body.split(", "):
        key, sep, value = item.partition("=")
        if sep:
            meta[key.strip()] = value
    return meta


def read_error_table(path: str) -> ErrorTableData:
    """Parse an error-table CSV; raises SchemaError naming any bad column."""
    with open(path, "r") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty CSV")
    header = lines[0].split(",")
    for col in _COLUMNS:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    idx_h = header.index("h")
    idx_eps = header.index("eps")
    metadata: dict = {}
    h, eps = [], []
    for ln in lines[1:]:
        if ln.startswith("#"):
            metadata.update(_parse_metadata(ln))
            continue
        parts = ln.split(",")
        if len(parts) != len(header):
            raise SchemaError(f"{path}: row has {len(parts)} fields, expected {len(header)}")
        try:
            h.append(float(parts[idx_h]))
            eps.append(float(parts[idx_eps]))
        except ValueError as exc:
            raise SchemaError(f"{path}: non-numeric value in row {ln!r}") from exc
    if not h:
        raise SchemaError(f"{path}: no data rows")
    return ErrorTableData(path=path, h=np.asarray(h), eps=np.asarray(eps), metadata=metadata)


def render(job: PlotJob) -> None:
    """Draw the figure described by the job and write it to job.output_image."""
    tables = [read_error_table(p) for p in job.input_csvs]

    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=150)
    for i, (table, label) in enumerate(zip(tables, job.labels)):
        rate = table.metadata.get("fitted_rate")
        if rate is not None:
            label = f"{label} (rate {float(rate):.3f})"
        ax.loglog(table.h, table.eps, marker=_MARKERS[i % len(_MARKERS)], label=label)

    anchor = tables[0]
    h0, e0 = anchor.h[-1], anchor.eps[-1]
    h_all = np.concatenate([t.h for t in tables])
    h_line = np.array([h_all.min(), h_all.max()])
    ax.loglog(h_line, e0 * (h_line / h0) ** job.reference_slope,
              "k--", linewidth=1.0, label=f"slope {job.reference_slope:g}")

    ax.set_xlabel("step size h")
    ax.set_ylabel("mean-square error")
    ax.set_title(job.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()

    ext = os.path.splitext(job.output_image)[1].lower()
    metadata = {"Date": None} if ext == ".svg" else {"Software": "sfide-plot"}
    fig.savefig(job.output_image, metadata=metadata)
    plt.close(fig)


def _split_spec(arg: str):
    # CSV or CSV:LABEL; a bare existing path wins over label splitting
    if os.path.exists(arg):
        label = os.path.splitext(os.path.basename(arg))[0]
        return arg, label
    if ":" in arg:
        path, label = arg.rsplit(":", 1)
        return path, label
    return arg, os.path.splitext(os.path.basename(arg))[0]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plot",
        description="Render a log-log convergence figure from error-table CSVs.",
    )
    ap.add_argument("csvs", nargs="+", metavar="CSV[:LABEL]")
    ap.add_argument("--out", required=True, help="output image (png or svg)")
    ap.add_argument("--slope", required=True, type=float,
                    help="reference-line slope (the expected rate)")
    ap.add_argument("--title", default="mean-square error vs step size")
    args = ap.parse_args(argv)

    paths, labels = [], []
    for arg in args.csvs:
        path, label = _split_spec(arg)
        paths.append(path)
        labels.append(label)
    try:
        job = PlotJob(input_csvs=paths, labels=labels, reference_slope=args.slope,
                      output_image=args.out, title=args.title)
        render(job)
    except (SchemaError, ValueError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} ({len(paths)} series, reference slope {args.slope:g})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
