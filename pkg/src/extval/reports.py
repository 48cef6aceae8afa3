"""Reading label files and writing CSV/JSON reports with stable formatting."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path

from .characterization import GridResult, SweepPoint, ViolationReport, rank_table
from .classic_measures import MEASURES, MeasureVector
from .errors import EmptyInputError, ExtvalError
from .tables import Labeling

# short column names used in CSV output, in CSV column order
CSV_MEASURES = (
    ("q0", "q0"),
    ("q2", "q2"),
    ("rand", "rand"),
    ("jaccard", "jaccard"),
    ("fowlkes_mallows", "fm"),
    ("gamma", "gamma"),
    ("hamming", "hamming"),
)


class LabelFileError(ExtvalError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(x: float) -> str:
    """12 significant digits, locale independent."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0:
        return "0"
    return format(x, ".12g")


def read_labels_csv(path_or_file) -> Labeling:
    """Parse a ``class,cluster`` CSV; values are arbitrary strings."""
    if isinstance(path_or_file, (str, Path)):
        with open(path_or_file, newline="", encoding="utf-8") as fh:
            return read_labels_csv(fh)
    reader = csv.reader(path_or_file)
    header = next(reader, None)
    if header is None:
        raise EmptyInputError("label file is empty")
    if [h.strip() for h in header] != ["class", "cluster"]:
        raise LabelFileError(f"expected header 'class,cluster', got {','.join(header)!r}", 1)
    classes, clusters = [], []
    for row in reader:
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != 2:
            raise LabelFileError(f"expected 2 fields, got {len(row)}", reader.line_num)
        c, k = row[0].strip(), row[1].strip()
        if not c or not k:
            raise LabelFileError("empty class or cluster label", reader.line_num)
        classes.append(c)
        clusters.append(k)
    if not classes:
        raise EmptyInputError("label file has no data rows")
    return Labeling.from_labels(classes, clusters)


def measure_json(vector: MeasureVector) -> str:
    return json.dumps(vector.to_dict(), indent=2)


def _write(rows: Iterable[Sequence[str]], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)


def grid_rows(result: GridResult):
    yield ["ku", "kn", "eps1", "eps2"] + [short for _, short in CSV_MEASURES]
    for row in result.rows:
        p = row.params
        yield [str(p.useful_clusters), str(p.noise_clusters), fmt(p.eps1), fmt(p.eps2)] + [
            fmt(row.measures[m]) for m, _ in CSV_MEASURES
        ]


def rank_rows(result: GridResult):
    ranks = rank_table(result)
    yield ["combo_index"] + [f"{short}_rank" for _, short in CSV_MEASURES]
    for i in range(len(result)):
        yield [str(i)] + [fmt(ranks[m][i]) for m, _ in CSV_MEASURES]


def sweep_rows(points: Sequence[SweepPoint]):
    yield ["eps1"] + [short for _, short in CSV_MEASURES]
    for pt in points:
        yield [fmt(pt.eps1)] + [fmt(pt.measures[m]) for m, _ in CSV_MEASURES]


def to_csv(rows) -> str:
    buf = io.StringIO()
    _write(rows, buf)
    return buf.getvalue()


def write_csv(path: Path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        _write(rows, fh)


_TABLE2_HEAD = ("Rand", "Fowlkes", "Gamma", "Jacard", "Hamming")
_TABLE2_KEYS = ("rand", "fowlkes_mallows", "gamma", "jaccard", "hamming")


def summary_text(reports: Sequence[ViolationReport]) -> str:
    """Plain-text violation summary; one P2 table line per pair convention."""
    lines = []
    p2 = reports[0].checks["P2"]
    lines.append(f"P2: failed noise-cluster sequences (out of {p2.sequences})")
    lines.append("convention  " + "".join(f"{h:>9}" for h in _TABLE2_HEAD))
    for rep in reports:
        counts = rep.checks["P2"].failed
        lines.append(f"{rep.pair_convention:<11} " + "".join(f"{counts[k]:>9d}" for k in _TABLE2_KEYS))
    lines.append("")
    head = reports[0]
    lines.append(f"failed sequences ({head.pair_convention} pair counts)")
    lines.append("property  " + "".join(f"{m:>17}" for m in MEASURES))
    for name, check in head.checks.items():
        lines.append(f"{name:<9} " + "".join(f"{check.failed[m]:>17d}" for m in MEASURES))
    return "\n".join(lines) + "\n"
