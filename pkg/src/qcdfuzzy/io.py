"""Panel CSV files and JSON result documents.

A panel file is long-form CSV with header ``series_id,t,c1,...,cd`` and one
row per series and time point (``t`` counts from 1 within each series).
An optional first line ``# format_version: 1`` tags the layout. Reference
labels live in a sidecar ``<stem>.labels.csv`` with header
``series_id,label``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import DataError
from .panel import MtsPanel

FORMAT_VERSION = 1


class PanelFormatError(DataError):
    """Malformed panel file; ``line`` is the 1-based offending line."""

    def __init__(self, path, line, message):
        self.path, self.line = str(path), line
        super().__init__(f"{path}:{line}: {message}" if line else f"{path}: {message}")


def labels_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name[: -len(path.suffix)] + ".labels.csv" if path.suffix else path.name + ".labels.csv")


def write_panel_csv(panel: MtsPanel, path) -> Path:
    """Write ``panel`` (and its labels sidecar, when it has labels)."""
    path = Path(path)
    d = panel.d
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# format_version: {FORMAT_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["series_id", "t"] + [f"c{j + 1}" for j in range(d)])
        for sid, x in zip(panel.ids, panel.series):
            for t, row in enumerate(x, start=1):
                w.writerow([sid, t] + [repr(float(v)) for v in row])
    if panel.true_labels is not None:
        with open(labels_path(path), "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# format_version: {FORMAT_VERSION}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["series_id", "label"])
            for sid, lab in zip(panel.ids, panel.true_labels):
                w.writerow([sid, int(lab)])
    return path


def _data_lines(fh):
    for lineno, line in enumerate(fh, start=1):
        if line.startswith("#"):
            if line[1:].strip().startswith("format_version"):
                version = line.split(":", 1)[-1].strip()
                if version != str(FORMAT_VERSION):
                    raise PanelFormatError(fh.name, lineno, f"unsupported format_version {version}")
            continue
        if line.strip():
            yield lineno, line


def read_panel_csv(path, labels=True) -> MtsPanel:
    """Parse a panel file, checking the schema line by line.

    Raises :class:`PanelFormatError` naming the first offending line.
    """
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise PanelFormatError(path, 0, f"cannot open file ({exc.strerror})") from None
    with fh:
        rows = _data_lines(fh)
        try:
            lineno, header_line = next(rows)
        except StopIteration:
            raise PanelFormatError(path, 1, "file is empty; expected header 'series_id,t,c1,...'") from None
        header = next(csv.reader([header_line]))
        header = [h.strip() for h in header]
        if len(header) < 3 or header[:2] != ["series_id", "t"]:
            raise PanelFormatError(path, lineno, "header must start with 'series_id,t' followed by component columns")
        d = len(header) - 2
        if header[2:] != [f"c{j + 1}" for j in range(d)]:
            raise PanelFormatError(path, lineno, f"component columns must be named c1..c{d}")

        order, data, seen_done = [], {}, set()
        current = None
        for lineno, line in rows:
            fields = next(csv.reader([line]))
            if len(fields) != d + 2:
                raise PanelFormatError(path, lineno, f"expected {d + 2} fields, found {len(fields)}")
            sid = fields[0].strip()
            if not sid:
                raise PanelFormatError(path, lineno, "empty series_id")
            try:
                t = int(fields[1])
            except ValueError:
                raise PanelFormatError(path, lineno, f"time index {fields[1]!r} is not an integer") from None
            try:
                vals = [float(v) for v in fields[2:]]
            except ValueError:
                raise PanelFormatError(path, lineno, "component values must be numbers") from None
            if not all(math.isfinite(v) for v in vals):
                raise PanelFormatError(path, lineno, "component values must be finite")
            if sid != current:
                if sid in seen_done or sid in data:
                    raise PanelFormatError(path, lineno, f"rows of series {sid!r} are not contiguous")
                if current is not None:
                    seen_done.add(current)
                current = sid
                order.append(sid)
                data[sid] = []
            expected = len(data[sid]) + 1
            if t != expected:
                raise PanelFormatError(path, lineno, f"series {sid!r}: expected t={expected}, found t={t}")
            data[sid].append(vals)
    if not order:
        raise PanelFormatError(path, 0, "file contains a header but no data rows")

    true_labels = None
    lp = labels_path(path)
    if labels and lp.exists():
        true_labels = _read_labels(lp, order)
    return MtsPanel([np.array(data[s]) for s in order], order, true_labels)


def _read_labels(path, order):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = _data_lines(fh)
        try:
            lineno, header_line = next(rows)
        except StopIteration:
            raise PanelFormatError(path, 1, "labels file is empty") from None
        if [h.strip() for h in header_line.strip().split(",")] != ["series_id", "label"]:
            raise PanelFormatError(path, lineno, "labels header must be 'series_id,label'")
        found = {}
        for lineno, line in rows:
            fields = [f.strip() for f in line.strip().split(",")]
            if len(fields) != 2:
                raise PanelFormatError(path, lineno, "expected 2 fields")
            try:
                found[fields[0]] = int(fields[1])
            except ValueError:
                raise PanelFormatError(path, lineno, f"label {fields[1]!r} is not an integer") from None
    missing = [s for s in order if s not in found]
    if missing:
        raise PanelFormatError(path, 0, f"no label for series {missing[:5]}")
    return np.array([found[s] for s in order])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dump_json(doc, path=None) -> str:
    text = json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
