"""CSV ingestion of data sets and adjacency matrices."""

import csv
import math
import os
from pathlib import Path

import numpy as np

from .errors import EmptyFile, LabelMismatch, NonBinaryEntry, NonNumericCell, RaggedRows
from .graph import parse_adjacency
from .mestimator import DataMatrix

DATA_DIR_ENV = "ROBGGM_DATA_DIR"


def resolve_path(path):
    """Return ``path`` if it exists, else look it up in ``$ROBGGM_DATA_DIR``."""
    path = Path(path)
    if path.exists() or path.is_absolute():
        return path
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        candidate = Path(data_dir) / path
        if candidate.exists():
            return candidate
    return path


def _read_rows(path):
    path = resolve_path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [row for row in csv.reader(fh)]
    # trailing blank lines are tolerated, blank lines inside the table are not
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise EmptyFile(f"{path}: file is empty")
    return path, rows


def _parse_float(cell, row, col, path):
    text = cell.strip()
    try:
        value = float(text)
    except ValueError:
        what = "empty cell" if not text else f"non-numeric cell {text!r}"
        raise NonNumericCell(f"{path}: {what} at row {row}, column {col}", row, col) from None
    if not math.isfinite(value):
        raise NonNumericCell(f"{path}: non-finite value {text!r} at row {row}, column {col}", row, col)
    return value


def ingest_csv(path):
    """Read a comma-separated data file with a header row.

    Returns
    -------
    DataMatrix

    Raises
    ------
    EmptyFile, RaggedRows, NonNumericCell
        Row and column numbers in messages are 1-based file coordinates
        (the header is row 1).
    """
    path, rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if len(rows) < 2:
        raise EmptyFile(f"{path}: no data rows below the header")
    p = len(header)
    values = np.empty((len(rows) - 1, p))
    for k, row in enumerate(rows[1:]):
        file_row = k + 2
        if len(row) != p:
            raise RaggedRows(
                f"{path}: row {file_row} has {len(row)} cells, header has {p}", file_row, None
            )
        for j, cell in enumerate(row):
            values[k, j] = _parse_float(cell, file_row, j + 1, path)
    return DataMatrix(values, tuple(header))


def ingest_adjacency(path, expected_labels):
    """Read a 0/1 adjacency matrix and align it with the data columns.

    The header names the vertices; it must contain exactly the labels in
    ``expected_labels`` in any order. Rows may start with a label column
    (signalled by one extra header cell, typically empty); row labels, if
    present, are used to order the rows, otherwise rows follow the header.
    """
    path, rows = _read_rows(path)
    expected = [str(s) for s in expected_labels]
    p = len(expected)
    header = [h.strip() for h in rows[0]]
    body = rows[1:]

    has_label_col = len(header) == p + 1
    if has_label_col:
        header = header[1:]
    if sorted(header) != sorted(expected) or len(set(header)) != p:
        raise LabelMismatch(
            f"{path}: adjacency labels {header} do not match data columns {expected}"
        )
    if len(body) != p:
        raise RaggedRows(f"{path}: expected {p} matrix rows, found {len(body)}", len(body) + 1, None)

    m = np.empty((p, p))
    row_labels = []
    for k, row in enumerate(body):
        file_row = k + 2
        cells = row
        if has_label_col:
            if len(row) != p + 1:
                raise RaggedRows(f"{path}: row {file_row} has {len(row)} cells, expected {p + 1}", file_row, None)
            row_labels.append(row[0].strip())
            cells = row[1:]
        elif len(row) != p:
            raise RaggedRows(f"{path}: row {file_row} has {len(row)} cells, expected {p}", file_row, None)
        offset = 2 if has_label_col else 1
        for j, cell in enumerate(cells):
            m[k, j] = _parse_float(cell, file_row, j + offset, path)

    if has_label_col and any(row_labels):
        if sorted(row_labels) != sorted(expected):
            raise LabelMismatch(f"{path}: row labels {row_labels} do not match data columns {expected}")
        row_order = [row_labels.index(name) for name in expected]
    else:
        row_order = [header.index(name) for name in expected]
    col_order = [header.index(name) for name in expected]
    m = m[np.ix_(row_order, col_order)]
    bad = np.argwhere(~np.isin(m, (0.0, 1.0)))
    if bad.size:
        i, j = bad[0]
        raise NonBinaryEntry(f"{path}: entry ({expected[i]}, {expected[j]}) is {m[i, j]:g}, expected 0 or 1")
    return parse_adjacency(m.astype(int), tuple(expected))
