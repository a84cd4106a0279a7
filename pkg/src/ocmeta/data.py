"""Task file ingestion and emission.

A task file is UTF-8 text, one sample per line: `label,f1,...,fd` with the
label in {1,-1}, no header. A task directory holds one `.csv` file per task;
the file stem is the task id.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, ParseError


@dataclass
class TaskDataset:
    task_id: str
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64, values in {+1, -1}


def load_task(path, task_id=None):
    """Parse one task file; malformed rows raise with the 1-based line number."""
    path = Path(path)
    if task_id is None:
        task_id = path.stem
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"{path}: {e.strerror or e}") from e
    labels = []
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        tok = parts[0].strip()
        if tok == "1" or tok == "+1":
            label = 1
        elif tok == "-1":
            label = -1
        else:
            raise ParseError(path, lineno, f"label must be 1 or -1, got {tok!r}")
        feats = parts[1:]
        if width is None:
            if not feats:
                raise ParseError(path, lineno, "row has a label but no features")
            width = len(feats)
        elif len(feats) != width:
            raise ParseError(
                path, lineno, f"expected {width} features, found {len(feats)}"
            )
        row = np.empty(width)
        for j, f in enumerate(feats):
            try:
                v = float(f)
            except ValueError:
                raise ParseError(
                    path, lineno, f"non-numeric feature {f.strip()!r} (column {j + 2})"
                ) from None
            if not np.isfinite(v):
                raise ParseError(
                    path, lineno, f"non-finite feature {f.strip()!r} (column {j + 2})"
                )
            row[j] = v
        labels.append(label)
        rows.append(row)
    if not rows:
        raise ParseError(path, 1, "no samples in file")
    if 1 not in labels:
        raise DataError(f"{path}: no in-distribution (+1) rows")
    return TaskDataset(
        task_id=task_id,
        features=np.ascontiguousarray(rows),
        labels=np.array(labels, dtype=np.int64),
    )


def save_task(path, task):
    """Write a TaskDataset in the task file format (shortest round-trip
    float formatting, so save/load/save is byte-stable)."""
    lines = []
    for label, row in zip(task.labels, task.features):
        lines.append(",".join([str(int(label))] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_task_dir(dirpath):
    """All `*.csv` task files of a directory, sorted by task id."""
    dirpath = Path(dirpath)
    if not dirpath.is_dir():
        raise DataError(f"{dirpath}: not a directory")
    files = sorted(dirpath.glob("*.csv"))
    if not files:
        raise DataError(f"{dirpath}: no task files (*.csv)")
    return [load_task(f) for f in files]
