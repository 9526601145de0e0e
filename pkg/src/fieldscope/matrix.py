"""Symmetric labeled dissimilarity matrix with provenance metadata.

Error-flagged cells (pairs a measure could not be computed for) are stored
as NaN in the value array with a reason string per cell.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass
class DissimilarityMatrix:
    labels: list
    values: np.ndarray
    meta: dict = field(default_factory=dict)
    cell_errors: dict = field(default_factory=dict)  # (label_i, label_j) -> reason, i<j

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise InputError(
                f"matrix shape {self.values.shape} does not match {n} labels"
            )

    @property
    def n(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown label {label!r}") from None

    def get(self, label_i, label_j):
        return self.values[self.index(label_i), self.index(label_j)]

    def is_symmetric(self):
        v = self.values
        both_nan = np.isnan(v) & np.isnan(v.T)
        return bool(np.all((v == v.T) | both_nan))

    def row(self, label):
        """Off-diagonal row as (other_label, value) pairs in label order."""
        i = self.index(label)
        return [
            (lab, self.values[i, j])
            for j, lab in enumerate(self.labels)
            if j != i
        ]

    def to_csv_text(self):
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([""] + list(self.labels))
        for i, label in enumerate(self.labels):
            writer.writerow([label] + [_fmt(x) for x in self.values[i]])
        return buf.getvalue()

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text())

    def write_meta(self, path):
        meta = dict(self.meta)
        meta["labels"] = list(self.labels)
        meta["cell_errors"] = [
            {"i": i, "j": j, "reason": reason}
            for (i, j), reason in sorted(self.cell_errors.items())
        ]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_csv(cls, path, meta=None):
        try:
            fh = open(path, encoding="utf-8", newline="")
        except OSError as exc:
            raise InputError(f"cannot read matrix file {path}: {exc}") from exc
        with fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise InputError(f"empty matrix file {path}")
        labels = rows[0][1:]
        n = len(labels)
        if len(rows) != n + 1:
            raise InputError(f"matrix file {path}: expected {n} data rows")
        values = np.empty((n, n))
        for i, row in enumerate(rows[1:]):
            if row[0] != labels[i]:
                raise InputError(
                    f"matrix file {path}: row label {row[0]!r} != column label {labels[i]!r}"
                )
            values[i] = [float(x) for x in row[1:]]
        return cls(labels=labels, values=values, meta=meta or {})


def _fmt(x):
    if math.isnan(x):
        return "nan"
    return repr(float(x))
