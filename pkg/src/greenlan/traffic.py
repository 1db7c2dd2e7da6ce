"""Traffic matrices, time periods and load-class conversion.

Device indices are 0-based in memory. Every user-facing position (error
messages, CSV/JSON files) is 1-based so it lines up with PC numbering.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

ABSTRACT_LOAD = "abstract-load"
MBPS = "mbps"
UNITS = (ABSTRACT_LOAD, MBPS)


class TrafficError(ValueError):
    """Raised when a traffic matrix or period set violates an invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TrafficMatrix:
    """Directed, nonnegative device-to-device traffic with an empty diagonal."""

    weights: np.ndarray
    unit: str = ABSTRACT_LOAD

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise TrafficError(f"traffic matrix must be square, got shape {w.shape}")
        if self.unit not in UNITS:
            raise TrafficError(f"unknown unit {self.unit!r}; expected one of {UNITS}")
        if not np.all(np.isfinite(w)):
            i, j = np.argwhere(~np.isfinite(w))[0]
            raise TrafficError(f"non-finite weight at ({i + 1},{j + 1})")
        if np.any(w < 0):
            i, j = np.argwhere(w < 0)[0]
            raise TrafficError(f"negative weight {w[i, j]} at ({i + 1},{j + 1})")
        diag = np.flatnonzero(np.diag(w))
        if diag.size:
            k = diag[0]
            raise TrafficError(f"nonzero diagonal at ({k + 1},{k + 1})")
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def reordered(self, order: Sequence[int]) -> "TrafficMatrix":
        """Return the matrix with rows and columns permuted to ``order``."""
        idx = np.asarray(order, dtype=int)
        return TrafficMatrix(self.weights[np.ix_(idx, idx)], self.unit)

    def __eq__(self, other):
        if not isinstance(other, TrafficMatrix):
            return NotImplemented
        return self.unit == other.unit and np.array_equal(self.weights, other.weights)

    __hash__ = None


@dataclass(frozen=True)
class PeriodProfile:
    name: str
    duration_hours_per_day: float
    matrix: TrafficMatrix

    def __post_init__(self):
        h = self.duration_hours_per_day
        if not (0 < h <= 24):
            raise TrafficError(f"period {self.name!r}: hours must lie in (0, 24], got {h}")


def check_day_coverage(profiles: Sequence[PeriodProfile], tol: float = 1e-9) -> None:
    """Raise unless the period durations add up to a full day."""
    total = sum(p.duration_hours_per_day for p in profiles)
    if abs(total - 24.0) > tol:
        raise TrafficError(f"period durations sum to {total} h, expected 24 h")


@dataclass(frozen=True)
class LoadClass:
    frame_bytes: int
    packets_per_second: int

    @property
    def mbps(self) -> float:
        return self.frame_bytes * 8 * self.packets_per_second / 1e6


# Large and small transmissions used in the reference experiment.
OFFICE_LOAD_CLASSES: dict[str, LoadClass] = {
    "10": LoadClass(frame_bytes=1125, packets_per_second=10000),
    "1": LoadClass(frame_bytes=1125, packets_per_second=1000),
}


def _symbol(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def combine(profiles: Sequence[PeriodProfile]) -> TrafficMatrix:
    """Duration-weighted sum of the period matrices.

    ``C[i][j] = sum_k hours_k * M_k[i][j]``; the unit is carried over.
    """
    if not profiles:
        raise TrafficError("combine needs at least one period")
    first = profiles[0].matrix
    acc = np.zeros_like(first.weights)
    for p in profiles:
        if p.matrix.n != first.n:
            raise TrafficError(
                f"period {p.name!r} has {p.matrix.n} devices, expected {first.n}"
            )
        if p.matrix.unit != first.unit:
            raise TrafficError(f"period {p.name!r} unit {p.matrix.unit!r} != {first.unit!r}")
        acc = acc + p.duration_hours_per_day * p.matrix.weights
    return TrafficMatrix(acc, first.unit)


def load_to_bandwidth(m: TrafficMatrix, table: Mapping[str, LoadClass]) -> TrafficMatrix:
    """Replace each abstract load symbol with its bandwidth in Mbps."""
    if m.unit != ABSTRACT_LOAD:
        raise TrafficError(f"matrix is already in {m.unit!r}")
    out = np.zeros_like(m.weights)
    for i, j in np.argwhere(m.weights != 0):
        sym = _symbol(m.weights[i, j])
        if sym not in table:
            raise TrafficError(
                f"unknown load symbol {sym!r} at ({i + 1},{j + 1}); known: {sorted(table)}"
            )
        out[i, j] = table[sym].mbps
    return TrafficMatrix(out, MBPS)


def _parse_number(tok: str, row: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise TrafficError(f"non-numeric entry {tok!r} at ({row},{col})") from None


def parse_csv(text: str, unit: str = ABSTRACT_LOAD) -> tuple[TrafficMatrix, list[str] | None]:
    """Parse a CSV matrix; an optional first row of labels is returned separately."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise TrafficError("empty CSV matrix")
    labels = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        labels = [c.strip() for c in rows[0]]
        rows = rows[1:]
    n = len(rows)
    for r, row in enumerate(rows, start=1):
        if len(row) != n:
            raise TrafficError(f"matrix is not square: row {r} has {len(row)} fields, expected {n}")
    if labels is not None and len(labels) != n:
        raise TrafficError(f"header has {len(labels)} labels for {n} rows")
    w = [[_parse_number(c.strip(), r, k) for k, c in enumerate(row, start=1)]
         for r, row in enumerate(rows, start=1)]
    return TrafficMatrix(np.array(w, dtype=float).reshape(n, n), unit), labels


def parse_matrix(text: str | bytes, format: str) -> TrafficMatrix:
    """Parse a matrix from CSV text or JSON.

    JSON may be a bare list of rows or an object with ``matrix`` and
    optional ``unit`` keys.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if format == "csv":
        return parse_csv(text)[0]
    if format == "json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise TrafficError(f"invalid JSON: {e}") from None
        unit = ABSTRACT_LOAD
        if isinstance(doc, dict):
            unit = doc.get("unit", ABSTRACT_LOAD)
            doc = doc.get("matrix")
        return matrix_from_rows(doc, unit)
    raise TrafficError(f"unknown matrix format {format!r}")


def matrix_from_rows(rows, unit: str = ABSTRACT_LOAD) -> TrafficMatrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise TrafficError("matrix must be a list of rows")
    n = len(rows)
    for r, row in enumerate(rows, start=1):
        if len(row) != n:
            raise TrafficError(f"matrix is not square: row {r} has {len(row)} entries, expected {n}")
        for k, x in enumerate(row, start=1):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise TrafficError(f"non-numeric entry {x!r} at ({r},{k})")
    return TrafficMatrix(np.array(rows, dtype=float).reshape(n, n), unit)


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def to_csv(m: TrafficMatrix, labels: Iterable[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if labels is not None:
        writer.writerow(list(labels))
    for row in m.weights:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def to_json(m: TrafficMatrix) -> str:
    rows = [[int(x) if float(x).is_integer() else float(x) for x in row] for row in m.weights]
    return json.dumps({"unit": m.unit, "matrix": rows})
