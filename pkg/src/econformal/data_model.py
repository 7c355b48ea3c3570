"""Core dataset types and the probset-csv v1 ingest format.

probset-csv v1 is the file contract between probability exporters and this
engine: UTF-8 CSV, header line ``p0,p1,...,p{K-1},label``, an optional second
comment line ``# classes: name0,name1,...``, then one record per line with K
decimal probabilities and an integer class index. LF and CRLF line endings are
both accepted; blank lines are ignored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from econformal.formatting import sig9

# Softmax rows exported through decimal text never sum to exactly 1.
ROW_SUM_TOLERANCE = 1e-4

_FLOAT_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INT_RE = re.compile(r"^[+-]?\d+$")
_CLASSES_PREFIX = "# classes:"


class DatasetFormatError(ValueError):
    """An ingest stream violated the probset-csv contract.

    ``line`` carries the 1-based line number of the offending line when the
    failure is attributable to one.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)
        self.line = line


def validate_probability_vector(probs: np.ndarray) -> None:
    """Check entries in [0, 1] and row sum within ROW_SUM_TOLERANCE of 1."""
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("probability vector must be 1-d and non-empty")
    if not np.all(np.isfinite(probs)):
        raise ValueError("probability vector contains non-finite entries")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        bad = probs[(probs < 0.0) | (probs > 1.0)][0]
        raise ValueError(f"probability {sig9(float(bad))} outside [0, 1]")
    total = math.fsum(probs.tolist())
    if abs(total - 1.0) > ROW_SUM_TOLERANCE:
        raise ValueError(f"row sum {sig9(total)} exceeds tolerance")


@dataclass(frozen=True)
class ProbabilityRecord:
    """One labeled instance: per-class probabilities plus the true class index."""

    probs: np.ndarray
    label: int

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        validate_probability_vector(probs)
        if not 0 <= int(self.label) < probs.size:
            raise ValueError(
                f"label {self.label} out of range for {probs.size} classes"
            )
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "label", int(self.label))

    @property
    def num_classes(self) -> int:
        return int(self.probs.size)

    def __eq__(self, other):
        if not isinstance(other, ProbabilityRecord):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.probs, other.probs)


@dataclass(frozen=True)
class LabeledProbabilityDataset:
    """Ordered collection of records sharing one class count K.

    Immutable after construction; safe for concurrent reads. Duplicate rows
    are allowed. ``class_names`` is optional display metadata; absent names
    render as ``class_<k>``.
    """

    records: tuple[ProbabilityRecord, ...]
    num_classes: int
    class_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if self.num_classes < 1:
            raise ValueError("num_classes must be positive")
        for r in self.records:
            if r.num_classes != self.num_classes:
                raise ValueError(
                    f"record has {r.num_classes} classes, dataset has {self.num_classes}"
                )
        if self.class_names is not None:
            names = tuple(self.class_names)
            if len(names) != self.num_classes:
                raise ValueError(
                    f"{len(names)} class names for {self.num_classes} classes"
                )
            for name in names:
                if "," in name or "\n" in name or "\r" in name:
                    raise ValueError(f"class name {name!r} cannot be serialized")
            object.__setattr__(self, "class_names", names)

    def __len__(self) -> int:
        return len(self.records)

    def class_name(self, k: int) -> str:
        if not 0 <= k < self.num_classes:
            raise IndexError(f"class index {k} out of range")
        if self.class_names is not None:
            return self.class_names[k]
        return f"class_{k}"

    def probs_matrix(self) -> np.ndarray:
        """All probability rows as a read-only (N, K) array."""
        out = np.stack([r.probs for r in self.records]) if self.records else np.empty((0, self.num_classes))
        out.flags.writeable = False
        return out

    def labels(self) -> np.ndarray:
        out = np.array([r.label for r in self.records], dtype=np.int64)
        out.flags.writeable = False
        return out


@dataclass(frozen=True)
class SplitSpec:
    """How to split one dataset into calibration and test halves.

    The shuffle uses numpy's Philox counter-based generator seeded from
    ``seed``, so equal seeds give identical partitions on any platform.
    """

    calibration_fraction: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.calibration_fraction < 1.0:
            raise ValueError(
                f"calibration_fraction {self.calibration_fraction} not in (0, 1)"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))


def _parse_header(line: str) -> int:
    cols = line.split(",")
    if len(cols) < 2 or cols[-1] != "label":
        raise DatasetFormatError(f"malformed header {line!r}", line=1)
    for i, col in enumerate(cols[:-1]):
        if col != f"p{i}":
            raise DatasetFormatError(f"malformed header {line!r}", line=1)
    return len(cols) - 1


def _parse_class_names(line: str, num_classes: int) -> tuple[str, ...]:
    names = tuple(n.strip() for n in line[len(_CLASSES_PREFIX):].split(","))
    if len(names) != num_classes:
        raise DatasetFormatError(
            f"{len(names)} class names for {num_classes} classes", line=2
        )
    return names


def _parse_row(line: str, line_no: int, num_classes: int) -> ProbabilityRecord:
    parts = line.split(",")
    if len(parts) != num_classes + 1:
        raise DatasetFormatError(
            f"expected {num_classes + 1} columns, got {len(parts)}", line=line_no
        )
    values = []
    for part in parts[:-1]:
        if not _FLOAT_RE.match(part):
            raise DatasetFormatError(f"invalid probability {part!r}", line=line_no)
        value = float(part)
        if not 0.0 <= value <= 1.0:
            raise DatasetFormatError(
                f"probability {sig9(value)} outside [0, 1]", line=line_no
            )
        values.append(value)
    total = math.fsum(values)
    if abs(total - 1.0) > ROW_SUM_TOLERANCE:
        raise DatasetFormatError(f"row sum {sig9(total)} exceeds tolerance", line=line_no)
    raw_label = parts[-1]
    if not _INT_RE.match(raw_label):
        raise DatasetFormatError(f"invalid label {raw_label!r}", line=line_no)
    label = int(raw_label)
    if not 0 <= label < num_classes:
        raise DatasetFormatError(
            f"label {label} out of range for {num_classes} classes", line=line_no
        )
    return ProbabilityRecord(probs=np.array(values), label=label)


def parse_dataset(source: bytes | BinaryIO) -> LabeledProbabilityDataset:
    """Parse a probset-csv v1 byte stream into a validated dataset.

    K is inferred from the header; record order follows file order. Every
    contract violation raises DatasetFormatError with a 1-based line number.
    """
    data = bytes(source) if isinstance(source, (bytes, bytearray)) else source.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetFormatError(f"not valid UTF-8: {exc}") from exc

    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DatasetFormatError("missing header", line=1)
    num_classes = _parse_header(lines[0])

    class_names = None
    body_start = 1
    if len(lines) > 1 and lines[1].startswith(_CLASSES_PREFIX):
        class_names = _parse_class_names(lines[1], num_classes)
        body_start = 2

    records = []
    for line_no, line in enumerate(lines[body_start:], start=body_start + 1):
        if not line.strip():
            continue
        records.append(_parse_row(line, line_no, num_classes))
    return LabeledProbabilityDataset(
        records=tuple(records), num_classes=num_classes, class_names=class_names
    )


def serialize_dataset(dataset: LabeledProbabilityDataset) -> bytes:
    """Write a dataset back to probset-csv v1 (LF endings, 9 significant digits).

    parse(serialize(d)) reproduces d up to that decimal rounding, which is far
    inside ROW_SUM_TOLERANCE.
    """
    lines = [",".join(f"p{i}" for i in range(dataset.num_classes)) + ",label"]
    if dataset.class_names is not None:
        lines.append(_CLASSES_PREFIX + " " + ",".join(dataset.class_names))
    for record in dataset.records:
        cells = [sig9(float(p)) for p in record.probs]
        cells.append(str(record.label))
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_dataset(path) -> LabeledProbabilityDataset:
    with open(path, "rb") as fh:
        return parse_dataset(fh)


def save_dataset(dataset: LabeledProbabilityDataset, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_dataset(dataset))


def split_dataset(
    data: LabeledProbabilityDataset, spec: SplitSpec
) -> tuple[LabeledProbabilityDataset, LabeledProbabilityDataset]:
    """Disjoint random partition into (calibration, test).

    The calibration side gets round(fraction * N) records (round half to
    even). Indices are shuffled with Philox(SeedSequence(seed)) and each side
    keeps the original file order. Equal seeds give identical partitions.
    """
    n = len(data.records)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    m = round(spec.calibration_fraction * n)
    if m < 1 or m > n - 1:
        raise ValueError(
            f"calibration fraction {spec.calibration_fraction} leaves an "
            f"empty side for {n} records"
        )
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.seed)))
    perm = rng.permutation(n)
    calib_idx = np.sort(perm[:m])
    test_idx = np.sort(perm[m:])

    def take(indices: Iterable[int]) -> LabeledProbabilityDataset:
        return LabeledProbabilityDataset(
            records=tuple(data.records[i] for i in indices),
            num_classes=data.num_classes,
            class_names=data.class_names,
        )

    return take(calib_idx), take(test_idx)
