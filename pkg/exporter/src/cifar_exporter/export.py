"""Train on CIFAR-10 and export test-set softmax probabilities.

The output is probset-csv v1, the file contract consumed by the prediction
engine: header ``p0,...,p9,label``, a ``# classes:`` comment with the CIFAR
class names, then one row of 10 probabilities plus the true label per test
image, 9 significant digits, LF endings.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")

import numpy as np
import tensorflow as tf

from cifar_exporter.model import build_model

CIFAR10_CLASS_NAMES = (
    "airplane", "automobile", "bird", "cat", "deer",
    "dog", "frog", "horse", "ship", "truck",
)


class DatasetUnavailableError(RuntimeError):
    """CIFAR-10 could not be downloaded or read."""


@dataclass(frozen=True)
class ExportConfig:
    epochs: int
    seed: int
    output_path: Path
    limit: int | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.limit is not None and self.limit < 1:
            raise ValueError(f"limit must be >= 1 when given, got {self.limit}")
        object.__setattr__(self, "output_path", Path(self.output_path))


def load_cifar10():
    """The standard CIFAR-10 download; raises DatasetUnavailableError offline."""
    try:
        return tf.keras.datasets.cifar10.load_data()
    except Exception as exc:
        raise DatasetUnavailableError(f"CIFAR-10 download failed: {exc}") from exc


def write_probset_csv(probs: np.ndarray, labels: np.ndarray, path: Path,
                      class_names=CIFAR10_CLASS_NAMES) -> None:
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels).reshape(-1)
    if probs.ndim != 2 or probs.shape[0] != labels.shape[0]:
        raise ValueError("probs must be (N, K) with one label per row")
    k = probs.shape[1]
    lines = [",".join(f"p{i}" for i in range(k)) + ",label"]
    if class_names is not None:
        if len(class_names) != k:
            raise ValueError(f"{len(class_names)} class names for {k} classes")
        lines.append("# classes: " + ",".join(class_names))
    for row, label in zip(probs, labels):
        cells = [f"{value:.9g}" for value in row]
        cells.append(str(int(label)))
        lines.append(",".join(cells))
    path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))


def train_and_export(config: ExportConfig, data=None) -> Path:
    """Train, print train/test accuracy, write the probability export.

    ``data`` defaults to the CIFAR-10 download; tests inject small arrays of
    the same shape to exercise the pipeline offline.
    """
    tf.keras.utils.set_random_seed(config.seed)
    (x_train, y_train), (x_test, y_test) = data if data is not None else load_cifar10()
    x_train = np.asarray(x_train, dtype=np.float32) / 255.0
    x_test = np.asarray(x_test, dtype=np.float32) / 255.0
    y_train = np.asarray(y_train).reshape(-1)
    y_test = np.asarray(y_test).reshape(-1)

    model = build_model(num_classes=len(CIFAR10_CLASS_NAMES))
    model.fit(x_train, y_train, epochs=config.epochs, verbose=2)

    _, train_acc = model.evaluate(x_train, y_train, verbose=0)
    _, test_acc = model.evaluate(x_test, y_test, verbose=0)
    print(f"train accuracy = {train_acc:.4f}")
    print(f"test accuracy = {test_acc:.4f}")

    if config.limit is not None:
        x_test, y_test = x_test[: config.limit], y_test[: config.limit]
    probs = model.predict(x_test, verbose=0)
    write_probset_csv(probs, y_test, config.output_path)
    print(f"wrote {len(y_test)} rows -> {config.output_path}")
    return config.output_path
