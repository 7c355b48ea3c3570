"""CIFAR-10 probability exporter for the e-conformal prediction engine."""

from cifar_exporter.export import (
    CIFAR10_CLASS_NAMES,
    DatasetUnavailableError,
    ExportConfig,
    load_cifar10,
    train_and_export,
    write_probset_csv,
)

__version__ = "0.1.0"
