"""Shared text formatting for CLI output and the key-value wire formats."""

from __future__ import annotations


def sig9(value: float) -> str:
    """Format a float with 9 significant digits (the human-facing convention)."""
    return f"{value:.9g}"


def lossless(value: float) -> str:
    """Shortest decimal that parses back to the exact same float.

    Used on machine-readable `#kv` lines so reports round-trip without loss;
    human-facing lines use sig9 instead.
    """
    return repr(float(value))


def kv_line(key: str, value, machine: bool = False) -> str:
    """Render one `key = value` line; floats honor the two conventions above."""
    if isinstance(value, bool):
        raise TypeError("booleans have no place in the kv formats")
    if isinstance(value, float):
        text = lossless(value) if machine else sig9(value)
    else:
        text = str(value)
    prefix = "#kv " if machine else ""
    return f"{prefix}{key} = {text}"
