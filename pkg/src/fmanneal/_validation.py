"""Input validation helpers shared by the estimators and functional API."""

import numpy as np

from .exceptions import InvalidDimensionError


def check_binary_vector(x, n=None, name="x"):
    """Return ``x`` as a 1-D float64 array of 0/1 values.

    Raises :class:`InvalidDimensionError` when the length does not match ``n``
    and :class:`ValueError` when entries are not binary.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidDimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise InvalidDimensionError(f"{name} has length {arr.shape[0]}, expected {n}")
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError(f"{name} must contain only 0/1 entries")
    return arr


def check_binary_matrix(X, n=None, name="X"):
    """2-D variant of :func:`check_binary_vector`; rows are samples."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InvalidDimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[1] != n:
        raise InvalidDimensionError(f"{name} has {arr.shape[1]} columns, expected {n}")
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError(f"{name} must contain only 0/1 entries")
    return arr


def check_positive_int(value, name, minimum=1):
    if isinstance(value, (bool, np.bool_)) or int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def bits_to_str(x):
    return "".join("1" if b else "0" for b in np.asarray(x).astype(bool))


def str_to_bits(s):
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {s!r}")
    return np.fromiter((c == "1" for c in s), dtype=np.float64, count=len(s))
