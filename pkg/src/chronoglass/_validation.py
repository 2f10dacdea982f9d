"""Input validation helpers shared by every module."""

import numbers

import numpy as np

MAX_DIM = 64
DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when matrix shapes or subsystem dimensions do not fit together."""


def check_matrix(m, name="m", square=False, max_dim=None):
    """Return ``m`` as a finite 2-D complex128 array.

    Parameters
    ----------
    m : array-like
        Candidate matrix.
    name : str
        Used in error messages so that CLI users can see which field failed.
    square : bool
        Require ``rows == cols``.
    max_dim : int, optional
        Reject matrices with a side larger than this.
    """
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if arr.size == 0:
        raise DimensionError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if max_dim is not None and max(arr.shape) > max_dim:
        raise DimensionError(
            f"{name} has side {max(arr.shape)} > {max_dim}; desk-scale inputs only"
        )
    return arr


def check_vector(v, name="v"):
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.reshape(-1)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def check_dims(dims, total=None, name="dims"):
    """Validate a tuple of subsystem dimensions, optionally against ``total``."""
    try:
        dims = tuple(int(d) for d in dims)
    except TypeError:
        raise DimensionError(f"{name} must be a sequence of positive integers") from None
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"{name} must be non-empty positive integers, got {dims}")
    if total is not None and int(np.prod(dims)) != total:
        raise DimensionError(
            f"{name}={dims} has product {int(np.prod(dims))}, expected {total}"
        )
    return dims


def check_tol(tol):
    if not isinstance(tol, numbers.Real) or tol < 0:
        raise ValueError(f"tolerance must be a non-negative real, got {tol!r}")
    return float(tol)


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def square_root_dim(n, name="matrix"):
    """Return ``d`` with ``d * d == n`` or raise."""
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionError(f"{name} dimension {n} is not a perfect square")
    return d
