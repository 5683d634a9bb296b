"""Dense matrix validation, norms and small symmetric eigenproblems.

All public entry points of the package funnel their array inputs through
:func:`as_matrix`, so downstream code can assume finite 2-D float64 arrays.
"""

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidConfigError,
    NonFiniteError,
    NotSquareError,
    NotSymmetricError,
)

_POWER_TOL = 1e-12
_POWER_MAX_ITERS = 10_000


def as_matrix(values, name="matrix"):
    """Coerce to a finite 2-D float64 array with at least one row and column."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise InvalidConfigError(f"{name} must be 2-D, got {arr.ndim}-D")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidConfigError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def as_vector(values, size=None, name="vector"):
    arr = np.asarray(values, dtype=float).ravel()
    if size is not None and arr.size != size:
        raise DimensionMismatchError(f"{name} must have length {size}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return arr


def as_index_set(indices, size, name="index set"):
    """Validate and sort a set of distinct indices into a dimension of length `size`."""
    idx = np.atleast_1d(np.asarray(indices, dtype=int)).ravel()
    if idx.size == 0:
        return idx
    idx = np.sort(idx)
    if np.any(np.diff(idx) == 0):
        raise InvalidConfigError(f"{name} contains duplicate indices")
    if idx[0] < 0 or idx[-1] >= size:
        raise InvalidConfigError(f"{name} out of bounds for dimension {size}")
    return idx


def complement_indices(indices, size):
    mask = np.ones(size, dtype=bool)
    mask[indices] = False
    return np.nonzero(mask)[0]


def row_norms(matrix):
    """Euclidean norm of every row."""
    return np.sqrt((np.asarray(matrix, dtype=float) ** 2).sum(axis=1))


def matrix_norm(matrix, kind):
    """One of the four standard matrix norms.

    kind: "one" (max column abs sum), "infinity" (max row abs sum),
    "frobenius", or "spectral" (largest singular value, computed by power
    iteration on the Gram matrix).
    """
    m = as_matrix(matrix)
    if kind == "one":
        return float(np.abs(m).sum(axis=0).max())
    if kind == "infinity":
        return float(np.abs(m).sum(axis=1).max())
    if kind == "frobenius":
        return float(np.sqrt((m * m).sum()))
    if kind == "spectral":
        return float(np.sqrt(top_eigenvalue_psd(m.T @ m)))
    raise InvalidConfigError(f"unknown norm kind {kind!r}")


def block_norm(matrix, outer, inner=2):
    """Block norm: `inner` norm of each row, aggregated with the `outer` norm.

    Only outer in {1, inf} with inner == 2 is supported: sum respectively max
    of the row Euclidean norms.
    """
    if inner != 2:
        raise InvalidConfigError("only inner norm 2 is supported")
    m = as_matrix(matrix)
    norms = row_norms(m)
    if outer == 1:
        return float(norms.sum())
    if outer in (np.inf, float("inf"), "inf"):
        return float(norms.max())
    raise InvalidConfigError("outer norm must be 1 or inf")


def top_eigenvalue_psd(sym):
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Deterministic: the all-ones start vector is the primary seed; a linear
    ramp is used as a second start so that an exact orthogonality between
    the ones vector and the top eigenspace cannot silently return a smaller
    eigenvalue.
    """
    s = np.asarray(sym, dtype=float)
    n = s.shape[0]
    starts = [np.ones(n)]
    if n > 1:
        starts.append(1.0 + np.arange(n) / n)
    best = 0.0
    for x in starts:
        x = x / np.linalg.norm(x)
        estimate = 0.0
        for _ in range(_POWER_MAX_ITERS):
            y = s @ x
            rayleigh = float(x @ y)
            scale = np.linalg.norm(y)
            if scale == 0.0:
                rayleigh = 0.0
                break
            x = y / scale
            if abs(rayleigh - estimate) <= _POWER_TOL * max(abs(rayleigh), 1e-300):
                estimate = rayleigh
                break
            estimate = rayleigh
        best = max(best, estimate)
    return float(max(best, 0.0))


def min_symmetric_eigenvalue(matrix, rel_asym_tol=1e-10):
    """Smallest eigenvalue of a symmetric matrix (full eigendecomposition)."""
    m = as_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise NotSquareError(f"matrix is {m.shape[0]}x{m.shape[1]}")
    scale = np.sqrt((m * m).sum())
    asym = np.sqrt(((m - m.T) ** 2).sum())
    if asym > rel_asym_tol * max(scale, 1e-300):
        raise NotSymmetricError(f"relative asymmetry {asym / max(scale, 1e-300):.3e}")
    sym = 0.5 * (m + m.T)
    return float(np.linalg.eigvalsh(sym)[0])
