"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

import numbers

import numpy as np

from .model import IsingHamiltonian, ModelError, QuboInstance, qubo_to_ising


def check_alpha(alpha) -> int:
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Integral) or alpha < 1:
        raise ModelError(f"alpha must be an integer >= 1, got {alpha!r}")
    return int(alpha)


def _int_array(a, name: str) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype == bool or not np.issubdtype(arr.dtype, np.integer):
        raise ModelError(f"{name} must hold integers, got dtype {arr.dtype}")
    return arr


def _from_arrays(h, j) -> IsingHamiltonian:
    h = _int_array(h, "h")
    j = _int_array(j, "J")
    if h.ndim != 1:
        raise ModelError("h must be one-dimensional")
    n = h.shape[0]
    if j.shape != (n, n):
        raise ModelError(f"J must have shape ({n}, {n}), got {j.shape}")
    if np.any(np.diag(j)):
        raise ModelError("J must have a zero diagonal")
    lower = np.tril(j, -1)
    if np.any(lower) and np.any(np.triu(j, 1)) and not np.array_equal(j, j.T):
        raise ModelError("J must be symmetric or strictly upper/lower triangular")
    upper = np.triu(j, 1) if not np.any(lower) else np.triu(j.T, 1)
    rows, cols = np.nonzero(upper)
    terms = {(int(a) + 1, int(b) + 1): int(upper[a, b]) for a, b in zip(rows, cols)}
    fields = {int(i) + 1: int(h[i]) for i in np.flatnonzero(h)}
    return IsingHamiltonian.from_terms(n, fields, terms)


def check_hamiltonian(X) -> tuple[IsingHamiltonian, int]:
    """Normalize supported inputs to ``(hamiltonian, offset)``.

    Accepts an :class:`IsingHamiltonian`, a :class:`QuboInstance` (converted
    with its scaling offset) or a pair ``(h, J)`` of integer arrays.  Floating
    point coefficients are rejected.
    """
    if isinstance(X, IsingHamiltonian):
        return X, 0
    if isinstance(X, QuboInstance):
        return qubo_to_ising(X)
    if isinstance(X, tuple) and len(X) == 2:
        return _from_arrays(*X), 0
    raise ModelError(
        f"expected IsingHamiltonian, QuboInstance or an (h, J) array pair, got {type(X).__name__}"
    )
