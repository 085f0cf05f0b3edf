"""Scikit-learn style wrapper around the reducer."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .engine import DEFAULT_ALPHA, reduce_hamiltonian
from .model import ModelError, QuboInstance
from .validation import check_alpha, check_hamiltonian


class HamiltonianReducer(TransformerMixin, BaseEstimator):
    """Shrink an Ising problem without losing its ground states.

    ``fit`` reduces one instance.  ``transform`` returns the reduced
    :class:`~hare.model.IsingHamiltonian` and ``inverse_transform`` maps
    reduced configurations (a vector or one row per configuration) back to
    the original variables.  For QUBO input the result is binary and energies
    are measured on the scaled Ising form.

    Attributes
    ----------
    reduced_ : IsingHamiltonian
    reduction_ : ReductionFunction
    report_ : RunReport
    offset_ : int
        ``min original == min reduced_ + offset_`` (including any QUBO
        conversion offset).
    """

    def __init__(self, alpha: int = DEFAULT_ALPHA, weak_ngs: bool = True):
        self.alpha = alpha
        self.weak_ngs = weak_ngs

    def fit(self, X, y=None):
        alpha = check_alpha(self.alpha)
        ham, conv_offset = check_hamiltonian(X)
        res = reduce_hamiltonian(ham, alpha=alpha, weak_ngs=bool(self.weak_ngs))
        self.input_ = ham
        self.binary_ = isinstance(X, QuboInstance)
        self.reduced_ = res.reduced
        self.reduction_ = res.function
        self.report_ = res.report
        self.offset_ = res.offset + conv_offset
        self.n_features_in_ = ham.n
        return self

    def transform(self, X):
        check_is_fitted(self, "reduced_")
        ham, _ = check_hamiltonian(X)
        if ham != self.input_:
            raise ModelError("transform expects the instance the reducer was fitted on")
        return self.reduced_

    def inverse_transform(self, Y):
        check_is_fitted(self, "reduction_")
        arr = np.asarray(Y)
        single = arr.ndim == 1
        rows = np.atleast_2d(arr)
        if rows.shape[1] != self.reduction_.n_reduced:
            raise ModelError(
                f"expected {self.reduction_.n_reduced} reduced spins, got {rows.shape[1]}"
            )
        out = np.array([self.reduction_(tuple(int(v) for v in r)) for r in rows], dtype=np.int64)
        out = out.reshape(len(rows), self.reduction_.n)
        if self.binary_:
            out = (out + 1) // 2
        return out[0] if single else out
