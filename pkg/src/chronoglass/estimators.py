"""scikit-learn style wrappers around the functional API.

The transformers accept a single square matrix or a stack of shape
``(n, d, d)`` and map each matrix through a (fractional) generalized
transposition.  ``UBBSearch`` fits to a bipartite unitary and exposes the
unitary pair it finds.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import DimensionError, check_matrix
from .gentrans import (
    GenTransposition,
    fractional_transpose,
    gen_transpose,
    is_unital_gt,
    ubb_search,
    unitalize,
)
from .matcore import fractional_swap

__all__ = ["GeneralizedTransposer", "FractionalTransposer", "UBBSearch"]


def _as_stack(x):
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 2:
        return arr[None], True
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionError(f"expected (d, d) or (n, d, d), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("input contains NaN or Inf entries")
    return arr, False


class GeneralizedTransposer(TransformerMixin, BaseEstimator):
    """Apply ``T[w]`` to matrices; ``inverse_transform`` applies ``T[w†]``.

    Parameters
    ----------
    w : array of shape (d², d²)
        Bipartite operator defining the transposition.
    """

    def __init__(self, w=None):
        self.w = w

    def fit(self, X=None, y=None):
        if self.w is None:
            raise ValueError("w must be given")
        self.transposition_ = GenTransposition(check_matrix(self.w, "w", square=True))
        self.dim_ = self.transposition_.dim
        self.is_unitary_ = self.transposition_.is_unitary
        self.is_unital_ = is_unital_gt(self.transposition_, 1e-9)
        return self

    def _apply(self, X, t):
        stack, single = _as_stack(X)
        if stack.shape[1] != self.dim_:
            raise DimensionError(f"matrices have size {stack.shape[1]}, expected {self.dim_}")
        out = np.array([gen_transpose(m, t) for m in stack])
        return out[0] if single else out

    def transform(self, X):
        check_is_fitted(self, "transposition_")
        return self._apply(X, self.transposition_)

    def inverse_transform(self, X):
        check_is_fitted(self, "transposition_")
        return self._apply(X, self.transposition_.adjoint)

    def unitalized(self, **kwargs):
        """A unital transposer from the local orbit of ``w`` (or ``None``)."""
        check_is_fitted(self, "transposition_")
        wp = unitalize(self.transposition_, **kwargs)
        return None if wp is None else GeneralizedTransposer(wp).fit()


class FractionalTransposer(TransformerMixin, BaseEstimator):
    """``M ↦ M^{T(θ)}``; ``inverse_transform`` applies ``T(−θ)``."""

    def __init__(self, theta=np.pi):
        self.theta = theta

    def fit(self, X=None, y=None):
        self.theta_ = float(self.theta)
        return self

    def _apply(self, X, theta):
        stack, single = _as_stack(X)
        out = np.array([fractional_transpose(m, theta) for m in stack])
        return out[0] if single else out

    def transform(self, X):
        check_is_fitted(self, "theta_")
        return self._apply(X, self.theta_)

    def inverse_transform(self, X):
        check_is_fitted(self, "theta_")
        return self._apply(X, -self.theta_)

    def as_generalized(self, dim):
        """Equivalent :class:`GeneralizedTransposer` with ``w = F(θ)``."""
        return GeneralizedTransposer(fractional_swap(self.theta, dim)).fit()


class UBBSearch(BaseEstimator):
    """Search for unitaries that ``T[W]`` maps to unitaries.

    ``fit(W)`` stores ``result_`` (the full search record), ``pair_`` as
    ``(U, V)`` and ``success_``.
    """

    def __init__(self, max_iter=10_000, tol=1e-10, restarts=32, random_state=0):
        self.max_iter = max_iter
        self.tol = tol
        self.restarts = restarts
        self.random_state = random_state

    def fit(self, W, y=None):
        res = ubb_search(
            check_matrix(W, "W", square=True),
            max_iter=self.max_iter,
            tol=self.tol,
            restarts=self.restarts,
            rng=self.random_state,
        )
        self.result_ = res
        self.pair_ = (res.u, res.v)
        self.success_ = res.success
        return self
