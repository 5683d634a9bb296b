"""Scikit-learn style front end for the component-count pipeline."""

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import InvalidConfigError
from .grouplasso import SolverSettings
from .linalg import as_matrix
from .moments import empirical_second_moment
from .pipeline import DEFAULT_EPSILON, DEFAULT_REG, estimate_components


class ComponentCountEstimator(BaseEstimator):
    """Estimate the latent dimensionality of nonnegative-dictionary data.

    The estimator contracts the fourth-order cumulant of the samples into a
    square moment matrix, solves a row-sparse self-representation problem on
    it, and reports the number of surviving rows as ``n_components_``.

    Parameters
    ----------
    reg : float, default=10.0
        Strength of the row-sparsity penalty.
    epsilon : float, default=1e-6
        Row-norm threshold of the final count.
    max_iters, rel_obj_tol, kkt_tol, step_rule :
        Solver controls; see :class:`nmfdim.grouplasso.SolverSettings`.

    Attributes
    ----------
    n_components_ : int
        Estimated number of latent components.
    row_norms_ : ndarray of shape (n_features,)
        Euclidean norms of the self-representation rows.
    relative_error_ : float
        Relative Frobenius reconstruction error of the moment matrix.
    second_moment_ : ndarray of shape (n_features, n_features)
        The contracted cumulant moment of the training data.
    solution_ : GroupLassoSolution
        Full solver output, including the optimality certificate.

    Examples
    --------
    >>> from nmfdim import ComponentCountEstimator
    >>> est = ComponentCountEstimator(reg=10.0).fit(X)   # doctest: +SKIP
    >>> est.n_components_                                # doctest: +SKIP
    """

    def __init__(self, reg=DEFAULT_REG, epsilon=DEFAULT_EPSILON, max_iters=50_000,
                 rel_obj_tol=1e-10, kkt_tol=1e-6, step_rule="fixed_lipschitz"):
        self.reg = reg
        self.epsilon = epsilon
        self.max_iters = max_iters
        self.rel_obj_tol = rel_obj_tol
        self.kkt_tol = kkt_tol
        self.step_rule = step_rule

    def _settings(self):
        return SolverSettings(
            max_iters=self.max_iters,
            rel_obj_tol=self.rel_obj_tol,
            kkt_tol=self.kkt_tol,
            step_rule=self.step_rule,
        )

    def fit(self, X, y=None):
        """Fit on samples-by-features data and estimate the component count."""
        X = as_matrix(X, name="X")
        if X.shape[0] < 2:
            raise InvalidConfigError("need at least 2 samples")
        self.n_features_in_ = X.shape[1]
        moment = empirical_second_moment(X.T).matrix
        result = estimate_components(
            data=None,
            reg=self.reg,
            epsilon=self.epsilon,
            settings=self._settings(),
            moment=moment,
        )
        self.second_moment_ = moment
        self.n_components_ = result.n_components
        self.row_norms_ = result.row_norms
        self.relative_error_ = result.relative_error
        self.solution_ = result.solution
        return self

    def fit_predict(self, X, y=None):
        """Fit and return the estimated component count."""
        return self.fit(X).n_components_

    def __sklearn_is_fitted__(self):
        return hasattr(self, "n_components_")
