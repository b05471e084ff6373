"""scikit-learn compatible wrapper around :func:`infofringe.fitting.fit_k`."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .fitting import check_count_table, fit_k, log_likelihood
from .geometry import FringeLaw, Sign

CLASSES = np.array([1, 2])


def clicks_to_counts(X, y, sample_weight=None):
    """Aggregate per-click data into ``(x, n1, n2)`` rows.

    ``X`` holds one path difference per click (a single feature) and ``y``
    the detector that clicked, 1 or 2.  ``sample_weight`` lets one row stand
    for several identical clicks.
    """
    X, y = check_X_y(X, y, ensure_min_samples=1)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single feature (path difference), got {X.shape[1]}")
    y = np.asarray(y)
    if not np.all(np.isin(y, CLASSES)):
        raise ValueError("detector labels must be 1 or 2")
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    if w.shape != y.shape or np.any(w < 0):
        raise ValueError("sample_weight must be nonnegative with one entry per click")
    x = X[:, 0]
    rows = np.column_stack([x, w * (y == 1), w * (y == 2)])
    xs, n1, n2 = check_count_table(rows, min_distinct=1)
    return np.column_stack([xs, n1, n2])


class FringeClassifier(ClassifierMixin, BaseEstimator):
    """Learns the fringe wavenumber ``k`` from detector clicks.

    Parameters
    ----------
    sign : {"plus", "minus"}
        Which detector is bright at zero path difference ("plus": detector 1).
    k_max : float, optional
        Upper end of the search range; defaults to ``pi / (smallest x spacing)``.
    n_grid : int, optional
        Points in the coarse likelihood scan.

    Attributes
    ----------
    k_ : float
    stderr_ : float
    log_likelihood_ : float
    multimodal_ : bool
    law_ : FringeLaw
    """

    def __init__(self, sign="plus", k_max=None, n_grid=None):
        self.sign = sign
        self.k_max = k_max
        self.n_grid = n_grid

    def fit(self, X, y, sample_weight=None):
        return self.fit_counts(clicks_to_counts(X, y, sample_weight))

    def fit_counts(self, data):
        """Fit directly from ``(x, n1, n2)`` rows."""
        est = fit_k(data, Sign(self.sign), self.k_max, self.n_grid)
        self.k_ = est.k_hat
        self.stderr_ = est.stderr
        self.log_likelihood_ = est.log_likelihood
        self.multimodal_ = est.multimodal
        self.estimate_ = est
        self.law_ = FringeLaw(est.k_hat, Sign(self.sign))
        self.classes_ = CLASSES
        self.n_features_in_ = 1
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "law_")
        X = check_array(X)
        x = X[:, 0]
        return np.column_stack([self.law_.evaluate(x), self.law_.complement(x)])

    def predict(self, X):
        check_is_fitted(self, "law_")
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def log_likelihood(self, X, y, sample_weight=None):
        """Log-likelihood of clicks under the fitted law."""
        check_is_fitted(self, "law_")
        x, n1, n2 = clicks_to_counts(X, y, sample_weight).T
        return float(log_likelihood(self.k_, x, n1, n2, Sign(self.sign)))
