"""scikit-learn style wrapper around the fusion-center decision rule."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import analytic
from .fusion import combine, wc_weight_matrix


class CooperativeEnergyDetector(ClassifierMixin, BaseEstimator):
    """Cooperative energy detector with a threshold set for a target false-alarm rate.

    Each sample is one sensing round: the ``n`` normalized energies reported
    by the users.  ``fit`` only needs the number of users; the threshold comes
    from the central chi-square law, so labels are optional and unused.

    Parameters
    ----------
    scheme : {"egc", "wc"}
        Equal gain combining, or weighted combining with per-round weights
        from the reported energies and ``distances``.
    r : int
        Time-bandwidth product.
    target_pf : float
        False-alarm rate the threshold is set for.
    nu : float
        Path-loss exponent (``scheme="wc"`` only).
    distances : array_like of shape (n,), optional
        User distances to the primary transmitter; required for ``"wc"``.
    """

    def __init__(self, scheme="egc", r=1, target_pf=0.1, nu=4.0, distances=None):
        self.scheme = scheme
        self.r = r
        self.target_pf = target_pf
        self.nu = nu
        self.distances = distances

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        if self.scheme not in ("egc", "wc"):
            raise ValueError(f"scheme must be 'egc' or 'wc', got {self.scheme!r}")
        if np.any(X < 0):
            raise ValueError("energies must be nonnegative")
        n = X.shape[1]
        if self.scheme == "wc":
            if self.distances is None or len(self.distances) != n:
                raise ValueError("scheme='wc' needs one distance per user")
            self.distances_ = np.asarray(self.distances, dtype=float)
        self.n_features_in_ = n
        self.threshold_ = analytic.threshold_for_pf(self.target_pf, n, self.r)
        self.classes_ = np.array([0, 1])
        return self

    def _check(self, X):
        check_is_fitted(self, "threshold_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} users, got {X.shape[1]}")
        return X

    def decision_function(self, X):
        """Combined statistic minus the threshold; positive means signal present."""
        X = self._check(X)
        if self.scheme == "wc":
            weights, _ = wc_weight_matrix(X, self.distances_, self.nu)
        else:
            weights = np.ones(self.n_features_in_)
        return combine(weights, X) - self.threshold_

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)
