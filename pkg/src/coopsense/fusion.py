"""Soft-combining rules applied by the band manager."""
from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive, check_positive_int
from .errors import DomainError

__all__ = [
    "UserReport",
    "WeightVector",
    "wc_weights",
    "wc_weight_matrix",
    "egc_weights",
    "combine",
    "effective_snr",
    "mean_snr_wc",
]

# distances this close to the mean give an undefined (0/0-like) weight
_MEAN_DISTANCE_TOL = 1e-9
# below this total raw weight the rule carries no information
_FALLBACK_SUM = 1e-9


@dataclass(frozen=True)
class UserReport:
    energy: float
    distance: float

    def __post_init__(self):
        object.__setattr__(self, "energy", check_nonnegative(self.energy, "energy"))
        object.__setattr__(self, "distance", check_positive(self.distance, "distance"))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Per-user combining weights and their sum.

    ``degenerate_fallback`` marks a vector that replaced an all-zero weighted
    rule by plain equal-gain weights.
    """

    weights: np.ndarray
    sum_a: float
    degenerate_fallback: bool = False

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0:
            raise DomainError("weights must not be empty")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise DomainError("weights must be finite and nonnegative")
        if w.sum() <= 0:
            raise DomainError("at least one weight must be positive")
        if abs(float(self.sum_a) - w.sum()) > 1e-12 * max(1.0, w.sum()):
            raise DomainError("sum_a does not match the weights")
        if self.degenerate_fallback and np.any(w != 1.0):
            raise DomainError("fallback weights must all equal 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "sum_a", float(self.sum_a))
        object.__setattr__(self, "degenerate_fallback", bool(self.degenerate_fallback))

    @classmethod
    def from_weights(cls, weights):
        w = np.asarray(weights, dtype=float)
        return cls(w, float(w.sum()))

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights) and self.sum_a == other.sum_a
                and self.degenerate_fallback == other.degenerate_fallback)

    def __hash__(self):
        return hash((self.weights.tobytes(), self.sum_a, self.degenerate_fallback))


def egc_weights(n):
    n = check_positive_int(n, "n")
    return WeightVector(np.ones(n), float(n), False)


def wc_weight_matrix(energies, distances, nu):
    """Vectorized weighted-combining weights.

    Parameters
    ----------
    energies : array_like, shape (..., n)
        Reported energies, one row per sensing round.
    distances : array_like, shape (n,)
        User distances to the primary transmitter.
    nu : float
        Path-loss exponent.

    Returns
    -------
    weights : ndarray, shape (..., n)
    fallback : ndarray of bool, shape (...)
        Rows where no user had a positive weight and equal gains were used.

    Notes
    -----
    Each weight is the dB energy relative to the mean report divided by the dB
    path loss relative to the mean distance.  Negative raw weights are clamped
    to zero, zero-energy users get zero, users at the mean distance get the
    neutral weight 1, and a row whose raw weights over users off the mean
    distance sum below 1e-9 falls back to all ones.  The neutral weight does
    not count towards that sum, so a single user or equal reports always fall
    back.
    """
    nu = check_positive(nu, "nu")
    y = np.asarray(energies, dtype=float)
    d = np.asarray(distances, dtype=float)
    if y.shape[-1:] != d.shape:
        raise ValueError(f"energies have {y.shape[-1:]} users, distances {d.shape}")
    if np.any(d <= 0):
        raise DomainError("distances must be positive")
    if np.any(y < 0):
        raise DomainError("energies must be nonnegative")
    y_mean = y.mean(axis=-1, keepdims=True)
    if np.any(y_mean <= 0):
        raise DomainError("all reported energies are zero")
    log_d = np.log10(d / d.mean())
    defined_d = np.abs(log_d) > _MEAN_DISTANCE_TOL
    positive_y = y > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = 10.0 * np.log10(np.where(positive_y, y, 1.0) / y_mean) / (10.0 * nu * np.where(defined_d, log_d, 1.0))
    raw = np.where(positive_y, raw, 0.0)
    raw = np.maximum(raw, 0.0)
    has_signal = np.where(defined_d, raw, 0.0).sum(axis=-1) >= _FALLBACK_SUM
    weights = np.where(defined_d, raw, 1.0)
    fallback = ~has_signal
    weights = np.where(fallback[..., None], 1.0, weights)
    return weights, fallback


def wc_weights(reports, nu):
    """Weighted-combining weights for one sensing round."""
    reports = list(reports)
    if not reports:
        raise DomainError("at least one report is required")
    energies = np.array([rep.energy for rep in reports])
    distances = np.array([rep.distance for rep in reports])
    w, fallback = wc_weight_matrix(energies, distances, nu)
    return WeightVector(w, float(w.sum()), bool(fallback))


def _weights_array(w):
    return w.weights if isinstance(w, WeightVector) else np.asarray(w, dtype=float)


def combine(w, energies):
    """Weighted sum of energies along the last axis."""
    wa = _weights_array(w)
    y = np.asarray(energies, dtype=float)
    if y.shape[-1] != wa.shape[-1]:
        raise ValueError(f"{y.shape[-1]} energies for {wa.shape[-1]} weights")
    out = (y * wa).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def effective_snr(w, snrs):
    """Weighted SNR sum ``sum_i a_i gamma_i``."""
    wa = _weights_array(w)
    g = np.asarray(snrs, dtype=float)
    if g.shape[-1] != wa.shape[-1]:
        raise ValueError(f"{g.shape[-1]} SNRs for {wa.shape[-1]} weights")
    out = (g * wa).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def mean_snr_wc(sum_a, mean_gamma, n):
    """Mean per-branch SNR seen by the weighted combiner, ``a * mean_gamma / n``."""
    sum_a = check_positive(sum_a, "sum_a")
    mean_gamma = check_positive(mean_gamma, "mean_gamma")
    n = check_positive_int(n, "n")
    return sum_a * mean_gamma / n
