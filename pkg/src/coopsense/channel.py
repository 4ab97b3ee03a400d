"""Single-user energy-detector statistics and fading-channel SNR models.

The normalized energy ``Y`` collected over ``r = TB`` complex samples is
central chi-square with ``2r`` degrees of freedom on a white space and
noncentral chi-square with noncentrality ``2 r gamma`` when the primary is on.
"""
from dataclasses import dataclass
import enum
import math

import numpy as np

from ._validation import (check_nonnegative, check_positive, check_positive_int,
                          check_real)
from .errors import DomainError
from .specfun import log_bessel_i, marcum_q, regularized_upper_gamma

__all__ = [
    "Hypothesis",
    "SensingParams",
    "Awgn",
    "Rayleigh",
    "Nakagami",
    "Lognormal",
    "ChannelModel",
    "energy_density",
    "single_pf",
    "single_pd_awgn",
    "sample_energy",
    "sample_snr",
]


class Hypothesis(enum.Enum):
    H0 = 0  # white space
    H1 = 1  # primary transmitting


@dataclass(frozen=True)
class SensingParams:
    """Detector configuration shared by every cooperating user.

    Attributes
    ----------
    r : int
        Time-bandwidth product ``TB``.
    n : int
        Number of cooperating users.
    nu : float
        Path-loss exponent.
    lam : float
        Decision threshold on the combined energy.
    """

    r: int = 1
    n: int = 1
    nu: float = 4.0
    lam: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", check_positive_int(self.r, "r"))
        object.__setattr__(self, "n", check_positive_int(self.n, "n"))
        object.__setattr__(self, "nu", check_positive(self.nu, "nu"))
        object.__setattr__(self, "lam", check_nonnegative(self.lam, "lam"))


@dataclass(frozen=True)
class Awgn:
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", check_nonnegative(self.gamma, "gamma"))

    @property
    def name(self):
        return "awgn"


@dataclass(frozen=True)
class Rayleigh:
    mean_gamma: float

    def __post_init__(self):
        object.__setattr__(self, "mean_gamma", check_positive(self.mean_gamma, "mean_gamma"))

    @property
    def name(self):
        return "rayleigh"


@dataclass(frozen=True)
class Nakagami:
    m: int
    mean_gamma: float

    def __post_init__(self):
        # the closed form needs an integer gamma shape m*n
        object.__setattr__(self, "m", check_positive_int(self.m, "m"))
        object.__setattr__(self, "mean_gamma", check_positive(self.mean_gamma, "mean_gamma"))

    @property
    def name(self):
        return "nakagami"


@dataclass(frozen=True)
class Lognormal:
    mu_db: float
    sigma_db: float

    def __post_init__(self):
        object.__setattr__(self, "mu_db", check_real(self.mu_db, "mu_db"))
        object.__setattr__(self, "sigma_db", check_positive(self.sigma_db, "sigma_db"))

    @property
    def name(self):
        return "lognormal"


ChannelModel = Awgn | Rayleigh | Nakagami | Lognormal


def _central_log_density(y, r):
    # y > 0; the caller handles the origin
    return (r - 1) * math.log(y) - y / 2.0 - r * math.log(2.0) - math.lgamma(r)


def energy_density(y, r, gamma, h):
    """Density of the normalized energy ``Y`` at ``y`` under hypothesis ``h``."""
    y = check_nonnegative(y, "y")
    r = check_positive_int(r, "r")
    h = Hypothesis(h)
    if h is Hypothesis.H0 or check_nonnegative(gamma, "gamma") == 0.0:
        if y == 0.0:
            return 0.5 if r == 1 else 0.0
        return math.exp(_central_log_density(y, r))
    nc = 2.0 * r * gamma
    if y == 0.0:
        return 0.5 * math.exp(-nc / 2.0) if r == 1 else 0.0
    log_f = (-math.log(2.0) + 0.5 * (r - 1) * math.log(y / nc) - (nc + y) / 2.0
             + log_bessel_i(r - 1, math.sqrt(nc * y)))
    return math.exp(log_f)


def single_pf(lam, r):
    """False-alarm probability of one energy detector at threshold ``lam``."""
    lam = check_nonnegative(lam, "lam")
    return regularized_upper_gamma(check_positive_int(r, "r"), lam / 2.0)


def single_pd_awgn(lam, r, gamma):
    """Detection probability of one energy detector over a non-fading channel."""
    lam = check_nonnegative(lam, "lam")
    r = check_positive_int(r, "r")
    gamma = check_nonnegative(gamma, "gamma")
    return marcum_q(r, math.sqrt(2.0 * r * gamma), math.sqrt(lam))


def sample_energy(rng, r, gamma, h, size=None):
    """Draw normalized energies.

    Built as the sum of ``2r`` squared unit-variance Gaussians, each shifted by
    ``sqrt(gamma)`` under H1, which gives noncentrality ``2 r gamma`` exactly.
    ``gamma`` may be an array broadcastable to ``size``.
    """
    r = check_positive_int(r, "r")
    h = Hypothesis(h)
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    z = rng.standard_normal(shape + (2 * r,))
    if h is Hypothesis.H1:
        g = np.asarray(gamma, dtype=float)
        if np.any(g < 0):
            raise DomainError("gamma must be >= 0")
        z = z + np.sqrt(g)[..., None]
    y = np.square(z).sum(axis=-1)
    return float(y) if size is None else y


def sample_snr(rng, model, size=None):
    """Draw per-branch instantaneous SNRs (linear scale) from a channel model."""
    if isinstance(model, Awgn):
        out = np.full(() if size is None else size, model.gamma)
    elif isinstance(model, Rayleigh):
        out = rng.exponential(model.mean_gamma, size)
    elif isinstance(model, Nakagami):
        out = rng.gamma(model.m, model.mean_gamma / model.m, size)
    elif isinstance(model, Lognormal):
        out = 10.0 ** ((model.mu_db + model.sigma_db * rng.standard_normal(size)) / 10.0)
    else:
        raise TypeError(f"unknown channel model {model!r}")
    return float(out) if size is None else out
