"""Closed-form cooperative detection and false-alarm probabilities.

All combining schemes share one parametrization: the weight sum ``sum_a``
scales the mean SNR of the combined statistic, and ``sum_a == n`` is equal
gain combining.  Under fading the combined SNR ``gamma_t`` is gamma
distributed (Rayleigh, Nakagami) or lognormal, and the detection
probability is the Marcum-Q function averaged over that law.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import integrate, special, stats

from ._validation import (check_nonnegative, check_positive, check_positive_int,
                          check_probability)
from .channel import Awgn, Lognormal, Nakagami, Rayleigh, SensingParams
from .errors import ConvergenceError, DomainError
from .specfun import (gauss_hermite, inverse_regularized_upper_gamma, log_kummer_1f1,
                      log_laguerre_sequence, marcum_q, marcum_q_complement,
                      regularized_upper_gamma)

__all__ = [
    "CooperativeScenario",
    "psi_f",
    "threshold_for_pf",
    "psi_d_awgn",
    "psi_m_awgn",
    "psi_d_rayleigh",
    "psi_d_nakagami",
    "psi_d_lognormal",
    "psi_d_numeric",
    "psi_d",
    "snr_density",
    "gamma_faded_pd",
]


@dataclass(frozen=True)
class CooperativeScenario:
    params: SensingParams
    model: object
    sum_a: float

    def __post_init__(self):
        object.__setattr__(self, "sum_a", check_positive(self.sum_a, "sum_a"))
        if not isinstance(self.model, (Awgn, Rayleigh, Nakagami, Lognormal)):
            raise TypeError(f"unknown channel model {self.model!r}")

    @classmethod
    def egc(cls, params, model):
        return cls(params, model, float(params.n))

    def psi_f(self):
        return psi_f(self.params.lam, self.params.n, self.params.r)

    def psi_d(self, order=5):
        return psi_d(self.model, self.params.lam, self.params.n, self.params.r,
                     self.sum_a, order=order)


def psi_f(lam, n, r):
    """Cooperative false-alarm probability ``Gamma(nr, lam/2) / Gamma(nr)``.

    Independent of the channel and of the weights.
    """
    lam = check_nonnegative(lam, "lam")
    order = check_positive_int(n, "n") * check_positive_int(r, "r")
    return regularized_upper_gamma(order, lam / 2.0)


def threshold_for_pf(target_pf, n, r):
    """Threshold ``lam`` at which ``psi_f(lam, n, r) == target_pf``."""
    target_pf = check_probability(target_pf, "target_pf")
    order = check_positive_int(n, "n") * check_positive_int(r, "r")
    return 2.0 * inverse_regularized_upper_gamma(order, target_pf)


def psi_d_awgn(lam, n, r, gamma_t):
    """Detection probability with a deterministic combined SNR ``gamma_t``."""
    lam = check_nonnegative(lam, "lam")
    n = check_positive_int(n, "n")
    r = check_positive_int(r, "r")
    gamma_t = check_nonnegative(gamma_t, "gamma_t")
    return marcum_q(n * r, math.sqrt(2.0 * r * gamma_t), math.sqrt(lam))


def psi_m_awgn(lam, n, r, gamma_t):
    """Missed-detection probability ``1 - psi_d_awgn``, accurate when it is tiny."""
    lam = check_nonnegative(lam, "lam")
    n = check_positive_int(n, "n")
    r = check_positive_int(r, "r")
    gamma_t = check_nonnegative(gamma_t, "gamma_t")
    return marcum_q_complement(n * r, math.sqrt(2.0 * r * gamma_t), math.sqrt(lam))


def gamma_faded_pd(lam, order, shape, theta):
    """Average ``Q_M(sqrt(2X), sqrt(lam))`` over ``X ~ Gamma(shape, theta)``.

    Closed form for integer ``order`` (M) and integer ``shape`` (N).  With
    ``c = lam/2``, ``u = 1/(1+theta)`` and ``v = theta/(1+theta)``::

        P = exp(-c u) [ sum_{k=0}^{N-2} v u^k L_k(-c v) + u^(N-1) L_{N-1}(-c v) ]
            + u^N exp(-c) sum_{i=1}^{M-1} c^i / i! 1F1(N; i+1; c v)

    The first bracket is the average of ``Q_1``; the sum adds the higher-order
    Marcum terms.  Every term is positive, so it is accumulated as a
    log-sum-exp.
    """
    lam = check_nonnegative(lam, "lam")
    order = check_positive_int(order, "order")
    shape = check_positive_int(shape, "shape")
    theta = check_positive(theta, "theta")
    c = lam / 2.0
    log_u = -math.log1p(theta)
    log_v = math.log(theta) + log_u
    u = math.exp(log_u)
    v = math.exp(log_v)
    lag_log, lag_sign = log_laguerre_sequence(shape - 1, -c * v)
    if np.any(lag_sign <= 0):
        # L_k(-y) has only positive coefficients; anything else is a numerical failure
        raise OverflowError("Laguerre recurrence lost its sign")
    k = np.arange(shape - 1)
    logs = list(log_v + k * log_u + lag_log[:-1] - c * u)
    logs.append((shape - 1) * log_u + lag_log[-1] - c * u)
    if c > 0:
        log_c = math.log(c)
        for i in range(1, order):
            log_f, sign = log_kummer_1f1(shape, i + 1, c * v)
            logs.append(shape * log_u - c + i * log_c - math.lgamma(i + 1) + log_f)
    logs = np.asarray(logs)
    if not np.all(np.isfinite(logs) | (logs == -np.inf)):
        raise OverflowError("non-finite term in the faded detection probability")
    top = logs.max()
    if not math.isfinite(top):
        raise OverflowError("faded detection probability underflowed/overflowed")
    total = math.exp(top) * math.fsum(np.exp(logs - top))
    if not math.isfinite(total) or total > 1.0 + 1e-9:
        raise OverflowError(f"faded detection probability out of range: {total}")
    return min(total, 1.0)


def psi_d_rayleigh(lam, n, r, mean_gamma, sum_a):
    """Cooperative detection probability under iid Rayleigh fading.

    The combined SNR is ``Gamma(n, a*mean_gamma/n)``; ``sum_a == n`` is EGC.
    """
    n = check_positive_int(n, "n")
    r = check_positive_int(r, "r")
    mean_gamma = check_positive(mean_gamma, "mean_gamma")
    sum_a = check_positive(sum_a, "sum_a")
    return gamma_faded_pd(lam, n * r, n, r * sum_a * mean_gamma / n)


def psi_d_nakagami(lam, n, r, m, mean_gamma, sum_a):
    """Cooperative detection probability under iid Nakagami-m fading.

    Same as the Rayleigh form with the gamma shape ``n`` replaced by ``m n``;
    the Marcum order stays ``n r``.
    """
    n = check_positive_int(n, "n")
    r = check_positive_int(r, "r")
    m = check_positive_int(m, "m")
    mean_gamma = check_positive(mean_gamma, "mean_gamma")
    sum_a = check_positive(sum_a, "sum_a")
    return gamma_faded_pd(lam, n * r, m * n, r * sum_a * mean_gamma / (m * n))


def psi_d_lognormal(lam, n, r, mu_db, sigma_db, sum_a, order=5):
    """Cooperative detection probability under lognormal shadowing.

    ``gamma_t = sum_a * 10**(S/10)`` with ``S ~ N(mu_db, sigma_db**2)``,
    averaged with an ``order``-point Gauss-Hermite rule.
    """
    lam = check_nonnegative(lam, "lam")
    n = check_positive_int(n, "n")
    r = check_positive_int(r, "r")
    sigma_db = check_positive(sigma_db, "sigma_db")
    sum_a = check_positive(sum_a, "sum_a")
    rule = gauss_hermite(order)
    gamma_t = sum_a * 10.0 ** ((math.sqrt(2.0) * sigma_db * rule.nodes + float(mu_db)) / 10.0)
    q = marcum_q(n * r, np.sqrt(2.0 * r * gamma_t), math.sqrt(lam))
    return float(np.dot(rule.weights, q) / rule.weights.sum())


def snr_density(model, n, sum_a):
    """Density of the combined SNR ``gamma_t`` assumed by the closed forms."""
    n = check_positive_int(n, "n")
    sum_a = check_positive(sum_a, "sum_a")
    if isinstance(model, Rayleigh):
        return stats.gamma(n, scale=sum_a * model.mean_gamma / n).pdf
    if isinstance(model, Nakagami):
        mn = model.m * n
        return stats.gamma(mn, scale=sum_a * model.mean_gamma / mn).pdf
    if isinstance(model, Lognormal):
        # 10 log10(gamma_t) ~ N(mu + 10 log10 a, sigma^2)
        k = 10.0 / math.log(10.0)
        dist = stats.lognorm(s=model.sigma_db / k, scale=sum_a * 10.0 ** (model.mu_db / 10.0))
        return dist.pdf
    raise DomainError(f"{type(model).__name__} has no continuous SNR density")


def psi_d_numeric(lam, n, r, density, points=None, tol=1e-8, check_mass=True):
    """Average the AWGN detection probability over an arbitrary SNR density.

    Adaptive quadrature in ``t = log(gamma_t)`` over the whole real line,
    split at ``points`` (in SNR units) when given.  Raises
    :class:`ConvergenceError` with the achieved error estimate when the
    requested absolute tolerance is not met.
    """
    lam = check_nonnegative(lam, "lam")
    n = check_positive_int(n, "n")
    r = check_positive_int(r, "r")
    order = n * r
    sqrt_lam = math.sqrt(lam)

    def weight(t):
        if t > 700.0:
            return 0.0
        x = math.exp(t)
        return float(density(x)) * x

    def integrand(t):
        w = weight(t)
        if w < 1e-200:
            return w  # Q <= 1, so the skipped factor changes nothing
        return w * marcum_q(order, math.sqrt(2.0 * r * math.exp(t)), sqrt_lam)

    cuts = sorted(math.log(p) for p in (points or ()) if p > 0)
    edges = [-np.inf] + cuts + [np.inf]

    def run(f):
        total, err = 0.0, 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, e, *info = integrate.quad(f, lo, hi, epsabs=tol / 10.0, epsrel=1e-10,
                                               limit=400, full_output=1)
            total += val
            err += e
            if len(info) > 1:  # quad appends a message only when it gave up
                reason = info[1].strip().splitlines()[0]
                raise ConvergenceError(f"quadrature did not converge: {reason}",
                                       estimate=total, error=err)
        if err > tol:
            raise ConvergenceError(f"quadrature error {err:.3g} exceeds {tol:.3g}",
                                   estimate=total, error=err)
        return total

    if check_mass:
        mass = run(weight)
        if abs(mass - 1.0) > 1e-6:
            raise DomainError(f"density integrates to {mass}, not 1")
    return min(max(run(integrand), 0.0), 1.0)


def psi_d(model, lam, n, r, sum_a=None, order=5):
    """Dispatch to the closed form matching ``model``; ``sum_a=None`` means EGC."""
    n = check_positive_int(n, "n")
    sum_a = float(n) if sum_a is None else check_positive(sum_a, "sum_a")
    if isinstance(model, Awgn):
        return psi_d_awgn(lam, n, r, sum_a * model.gamma)
    if isinstance(model, Rayleigh):
        return psi_d_rayleigh(lam, n, r, model.mean_gamma, sum_a)
    if isinstance(model, Nakagami):
        return psi_d_nakagami(lam, n, r, model.m, model.mean_gamma, sum_a)
    if isinstance(model, Lognormal):
        return psi_d_lognormal(lam, n, r, model.mu_db, model.sigma_db, sum_a, order)
    raise TypeError(f"unknown channel model {model!r}")
