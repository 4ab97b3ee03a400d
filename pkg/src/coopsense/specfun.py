"""Special functions used by the detection-probability expressions.

Everything here works on plain floats or numpy arrays and has no state.
Routines that can overflow in direct form (Bessel, Laguerre, Kummer) are
evaluated in the log domain.
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy import special

from ._validation import check_positive, check_positive_int, check_probability, check_real
from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureRule",
    "regularized_upper_gamma",
    "inverse_regularized_upper_gamma",
    "marcum_q",
    "marcum_q_complement",
    "log_bessel_i",
    "laguerre",
    "log_laguerre_sequence",
    "kummer_1f1",
    "log_kummer_1f1",
    "gauss_hermite",
]

# Poisson mass discarded by the Marcum-Q series
_MARCUM_TAIL = 1e-14
_MAX_SERIES_TERMS = 200_000


def _as_nonnegative(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"{name} must be >= 0")
    return arr


def _unwrap(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def regularized_upper_gamma(s, x):
    """Return Gamma(s, x) / Gamma(s).

    ``x`` may be an array; the result has the same shape.
    """
    s = check_positive(s, "s")
    x = _as_nonnegative(x, "x")
    return _unwrap(special.gammaincc(s, x))


def inverse_regularized_upper_gamma(s, p):
    """Return ``x >= 0`` such that ``regularized_upper_gamma(s, x) == p``."""
    s = check_positive(s, "s")
    p = check_probability(p, "p")
    if p == 1.0:
        return 0.0
    x = float(special.gammainccinv(s, p))
    # one Newton polish step; d/dx Q(s, x) = -x^(s-1) e^-x / Gamma(s)
    if x > 0:
        logdens = (s - 1.0) * math.log(x) - x - math.lgamma(s)
        dens = math.exp(logdens)
        if dens > 0:
            step = (special.gammaincc(s, x) - p) / dens
            if abs(step) < 1e-3 * max(x, 1.0):
                x = max(x + step, 0.0)
    return x


def _marcum_scalar(order, half_a2, half_b2):
    if half_b2 == 0.0:
        return 1.0
    if half_a2 == 0.0:
        return float(special.gammaincc(order, half_b2))
    mean = half_a2
    spread = 10.0 * math.sqrt(mean) + 40.0
    k_lo = max(0, int(math.floor(mean - spread)))
    k_hi = int(math.ceil(mean + spread))
    # widen until the excluded Poisson mass is below the tail bound
    for _ in range(8):
        if special.gammainc(k_hi + 1, mean) <= _MARCUM_TAIL:
            break
        k_hi += int(spread)
    for _ in range(8):
        if k_lo == 0 or special.gammaincc(k_lo, mean) <= _MARCUM_TAIL:
            break
        k_lo = max(0, k_lo - int(spread))
    # Q(M + k, y) increases with k; saturated at the window start means Q == 1
    if k_lo > 0 and special.gammaincc(order + k_lo, half_b2) >= 1.0 - 1e-16:
        return 1.0
    k = np.arange(k_lo, k_hi + 1, dtype=float)
    log_pois = k * math.log(mean) - mean - special.gammaln(k + 1.0)
    q = math.fsum(np.exp(log_pois) * special.gammaincc(order + k, half_b2))
    if q > 0.5:
        # near 1 the complement carries the information; sum it directly
        return 1.0 - _marcum_complement_scalar(order, half_a2, half_b2, k_hi)
    return float(min(max(q, 0.0), 1.0))


def _marcum_complement_scalar(order, half_a2, half_b2, k_hi=None):
    """``1 - Q_M`` as a Poisson mixture of regularized lower incomplete gammas."""
    if half_b2 == 0.0:
        return 0.0
    if half_a2 == 0.0:
        return float(special.gammainc(order, half_b2))
    mean = half_a2
    if k_hi is None:
        k_hi = int(math.ceil(mean + 10.0 * math.sqrt(mean) + 40.0))
        while special.gammainc(k_hi + 1, mean) > _MARCUM_TAIL:
            k_hi *= 2
    # every lower term counts, however small its Poisson weight; the upper
    # terms vanish because P(M + k, y) falls with k
    k_lo = 0 if k_hi <= _MAX_SERIES_TERMS else max(0, int(mean - 40.0 * math.sqrt(mean)))
    k = np.arange(k_lo, k_hi + 1, dtype=float)
    log_pois = k * math.log(mean) - mean - special.gammaln(k + 1.0)
    terms = np.exp(log_pois) * special.gammainc(order + k, half_b2)
    return float(min(max(math.fsum(terms), 0.0), 1.0))


def marcum_q(order, a, b):
    """Generalized Marcum Q function ``Q_M(a, b)`` for integer order ``M >= 1``.

    Computed as the noncentral chi-square tail: a Poisson(a^2/2) mixture of
    regularized upper incomplete gammas ``Q(M + k, b^2/2)``, truncated once the
    discarded Poisson mass drops below 1e-14.  ``a`` and ``b`` broadcast.
    """
    order = check_positive_int(order, "order")
    a = _as_nonnegative(a, "a")
    b = _as_nonnegative(b, "b")
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape, dtype=float)
    for idx in np.ndindex(a.shape):
        out[idx] = _marcum_scalar(order, 0.5 * a[idx] ** 2, 0.5 * b[idx] ** 2)
    return _unwrap(out)


def marcum_q_complement(order, a, b):
    """``1 - Q_M(a, b)`` with full relative accuracy when ``Q_M`` is close to 1."""
    order = check_positive_int(order, "order")
    a = _as_nonnegative(a, "a")
    b = _as_nonnegative(b, "b")
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape, dtype=float)
    for idx in np.ndindex(a.shape):
        out[idx] = _marcum_complement_scalar(order, 0.5 * a[idx] ** 2, 0.5 * b[idx] ** 2)
    return _unwrap(out)


def _log_bessel_series(nu, x):
    # log of sum_k (x/2)^(2k+nu) / (k! Gamma(k+nu+1))
    half = x / 2.0
    log_half = math.log(half)
    logs = []
    k = 0
    while True:
        t = (2 * k + nu) * log_half - math.lgamma(k + 1) - math.lgamma(k + nu + 1)
        logs.append(t)
        if k > x and t < logs[0] - 40.0 and t < max(logs) - 40.0:
            break
        k += 1
        if k > _MAX_SERIES_TERMS:
            raise ConvergenceError("Bessel series did not converge")
    return float(special.logsumexp(logs))


def log_bessel_i(nu, x):
    """Natural log of the modified Bessel function ``I_nu(x)``, ``nu >= 0``, ``x >= 0``."""
    nu = check_real(nu, "nu", low=0.0)
    x = check_real(x, "x", low=0.0)
    if x == 0.0:
        return 0.0 if nu == 0.0 else -math.inf
    scaled = special.ive(nu, x)
    if np.isfinite(scaled) and scaled > 1e-290:
        return float(math.log(scaled) + x)
    return _log_bessel_series(nu, x)


def laguerre(degree, x):
    """Laguerre polynomial ``L_k(x)`` by the three-term recurrence."""
    if isinstance(degree, bool) or int(degree) != degree or degree < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {degree!r}")
    degree = int(degree)
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if degree == 0:
        return _unwrap(prev)
    cur = 1.0 - x
    for j in range(1, degree):
        prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
    return _unwrap(cur)


def log_laguerre_sequence(max_degree, x):
    """Return ``(log|L_j(x)|, sign(L_j(x)))`` for ``j = 0..max_degree``.

    The recurrence is carried with a running scale factor so large degrees at
    large negative ``x`` do not overflow.
    """
    if int(max_degree) != max_degree or max_degree < 0:
        raise DomainError("max_degree must be a nonnegative integer")
    max_degree = int(max_degree)
    x = float(x)
    logs = np.empty(max_degree + 1)
    signs = np.empty(max_degree + 1)
    logs[0], signs[0] = 0.0, 1.0
    if max_degree == 0:
        return logs, signs
    log_scale = 0.0
    prev, cur = 1.0, 1.0 - x
    for j in range(1, max_degree + 1):
        if j > 1:
            prev, cur = cur, ((2 * j - 1 - x) * cur - (j - 1) * prev) / j
        mag = max(abs(prev), abs(cur))
        if mag > 1e100 or (0 < mag < 1e-100):
            prev /= mag
            cur /= mag
            log_scale += math.log(mag)
        logs[j] = (math.log(abs(cur)) + log_scale) if cur != 0 else -math.inf
        signs[j] = math.copysign(1.0, cur) if cur != 0 else 0.0
    return logs, signs


def _kummer_series(a, b, x):
    """Sum the Kummer series; returns ``(log|S|, sign(S))``."""
    if x == 0.0:
        return 0.0, 1.0
    log_x, sign_x = math.log(abs(x)), math.copysign(1.0, x)
    log_t, sign_t = 0.0, 1.0
    logs, signs = [0.0], [1.0]
    k = 0
    while True:
        num = a + k
        if num == 0.0:
            break  # terminating polynomial
        log_t += math.log(abs(num)) + log_x - math.log(b + k) - math.log(k + 1)
        sign_t *= math.copysign(1.0, num) * sign_x
        logs.append(log_t)
        signs.append(sign_t)
        k += 1
        ratio = abs(num) * abs(x) / ((b + k - 1) * k)
        if ratio < 1.0 and log_t < max(logs) + math.log(1e-17):
            break
        if k > _MAX_SERIES_TERMS:
            raise ConvergenceError("1F1 series did not converge")
    logs = np.asarray(logs)
    signs = np.asarray(signs)
    top = logs.max()
    total = math.fsum(signs * np.exp(logs - top))
    if total == 0.0:
        return -math.inf, 0.0
    return math.log(abs(total)) + top, math.copysign(1.0, total)


def _kummer_checked(a, b, x):
    a = check_real(a, "a")
    b = check_real(b, "b")
    x = check_real(x, "x")
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"b must not be a nonpositive integer, got {b}")
    if x < 0:
        # Kummer transformation keeps the summed series free of cancellation
        # whenever b - a >= 0.
        log_s, sign = _kummer_series(b - a, b, -x)
        return log_s + x, sign
    return _kummer_series(a, b, x)


def log_kummer_1f1(a, b, x):
    """Return ``(log|1F1(a; b; x)|, sign)``."""
    return _kummer_checked(a, b, x)


def kummer_1f1(a, b, x):
    """Confluent hypergeometric function of the first kind ``1F1(a; b; x)``."""
    log_s, sign = _kummer_checked(a, b, x)
    return sign * math.exp(log_s) if sign else 0.0


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight ``exp(-x**2)`` on the real line."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, func):
        """Approximate ``integral f(x) exp(-x**2) dx``; ``func`` must accept arrays."""
        # correctly rounded sum: symmetric odd integrands cancel exactly
        return math.fsum(self.weights * np.asarray(func(self.nodes), dtype=float))


def _hermite_normalized(order, z):
    """Orthonormal Hermite values p_order(z), p_{order-1}(z)."""
    p1 = math.pi ** -0.25
    p2 = 0.0
    for j in range(order):
        p3 = p2
        p2 = p1
        p1 = z * math.sqrt(2.0 / (j + 1)) * p2 - math.sqrt(j / (j + 1)) * p3
    return p1, p2


@lru_cache(maxsize=None)
def gauss_hermite(order):
    """Nodes and weights of the ``order``-point Gauss-Hermite rule (1 <= order <= 64).

    Roots of the physicists' Hermite polynomial are located by Newton
    iteration on the orthonormal recurrence, seeded with the usual asymptotic
    guesses from the largest root downwards.
    """
    if isinstance(order, bool) or int(order) != order or not 1 <= order <= 64:
        raise DomainError(f"order must be an integer in [1, 64], got {order!r}")
    n = int(order)
    x = np.zeros(n)
    w = np.zeros(n)
    m = (n + 1) // 2
    z = 0.0
    for i in range(m):
        if i == 0:
            z = math.sqrt(2 * n + 1) - 1.85575 * (2 * n + 1) ** (-1.0 / 6.0)
        elif i == 1:
            z = z - 1.14 * n ** 0.426 / z
        elif i == 2:
            z = 1.86 * z - 0.86 * x[0]
        elif i == 3:
            z = 1.91 * z - 0.91 * x[1]
        else:
            z = 2.0 * z - x[i - 2]
        for _ in range(100):
            p1, p2 = _hermite_normalized(n, z)
            dp = math.sqrt(2.0 * n) * p2
            z_new = z - p1 / dp
            if abs(z_new - z) <= 1e-15 * max(1.0, abs(z)):
                z = z_new
                break
            z = z_new
        else:
            raise ConvergenceError(f"Hermite root {i} of order {n} did not converge")
        _, p2 = _hermite_normalized(n, z)
        dp = math.sqrt(2.0 * n) * p2
        x[i] = z
        w[i] = 2.0 / dp ** 2
    # x[:m] holds the nonnegative roots in decreasing order; mirror them
    nodes = np.concatenate([-x[:m], x[:n - m][::-1]])
    weights = np.concatenate([w[:m], w[:n - m][::-1]])
    if n % 2 == 1:
        nodes[m - 1] = 0.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=n, nodes=nodes, weights=weights)
