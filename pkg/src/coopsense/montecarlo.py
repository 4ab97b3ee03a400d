"""Monte Carlo estimation of cooperative detection and false-alarm rates.

Trials are grouped into fixed-size blocks.  Each (hypothesis, block) pair owns
an independent random stream derived from the scenario seed, so the estimate
does not depend on how blocks are spread over workers, and any sub-range of
trials can be regenerated on its own.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from ._validation import check_positive_int
from .channel import Awgn, Hypothesis, Lognormal, Nakagami, Rayleigh, SensingParams, sample_energy, sample_snr
from .errors import DomainError
from .fusion import WeightVector, combine, wc_weight_matrix

__all__ = [
    "Egc",
    "WcFixed",
    "WcAdaptive",
    "SimScenario",
    "SimEstimate",
    "simulate",
    "simulate_curve",
    "simulate_counts",
    "BLOCK_SIZE",
]

BLOCK_SIZE = 8192


@dataclass(frozen=True)
class Egc:
    name = "egc"


@dataclass(frozen=True)
class WcFixed:
    weights: WeightVector
    name = "wc-fixed"


@dataclass(frozen=True)
class WcAdaptive:
    """Recompute the weighted-combining weights from every trial's reports."""

    name = "wc-adaptive"


@dataclass(frozen=True)
class SimScenario:
    """Everything needed to reproduce one simulation.

    ``shared_snr`` draws a single SNR per trial for all users instead of iid
    branches (fully correlated fading/shadowing).
    """

    params: SensingParams
    model: object
    distances: tuple
    weight_mode: object = field(default_factory=Egc)
    trials: int = 100_000
    seed: int = 0
    shared_snr: bool = False

    def __post_init__(self):
        if not isinstance(self.model, (Awgn, Rayleigh, Nakagami, Lognormal)):
            raise TypeError(f"unknown channel model {self.model!r}")
        d = tuple(float(x) for x in self.distances)
        if len(d) != self.params.n:
            raise DomainError(f"{len(d)} distances for n={self.params.n} users")
        if any(not x > 0 for x in d):
            raise DomainError("distances must be positive")
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "trials", check_positive_int(self.trials, "trials"))
        seed = int(self.seed)
        if not 0 <= seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "seed", seed)
        if isinstance(self.weight_mode, WcFixed) and len(self.weight_mode.weights) != self.params.n:
            raise DomainError("fixed weight vector length must equal n")
        if not isinstance(self.weight_mode, (Egc, WcFixed, WcAdaptive)):
            raise TypeError(f"unknown weight mode {self.weight_mode!r}")


@dataclass(frozen=True)
class SimEstimate:
    psi_d_hat: float
    psi_f_hat: float
    stderr_d: float
    stderr_f: float
    trials: int
    detections: int = 0
    false_alarms: int = 0
    fallbacks: int = 0

    @classmethod
    def from_counts(cls, detections, false_alarms, trials, fallbacks=0):
        pd = detections / trials
        pf = false_alarms / trials
        return cls(pd, pf, math.sqrt(pd * (1 - pd) / trials), math.sqrt(pf * (1 - pf) / trials),
                   trials, int(detections), int(false_alarms), int(fallbacks))


def _block_rng(seed, hypothesis, block):
    ss = np.random.SeedSequence(seed, spawn_key=(hypothesis.value, block))
    return np.random.Generator(np.random.Philox(ss))


def _block_statistics(scenario, hypothesis, block):
    """Combined statistic for every trial of one full block, plus fallback flags."""
    p = scenario.params
    rng = _block_rng(scenario.seed, hypothesis, block)
    shape = (BLOCK_SIZE, p.n)
    if hypothesis is Hypothesis.H1:
        if scenario.shared_snr:
            snr = np.broadcast_to(sample_snr(rng, scenario.model, (BLOCK_SIZE, 1)), shape)
        else:
            snr = sample_snr(rng, scenario.model, shape)
        y = sample_energy(rng, p.r, snr, Hypothesis.H1, shape)
    else:
        y = sample_energy(rng, p.r, 0.0, Hypothesis.H0, shape)
    mode = scenario.weight_mode
    if isinstance(mode, WcAdaptive):
        weights, fallback = wc_weight_matrix(y, scenario.distances, p.nu)
    elif isinstance(mode, WcFixed):
        weights, fallback = mode.weights.weights, np.zeros(BLOCK_SIZE, dtype=bool)
    else:
        weights, fallback = np.ones(p.n), np.zeros(BLOCK_SIZE, dtype=bool)
    return combine(weights, y), fallback


def _block_counts(scenario, hypothesis, block, start, stop, grid):
    stat, fallback = _block_statistics(scenario, hypothesis, block)
    lo = start - block * BLOCK_SIZE
    hi = stop - block * BLOCK_SIZE
    stat = stat[lo:hi]
    # count of statistics strictly above each threshold
    exceed = stat.size - np.searchsorted(np.sort(stat), grid, side="right")
    return exceed.astype(np.int64), int(fallback[lo:hi].sum())


def _check_grid(lambda_grid):
    grid = np.asarray(lambda_grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("threshold grid must not be empty")
    if np.any(np.isnan(grid)) or np.any(grid < 0):
        raise DomainError("thresholds must be nonnegative")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("threshold grid must be strictly increasing")
    return grid


def simulate_counts(scenario, lambda_grid, start=0, stop=None):
    """Exceedance counts for trials ``start..stop-1``.

    Returns ``(detections, false_alarms, fallbacks)``; the first two are int64
    arrays aligned with ``lambda_grid``.  Summing the counts of any partition
    of ``[0, trials)`` equals the counts of the whole range.
    """
    grid = _check_grid(lambda_grid)
    stop = scenario.trials if stop is None else stop
    if not 0 <= start <= stop <= scenario.trials:
        raise DomainError(f"invalid trial range [{start}, {stop})")
    det = np.zeros(grid.size, dtype=np.int64)
    fa = np.zeros(grid.size, dtype=np.int64)
    fallbacks = 0
    if start == stop:
        return det, fa, fallbacks
    for block in range(start // BLOCK_SIZE, (stop - 1) // BLOCK_SIZE + 1):
        lo = max(start, block * BLOCK_SIZE)
        hi = min(stop, (block + 1) * BLOCK_SIZE)
        c1, f1 = _block_counts(scenario, Hypothesis.H1, block, lo, hi, grid)
        c0, f0 = _block_counts(scenario, Hypothesis.H0, block, lo, hi, grid)
        det += c1
        fa += c0
        fallbacks += f0 + f1
    return det, fa, fallbacks


def simulate_curve(scenario, lambda_grid, workers=1):
    """Estimate ``(psi_d, psi_f)`` at every threshold from one shared set of trials.

    Because every threshold sees the same combined statistics, both estimates
    are nonincreasing along the grid.
    """
    grid = _check_grid(lambda_grid)
    workers = check_positive_int(workers, "workers")
    n_blocks = -(-scenario.trials // BLOCK_SIZE)
    ranges = [(b * BLOCK_SIZE, min((b + 1) * BLOCK_SIZE, scenario.trials)) for b in range(n_blocks)]

    def run(bounds):
        return simulate_counts(scenario, grid, *bounds)

    if workers == 1:
        parts = [run(b) for b in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, ranges))
    det = sum(p[0] for p in parts)
    fa = sum(p[1] for p in parts)
    fallbacks = sum(p[2] for p in parts)
    return [(float(lam), SimEstimate.from_counts(int(d), int(f), scenario.trials, fallbacks))
            for lam, d, f in zip(grid, det, fa)]


def simulate(scenario, workers=1):
    """Estimate ``(psi_d, psi_f)`` at the scenario threshold ``params.lam``."""
    return simulate_curve(scenario, [scenario.params.lam], workers)[0][1]
