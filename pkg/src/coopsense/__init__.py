"""Cooperative spectrum sensing with energy detectors.

Closed-form and Monte Carlo detection/false-alarm probabilities for equal
gain and weighted soft combining over AWGN, Rayleigh, Nakagami-m and
lognormal channels.
"""
from .analytic import (CooperativeScenario, psi_d, psi_d_awgn, psi_d_lognormal, psi_d_nakagami,
                       psi_d_numeric, psi_d_rayleigh, psi_f, snr_density, threshold_for_pf)
from .channel import Awgn, Hypothesis, Lognormal, Nakagami, Rayleigh, SensingParams
from .errors import ConfigError, ConvergenceError, DomainError, InfeasibleError
from .estimator import CooperativeEnergyDetector
from .fusion import UserReport, WeightVector, combine, egc_weights, wc_weights
from .montecarlo import Egc, SimEstimate, SimScenario, WcAdaptive, WcFixed, simulate, simulate_curve

__version__ = "0.1.0"

__all__ = [
    "Awgn", "Rayleigh", "Nakagami", "Lognormal", "Hypothesis", "SensingParams",
    "UserReport", "WeightVector", "egc_weights", "wc_weights", "combine",
    "CooperativeScenario", "psi_f", "threshold_for_pf", "psi_d", "psi_d_awgn",
    "psi_d_rayleigh", "psi_d_nakagami", "psi_d_lognormal", "psi_d_numeric", "snr_density",
    "Egc", "WcFixed", "WcAdaptive", "SimScenario", "SimEstimate", "simulate", "simulate_curve",
    "CooperativeEnergyDetector",
    "DomainError", "ConvergenceError", "InfeasibleError", "ConfigError",
]
