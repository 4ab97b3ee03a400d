"""Parameter sweeps behind the command-line tools.

Each function takes a :class:`~coopsense.config.RunConfig` and returns a list
of row dicts in output order.  Rows are checked (probability range and curve
monotonicity) before they are returned.
"""
from concurrent.futures import ThreadPoolExecutor
import math

import numpy as np
from scipy import optimize

from . import analytic
from .channel import SensingParams
from .errors import ConfigError, InfeasibleError
from .fusion import WeightVector
from .montecarlo import Egc, SimScenario, WcAdaptive, WcFixed, simulate_curve

__all__ = [
    "ROC_COLUMNS",
    "UTILIZATION_COLUMNS",
    "SNR_COLUMNS",
    "VALIDATE_COLUMNS",
    "CurveCheckError",
    "pf_grid",
    "roc_rows",
    "utilization_rows",
    "snr_requirement_rows",
    "validate_rows",
    "required_threshold",
    "required_snr_db",
]

ROC_COLUMNS = ("scheme", "model", "n", "sum_a", "lambda", "psi_f", "psi_m")
UTILIZATION_COLUMNS = ("scheme", "model", "n", "sum_a", "target_pd", "lambda", "psi_f", "utilization")
SNR_COLUMNS = ("scheme", "model", "n", "sum_a", "target_pd", "target_pf", "lambda",
               "required_snr_db", "psi_d", "floored")
VALIDATE_COLUMNS = ("model", "scheme", "n", "r", "lambda", "quantity", "closed_form",
                    "mc_estimate", "stderr", "z_score", "status")

SNR_FLOOR_DB = -60.0
SNR_CEIL_DB = 60.0


class CurveCheckError(RuntimeError):
    """An emitted curve broke its range or monotonicity guarantee."""


def _map(func, items, workers):
    if workers <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def pf_grid(cfg):
    """False-alarm grid: ``pf_values`` if set, else log-spaced over [pf_min, pf_max]."""
    if cfg.pf_values is not None:
        return np.array(sorted(set(cfg.pf_values)))
    if cfg.pf_points == 1:
        return np.array([cfg.pf_max])
    return np.logspace(math.log10(cfg.pf_min), math.log10(cfg.pf_max), cfg.pf_points)


def _schemes(cfg):
    """(label, sum_a(n)) pairs for closed-form sweeps; EGC is always included."""
    out = [("egc", lambda n: float(n))]
    if cfg.scheme == "wc-fixed":
        out.append(("wc-fixed", cfg.sum_a_for))
    return out


def _check_probability_columns(rows, columns):
    for row in rows:
        for col in columns:
            v = row[col]
            if v is None or (isinstance(v, float) and math.isnan(v)):
                continue
            if not 0.0 <= v <= 1.0:
                raise CurveCheckError(f"{col}={v} outside [0, 1] in row {row}")


def roc_rows(cfg):
    """Complementary ROC: ``psi_m = 1 - psi_d`` against ``psi_f`` on a log grid."""
    pfs = pf_grid(cfg)
    model = cfg.channel_model()
    jobs = []
    for label, sum_a_of in _schemes(cfg):
        for n in cfg.user_counts:
            for pf in pfs:
                jobs.append((label, n, sum_a_of(n), float(pf)))

    def point(job):
        label, n, sum_a, pf = job
        lam = analytic.threshold_for_pf(pf, n, cfg.r)
        pd = analytic.psi_d(model, lam, n, cfg.r, sum_a, order=cfg.quad_order)
        return {"scheme": label, "model": model.name, "n": n, "sum_a": sum_a, "lambda": lam,
                "psi_f": analytic.psi_f(lam, n, cfg.r), "psi_m": max(1.0 - pd, 0.0)}

    rows = _map(point, jobs, cfg.workers)
    if cfg.scheme == "wc-adaptive":
        rows.extend(_adaptive_roc_rows(cfg, model, pfs))
    _check_probability_columns(rows, ("psi_f", "psi_m"))
    _check_roc_monotone(rows)
    return rows


def _adaptive_roc_rows(cfg, model, pfs):
    rows = []
    for n in cfg.user_counts:
        lams = sorted(analytic.threshold_for_pf(float(pf), n, cfg.r) for pf in pfs)
        lams = sorted(set(lams))
        scenario = SimScenario(SensingParams(cfg.r, n, cfg.nu), model, cfg.distances_for(n),
                               WcAdaptive(), cfg.trials, cfg.seed, cfg.shared_snr)
        for lam, est in reversed(simulate_curve(scenario, lams, cfg.workers)):
            rows.append({"scheme": "wc-adaptive", "model": model.name, "n": n, "sum_a": None,
                         "lambda": lam, "psi_f": est.psi_f_hat, "psi_m": 1.0 - est.psi_d_hat})
    return rows


def _check_roc_monotone(rows):
    curves = {}
    for row in rows:
        curves.setdefault((row["scheme"], row["n"]), []).append(row)
    for key, curve in curves.items():
        curve = sorted(curve, key=lambda r: -r["lambda"])  # psi_f ascending
        pm = np.array([r["psi_m"] for r in curve])
        pf = np.array([r["psi_f"] for r in curve])
        if np.any(np.diff(pf) < -1e-12) or np.any(np.diff(pm) > 1e-12):
            raise CurveCheckError(f"cROC for {key} is not monotone")


def required_threshold(model, n, r, sum_a, target_pd, order=5):
    """Threshold at which the closed-form detection probability equals ``target_pd``."""
    def gap(lam):
        return analytic.psi_d(model, lam, n, r, sum_a, order=order) - target_pd

    hi = max(1.0, 2.0 * n * r)
    while gap(hi) > 0:
        hi *= 2.0
        if hi > 1e7:
            raise InfeasibleError(f"target Pd {target_pd} not reached for n={n}")
    if gap(0.0) <= 0:
        raise InfeasibleError(f"target Pd {target_pd} unreachable for n={n}")
    return optimize.brentq(gap, 0.0, hi, xtol=1e-12, rtol=1e-13, maxiter=500)


def utilization_rows(cfg):
    """Spectrum utilization ``1 - psi_f`` at the threshold meeting ``target_pd``."""
    if cfg.scheme == "wc-adaptive":
        raise ConfigError("scheme", "utilization needs a closed form; use egc or wc-fixed")
    model = cfg.channel_model()
    jobs = [(label, n, sum_a_of(n)) for label, sum_a_of in _schemes(cfg) for n in cfg.user_counts]

    def point(job):
        label, n, sum_a = job
        lam = required_threshold(model, n, cfg.r, sum_a, cfg.target_pd, cfg.quad_order)
        pf = analytic.psi_f(lam, n, cfg.r)
        return {"scheme": label, "model": model.name, "n": n, "sum_a": sum_a,
                "target_pd": cfg.target_pd, "lambda": lam, "psi_f": pf, "utilization": 1.0 - pf}

    rows = _map(point, jobs, cfg.workers)
    _check_probability_columns(rows, ("psi_f", "utilization"))
    for label, _ in _schemes(cfg):
        curve = sorted((r for r in rows if r["scheme"] == label), key=lambda r: r["n"])
        u = np.array([r["utilization"] for r in curve])
        if np.any(np.diff(u) < -1e-12):
            raise CurveCheckError(f"utilization for {label} decreases with n")
    return rows


def required_snr_db(cfg, n, sum_a, target_pd, target_pf):
    """Smallest SNR knob (dB) meeting ``target_pd`` at the ``target_pf`` threshold.

    Returns ``(snr_db, lam, psi_d, floored)``; ``floored`` marks targets already
    met at the -60 dB floor.
    """
    lam = analytic.threshold_for_pf(target_pf, n, cfg.r)

    def pd_at(db):
        return analytic.psi_d(cfg.channel_model(snr_db=db), lam, n, cfg.r, sum_a,
                              order=cfg.quad_order)

    lo_pd = pd_at(SNR_FLOOR_DB)
    if lo_pd >= target_pd:
        return SNR_FLOOR_DB, lam, lo_pd, True
    if pd_at(SNR_CEIL_DB) < target_pd:
        raise InfeasibleError(f"no mean SNR <= {SNR_CEIL_DB} dB reaches Pd={target_pd} (n={n})")
    lo, hi = SNR_FLOOR_DB, SNR_CEIL_DB
    db = optimize.brentq(lambda x: pd_at(x) - target_pd, lo, hi, xtol=1e-12, rtol=1e-14,
                         maxiter=500)
    pd = pd_at(db)
    if abs(pd - target_pd) > 1e-6:
        raise InfeasibleError(f"SNR search stalled at Pd={pd} for target {target_pd}")
    return db, lam, pd, False


def snr_requirement_rows(cfg):
    """Required SNR (dB) versus number of users for every target Pd."""
    if cfg.scheme == "wc-adaptive":
        raise ConfigError("scheme", "snr-req needs a closed form; use egc or wc-fixed")
    model_name = cfg.model
    jobs = [(label, n, sum_a_of(n), pd)
            for pd in cfg.target_pds for label, sum_a_of in _schemes(cfg) for n in cfg.user_counts]

    def point(job):
        label, n, sum_a, target_pd = job
        db, lam, pd, floored = required_snr_db(cfg, n, sum_a, target_pd, cfg.target_pf)
        return {"scheme": label, "model": model_name, "n": n, "sum_a": sum_a,
                "target_pd": target_pd, "target_pf": cfg.target_pf, "lambda": lam,
                "required_snr_db": db, "psi_d": pd, "floored": floored}

    rows = _map(point, jobs, cfg.workers)
    _check_probability_columns(rows, ("psi_d",))
    groups = {}
    for row in rows:
        groups.setdefault((row["scheme"], row["target_pd"]), []).append(row)
    for key, curve in groups.items():
        curve = sorted(curve, key=lambda r: r["n"])
        for a, b in zip(curve, curve[1:]):
            if a["floored"] and b["floored"]:
                continue
            if not b["required_snr_db"] < a["required_snr_db"]:
                raise CurveCheckError(f"required SNR for {key} is not decreasing in n")
    return rows


def _weight_mode(cfg, n):
    if cfg.scheme == "wc-adaptive":
        return WcAdaptive(), None
    if cfg.scheme == "wc-fixed":
        w = WeightVector.from_weights(cfg.weights_for(n))
        return WcFixed(w), w.sum_a
    return Egc(), float(n)


def validate_rows(cfg):
    """Closed forms against the Monte Carlo oracle on a (model, n, r, lambda) grid.

    A row passes when the difference is within three binomial standard errors
    evaluated at the closed-form probability.  Adaptive weighting and fixed
    non-unit weights have no exact closed form and are reported as
    ``informational``.
    """
    rows = []
    for model_name in cfg.validate_models:
        model = cfg.channel_model(model_name)
        for n in cfg.user_counts:
            mode, sum_a = _weight_mode(cfg, n)
            exact = isinstance(mode, Egc) or (
                isinstance(mode, WcFixed) and np.all(mode.weights.weights == 1.0))
            for r in cfg.r_values:
                if cfg.validate_lambdas is not None:
                    lams = sorted(set(cfg.validate_lambdas))
                else:
                    lams = sorted({analytic.threshold_for_pf(p, n, r) for p in cfg.validate_pfs})
                scenario = SimScenario(SensingParams(r, n, cfg.nu), model, cfg.distances_for(n),
                                       mode, cfg.trials, cfg.seed, cfg.shared_snr)
                for lam, est in simulate_curve(scenario, lams, cfg.workers):
                    pd_cf = analytic.psi_d(model, lam, n, r, sum_a if sum_a else float(n),
                                           order=cfg.quad_order)
                    pf_cf = analytic.psi_f(lam, n, r)
                    for qty, cf, hat, se in (("psi_d", pd_cf, est.psi_d_hat, est.stderr_d),
                                             ("psi_f", pf_cf, est.psi_f_hat, est.stderr_f)):
                        z, ok = _z_test(cf, hat, est.trials)
                        status = ("pass" if ok else "fail") if exact else "informational"
                        rows.append({"model": model_name, "scheme": mode.name, "n": n, "r": r,
                                     "lambda": lam, "quantity": qty, "closed_form": cf,
                                     "mc_estimate": hat, "stderr": se, "z_score": z,
                                     "status": status})
    return rows


def _z_test(p, p_hat, trials, k=3.0):
    sigma = math.sqrt(max(p * (1.0 - p), 0.0) / trials)
    diff = p_hat - p
    if sigma == 0.0:
        return (0.0 if diff == 0 else math.copysign(math.inf, diff)), diff == 0
    z = diff / sigma
    return z, abs(z) <= k
