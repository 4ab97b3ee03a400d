"""Built-in self-test: closed-form special cases and special-function oracle values.

Every check is cheap; the whole run takes a few seconds.
"""
from dataclasses import dataclass, field
import math
import time

import numpy as np

from . import analytic, channel, fusion, montecarlo, specfun
from .channel import Awgn, Hypothesis, Lognormal, Nakagami, Rayleigh, SensingParams
from .errors import ConfigError

# Reference values computed with 40-digit arithmetic.
ORACLES = {
    "upper_gamma(3, 2.5)": 0.5438131158833295179981274683449337269254,
    "inverse_upper_gamma(3, 0.1)": 5.322320337834209824066118349087674477457,
    "marcum_q(3, 1.5, 2)": 0.8306516780080777787575878645810294749374,
    "log_bessel_i(2, 5)": 2.862521684702105699251264271281086143649,
    "log_bessel_i(3, 200)": 196.4099732253146978366723460977311795963,
    "kummer_1f1(3, 2, 0.8)": 3.115757299889454944403982006319505188471,
    "laguerre(4, 1.5)": -0.2890625,
}


@dataclass
class Check:
    module: str
    name: str
    ok: bool
    detail: str = ""


@dataclass
class SelfTestReport:
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def counts(self):
        out = {}
        for c in self.checks:
            passed, total = out.get(c.module, (0, 0))
            out[c.module] = (passed + c.ok, total + 1)
        return out

    def summary(self):
        lines = []
        for c in self.checks:
            if not c.ok:
                lines.append(f"FAIL {c.module}: {c.name} {c.detail}")
        for module, (passed, total) in self.counts().items():
            lines.append(f"{module}: {passed}/{total} checks passed")
        status = "PASS" if self.ok else "FAIL"
        lines.append(f"selftest {status} ({len(self.checks)} checks, {self.seconds:.2f} s)")
        return "\n".join(lines) + "\n"


def _close(got, want, rel=1e-9, abs_=1e-12):
    return math.isclose(got, want, rel_tol=rel, abs_tol=abs_)


def _cases():
    sf = specfun
    yield "specfun", "Q(1, 0) = 1", lambda: _close(sf.regularized_upper_gamma(1, 0), 1.0)
    yield "specfun", "Q(1, 1) = e^-1", lambda: _close(sf.regularized_upper_gamma(1, 1), math.exp(-1))
    yield "specfun", "Q^-1(1, 1) = 0", lambda: sf.inverse_regularized_upper_gamma(1, 1.0) == 0.0
    yield "specfun", "Q^-1(1, e^-1) = 1", lambda: _close(
        sf.inverse_regularized_upper_gamma(1, math.exp(-1)), 1.0)
    yield "specfun", "Q_2(1.3, 0) = 1", lambda: sf.marcum_q(2, 1.3, 0.0) == 1.0
    yield "specfun", "Q_1(0, 2) = e^-2", lambda: _close(sf.marcum_q(1, 0.0, 2.0), math.exp(-2))
    yield "specfun", "log I_0(0) = 0", lambda: sf.log_bessel_i(0, 0) == 0.0
    yield "specfun", "L_0(7.3) = 1", lambda: sf.laguerre(0, 7.3) == 1.0
    yield "specfun", "L_1(2) = -1", lambda: sf.laguerre(1, 2.0) == -1.0
    yield "specfun", "1F1(2; 3; 0) = 1", lambda: sf.kummer_1f1(2, 3, 0.0) == 1.0
    yield "specfun", "1F1(1; 1; 1.5) = e^1.5", lambda: _close(sf.kummer_1f1(1, 1, 1.5), math.exp(1.5))

    def gh1():
        rule = sf.gauss_hermite(1)
        return rule.nodes.tolist() == [0.0] and _close(rule.weights[0], math.sqrt(math.pi))

    def gh2():
        rule = sf.gauss_hermite(2)
        return (np.allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=0, atol=1e-14)
                and np.allclose(rule.weights, math.sqrt(math.pi) / 2, rtol=1e-14))

    yield "specfun", "Gauss-Hermite l=1", gh1
    yield "specfun", "Gauss-Hermite l=2", gh2

    def gh_exact():
        for l in (5, 31):
            rule = sf.gauss_hermite(l)
            for k in range(0, 2 * l, 2):
                want = math.gamma((k + 1) / 2.0)
                if not _close(rule.integrate(lambda x: x ** k), want, rel=1e-10):
                    return False
        return True

    yield "specfun", "Gauss-Hermite monomial exactness", gh_exact
    oracle_calls = {
        "upper_gamma(3, 2.5)": lambda: sf.regularized_upper_gamma(3, 2.5),
        "inverse_upper_gamma(3, 0.1)": lambda: sf.inverse_regularized_upper_gamma(3, 0.1),
        "marcum_q(3, 1.5, 2)": lambda: sf.marcum_q(3, 1.5, 2.0),
        "log_bessel_i(2, 5)": lambda: sf.log_bessel_i(2, 5.0),
        "log_bessel_i(3, 200)": lambda: sf.log_bessel_i(3, 200.0),
        "kummer_1f1(3, 2, 0.8)": lambda: sf.kummer_1f1(3, 2, 0.8),
        "laguerre(4, 1.5)": lambda: sf.laguerre(4, 1.5),
    }
    for key, call in oracle_calls.items():
        want = ORACLES[key]
        yield "specfun", f"oracle {key}", (lambda c=call, w=want: _close(c(), w, rel=1e-10))

    ch = channel
    yield "channel", "H0 density at 0.5", lambda: _close(
        ch.energy_density(0.5, 1, 3.0, Hypothesis.H0), math.exp(-0.25) / 2)
    yield "channel", "zero-SNR H1 density equals H0", lambda: all(
        _close(ch.energy_density(y, r, 0.0, Hypothesis.H1), ch.energy_density(y, r, 0.0, Hypothesis.H0))
        for y in (0.0, 0.3, 2.0, 9.0) for r in (1, 3))
    yield "channel", "single_pf(0, 3) = 1", lambda: ch.single_pf(0.0, 3) == 1.0
    yield "channel", "single_pf(2, 1) = e^-1", lambda: _close(ch.single_pf(2.0, 1), math.exp(-1))
    yield "channel", "single_pd_awgn(3, 1, 0) = e^-1.5", lambda: _close(
        ch.single_pd_awgn(3.0, 1, 0.0), math.exp(-1.5))
    yield "channel", "single_pd_awgn(0, 2, 4) = 1", lambda: ch.single_pd_awgn(0.0, 2, 4.0) == 1.0

    def energy_moments():
        rng = np.random.default_rng(2024)
        m0 = ch.sample_energy(rng, 1, 0.0, Hypothesis.H0, 10 ** 6).mean()
        m1 = ch.sample_energy(rng, 2, 1.5, Hypothesis.H1, 10 ** 6).mean()
        # variances: 2k = 4 and 2(k + 2 nc) = 2(4 + 12) = 32
        return abs(m0 - 2.0) <= 3 * 2 / 1e3 and abs(m1 - 10.0) <= 3 * math.sqrt(32) / 1e3

    def snr_draws():
        rng = np.random.default_rng(7)
        awgn = np.all(ch.sample_snr(rng, Awgn(2.0), 1000) == 2.0)
        ray = ch.sample_snr(rng, Rayleigh(3.981), 10 ** 6)
        ln = 10 * np.log10(ch.sample_snr(rng, Lognormal(1.0, 6.0), 10 ** 6))
        return (awgn and abs(ray.mean() - 3.981) <= 3 * 3.981 / 1e3
                and abs(ln.mean() - 1.0) <= 3 * 6.0 / 1e3)

    yield "channel", "energy sample moments", energy_moments
    yield "channel", "SNR sample moments", snr_draws

    fu = fusion

    def equal_reports():
        w = fu.wc_weights([fu.UserReport(3.0, d) for d in (100.0, 400.0, 900.0)], 4.0)
        return w.degenerate_fallback and np.all(w.weights == 1.0)

    def single_report():
        w = fu.wc_weights([fu.UserReport(5.0, 250.0)], 4.0)
        return w.degenerate_fallback and w.weights.tolist() == [1.0]

    yield "fusion", "equal energies fall back to EGC", equal_reports
    yield "fusion", "single user falls back to EGC", single_report
    yield "fusion", "egc_weights(3)", lambda: fu.egc_weights(3).weights.tolist() == [1, 1, 1] and fu.egc_weights(3).sum_a == 3
    yield "fusion", "egc_weights(1)", lambda: fu.egc_weights(1).sum_a == 1
    yield "fusion", "EGC combine is the plain sum", lambda: fu.combine(fu.egc_weights(4), [1.0, 2.5, 0.5, 3.0]) == 7.0
    yield "fusion", "combine((1,1,1), (2,3,4)) = 9", lambda: fu.combine([1, 1, 1], [2, 3, 4]) == 9.0
    yield "fusion", "combine((0.5,2), (4,1)) = 4", lambda: fu.combine([0.5, 2], [4, 1]) == 4.0

    def zero_weights():
        try:
            fu.WeightVector.from_weights([0.0, 0.0])
        except ValueError:
            return True
        return False

    yield "fusion", "all-zero weights rejected", zero_weights
    yield "fusion", "effective_snr((1,1), (2,3)) = 5", lambda: fu.effective_snr([1, 1], [2, 3]) == 5.0
    yield "fusion", "effective_snr(w, 0) = 0", lambda: fu.effective_snr([0.3, 2.0], [0, 0]) == 0.0
    yield "fusion", "mean_snr_wc(3, 3.981, 3)", lambda: _close(fu.mean_snr_wc(3, 3.981, 3), 3.981)
    yield "fusion", "mean_snr_wc(4.5, 2, 3)", lambda: _close(fu.mean_snr_wc(4.5, 2, 3), 3.0)

    an = analytic
    yield "analytic", "psi_f(0, 3, 1) = 1", lambda: an.psi_f(0.0, 3, 1) == 1.0
    yield "analytic", "psi_f(2, 1, 1) = e^-1", lambda: _close(an.psi_f(2.0, 1, 1), math.exp(-1))
    yield "analytic", "threshold_for_pf(1) = 0", lambda: an.threshold_for_pf(1.0, 3, 2) == 0.0
    yield "analytic", "threshold_for_pf(e^-1, 1, 1) = 2", lambda: _close(
        an.threshold_for_pf(math.exp(-1), 1, 1), 2.0)
    yield "analytic", "zero SNR gives psi_f", lambda: all(
        _close(an.psi_d_awgn(lam, n, r, 0.0), an.psi_f(lam, n, r))
        for lam in (0.5, 4.0, 11.0) for n in (1, 3) for r in (1, 2))
    yield "analytic", "psi_d_awgn at lam=0", lambda: an.psi_d_awgn(0.0, 2, 1, 5.0) == 1.0

    def rayleigh_numeric():
        for lam, n, r in ((6.0, 3, 1), (15.0, 2, 2)):
            model = Rayleigh(10 ** 0.6)
            dens = an.snr_density(model, n, n)
            if abs(an.psi_d_rayleigh(lam, n, r, model.mean_gamma, n)
                   - an.psi_d_numeric(lam, n, r, dens)) > 1e-6:
                return False
        return True

    yield "analytic", "Rayleigh closed form vs integration", rayleigh_numeric
    yield "analytic", "Nakagami m=1 equals Rayleigh", lambda: all(
        abs(an.psi_d_nakagami(lam, n, 1, 1, 4.0, n) - an.psi_d_rayleigh(lam, n, 1, 4.0, n)) <= 1e-12
        for lam in (2.0, 8.0, 20.0) for n in (1, 3, 5))

    def lognormal_collapse():
        lam, n, r, mu = 9.0, 3, 1, 1.0
        want = an.psi_d_awgn(lam, n, r, n * 10 ** (mu / 10))
        return abs(an.psi_d_lognormal(lam, n, r, mu, 1e-3, n) - want) <= 1e-3

    def dirac_limit():
        from scipy import stats
        g0, lam, n, r = 2.5, 8.0, 2, 1
        dens = stats.norm(g0, 1e-6).pdf
        got = an.psi_d_numeric(lam, n, r, dens, points=[g0 - 1e-5, g0 + 1e-5], check_mass=False)
        return abs(got - an.psi_d_awgn(lam, n, r, g0)) <= 1e-4

    yield "analytic", "lognormal sigma->0 collapses to AWGN", lognormal_collapse
    yield "analytic", "numeric average of a point mass", dirac_limit

    mc = montecarlo

    def lam_zero():
        for model in (Awgn(2.0), Rayleigh(4.0), Nakagami(2, 4.0), Lognormal(1.0, 6.0)):
            sc = mc.SimScenario(SensingParams(1, 2, 4.0, 0.0), model, (500.0, 1500.0), trials=2000, seed=3)
            est = mc.simulate(sc)
            if est.psi_d_hat != 1.0 or est.psi_f_hat != 1.0:
                return False
        return True

    def fixed_ones_equal_egc():
        p = SensingParams(1, 3, 4.0, 9.0)
        d = (500.0, 1000.0, 1500.0)
        a = mc.simulate(mc.SimScenario(p, Rayleigh(4.0), d, mc.Egc(), 5000, 11))
        b = mc.simulate(mc.SimScenario(p, Rayleigh(4.0), d,
                                       mc.WcFixed(fusion.egc_weights(3)), 5000, 11))
        return (a.detections, a.false_alarms) == (b.detections, b.false_alarms)

    def curve_vs_single():
        p = SensingParams(2, 2, 4.0, 7.5)
        sc = mc.SimScenario(p, Nakagami(2, 3.0), (600.0, 900.0), mc.WcAdaptive(), 5000, 5)
        one = mc.simulate_curve(sc, [7.5])[0][1]
        return one == mc.simulate(sc)

    def curve_monotone():
        sc = mc.SimScenario(SensingParams(1, 3, 4.0), Lognormal(1.0, 6.0), (500.0, 1000.0, 1500.0),
                            mc.WcAdaptive(), 5000, 9)
        ests = [e for _, e in mc.simulate_curve(sc, np.linspace(0.5, 30, 25))]
        pd = np.array([e.psi_d_hat for e in ests])
        pf = np.array([e.psi_f_hat for e in ests])
        return np.all(np.diff(pd) <= 0) and np.all(np.diff(pf) <= 0)

    yield "montecarlo", "lam=0 detects every trial", lam_zero
    yield "montecarlo", "unit fixed weights equal EGC", fixed_ones_equal_egc
    yield "montecarlo", "one-point curve equals simulate", curve_vs_single
    yield "montecarlo", "curve estimates nonincreasing", curve_monotone

    from . import sweeps
    from .config import RunConfig

    def roc_endpoint():
        cfg = RunConfig(model="rayleigh", user_counts=(1, 3), pf_points=5)
        rows = [r for r in sweeps.roc_rows(cfg) if r["psi_f"] == 1.0]
        return len(rows) == 2 and all(r["psi_m"] == 0.0 and r["lambda"] == 0.0 for r in rows)

    def roc_wc_identity():
        base = RunConfig(user_counts=(2, 4), pf_points=6)
        egc = [r for r in sweeps.roc_rows(base) if r["scheme"] == "egc"]
        wc = [r for r in sweeps.roc_rows(RunConfig(user_counts=(2, 4), pf_points=6,
                                                   scheme="wc-fixed", weight_ratio=1.0))
              if r["scheme"] == "wc-fixed"]
        return len(egc) == len(wc) and all(
            abs(a["psi_m"] - b["psi_m"]) <= 1e-9 for a, b in zip(egc, wc))

    def utilization_small_target():
        rows = sweeps.utilization_rows(RunConfig(target_pd=1e-9, user_counts=(1, 3)))
        return all(r["utilization"] > 1 - 1e-6 for r in rows)

    def snr_at_chance():
        cfg = RunConfig(target_pds=(0.101,), target_pf=0.1, user_counts=(1,))
        row = sweeps.snr_requirement_rows(cfg)[0]
        return row["required_snr_db"] < -10.0

    def negative_lambda():
        try:
            RunConfig(validate_lambdas=(-1.0,))
        except ConfigError:
            return True
        return False

    def adaptive_informational():
        cfg = RunConfig(scheme="wc-adaptive", validate_models=("rayleigh",), user_counts=(3,),
                        r_values=(1,), validate_pfs=(0.1,), trials=2000)
        return all(r["status"] == "informational" for r in sweeps.validate_rows(cfg))

    yield "cli", "roc grid point 1 has psi_m = 0", roc_endpoint
    yield "cli", "roc WC with sum_a = n equals EGC", roc_wc_identity
    yield "cli", "utilization -> 1 as target Pd -> 0", utilization_small_target
    yield "cli", "snr-req near chance needs little SNR", snr_at_chance
    yield "cli", "negative threshold is a config error", negative_lambda
    yield "cli", "adaptive validation rows informational", adaptive_informational


def run_selftest():
    report = SelfTestReport()
    start = time.perf_counter()
    for module, name, func in _cases():
        try:
            ok = bool(func())
            detail = ""
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"({type(exc).__name__}: {exc})"
        report.checks.append(Check(module, name, ok, detail))
    report.seconds = time.perf_counter() - start
    return report
