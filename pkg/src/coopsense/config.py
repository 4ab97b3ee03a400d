"""Run configuration: a flat ``key = value`` text file with unit-suffixed keys.

Example::

    # Rayleigh cROC at 6 dB
    model = rayleigh
    mean_snr_db = 6
    r = 1
    nu = 4
    user_counts = 1, 2, 3, 4, 5
"""
import configparser
from dataclasses import asdict, dataclass, fields, replace
import math
import typing

from .channel import Awgn, Lognormal, Nakagami, Rayleigh
from .errors import ConfigError, DomainError

__all__ = ["RunConfig", "parse_config", "load_config", "dump_config", "MODELS", "SCHEMES"]

MODELS = ("awgn", "rayleigh", "nakagami", "lognormal")
SCHEMES = ("egc", "wc-fixed", "wc-adaptive")
_SECTION = "run"


@dataclass(frozen=True)
class RunConfig:
    model: str = "rayleigh"
    r: int = 1
    nu: float = 4.0
    mean_snr_db: float = 6.0
    nakagami_m: int = 2
    mu_db: float = 1.0
    sigma_db: float = 6.0
    quad_order: int = 5
    scheme: str = "egc"
    weight_ratio: float = 1.5
    weights: typing.Optional[tuple] = None
    distances_m: typing.Optional[tuple] = None
    user_counts: tuple = (1, 2, 3, 4, 5)
    pf_min: float = 1e-4
    pf_max: float = 1.0
    pf_points: int = 40
    pf_values: typing.Optional[tuple] = None
    target_pd: float = 0.9
    target_pds: tuple = (0.9, 0.99)
    target_pf: float = 0.1
    validate_models: tuple = MODELS
    validate_pfs: tuple = (0.01, 0.1, 0.5)
    r_values: tuple = (1, 2)
    validate_lambdas: typing.Optional[tuple] = None
    trials: int = 100_000
    seed: int = 1
    workers: int = 1
    shared_snr: bool = False

    def __post_init__(self):
        _validate(self)

    def channel_model(self, model=None, snr_db=None):
        """Channel model named ``model`` (default: ``self.model``).

        ``snr_db`` replaces the SNR knob of the model: ``gamma`` for AWGN,
        the mean SNR for Rayleigh/Nakagami, ``mu`` for lognormal.
        """
        name = model or self.model
        if name == "awgn":
            return Awgn(10 ** ((self.mean_snr_db if snr_db is None else snr_db) / 10))
        if name == "rayleigh":
            return Rayleigh(10 ** ((self.mean_snr_db if snr_db is None else snr_db) / 10))
        if name == "nakagami":
            return Nakagami(self.nakagami_m, 10 ** ((self.mean_snr_db if snr_db is None else snr_db) / 10))
        if name == "lognormal":
            return Lognormal(self.mu_db if snr_db is None else snr_db, self.sigma_db)
        raise ConfigError("model", f"unknown model {name!r}")

    def distances_for(self, n):
        if self.distances_m is not None:
            if len(self.distances_m) != n:
                raise ConfigError("distances_m", f"needs {n} entries")
            return tuple(self.distances_m)
        if n == 1:
            return (1000.0,)
        return tuple(500.0 + 1000.0 * i / (n - 1) for i in range(n))

    def weights_for(self, n):
        if self.weights is not None:
            if len(self.weights) != n:
                raise ConfigError("weights", f"needs {n} entries")
            return tuple(self.weights)
        return (self.weight_ratio,) * n

    def sum_a_for(self, n):
        return float(sum(self.weights_for(n)))


def _field_types():
    hints = typing.get_type_hints(RunConfig)
    return {f.name: hints[f.name] for f in fields(RunConfig)}


def _validate(cfg):
    def need(cond, name, msg):
        if not cond:
            raise ConfigError(name, msg)

    need(cfg.model in MODELS, "model", f"must be one of {', '.join(MODELS)}")
    need(cfg.scheme in SCHEMES, "scheme", f"must be one of {', '.join(SCHEMES)}")
    need(cfg.r >= 1, "r", "must be >= 1")
    need(cfg.nu > 0, "nu", "must be > 0")
    need(cfg.nakagami_m >= 1, "nakagami_m", "must be an integer >= 1")
    need(cfg.sigma_db > 0, "sigma_db", "must be > 0")
    need(1 <= cfg.quad_order <= 64, "quad_order", "must be in [1, 64]")
    need(cfg.weight_ratio > 0, "weight_ratio", "must be > 0")
    need(len(cfg.user_counts) > 0 and all(n >= 1 for n in cfg.user_counts),
         "user_counts", "must be a nonempty list of integers >= 1")
    if cfg.weights is not None:
        need(all(w >= 0 for w in cfg.weights) and sum(cfg.weights) > 0,
             "weights", "must be nonnegative with a positive sum")
        need(len(set(cfg.user_counts)) == 1 and cfg.user_counts[0] == len(cfg.weights),
             "weights", "explicit weights need a single user count equal to their length")
    if cfg.distances_m is not None:
        need(all(d > 0 for d in cfg.distances_m), "distances_m", "must be positive")
        need(len(set(cfg.user_counts)) == 1 and cfg.user_counts[0] == len(cfg.distances_m),
             "distances_m", "explicit distances need a single user count equal to their length")
    need(0 < cfg.pf_min <= cfg.pf_max <= 1, "pf_min", "need 0 < pf_min <= pf_max <= 1")
    need(cfg.pf_points >= 1, "pf_points", "must be >= 1")
    if cfg.pf_values is not None:
        need(len(cfg.pf_values) > 0 and all(0 < p <= 1 for p in cfg.pf_values),
             "pf_values", "must be values in (0, 1]")
    if cfg.validate_lambdas is not None:
        need(len(cfg.validate_lambdas) > 0
             and all(math.isfinite(x) and x >= 0 for x in cfg.validate_lambdas),
             "validate_lambdas", "thresholds must be finite and >= 0")
    need(0 < cfg.target_pd < 1, "target_pd", "must lie in (0, 1)")
    need(len(cfg.target_pds) > 0 and all(0 < p < 1 for p in cfg.target_pds),
         "target_pds", "must be values in (0, 1)")
    need(0 < cfg.target_pf < 1, "target_pf", "must lie in (0, 1)")
    need(all(p > cfg.target_pf for p in cfg.target_pds), "target_pds",
         "every target Pd must exceed target_pf")
    need(len(cfg.validate_models) > 0 and all(m in MODELS for m in cfg.validate_models),
         "validate_models", f"must be names from {', '.join(MODELS)}")
    need(len(cfg.validate_pfs) > 0 and all(0 < p <= 1 for p in cfg.validate_pfs),
         "validate_pfs", "must be values in (0, 1]")
    need(len(cfg.r_values) > 0 and all(r >= 1 for r in cfg.r_values), "r_values", "must be >= 1")
    need(cfg.trials >= 1, "trials", "must be >= 1")
    need(0 <= cfg.seed < 2 ** 64, "seed", "must be a 64-bit unsigned integer")
    need(cfg.workers >= 1, "workers", "must be >= 1")
    for name in ("nu", "mean_snr_db", "mu_db", "sigma_db", "weight_ratio"):
        need(math.isfinite(getattr(cfg, name)), name, "must be finite")
    try:
        cfg.channel_model()
    except DomainError as exc:
        raise ConfigError("model", str(exc)) from None


def _parse_scalar(text, kind, name):
    text = text.strip()
    try:
        if kind is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text, 10)
        if kind is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(name, f"cannot parse {text!r} as {kind.__name__}") from None


def _element_kind(name):
    if name in ("user_counts", "r_values"):
        return int
    if name in ("validate_models",):
        return str
    return float


def _parse_value(name, text, hint):
    origin = typing.get_origin(hint)
    if origin is typing.Union:  # Optional[tuple]
        if text.strip().lower() in ("", "none"):
            return None
        hint = tuple
    if hint is tuple:
        kind = _element_kind(name)
        items = [t for t in text.split(",") if t.strip()]
        return tuple(_parse_scalar(t, kind, name) for t in items)
    return _parse_scalar(text, hint, name)


def parse_config(text, **overrides):
    """Parse config text; keyword ``overrides`` (already typed) win over the file."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("<file>", str(exc).splitlines()[0]) from None
    types = _field_types()
    values = {}
    for key, raw in parser.items(_SECTION):
        if key not in types:
            raise ConfigError(key, "unknown key")
        values[key] = _parse_value(key, raw, types[key])
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in types:
            raise ConfigError(key, "unknown key")
        values[key] = val
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError("<file>", str(exc)) from None


def load_config(path=None, **overrides):
    text = ""
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
    return parse_config(text, **overrides)


def _format_value(val):
    if val is None:
        return "none"
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, tuple):
        return ", ".join(_format_value(v) for v in val)
    if isinstance(val, float):
        return repr(val)
    return str(val)


def dump_config(cfg):
    """Serialize ``cfg`` back to the text format, one key per line."""
    return "".join(f"{k} = {_format_value(v)}\n" for k, v in asdict(cfg).items())


def with_overrides(cfg, **changes):
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
