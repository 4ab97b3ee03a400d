"""Small argument checkers shared by the public functions."""
import math
import numbers

from .errors import DomainError


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            value = int(value)
        else:
            raise DomainError(f"{name} must be a positive integer, got {value!r}")
    if value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_real(value, name, *, low=None, high=None, low_open=False, high_open=False):
    """Validate a finite real scalar against optional bounds and return it as float."""
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if math.isnan(x):
        raise DomainError(f"{name} must not be NaN")
    if low is not None and (x < low or (low_open and x == low)):
        op = ">" if low_open else ">="
        raise DomainError(f"{name} must be {op} {low}, got {x}")
    if high is not None and (x > high or (high_open and x == high)):
        op = "<" if high_open else "<="
        raise DomainError(f"{name} must be {op} {high}, got {x}")
    return x


def check_nonnegative(value, name):
    return check_real(value, name, low=0.0)


def check_positive(value, name):
    return check_real(value, name, low=0.0, low_open=True)


def check_probability(value, name, *, allow_zero=False, allow_one=True):
    return check_real(value, name, low=0.0, high=1.0,
                      low_open=not allow_zero, high_open=not allow_one)


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)
