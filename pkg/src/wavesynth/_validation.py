"""Input checks shared by the estimators and the experiment drivers."""

from __future__ import annotations

import math
import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import ConfigError

STRATEGIES = ("deterministic", "sobol", "random")


def check_positive(name: str, value, integer: bool = False, allow_zero: bool = False):
    """Return ``value`` if it is a finite positive number, else raise ConfigError."""
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    ok = value >= 0 if allow_zero else value > 0
    if not (math.isfinite(value) and ok):
        bound = "non-negative" if allow_zero else "positive"
        raise ConfigError(f"{name}: must be {bound}, got {value!r}")
    return int(value) if integer else float(value)


def check_eps(eps) -> float:
    eps = check_positive("eps", eps)
    if eps > 1.0:
        raise ConfigError(f"eps: must lie in (0, 1], got {eps}")
    return eps


def check_strategy(strategy: str) -> str:
    if strategy not in STRATEGIES:
        raise ConfigError(f"strategy: expected one of {', '.join(STRATEGIES)}, got {strategy!r}")
    return strategy


def check_points(X) -> np.ndarray:
    """Real ``(n, 2)`` array of planar points."""
    try:
        X = check_array(X, dtype=np.float64, ensure_2d=True)
    except ValueError as exc:
        raise ConfigError(f"X: {exc}") from exc
    if X.shape[1] != 2:
        raise ConfigError(f"X: expected 2 columns (planar points), got {X.shape[1]}")
    return X


def check_trace(y, n: int) -> np.ndarray:
    """Finite complex vector of length ``n``."""
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != n:
        raise ConfigError(f"y: expected a vector of length {n}, got shape {y.shape}")
    y = y.astype(complex)
    if not np.all(np.isfinite(y)):
        raise ConfigError("y: contains non-finite values")
    return y
