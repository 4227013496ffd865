"""Integer-order Bessel functions of real argument.

The workhorse is :func:`log_bessel_j_sweep`, a vectorized Miller backward
recurrence that returns the whole column ``J_0(x), ..., J_n(x)`` for every
argument at once, carried as sign and log-magnitude so that orders far beyond
the argument do not underflow.  The plain-valued helpers are thin wrappers.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError

__all__ = [
    "MAX_ORDER",
    "bessel_j",
    "bessel_j_derivative",
    "bessel_j_sweep",
    "bessel_y",
    "bessel_y0",
    "hankel1_0",
    "log_bessel_j_sweep",
]

# Supported order range.  Larger orders work numerically but are not tested.
MAX_ORDER = 4096

_RESCALE_BITS = 830
_RESCALE = 2.0**_RESCALE_BITS
_LN2 = math.log(2.0)
_EULER_GAMMA = 0.57721566490153286061
# below this argument the ascending series replaces backward recurrence,
# whose growth factor 2k/x would overflow between rescalings
_SERIES_MAX = 1e-3


def _as_argument(x, strict: bool = False) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("x: argument must be finite")
    if strict and np.any(arr <= 0):
        raise DomainError("x: argument must be strictly positive")
    if np.any(arr < 0):
        raise DomainError("x: argument must be non-negative")
    return arr


def _check_order(order) -> int:
    if isinstance(order, (bool, np.bool_)) or int(order) != order:
        raise DomainError(f"order: expected an integer, got {order!r}")
    order = int(order)
    if abs(order) > MAX_ORDER:
        raise DomainError(f"order: |order| must not exceed {MAX_ORDER}, got {order}")
    return order


def _start_order(nmax: int, xmax: float) -> int:
    # J_m(x) is below double precision relative to J_nmax(x) and to the
    # normalization sum once m exceeds both nmax and x by this margin.
    top = max(nmax, xmax)
    start = int(math.ceil(top + 12.0 * top ** (1.0 / 3.0) + math.sqrt(40.0 * top))) + 20
    return start + (start % 2)


def _miller(nmax: int, x):
    """Mantissas and base-2 exponents of ``J_0(x), ..., J_nmax(x)``.

    Backward recurrence ``f_{k-1} = (2k/x) f_k - f_{k+1}`` from a start order
    well beyond ``max(nmax, x)``, normalized by ``J_0 + 2 sum J_{2k} = 1``.
    Rescaling is by an exact power of two and each stored value remembers how
    many rescales were active when it was produced, so ``ldexp(mant, expo)``
    is the value with no rounding added by the bookkeeping.
    """
    nmax = _check_order(nmax)
    if nmax < 0:
        raise DomainError("nmax: must be non-negative")
    xa = _as_argument(x)
    shape = xa.shape
    xf = xa.ravel()
    mant = np.zeros((xf.size, nmax + 1))
    expo = np.zeros((xf.size, nmax + 1), dtype=np.int64)

    zero = xf == 0.0
    mant[zero, 0] = 1.0
    small = (xf > 0.0) & (xf < _SERIES_MAX)
    if np.any(small):
        mant[small], expo[small] = _ascending_series(nmax, xf[small])
    pos = xf >= _SERIES_MAX
    if np.any(pos):
        xp = xf[pos]
        start = _start_order(nmax, float(xp.max()))
        vals = np.empty((xp.size, nmax + 1))
        count = np.empty((xp.size, nmax + 1), dtype=np.int64)
        f_next = np.zeros_like(xp)  # f_{k+1}
        f_cur = np.full_like(xp, 1e-30)  # f_k at k = start
        ncur = np.zeros(xp.size, dtype=np.int64)
        norm = np.zeros_like(xp)
        two_over_x = 2.0 / xp
        for k in range(start, 0, -1):
            if k <= nmax:
                vals[:, k] = f_cur
                count[:, k] = ncur
            if k % 2 == 0:
                norm += 2.0 * f_cur
            f_prev = k * two_over_x * f_cur - f_next
            f_next, f_cur = f_cur, f_prev
            big = np.abs(f_cur) > _RESCALE
            if np.any(big):
                f_cur[big] /= _RESCALE
                f_next[big] /= _RESCALE
                norm[big] /= _RESCALE
                ncur[big] += 1
        vals[:, 0] = f_cur
        count[:, 0] = ncur
        norm += f_cur
        mant[pos] = vals / norm[:, None]
        expo[pos] = _RESCALE_BITS * (count - ncur[:, None])
    return mant.reshape(shape + (nmax + 1,)), expo.reshape(shape + (nmax + 1,))


def _ascending_series(nmax: int, x: np.ndarray):
    """Mantissa/exponent pairs of ``J_0..J_nmax`` from the power series, small ``x``."""
    half = 0.5 * x
    q = half * half
    n = np.arange(nmax + 1)
    # (x/2)^n / n! carried as frexp pairs to avoid underflow
    lead_m = np.empty((x.size, nmax + 1))
    lead_e = np.empty((x.size, nmax + 1), dtype=np.int64)
    m = np.ones_like(x)
    e = np.zeros(x.size, dtype=np.int64)
    for k in range(nmax + 1):
        if k:
            m, de = np.frexp(m * half / k)
            e = e + de
        lead_m[:, k] = m
        lead_e[:, k] = e
    # sum_j (-q)^j / (j! (n+1)_j); terms shrink by at least q / (n + 1) < 3e-7
    term = np.ones((x.size, nmax + 1))
    total = term.copy()
    for j in range(1, 6):
        term = term * (-q[:, None]) / (j * (n + j))
        total += term
    return lead_m * total, lead_e


def log_bessel_j_sweep(nmax: int, x):
    """Signs and log-magnitudes of ``J_0(x), ..., J_nmax(x)``.

    Parameters
    ----------
    nmax : int
        Highest order in the sweep.
    x : array_like
        Non-negative arguments.

    Returns
    -------
    sign : ndarray, shape ``x.shape + (nmax + 1,)``
        Signs in {-1, 0, 1}.
    logabs : ndarray, same shape
        ``log|J_n(x)|``, ``-inf`` where the value is exactly zero.  Finite
        even far below the smallest double.
    """
    mant, expo = _miller(nmax, x)
    with np.errstate(divide="ignore"):
        logabs = np.log(np.abs(mant)) + expo * _LN2
    return np.sign(mant), logabs


def bessel_j_sweep(nmax: int, x) -> np.ndarray:
    """Values ``J_0(x), ..., J_nmax(x)`` along a trailing axis.

    Entries below the double range underflow to zero.
    """
    mant, expo = _miller(nmax, x)
    return np.ldexp(mant, expo)


def bessel_j(order: int, x):
    """Bessel function of the first kind ``J_order(x)``.

    Parameters
    ----------
    order : int
        Integer order, negative orders allowed.
    x : array_like
        Non-negative argument(s).

    Returns
    -------
    float or ndarray
    """
    order = _check_order(order)
    n = abs(order)
    out = bessel_j_sweep(n, x)[..., n]
    if order < 0 and n % 2 == 1:
        out = -out
    return out[()] if np.ndim(out) == 0 else out


def bessel_j_derivative(order: int, x):
    """Derivative ``J'_order(x) = (J_{order-1}(x) - J_{order+1}(x)) / 2``."""
    order = _check_order(order)
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x))


def _neumann_y01(x: np.ndarray):
    """Y_0 and Y_1 from Neumann series in even/odd-order J."""
    xmax = float(x.max())
    kmax = _start_order(0, xmax)
    jj = bessel_j_sweep(kmax + 1, x)
    log_term = np.log(0.5 * x) + _EULER_GAMMA
    k = np.arange(1, kmax // 2 + 1)
    alt = (-1.0) ** k
    # pi/2 Y0 = (ln(x/2) + gamma) J0 - 2 sum_k (-1)^k J_{2k} / k
    s0 = np.sum(jj[..., 2 * k] * (alt / k), axis=-1)
    y0 = (2.0 / np.pi) * (log_term * jj[..., 0] - 2.0 * s0)
    # pi/2 Y1 = (ln(x/2) + gamma - 1) J1 - J0/x - sum_k (-1)^k (2k+1) J_{2k+1} / (k(k+1))
    k1 = k[2 * k + 1 <= kmax + 1]
    s1 = np.sum(jj[..., 2 * k1 + 1] * (((-1.0) ** k1) * (2 * k1 + 1) / (k1 * (k1 + 1.0))), axis=-1)
    y1 = (2.0 / np.pi) * ((log_term - 1.0) * jj[..., 1] - jj[..., 0] / x - s1)
    return y0, y1


def bessel_y0(x):
    """Bessel function of the second kind of order zero, ``x > 0``."""
    xa = _as_argument(x, strict=True)
    y0, _ = _neumann_y01(np.atleast_1d(xa))
    return y0.reshape(xa.shape)[()] if xa.ndim == 0 else y0.reshape(xa.shape)


def bessel_y(order: int, x):
    """Bessel function of the second kind ``Y_order(x)`` for ``x > 0``.

    Orders above one come from the forward recurrence, which is stable for
    the dominant solution.
    """
    order = _check_order(order)
    xa = _as_argument(x, strict=True)
    x1 = np.atleast_1d(xa)
    n = abs(order)
    y_prev, y_cur = _neumann_y01(x1)
    if n == 0:
        out = y_prev
    else:
        for k in range(1, n):
            y_prev, y_cur = y_cur, (2.0 * k / x1) * y_cur - y_prev
        out = y_cur
    if order < 0 and n % 2 == 1:
        out = -out
    out = out.reshape(xa.shape)
    return out[()] if xa.ndim == 0 else out


def hankel1_0(x):
    """Hankel function of the first kind of order zero, ``J_0 + i Y_0``.

    Raises
    ------
    DomainError
        For ``x <= 0``; the singularity must lie outside the sampled region.
    """
    xa = _as_argument(x, strict=True)
    x1 = np.atleast_1d(xa)
    j0 = bessel_j_sweep(0, x1)[..., 0]
    y0, _ = _neumann_y01(x1)
    out = (j0 + 1j * y0).reshape(xa.shape)
    return out[()] if xa.ndim == 0 else out
