"""Normalized circular waves on the unit disk and Herglotz polynomials.

Circular waves ``b_p(r, theta) = beta_p J_p(kappa r) exp(i p theta)`` are
orthonormal for the wavenumber-weighted H1 inner product on the unit disk,
and Herglotz polynomials ``a_p(phi, zeta) = alpha_p exp(p zeta) exp(i p phi)``
are orthonormal in L2 of the cylinder with weight

    w(zeta)^2 = exp(-2 kappa sinh|zeta| + |zeta|/2).

Both normalizations over- or underflow for orders well above ``kappa``; their
product does not.  Tables therefore hold ``log beta_p`` and ``log alpha_p``.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from .exceptions import ConfigError, NumericalError, WaveOverflowError
from .special import _miller, log_bessel_j_sweep

__all__ = [
    "CylinderPoint",
    "DiskContext",
    "ModalVector",
    "cached_context",
    "log_herglotz_norm_sq",
    "log_weight_sq",
]

_LN2 = math.log(2.0)
_LOG_MAX = 700.0


def log_weight_sq(kappa: float, zeta):
    """Log of the squared cylinder weight, ``-2 kappa sinh|zeta| + |zeta|/2``."""
    az = np.abs(np.asarray(zeta, dtype=float))
    return -2.0 * kappa * np.sinh(az) + 0.5 * az


def _log_half_integral(q: float, kappa: float) -> float:
    """``log int_0^inf exp(2 (q + 1/4) zeta - 2 kappa sinh zeta) d zeta``.

    With ``eta = kappa exp(zeta)`` the integral becomes
    ``kappa^-m int_kappa^inf eta^(m-1) exp(-eta + kappa^2/eta) d eta`` with
    ``m = 2 q + 1/2``; the integrand is scaled by its maximum before
    quadrature.
    """
    m = 2.0 * q + 0.5
    c = m - 1.0
    k2 = kappa * kappa

    def g(eta):
        return c * math.log(eta) - eta + k2 / eta

    disc = c * c - 4.0 * k2
    if c > 0 and disc >= 0:
        peak = 0.5 * (c + math.sqrt(disc))
        curv = abs(-c / peak**2 + 2.0 * k2 / peak**3)
        width = 1.0 / math.sqrt(max(curv, 1e-300))
    else:
        peak = kappa
        slope = abs(c / kappa - 2.0)
        width = 1.0 / max(slope, 1e-3)
    gmax = g(peak)
    # cut where the scaled integrand drops below exp(-750) of its maximum
    offset = 10.0 * width
    while g(peak + offset) - gmax > -750.0:
        offset *= 2.0
    upper = peak + offset
    breaks = [peak + f * width for f in (-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0, 100.0)]
    breaks = sorted(t for t in breaks if kappa < t < upper)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            lambda eta: math.exp(g(eta) - gmax),
            kappa,
            upper,
            points=breaks or None,
            epsabs=0.0,
            epsrel=1e-13,
            limit=400,
        )
    if not val > 0 or not math.isfinite(val):
        raise NumericalError(f"quadrature for the Herglotz norm failed at p={q}")
    return -m * math.log(kappa) + gmax + math.log(val)


def log_herglotz_norm_sq(p: int, kappa: float) -> float:
    """``log`` of the squared weighted norm of ``exp(p zeta + i p phi)``."""
    lp = _log_half_integral(float(p), kappa)
    lm = _log_half_integral(-float(p), kappa)
    return math.log(2.0 * math.pi) + float(np.logaddexp(lp, lm))


@dataclass(frozen=True)
class CylinderPoint:
    """Wave parameter ``(phi, zeta)``; ``phi`` is wrapped into ``[0, 2 pi)``."""

    phi: float
    zeta: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.zeta)):
            raise ConfigError("phi, zeta: must be finite")
        phi = float(self.phi) % (2.0 * math.pi)
        # tiny negative angles round up to exactly 2 pi
        object.__setattr__(self, "phi", 0.0 if phi >= 2.0 * math.pi else phi)
        object.__setattr__(self, "zeta", float(self.zeta))


@dataclass(frozen=True)
class ModalVector:
    """Coefficients indexed by mode numbers ``p_min..p_max``."""

    p_min: int
    p_max: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.p_max - self.p_min + 1,):
            raise ConfigError("values: length must equal p_max - p_min + 1")
        if not np.all(np.isfinite(vals)):
            raise NumericalError("values: non-finite modal coefficient")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(self.p_min, self.p_max + 1)

    def __getitem__(self, p: int):
        if not self.p_min <= p <= self.p_max:
            raise IndexError(f"mode {p} outside [{self.p_min}, {self.p_max}]")
        return self.values[p - self.p_min]


def _i_power(p):
    """``i**p`` taken exactly from ``p mod 4``."""
    return np.array([1, 1j, -1, -1j])[np.mod(p, 4)]


class DiskContext:
    """Normalization tables for a wavenumber and a maximal mode order.

    Parameters
    ----------
    kappa : float
        Wavenumber, positive.
    p_max : int
        Tables cover ``|p| <= p_max``.

    Attributes
    ----------
    log_beta : ndarray, shape (p_max + 1,)
        ``log beta_p`` for ``p = 0..p_max`` (even in ``p``).
    log_alpha : ndarray, shape (p_max + 1,)
        ``log alpha_p`` for ``p = 0..p_max`` (even in ``p``).
    """

    def __init__(self, kappa: float, p_max: int):
        kappa = float(kappa)
        if not (math.isfinite(kappa) and kappa > 0):
            raise ConfigError(f"kappa: must be a positive finite number, got {kappa}")
        if int(p_max) != p_max or p_max < math.ceil(kappa):
            raise ConfigError(f"p_max: must be an integer >= ceil(kappa), got {p_max}")
        self.kappa = kappa
        self.p_max = int(p_max)
        self.log_beta = self._build_log_beta()
        self.log_alpha = np.array(
            [-0.5 * log_herglotz_norm_sq(p, kappa) for p in range(self.p_max + 1)]
        )

    def __repr__(self):
        return f"DiskContext(kappa={self.kappa!r}, p_max={self.p_max})"

    def _build_log_beta(self) -> np.ndarray:
        kappa, n = self.kappa, self.p_max
        mant, expo = _miller(n + 1, kappa)
        # J_{-1} = -J_1
        m_lo = np.concatenate(([-mant[1]], mant[:-2]))
        e_lo = np.concatenate(([expo[1]], expo[:-2]))
        m_mid, e_mid = mant[:-1], expo[:-1]
        m_hi, e_hi = mant[1:], expo[1:]
        # bracket / J_p^2 = 1 - r_lo r_hi + (r_lo - r_hi) / (2 kappa), r = J_{p+-1} / J_p
        r_lo = np.ldexp(m_lo / m_mid, e_lo - e_mid)
        r_hi = np.ldexp(m_hi / m_mid, e_hi - e_mid)
        ratio = 1.0 - r_lo * r_hi + (r_lo - r_hi) / (2.0 * kappa)
        log_j = np.log(np.abs(m_mid)) + e_mid * _LN2
        direct = (e_lo == 0) & (e_mid == 0) & (e_hi == 0) & (np.abs(m_mid) > 1e-150)
        if np.any(direct):
            jl, jm, jh = m_lo[direct], m_mid[direct], m_hi[direct]
            bracket = jm * jm - jl * jh + (jl - jh) * jm / (2.0 * kappa)
            ratio[direct] = bracket / (jm * jm)
        if np.any(ratio <= 0) or not np.all(np.isfinite(ratio)):
            raise NumericalError("non-positive circular wave norm encountered")
        return -0.5 * math.log(2.0 * math.pi) - log_j - 0.5 * np.log(ratio)

    def _check_p(self, p):
        pa = np.abs(np.asarray(p))
        if np.any(pa > self.p_max):
            raise ConfigError(f"p: |p| must not exceed p_max={self.p_max}")
        return pa

    def beta(self, p):
        """Normalization ``beta_p`` (may overflow to ``inf`` for huge ``p``)."""
        return np.exp(self.log_beta[self._check_p(p)])

    def alpha(self, p):
        """Normalization ``alpha_p`` (may underflow to zero for huge ``p``)."""
        return np.exp(self.log_alpha[self._check_p(p)])

    def tau(self, p):
        """Coupling constant ``i^p / (alpha_p beta_p)``."""
        pa = self._check_p(p)
        return _i_power(p) * np.exp(-self.log_alpha[pa] - self.log_beta[pa])

    def tau_bounds(self):
        """``(min |tau_p|, max |tau_p|)`` over ``|p| <= p_max``."""
        mag = np.exp(-self.log_alpha - self.log_beta)
        return float(mag.min()), float(mag.max())

    def circular_waves(self, P: int, r, theta) -> np.ndarray:
        """Values of ``b_p`` for ``p = -P..P`` along a trailing axis.

        Parameters
        ----------
        P : int
            Truncation, ``P <= p_max``.
        r, theta : array_like
            Polar coordinates, broadcast together, ``r`` in ``[0, 1]``.

        Returns
        -------
        ndarray, complex, shape ``broadcast(r, theta).shape + (2P + 1,)``
        """
        self._check_p(P)
        r, theta = np.broadcast_arrays(np.asarray(r, float), np.asarray(theta, float))
        if np.any(r < 0) or np.any(r > 1):
            raise ConfigError("r: radius must lie in [0, 1]")
        sign, logabs = log_bessel_j_sweep(P, self.kappa * r)
        p = np.arange(-P, P + 1)
        pa = np.abs(p)
        sgn = sign[..., pa] * np.where((p < 0) & (pa % 2 == 1), -1.0, 1.0)
        mag = np.exp(np.minimum(logabs[..., pa] + self.log_beta[pa], _LOG_MAX))
        return sgn * mag * np.exp(1j * p * theta[..., None])

    def circular_wave(self, p: int, r, theta):
        """``b_p(r, theta) = beta_p J_p(kappa r) exp(i p theta)``."""
        self._check_p(p)
        out = self.circular_waves(abs(int(p)), r, theta)[..., int(p) + abs(int(p))]
        return out[()] if np.ndim(out) == 0 else out

    def herglotz_poly(self, p: int, phi, zeta):
        """``a_p(phi, zeta) = alpha_p exp(p zeta) exp(i p phi)``.

        Raises
        ------
        WaveOverflowError
            If the modulus exceeds the double range.
        """
        pa = self._check_p(p)
        phi, zeta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(zeta, float))
        logmag = self.log_alpha[pa] + p * zeta
        if np.any(logmag > _LOG_MAX):
            raise WaveOverflowError(f"herglotz polynomial overflows for p={p}")
        out = np.exp(logmag + 1j * p * phi)
        return out[()] if out.ndim == 0 else out

    def log_kernel_diag(self, P: int, zeta):
        """``log sum_{|p| <= P} |a_p(phi, zeta)|^2`` (independent of ``phi``)."""
        self._check_p(P)
        # even in zeta; |zeta| makes that exact in floating point
        z = np.abs(np.asarray(zeta, dtype=float))
        p = np.arange(-P, P + 1)
        terms = 2.0 * self.log_alpha[np.abs(p)] + 2.0 * p * z[..., None]
        out = logsumexp(terms, axis=-1)
        return out[()] if np.ndim(out) == 0 else out

    def kernel_diag_truncated(self, P: int, zeta):
        """``sum_{|p| <= P} |a_p(phi, zeta)|^2``, the reciprocal Christoffel function."""
        return np.exp(self.log_kernel_diag(P, zeta))


@functools.lru_cache(maxsize=32)
def cached_context(kappa: float, p_max: int) -> DiskContext:
    """Shared read-only context for repeated use within a process."""
    return DiskContext(kappa, p_max)
