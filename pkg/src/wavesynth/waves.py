"""Propagative and evanescent plane waves.

An evanescent plane wave with parameter ``(phi, zeta)`` is

    exp(i kappa cosh(zeta) x.d(phi)) * exp(-kappa sinh(zeta) x.d_perp(phi)),

with ``d = (cos phi, sin phi)`` and ``d_perp = (-sin phi, cos phi)``.  It
oscillates along ``d`` with apparent wavenumber ``kappa cosh zeta`` and decays
along ``d_perp`` at rate ``kappa sinh zeta``.  ``zeta = 0`` gives the usual
propagative wave.  Evaluation always uses this real split form.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigError, WaveOverflowError
from .modal import DiskContext, ModalVector, _i_power

__all__ = [
    "epw_eval",
    "epw_exponent",
    "epw_modal_coefficients",
    "ppw_eval",
]

_LOG_MAX = 709.0


def _as_points(x) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1:] != (2,):
        raise ConfigError("x: points must have a trailing axis of length 2")
    if not np.all(np.isfinite(pts)):
        raise ConfigError("x: points must be finite")
    return pts


def epw_exponent(kappa: float, phi, zeta, x) -> np.ndarray:
    """Complex exponent of the waves ``(phi, zeta)`` at points ``x``.

    Parameters
    ----------
    kappa : float
        Wavenumber.
    phi, zeta : array_like, shape (M,)
        Wave parameters, broadcast together.
    x : array_like, shape (..., 2)
        Cartesian points.

    Returns
    -------
    ndarray, complex, shape (..., M)
    """
    pts = _as_points(x)
    phi, zeta = np.broadcast_arrays(np.atleast_1d(np.asarray(phi, float)), np.atleast_1d(np.asarray(zeta, float)))
    c, s = np.cos(phi), np.sin(phi)
    along = pts[..., 0:1] * c + pts[..., 1:2] * s
    across = -pts[..., 0:1] * s + pts[..., 1:2] * c
    return -kappa * np.sinh(zeta) * across + 1j * (kappa * np.cosh(zeta) * along)


def epw_eval(kappa: float, phi, zeta, x):
    """Evanescent plane waves evaluated at points.

    Returns an array of shape ``x.shape[:-1] + (M,)``; scalar inputs give a
    scalar.

    Raises
    ------
    WaveOverflowError
        If a value exceeds the double range.
    """
    expo = epw_exponent(kappa, phi, zeta, x)
    if np.any(expo.real > _LOG_MAX):
        raise WaveOverflowError("plane wave value overflows; restrict |zeta| or |x|")
    out = np.exp(expo)
    if np.ndim(phi) == 0 and np.ndim(zeta) == 0:
        out = out[..., 0]
    return out[()] if np.ndim(out) == 0 else out


def ppw_eval(kappa: float, phi, x):
    """Propagative plane waves ``exp(i kappa d(phi).x)``."""
    return epw_eval(kappa, phi, np.zeros_like(np.asarray(phi, float)), x)


def epw_modal_coefficients(ctx: DiskContext, phi: float, zeta: float, P: int) -> ModalVector:
    """Expansion coefficients of one evanescent wave in the circular waves.

    The coefficient of ``b_p`` is ``tau_p * conj(a_p(phi, zeta))``, which
    simplifies to ``i^p exp(p zeta - i p phi) / beta_p``.

    Parameters
    ----------
    ctx : DiskContext
    phi, zeta : float
        Wave parameter.
    P : int
        Truncation, at most ``ctx.p_max``.

    Returns
    -------
    ModalVector
        Coefficients for ``p = -P..P``.
    """
    if P > ctx.p_max or P < 0:
        raise ConfigError(f"P: must lie in [0, {ctx.p_max}], got {P}")
    p = np.arange(-P, P + 1)
    logmag = p * float(zeta) - ctx.log_beta[np.abs(p)]
    if np.any(logmag > _LOG_MAX):
        raise WaveOverflowError("modal coefficient overflows; restrict |zeta|")
    vals = _i_power(p) * np.exp(logmag - 1j * p * float(phi))
    return ModalVector(-P, P, vals)
