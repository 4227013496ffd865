"""Christoffel-function sampling of evanescent wave parameters.

For a truncation ``P`` with ``N = 2P + 1`` modes the sampling density on the
cylinder is

    rho(zeta) = w(zeta)^2 * K_P(zeta) / N,   K_P = sum_{|p| <= P} |a_p|^2,

which does not depend on ``phi`` and integrates to one over the cylinder.
Samples are drawn by inverse transform: ``phi`` is uniform, and ``zeta`` is
obtained from a uniform variate through the inverse of the ``zeta``-marginal
distribution function, tabulated once per model.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from scipy.stats import qmc

from ._validation import STRATEGIES
from .exceptions import ConfigError, DomainError, NumericalError
from .modal import DiskContext, cached_context, log_weight_sq

__all__ = [
    "STRATEGIES",
    "DensityModel",
    "NodeSet",
    "cached_density",
    "sample_nodes",
    "sobol_points",
]

_N_CELLS = 4096
_N_GAUSS = 16
_TAIL = math.log(1e-30)


def _legendre_tables():
    t, w = legendre.leggauss(_N_GAUSS)
    # c_k = (2k+1)/2 sum_i w_i P_k(t_i) f_i maps node values to Legendre coefficients
    vander = legendre.legvander(t, _N_GAUSS - 1)
    to_coef = ((2 * np.arange(_N_GAUSS) + 1) / 2.0)[:, None] * (vander * w[:, None]).T
    return t, w, to_coef


class DensityModel:
    """Sampling density, Christoffel function and tabulated distribution.

    Parameters
    ----------
    ctx : DiskContext
        Normalization tables, ``ctx.p_max >= P``.
    P : int
        Mode truncation.

    Attributes
    ----------
    N : int
        Number of modes ``2P + 1``.
    zeta_max : float
        Support cutoff; the density is below ``1e-30`` of its peak outside.
    knots : ndarray, shape (4097,)
        Uniform table knots on ``[-zeta_max, zeta_max]``.
    cumulative : ndarray, shape (4097,)
        Unnormalized marginal mass to the left of each knot.
    total_mass : float
        Table estimate of the total mass; analytically one.
    """

    def __init__(self, ctx: DiskContext, P: int):
        if int(P) != P or P < 0:
            raise ConfigError(f"P: must be a non-negative integer, got {P}")
        if P > ctx.p_max:
            raise ConfigError(f"P: exceeds the context table size p_max={ctx.p_max}")
        self.ctx = ctx
        self.P = int(P)
        self.N = 2 * self.P + 1
        self.zeta_max = self._find_zeta_max()
        self._build_table()

    def __repr__(self):
        return f"DensityModel(kappa={self.ctx.kappa!r}, P={self.P})"

    # density and Christoffel function ------------------------------------
    def log_rho(self, zeta):
        """``log rho(zeta)``."""
        z = np.asarray(zeta, dtype=float)
        return log_weight_sq(self.ctx.kappa, z) + self.ctx.log_kernel_diag(self.P, z) - math.log(self.N)

    def density_rho(self, zeta):
        """Sampling density ``w^2 K_P / N`` at ``zeta`` (any ``phi``)."""
        z = np.asarray(zeta, dtype=float)
        lw = log_weight_sq(self.ctx.kappa, z)
        lk = self.ctx.log_kernel_diag(self.P, z)
        # separate factors keep N mu rho = w^2 to a few ulps; a single exp
        # of the summed logs loses |log| * eps
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            rho = np.exp(lw) * np.exp(lk) / self.N
        bad = ~np.isfinite(rho) | ((rho == 0) & (lw + lk > -740.0))
        if np.any(bad):
            rho = np.where(bad, np.exp(lw + lk - math.log(self.N)), rho)
        return rho

    def log_mu(self, zeta):
        """``log`` of the Christoffel function ``1 / K_P(zeta)``."""
        return -self.ctx.log_kernel_diag(self.P, zeta)

    def christoffel_mu(self, zeta):
        """Christoffel function ``mu_N(zeta) = 1 / K_P(zeta)``."""
        return np.exp(self.log_mu(zeta))

    def marginal_density(self, zeta):
        """Density of ``zeta`` alone: ``2 pi rho(zeta)``."""
        return 2.0 * math.pi * self.density_rho(zeta)

    # table -----------------------------------------------------------------
    def _find_zeta_max(self) -> float:
        zmax = 1.0
        for _ in range(60):
            grid = np.linspace(0.0, zmax, 2001)
            lr = self.log_rho(grid)
            if lr[-1] - lr.max() < _TAIL:
                return zmax
            zmax *= 2.0
        raise NumericalError("zeta_max: doubling search did not terminate")

    def _build_table(self):
        t, w, to_coef = _legendre_tables()
        self.knots = np.linspace(-self.zeta_max, self.zeta_max, _N_CELLS + 1)
        h = self.knots[1] - self.knots[0]
        self._h = h
        mids = 0.5 * (self.knots[:-1] + self.knots[1:])
        nodes = mids[:, None] + 0.5 * h * t[None, :]
        vals = self.marginal_density(nodes)
        cell_mass = 0.5 * h * (vals @ w)
        self.cumulative = np.concatenate(([0.0], np.cumsum(cell_mass)))
        self.total_mass = float(self.cumulative[-1])
        # antiderivative in the local variable t in [-1, 1], zero at t = -1
        coef = vals @ to_coef.T
        self._anti = 0.5 * h * legendre.legint(coef, lbnd=-1, axis=1)

    def _local_mass(self, cell, t):
        return legendre.legval(t, self._anti[cell].T, tensor=False)

    def cdf(self, zeta):
        """Distribution function of the ``zeta`` marginal.

        Table value at the enclosing knot plus the integral of the local
        Legendre interpolant of the density over the partial cell.
        """
        z = np.asarray(zeta, dtype=float)
        zf = np.atleast_1d(z).ravel()
        out = np.empty_like(zf)
        below = zf <= -self.zeta_max
        above = zf >= self.zeta_max
        inside = ~(below | above)
        out[below] = 0.0
        out[above] = 1.0
        if np.any(inside):
            zi = zf[inside]
            cell = np.clip(((zi + self.zeta_max) / self._h).astype(np.int64), 0, _N_CELLS - 1)
            t = 2.0 * (zi - self.knots[cell]) / self._h - 1.0
            mass = self.cumulative[cell] + self._local_mass(cell, t)
            out[inside] = np.clip(mass / self.total_mass, 0.0, 1.0)
        out = out.reshape(z.shape)
        return out[()] if z.ndim == 0 else out

    def cdf_inverse(self, u, max_iter: int = 200, tol: float = 1e-15):
        """Inverse distribution function by bisection inside the table bracket.

        Parameters
        ----------
        u : array_like
            Probabilities in the open interval (0, 1).

        Raises
        ------
        DomainError
            If some ``u`` is outside (0, 1).
        """
        ua = np.asarray(u, dtype=float)
        uf = np.atleast_1d(ua).ravel()
        if np.any(~np.isfinite(uf)) or np.any(uf <= 0.0) or np.any(uf >= 1.0):
            raise DomainError("u: probabilities must lie strictly inside (0, 1)")
        target = uf * self.total_mass
        cell = np.clip(np.searchsorted(self.cumulative, target, side="right") - 1, 0, _N_CELLS - 1)
        resid = target - self.cumulative[cell]
        lo = np.full_like(uf, -1.0)
        hi = np.full_like(uf, 1.0)
        # bisection in the local variable; stop once the zeta bracket is below tol
        for _ in range(max_iter):
            if 0.5 * self._h * float(np.max(hi - lo)) <= tol:
                break
            mid = 0.5 * (lo + hi)
            left = self._local_mass(cell, mid) < resid
            lo = np.where(left, mid, lo)
            hi = np.where(left, hi, mid)
        z = self.knots[cell] + 0.5 * self._h * (0.5 * (lo + hi) + 1.0)
        z = z.reshape(ua.shape)
        return z[()] if ua.ndim == 0 else z

    def table(self):
        """Knots with density and distribution values, for reporting."""
        return self.knots, self.density_rho(self.knots), self.cumulative / self.total_mass


@dataclass(frozen=True)
class NodeSet:
    """Sampled wave parameters.

    Attributes
    ----------
    phi, zeta : ndarray, shape (M,)
        Parameters, ``phi`` in ``[0, 2 pi)``.
    strategy : str
        One of ``STRATEGIES``.
    seed : int or None
        Generator seed for the random strategy.
    P : int
        Truncation of the density used.
    """

    phi: np.ndarray
    zeta: np.ndarray
    strategy: str
    seed: int | None
    P: int
    latent: np.ndarray = field(repr=False, default=None)

    @property
    def M(self) -> int:
        return int(self.phi.size)

    def to_rows(self):
        return [(m + 1, float(a), float(b)) for m, (a, b) in enumerate(zip(self.phi, self.zeta))]


def sobol_points(M: int) -> np.ndarray:
    """First ``M`` points of the unscrambled 2D Sobol sequence, skipping index 0."""
    eng = qmc.Sobol(d=2, scramble=False)
    eng.fast_forward(1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return eng.random(M)


def _uniform_pairs(M: int, strategy: str, seed) -> np.ndarray:
    if strategy == "deterministic":
        k = math.isqrt(M - 1) + 1 if M > 1 else 1
        mid = (np.arange(1, k + 1) - 0.5) / k
        zphi, zzeta = np.meshgrid(mid, mid, indexing="ij")
        return np.column_stack([zphi.ravel(), zzeta.ravel()])
    if strategy == "sobol":
        return sobol_points(M)
    if strategy == "random":
        if seed is None:
            raise ConfigError("seed: the random strategy requires a seed")
        rng = np.random.Generator(np.random.PCG64(int(seed)))
        z = rng.random((M, 2))
        # zero maps to an infinite zeta; redraw the (astronomically rare) hits
        while np.any(z == 0.0):
            bad = z == 0.0
            z[bad] = rng.random(int(bad.sum()))
        return z
    raise ConfigError(f"strategy: expected one of {STRATEGIES}, got {strategy!r}")


def sample_nodes(model: DensityModel, M: int, strategy: str = "sobol", seed: int | None = 0) -> NodeSet:
    """Draw evanescent wave parameters from the sampling density.

    Parameters
    ----------
    model : DensityModel
    M : int
        Requested number of nodes.  The deterministic strategy returns the
        full ``k x k`` midpoint grid with ``k = ceil(sqrt(M))``.
    strategy : {'deterministic', 'sobol', 'random'}
    seed : int, optional
        Seed of the PCG64 generator used by the random strategy.

    Returns
    -------
    NodeSet
    """
    if int(M) != M or M < 1:
        raise ConfigError(f"M: must be a positive integer, got {M}")
    z = _uniform_pairs(int(M), strategy, seed)
    phi = 2.0 * math.pi * z[:, 0]
    zeta = model.cdf_inverse(z[:, 1])
    return NodeSet(
        phi=phi,
        zeta=np.asarray(zeta, dtype=float),
        strategy=strategy,
        seed=int(seed) if (strategy == "random" and seed is not None) else None,
        P=model.P,
        latent=z,
    )


@functools.lru_cache(maxsize=32)
def cached_density(kappa: float, P: int) -> DensityModel:
    """Shared density model for ``(kappa, P)`` built on a cached context."""
    return DensityModel(cached_context(kappa, max(P, math.ceil(kappa))), P)
