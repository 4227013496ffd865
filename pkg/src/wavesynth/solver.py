"""Boundary collocation and the truncated-SVD least-squares solve.

Wave sets carry their normalization as log-weights so that evanescent waves
with large ``|zeta|`` (huge values, tiny weights) are assembled without
intermediate overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import ConfigError, SolverError, WaveOverflowError
from .waves import epw_exponent

__all__ = [
    "CollocationSystem",
    "RegularizedPseudoInverse",
    "SolveReport",
    "WaveSet",
    "assemble",
    "collocation_matrix",
    "residual_and_norm",
    "solve_regularized",
]

_LOG_MAX = 700.0


@dataclass(frozen=True)
class WaveSet:
    """Plane waves with normalization weights.

    Attributes
    ----------
    kind : {'propagative', 'evanescent'}
    phi, zeta : ndarray, shape (M,)
        Wave parameters; ``zeta`` is zero for propagative waves.
    log_weight : ndarray, shape (M,)
        Natural log of the positive column weights.
    """

    kind: str
    phi: np.ndarray
    zeta: np.ndarray
    log_weight: np.ndarray

    def __post_init__(self):
        if self.kind not in ("propagative", "evanescent"):
            raise ConfigError(f"kind: expected 'propagative' or 'evanescent', got {self.kind!r}")
        n = np.size(self.phi)
        if np.size(self.zeta) != n or np.size(self.log_weight) != n or n == 0:
            raise ConfigError("phi, zeta, log_weight: must be non-empty and of equal length")
        if self.kind == "propagative" and np.any(np.asarray(self.zeta) != 0):
            raise ConfigError("zeta: propagative waves have zeta = 0")

    @property
    def M(self) -> int:
        return int(np.size(self.phi))

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weight)

    @classmethod
    def propagative(cls, M: int) -> "WaveSet":
        """Equispaced directions ``2 pi m / M``, ``m = 1..M``, weight ``M^-1/2``."""
        if int(M) != M or M < 1:
            raise ConfigError(f"M: must be a positive integer, got {M}")
        phi = 2.0 * math.pi * np.arange(1, M + 1) / M
        return cls("propagative", phi, np.zeros(M), np.full(M, -0.5 * math.log(M)))

    @classmethod
    def evanescent(cls, nodes, model) -> "WaveSet":
        """Sampled evanescent waves with weights ``sqrt(mu_N(y) / M)``.

        Parameters
        ----------
        nodes : NodeSet
        model : DensityModel
            The density the nodes were drawn from.
        """
        M = nodes.M
        logw = 0.5 * (model.log_mu(nodes.zeta) - math.log(M))
        return cls("evanescent", np.asarray(nodes.phi, float), np.asarray(nodes.zeta, float), logw)

    def log_values(self, kappa: float, points) -> np.ndarray:
        """Log of the weighted wave values, shape ``(len(points), M)``."""
        return self.log_weight + epw_exponent(kappa, self.phi, self.zeta, points)

    def evaluate(self, kappa: float, points) -> np.ndarray:
        """Weighted wave values at points, shape ``(len(points), M)``."""
        lv = self.log_values(kappa, points)
        if np.any(lv.real > _LOG_MAX):
            raise WaveOverflowError("weighted wave values overflow on the given points")
        return np.exp(lv)

    def renormalized_sup(self, kappa: float, points) -> "WaveSet":
        """Copy whose columns have unit maximum modulus over ``points``."""
        ex = epw_exponent(kappa, self.phi, self.zeta, points)
        return WaveSet(self.kind, self.phi, self.zeta, -ex.real.max(axis=0))

    def expansion(self, kappa: float, coef, points) -> np.ndarray:
        """Evaluate ``sum_l coef_l * weight_l * wave_l`` at points."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 2)
        out = np.empty(flat.shape[0], dtype=complex)
        step = max(1, 2_000_000 // self.M)
        for i in range(0, flat.shape[0], step):
            out[i : i + step] = self.evaluate(kappa, flat[i : i + step]) @ coef
        return out.reshape(pts.shape[:-1])


def collocation_matrix(kappa: float, waves: WaveSet, points) -> np.ndarray:
    """Matrix of weighted wave traces at boundary points."""
    A = waves.evaluate(kappa, np.asarray(points, dtype=float))
    if not np.all(np.isfinite(A)):
        raise WaveOverflowError("collocation matrix has non-finite entries")
    return A


@dataclass
class CollocationSystem:
    """Collocation matrix, right-hand side and the points they were built on."""

    matrix: np.ndarray
    rhs: np.ndarray
    boundary_points: np.ndarray

    @property
    def S(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def M(self) -> int:
        return int(self.matrix.shape[1])


def assemble(kappa: float, waves: WaveSet, geometry, target, S: int) -> CollocationSystem:
    """Assemble the boundary collocation system.

    Parameters
    ----------
    kappa : float
    waves : WaveSet
    geometry : object with ``boundary_points(S)``
    target : object with ``trace(points)``
    S : int
        Number of boundary points, at least ``waves.M``.
    """
    if int(S) != S or S < waves.M:
        raise ConfigError(f"S: must be an integer >= M={waves.M}, got {S}")
    pts = geometry.boundary_points(int(S))
    return CollocationSystem(collocation_matrix(kappa, waves, pts), np.asarray(target.trace(pts), complex), pts)


@dataclass
class SolveReport:
    """Outcome of a regularized solve."""

    xi: np.ndarray
    singular_values: np.ndarray
    eps_rank: int
    sigma_max: float
    residual: float
    coeff_norm: float
    eps: float
    S: int
    M: int
    extra: dict = field(default_factory=dict, repr=False)

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1])

    def summary(self) -> dict:
        """Flat record with the serialized fields."""
        return {
            "residual": float(self.residual),
            "coeff_norm": float(self.coeff_norm),
            "eps_rank": int(self.eps_rank),
            "sigma_max": float(self.sigma_max),
            "sigma_min": self.sigma_min,
            "M": int(self.M),
            "S": int(self.S),
            "eps": float(self.eps),
        }


class RegularizedPseudoInverse:
    """Truncated-SVD pseudo-inverse of a fixed matrix.

    Singular values ``sigma >= eps * sigma_max`` are kept; the rest are
    treated as zero.  Solutions are applied right to left as
    ``V (Sigma_eps^+ (U^* b))``, so no pseudo-inverse matrix is formed.

    Parameters
    ----------
    A : ndarray, shape (S, M)
    eps : float
        Relative cutoff in ``(0, 1]``.
    """

    def __init__(self, A, eps: float = 1e-14):
        if not (0.0 < eps <= 1.0):
            raise ConfigError(f"eps: must lie in (0, 1], got {eps}")
        A = np.asarray(A)
        if A.ndim != 2 or not np.all(np.isfinite(A)):
            raise ConfigError("A: expected a finite 2D matrix")
        self.A = A
        self.eps = float(eps)
        try:
            U, s, Vh = scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesvd", check_finite=False)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SolverError(f"SVD did not converge: {exc}") from exc
        self.U, self.s, self.Vh = U, s, Vh
        self.sigma_max = float(s[0]) if s.size else 0.0
        self.keep = s >= self.eps * self.sigma_max if self.sigma_max > 0 else np.zeros(s.shape, bool)
        self.eps_rank = int(np.count_nonzero(self.keep))

    def apply(self, b) -> np.ndarray:
        """Coefficients for one right-hand side or a matrix of them (columns)."""
        b = np.asarray(b)
        c = self.U.conj().T @ b
        inv = np.zeros_like(self.s)
        inv[self.keep] = 1.0 / self.s[self.keep]
        c = (inv[:, None] * c) if c.ndim == 2 else inv * c
        return self.Vh.conj().T @ c

    def solve(self, b) -> SolveReport:
        """Solve for one right-hand side and collect diagnostics."""
        b = np.asarray(b)
        if b.shape != (self.A.shape[0],):
            raise ConfigError(f"b: expected shape ({self.A.shape[0]},), got {b.shape}")
        bnorm = float(np.linalg.norm(b))
        if bnorm == 0.0:
            xi = np.zeros(self.A.shape[1], dtype=np.result_type(self.A, b, complex))
            resid = 0.0
        else:
            xi = self.apply(b)
            resid = float(np.linalg.norm(self.A @ xi - b)) / bnorm
        return SolveReport(
            xi=xi,
            singular_values=self.s.copy(),
            eps_rank=self.eps_rank,
            sigma_max=self.sigma_max,
            residual=resid,
            coeff_norm=float(np.linalg.norm(xi)),
            eps=self.eps,
            S=int(self.A.shape[0]),
            M=int(self.A.shape[1]),
        )


def solve_regularized(system: CollocationSystem, eps: float = 1e-14) -> SolveReport:
    """Truncated-SVD least-squares solution of a collocation system."""
    return RegularizedPseudoInverse(system.matrix, eps).solve(system.rhs)


def residual_and_norm(report: SolveReport, system: CollocationSystem):
    """Relative residual ``|A xi - b| / |b|`` (zero when ``b = 0``) and ``|xi|``."""
    b = np.asarray(system.rhs)
    bnorm = float(np.linalg.norm(b))
    resid = 0.0 if bnorm == 0.0 else float(np.linalg.norm(system.matrix @ report.xi - b)) / bnorm
    return resid, float(np.linalg.norm(report.xi))
