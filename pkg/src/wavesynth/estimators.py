"""Scikit-learn style front ends.

``PlaneWaveRegressor`` fits plane-wave coefficients to Dirichlet data on
boundary points and predicts the field anywhere.  ``ChristoffelSampler``
wraps the sampling density and draws wave parameters.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_eps, check_points, check_positive, check_strategy, check_trace
from .exceptions import ConfigError
from .sampling import NodeSet, cached_density, sample_nodes
from .solver import RegularizedPseudoInverse, WaveSet

__all__ = ["ChristoffelSampler", "PlaneWaveRegressor", "truncation_rule"]


def truncation_rule(kappa: float, M: int) -> int:
    """Default truncation ``max(ceil(kappa), floor(M / 4))``."""
    return max(math.ceil(kappa), M // 4)


class ChristoffelSampler(BaseEstimator):
    """Draw evanescent wave parameters from the Christoffel sampling density.

    Parameters
    ----------
    kappa : float, default=16.0
        Wavenumber.
    truncation : int, optional
        Mode truncation ``P``.  Defaults to ``ceil(kappa)``.
    strategy : {'sobol', 'deterministic', 'random'}, default='sobol'
    seed : int, default=0
        Seed of the PCG64 generator (random strategy only).

    Attributes
    ----------
    density_ : DensityModel
    truncation_ : int
    """

    def __init__(self, kappa=16.0, truncation=None, strategy="sobol", seed=0):
        self.kappa = kappa
        self.truncation = truncation
        self.strategy = strategy
        self.seed = seed

    def fit(self, X=None, y=None):
        """Build the density tables.  ``X`` and ``y`` are ignored."""
        kappa = check_positive("kappa", self.kappa)
        check_strategy(self.strategy)
        P = math.ceil(kappa) if self.truncation is None else check_positive("truncation", self.truncation, integer=True)
        self.truncation_ = P
        self.density_ = cached_density(kappa, P)
        return self

    def sample(self, n_samples: int) -> NodeSet:
        """Draw ``n_samples`` parameters (a full square grid for 'deterministic')."""
        check_is_fitted(self, "density_")
        n = check_positive("n_samples", n_samples, integer=True)
        return sample_nodes(self.density_, n, self.strategy, self.seed)

    def score_samples(self, zeta) -> np.ndarray:
        """Log sampling density at the given ``zeta`` values."""
        check_is_fitted(self, "density_")
        return self.density_.log_rho(np.asarray(zeta, dtype=float))


class PlaneWaveRegressor(BaseEstimator):
    """Least-squares plane-wave approximation of a Helmholtz solution.

    The field is expanded in ``n_waves`` normalized plane waves whose
    coefficients are fitted to Dirichlet data by a truncated-SVD solve.

    Parameters
    ----------
    kappa : float, default=16.0
        Wavenumber.
    wave_type : {'evanescent', 'propagative'}, default='evanescent'
    n_waves : int, optional
        Number of waves ``M``.  Defaults to ``len(X) // 2``.
    truncation : int, optional
        Truncation ``P`` of the sampling density (evanescent only).  Defaults
        to ``max(ceil(kappa), floor(M / 4))``.
    strategy : {'sobol', 'deterministic', 'random'}, default='sobol'
    seed : int, default=0
    eps : float, default=1e-14
        Relative singular value cutoff.
    normalization : {'christoffel', 'sup'}, default='christoffel'
        'sup' rescales every wave to unit maximum modulus on the fit points.

    Attributes
    ----------
    waves_ : WaveSet
    coef_ : ndarray of complex, shape (n_waves,)
    report_ : SolveReport
    n_features_in_ : int
    """

    def __init__(
        self,
        kappa=16.0,
        wave_type="evanescent",
        n_waves=None,
        truncation=None,
        strategy="sobol",
        seed=0,
        eps=1e-14,
        normalization="christoffel",
    ):
        self.kappa = kappa
        self.wave_type = wave_type
        self.n_waves = n_waves
        self.truncation = truncation
        self.strategy = strategy
        self.seed = seed
        self.eps = eps
        self.normalization = normalization

    def _build_waves(self, kappa: float, M: int, X: np.ndarray) -> WaveSet:
        if self.wave_type == "propagative":
            waves = WaveSet.propagative(M)
        elif self.wave_type == "evanescent":
            P = truncation_rule(kappa, M) if self.truncation is None else check_positive("truncation", self.truncation, integer=True)
            model = cached_density(kappa, P)
            waves = WaveSet.evanescent(sample_nodes(model, M, check_strategy(self.strategy), self.seed), model)
            self.truncation_ = P
        else:
            raise ConfigError(f"wave_type: expected 'evanescent' or 'propagative', got {self.wave_type!r}")
        if self.normalization == "sup":
            waves = waves.renormalized_sup(kappa, X)
        elif self.normalization != "christoffel":
            raise ConfigError(f"normalization: expected 'christoffel' or 'sup', got {self.normalization!r}")
        return waves

    def fit(self, X, y):
        """Fit coefficients to boundary data.

        Parameters
        ----------
        X : array_like, shape (S, 2)
            Boundary points.
        y : array_like of complex, shape (S,)
            Dirichlet data at ``X``.
        """
        X = check_points(X)
        y = check_trace(y, X.shape[0])
        kappa = check_positive("kappa", self.kappa)
        eps = check_eps(self.eps)
        M = X.shape[0] // 2 if self.n_waves is None else check_positive("n_waves", self.n_waves, integer=True)
        if M < 1:
            raise ConfigError("n_waves: need at least one wave")
        self.waves_ = self._build_waves(kappa, M, X)
        if self.waves_.M > X.shape[0]:
            raise ConfigError(f"X: need at least as many points as waves ({self.waves_.M}), got {X.shape[0]}")
        self._pinv = RegularizedPseudoInverse(self.waves_.evaluate(kappa, X), eps)
        self.report_ = self._pinv.solve(y)
        self.coef_ = self.report_.xi
        self.n_features_in_ = 2
        return self

    def predict(self, X) -> np.ndarray:
        """Field values at points ``X`` of shape ``(n, 2)``."""
        check_is_fitted(self, "coef_")
        X = check_points(X)
        return self.waves_.expansion(float(self.kappa), self.coef_, X)

    def score(self, X, y) -> float:
        """``1 - |y - predict(X)|^2 / |y|^2``."""
        X = check_points(X)
        y = check_trace(y, X.shape[0])
        den = float(np.vdot(y, y).real)
        err = y - self.predict(X)
        return 1.0 - float(np.vdot(err, err).real) / den if den > 0 else 0.0
