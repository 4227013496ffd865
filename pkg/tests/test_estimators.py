import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from wavesynth.estimators import ChristoffelSampler, PlaneWaveRegressor, truncation_rule
from wavesynth.exceptions import ConfigError
from wavesynth.geometry import CircularMode, RandomSurrogate, UnitDisk
from wavesynth.modal import cached_context
from wavesynth.sampling import cached_density

KAPPA = 8.0


@pytest.fixture(scope="module")
def surrogate():
    return RandomSurrogate(cached_context(KAPPA, 64), 16, 3)


@pytest.fixture(scope="module")
def boundary(surrogate):
    X = UnitDisk().boundary_points(270)
    return X, surrogate.trace(X)


class TestTruncationRule:
    @pytest.mark.parametrize("M,expected", [(4, 8), (32, 8), (36, 9), (600, 150)])
    def test_values(self, M, expected):
        assert truncation_rule(KAPPA, M) == expected

    def test_noninteger_kappa(self):
        assert truncation_rule(16.5, 10) == 17


class TestSampler:
    def test_params_and_clone(self):
        s = ChristoffelSampler(kappa=4.0, truncation=12, strategy="random", seed=9)
        assert s.get_params() == {"kappa": 4.0, "truncation": 12, "strategy": "random", "seed": 9}
        c = clone(s)
        assert c.get_params() == s.get_params() and c is not s

    def test_default_truncation(self):
        s = ChristoffelSampler(kappa=KAPPA).fit()
        assert s.truncation_ == 8
        assert s.density_ is cached_density(KAPPA, 8)

    def test_sample_matches_density(self):
        s = ChristoffelSampler(kappa=KAPPA, truncation=32, strategy="random", seed=1).fit()
        a, b = s.sample(500), s.sample(500)
        np.testing.assert_array_equal(a.zeta, b.zeta)
        z = np.array([-1.0, 0.0, 0.7])
        np.testing.assert_array_equal(s.score_samples(z), cached_density(KAPPA, 32).log_rho(z))

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            ChristoffelSampler().sample(3)

    @pytest.mark.parametrize(
        "params,name",
        [({"kappa": 0.0}, "kappa"), ({"strategy": "lhs"}, "strategy"), ({"truncation": -2}, "truncation")],
    )
    def test_invalid(self, params, name):
        with pytest.raises(ConfigError, match=name):
            ChristoffelSampler(**params).fit()


class TestRegressor:
    def test_clone_roundtrip(self):
        r = PlaneWaveRegressor(kappa=KAPPA, n_waves=40, eps=1e-12, normalization="sup")
        assert clone(r).get_params() == r.get_params()

    def test_fit_predict_surrogate(self, surrogate, boundary):
        X, y = boundary
        reg = PlaneWaveRegressor(kappa=KAPPA).fit(X, y)
        assert reg.waves_.M == 135 and reg.truncation_ == 33
        assert reg.report_.residual < 1e-10
        grid = UnitDisk().bulk_grid(20, 32)
        assert np.max(np.abs(reg.predict(grid) - surrogate.evaluate(grid))) < 1e-8
        assert abs(1 - reg.score(X, y) - reg.report_.residual**2) <= 1e-15

    def test_fit_is_deterministic(self, boundary):
        X, y = boundary
        a = PlaneWaveRegressor(kappa=KAPPA, n_waves=100, strategy="random", seed=4).fit(X, y)
        b = PlaneWaveRegressor(kappa=KAPPA, n_waves=100, strategy="random", seed=4).fit(X, y)
        assert a.coef_.tobytes() == b.coef_.tobytes()

    def test_propagative_fit(self):
        ctx = cached_context(KAPPA, 64)
        X = UnitDisk().boundary_points(128)
        reg = PlaneWaveRegressor(kappa=KAPPA, wave_type="propagative", n_waves=64).fit(X, CircularMode(ctx, 3).trace(X))
        assert reg.report_.residual < 1e-10
        np.testing.assert_allclose(reg.waves_.weights, 64**-0.5, rtol=1e-15)

    def test_sup_normalization(self, boundary):
        X, y = boundary
        reg = PlaneWaveRegressor(kappa=KAPPA, n_waves=60, normalization="sup").fit(X, y)
        np.testing.assert_allclose(np.abs(reg.waves_.evaluate(KAPPA, X)).max(axis=0), 1.0, rtol=1e-14)

    def test_score_of_zero_data(self):
        X = UnitDisk().boundary_points(20)
        reg = PlaneWaveRegressor(kappa=KAPPA, n_waves=8).fit(X, np.zeros(20))
        assert reg.score(X, np.zeros(20)) == 0.0
        assert not np.any(reg.coef_)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            PlaneWaveRegressor().predict(np.zeros((1, 2)))

    @pytest.mark.parametrize(
        "params,name",
        [
            ({"wave_type": "cylindrical"}, "wave_type"),
            ({"normalization": "l2"}, "normalization"),
            ({"eps": 0.0}, "eps"),
            ({"n_waves": 0}, "n_waves"),
            ({"n_waves": 30}, "X"),
        ],
    )
    def test_invalid(self, params, name):
        X = UnitDisk().boundary_points(20)
        with pytest.raises(ConfigError, match=name):
            PlaneWaveRegressor(kappa=KAPPA, **params).fit(X, np.ones(20))

    def test_data_shapes_checked(self):
        reg = PlaneWaveRegressor(kappa=KAPPA)
        with pytest.raises(ConfigError, match="X"):
            reg.fit(np.zeros((5, 3)), np.zeros(5))
        with pytest.raises(ConfigError, match="y"):
            reg.fit(np.zeros((5, 2)), np.zeros(4))
