import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lumenrl import data, synth_dataset
from lumenrl.estimator import FourierPolicyEnhancer
from lumenrl.inference import PersonalizationTarget


@pytest.fixture(scope="module")
def tiny_dataset():
    return synth_dataset(seed=2, count=3, size=16)


@pytest.fixture(scope="module")
def fitted(tiny_dataset):
    est = FourierPolicyEnhancer(rounds=4, workers=1, seed=3, patch_size=16,
                                steps_per_episode=3, max_iterations=5)
    return est.fit(tiny_dataset)


class TestSklearnContract:
    def test_get_params_roundtrip(self):
        est = FourierPolicyEnhancer(rounds=7, zfc_target=0.5)
        params = est.get_params()
        assert params["rounds"] == 7
        assert params["zfc_target"] == 0.5
        est.set_params(rounds=9)
        assert est.rounds == 9

    def test_clone(self):
        est = FourierPolicyEnhancer(rounds=3, w_amp=10.0)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_not_fitted_errors(self, tiny_dataset):
        est = FourierPolicyEnhancer()
        with pytest.raises(NotFittedError):
            est.transform(tiny_dataset.lows)

    def test_fit_returns_self_and_sets_state(self, fitted):
        assert hasattr(fitted, "net_")
        assert hasattr(fitted, "checkpoint_")
        assert len(fitted.history_) == 4

    def test_fit_rejects_empty(self):
        with pytest.raises(ValueError):
            FourierPolicyEnhancer().fit([])


class TestTransform:
    def test_output_shapes_and_range(self, fitted, tiny_dataset):
        outputs = fitted.transform(tiny_dataset.lows[:2])
        assert len(outputs) == 2
        for out, low in zip(outputs, tiny_dataset.lows):
            assert out.shape == low.shape
            assert out.min() >= 0.0 and out.max() <= 1.0

    def test_enhance_with_reference(self, fitted, tiny_dataset):
        result = fitted.enhance(
            tiny_dataset.lows[0],
            PersonalizationTarget(reference_image=tiny_dataset.highs[0]),
        )
        assert result.iterations_used <= fitted.max_iterations

    def test_enhance_fixed_iterations(self, fitted, tiny_dataset):
        result = fitted.enhance(
            tiny_dataset.lows[0], PersonalizationTarget(fixed_iterations=2)
        )
        assert result.iterations_used == 2

    def test_score_returns_mean_psnr(self, fitted, tiny_dataset):
        score = fitted.score(tiny_dataset.lows[:2], tiny_dataset.highs[:2])
        assert np.isfinite(score)


class TestCheckpointAdoption:
    def test_load_checkpoint_enables_inference(self, fitted, tiny_dataset, tmp_path):
        path = tmp_path / "model.ckpt"
        data.save_checkpoint(fitted.checkpoint_, path)
        fresh = FourierPolicyEnhancer(max_iterations=5)
        fresh.load_checkpoint(data.load_checkpoint(path))
        out = fresh.transform(tiny_dataset.lows[:1])[0]
        assert out.shape == tiny_dataset.lows[0].shape
