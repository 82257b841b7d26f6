import numpy as np
import pytest

from lumenrl import engine
from lumenrl.metrics import bt601_luminance

from conftest import constant_image


class TestInitState:
    def test_materialize_returns_input(self, random_image):
        state = engine.init_state(random_image)
        assert np.abs(engine.materialize(state) - random_image).max() < 1e-9
        assert state.step == 0

    def test_constant_quarter_image_channel_zfc(self):
        state = engine.init_state(constant_image(0.25, 8, 8))
        h, w = 8, 8
        for c in range(3):
            assert state.amplitude[h // 2, w // 2, c] == pytest.approx(16.0)

    def test_zero_image(self):
        state = engine.init_state(np.zeros((8, 8, 3)))
        assert np.all(state.amplitude == 0.0)

    def test_small_image_rejected(self):
        with pytest.raises(ValueError):
            engine.init_state(np.zeros((4, 4, 3)))


class TestStepState:
    def test_identity_gains(self, random_image):
        state = engine.init_state(random_image)
        stepped = engine.step_state(state, np.ones((16, 16)))
        assert stepped.step == 1
        assert np.abs(stepped.rgb - state.rgb).max() < 1e-9

    def test_uniform_gain_on_constant_image(self):
        state = engine.init_state(constant_image(0.3))
        stepped = engine.step_state(state, np.full((16, 16), np.exp(0.1)))
        assert np.allclose(stepped.rgb, 0.3 * np.exp(0.1), atol=1e-9)

    def test_clamp_keeps_canonical_amplitude_growing(self):
        state = engine.init_state(constant_image(0.9))
        gain = np.full((16, 16), np.exp(0.2))
        amp_prev = state.amplitude.max()
        for _ in range(4):
            state = engine.step_state(state, gain)
            assert state.amplitude.max() > amp_prev
            amp_prev = state.amplitude.max()
        assert np.all(state.rgb <= 1.0)
        assert state.rgb.max() == pytest.approx(1.0)

    def test_gain_validation(self, random_image):
        state = engine.init_state(random_image)
        with pytest.raises(ValueError):
            engine.step_state(state, np.ones((8, 8)))
        with pytest.raises(ValueError):
            engine.step_state(state, np.zeros((16, 16)))


class TestMaterialize:
    def test_idempotent_and_no_mutation(self, random_image):
        state = engine.init_state(random_image)
        first = engine.materialize(state)
        second = engine.materialize(state)
        assert first is second
        assert not first.flags.writeable

    def test_uniform_gain_scales_image(self, rng):
        img = rng.uniform(0.05, 0.4, (12, 12, 3))
        state = engine.init_state(img)
        for alpha in (-0.1, 0.1, 0.2):
            stepped = engine.step_state(state, np.full((12, 12), np.exp(alpha)))
            assert np.abs(stepped.rgb - np.clip(img * np.exp(alpha), 0, 1)).max() < 1e-9


class TestLuminanceZfc:
    def test_zero_image(self):
        assert engine.state_luminance_zfc(engine.init_state(np.zeros((8, 8, 3)))) == 0.0

    def test_white_image(self):
        state = engine.init_state(constant_image(1.0, 10, 10))
        assert engine.state_luminance_zfc(state) == pytest.approx(100.0)

    def test_matches_pixel_sum_oracle(self, random_image):
        state = engine.init_state(random_image)
        oracle = float(bt601_luminance(random_image).sum())
        assert engine.state_luminance_zfc(state) == pytest.approx(oracle, abs=1e-9)


class TestInvariants:
    def test_gain_composition(self, rng):
        img = rng.uniform(0.1, 0.3, (12, 12, 3))
        state = engine.init_state(img)
        g1 = rng.uniform(0.95, 1.1, (12, 12))
        g2 = rng.uniform(0.95, 1.1, (12, 12))
        two_steps = engine.step_state(engine.step_state(state, g1), g2)
        one_step = engine.step_state(state, g1 * g2)
        assert np.abs(two_steps.amplitude - one_step.amplitude).max() < 1e-9

    def test_phase_frozen_across_steps(self, random_image):
        state = engine.init_state(random_image)
        stepped = engine.step_state(state, np.full((16, 16), 1.05))
        assert stepped.phase0 is state.phase0

    def test_monotone_brightness_under_positive_alpha(self, rng):
        img = rng.uniform(0.05, 0.3, (12, 12, 3))
        state = engine.init_state(img)
        previous = engine.state_luminance_zfc(state)
        for _ in range(5):
            state = engine.step_state(state, np.full((12, 12), np.exp(0.1)))
            current = engine.state_luminance_zfc(state)
            assert current > previous
            previous = current
