import threading

import numpy as np
import pytest

from lumenrl import a3c, data, nn, rl


class TestSharedParams:
    def test_single_update(self):
        store = a3c.SharedParams({"w": np.zeros(4, dtype=np.float64)})
        grads = {"w": np.full(4, 2.0)}
        a3c.apply_update(store, grads, 0.002)
        assert np.allclose(store.snapshot()["w"], -0.004)

    def test_sequential_updates_add(self):
        store = a3c.SharedParams({"w": np.zeros(3)})
        a3c.apply_update(store, {"w": np.array([1.0, 0.0, 2.0])}, 0.1)
        a3c.apply_update(store, {"w": np.array([0.0, 3.0, 1.0])}, 0.1)
        assert np.allclose(store.snapshot()["w"], [-0.1, -0.3, -0.3])

    def test_concurrent_updates_none_lost(self):
        store = a3c.SharedParams({"w": np.zeros(16)})
        grad = {"w": np.ones(16)}
        n_workers, n_each = 8, 50

        def hammer():
            for _ in range(n_each):
                a3c.apply_update(store, grad, 0.01)

        threads = [threading.Thread(target=hammer) for _ in range(n_workers)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        expected = -0.01 * n_workers * n_each
        assert np.allclose(store.snapshot()["w"], expected)

    def test_shape_mismatch(self):
        store = a3c.SharedParams({"w": np.zeros(4)})
        with pytest.raises(ValueError):
            store.apply({"w": np.zeros(5)}, 0.1)

    def test_snapshot_is_isolated_copy(self):
        store = a3c.SharedParams({"w": np.zeros(2)})
        snap = store.snapshot()
        snap["w"][0] = 99.0
        assert store.snapshot()["w"][0] == 0.0


class TestGradientClipping:
    def test_noop_below_threshold(self):
        grads = {"a": np.array([0.3, 0.4])}
        a3c._clip_gradients(grads, 5.0)
        assert np.allclose(grads["a"], [0.3, 0.4])

    def test_rescales_to_norm(self):
        grads = {"a": np.array([3.0, 4.0]), "b": np.array([0.0, 0.0])}
        a3c._clip_gradients(grads, 1.0)
        total = np.sqrt(sum(np.sum(g**2) for g in grads.values()))
        assert total == pytest.approx(1.0)

    def test_disabled_with_zero(self):
        grads = {"a": np.array([30.0, 40.0])}
        a3c._clip_gradients(grads, 0.0)
        assert np.allclose(grads["a"], [30.0, 40.0])


class TestRunEpisode:
    def test_trace_shape(self, rng):
        config = a3c.TrainConfig(max_rounds=1, steps_per_episode=4, workers=1)
        net = nn.PolicyValueNet(channels=4, seed=0)
        img = rng.uniform(0.1, 0.3, (12, 12, 3))
        trace, stats = a3c.run_episode(
            net, img, config, rl.RewardWeights(), rl.quality_score,
            np.random.default_rng(0),
        )
        assert len(trace) == 4
        assert len(trace.caches) == 4
        assert set(stats) == {
            "mean_reward", "mean_r_iq", "mean_r_amp", "mean_zfc_gap", "final_zfc",
        }


def tiny_config(**kwargs) -> a3c.TrainConfig:
    base = dict(max_rounds=4, workers=1, seed=7, patch_size=16,
                steps_per_episode=3, batch_size=2)
    base.update(kwargs)
    return a3c.TrainConfig(**base)


@pytest.fixture(scope="module")
def tiny_images():
    ds = data.synth_dataset(seed=5, count=3, size=16)
    return ds.lows


class TestTrain:
    def test_single_worker_determinism(self, tiny_images, tmp_path):
        ckpts = []
        for run in range(2):
            ckpt = a3c.train(tiny_config(), tiny_images)
            ckpts.append(ckpt)
        for name in ckpts[0].params:
            assert np.array_equal(ckpts[0].params[name], ckpts[1].params[name])

    def test_zero_rounds_returns_initialization(self, tiny_images):
        ckpt = a3c.train(tiny_config(max_rounds=0), tiny_images)
        init = nn.PolicyValueNet(seed=7)
        for name, expected in init.params.items():
            assert np.array_equal(ckpt.params[name], expected)

    def test_training_changes_parameters(self, tiny_images):
        ckpt = a3c.train(tiny_config(), tiny_images)
        init = nn.PolicyValueNet(seed=7)
        assert any(
            not np.array_equal(ckpt.params[n], init.params[n]) for n in ckpt.params
        )

    def test_log_records_and_files(self, tiny_images, tmp_path):
        records = []
        ckpt = a3c.train(
            tiny_config(), tiny_images, out_dir=tmp_path, checkpoint_every=2,
            record_hook=records.append,
        )
        assert sorted(r["round"] for r in records) == [0, 1, 2, 3]
        assert all(np.isfinite(r["mean_reward"]) for r in records)
        log_lines = (tmp_path / "train_log.jsonl").read_text().splitlines()
        assert len(log_lines) == 4
        assert (tmp_path / "final.ckpt").exists()
        assert (tmp_path / "round_000002.ckpt").exists()
        loaded = data.load_checkpoint(tmp_path / "final.ckpt")
        for name in ckpt.params:
            assert np.array_equal(
                loaded.params[name], np.asarray(ckpt.params[name], dtype=np.float32)
            )

    def test_multi_worker_completes(self, tiny_images):
        config = tiny_config(workers=3, max_rounds=6)
        ckpt = a3c.train(config, tiny_images)
        assert ckpt.metadata["round"] == 6

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            a3c.train(tiny_config(), [])

    def test_metadata_echoes_config(self, tiny_images):
        config = tiny_config()
        ckpt = a3c.train(config, tiny_images)
        assert ckpt.metadata["seed"] == 7
        assert ckpt.metadata["config"]["learning_rate"] == config.learning_rate
