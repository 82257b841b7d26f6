"""Asynchronous advantage actor-critic training loop.

Workers are threads, each owning a private environment and gradient
buffer. The shared parameter store hands out consistent snapshots and
applies updates under a lock, so concurrent updates interleave in
arbitrary order but none is lost or torn. A single-worker run is fully
deterministic for a given seed.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import nn, rl
from .data import Checkpoint, save_checkpoint


@dataclass
class TrainConfig:
    learning_rate: float = 0.002
    gamma: float = 0.95
    max_rounds: int = 10_000
    batch_size: int = 2
    steps_per_episode: int = 10
    entropy_coeff: float = 0.01
    workers: int = 4
    seed: int = 0
    patch_size: int = 64
    # Optimizer conditioning for plain SGD: the loss sees rewards times
    # reward_scale (logs keep the raw values), and each update's global
    # gradient norm is clipped to grad_clip (0 disables).
    reward_scale: float = 0.05
    grad_clip: float = 20.0

    def __post_init__(self):
        if min(self.learning_rate, self.entropy_coeff, self.grad_clip) < 0:
            raise ValueError("rates must be non-negative")
        if self.reward_scale <= 0:
            raise ValueError("reward_scale must be positive")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if min(self.batch_size, self.steps_per_episode, self.workers,
               self.patch_size) < 1:
            raise ValueError("batch_size, steps_per_episode, workers and "
                             "patch_size must be positive")
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be non-negative")


class SharedParams:
    """Lock-protected parameter store for asynchronous workers."""

    def __init__(self, params: dict):
        self._params = {k: np.array(v) for k, v in params.items()}
        self._lock = threading.Lock()

    def snapshot(self) -> dict:
        with self._lock:
            return {k: v.copy() for k, v in self._params.items()}

    def apply(self, grads: dict, learning_rate: float) -> None:
        with self._lock:
            for name, g in grads.items():
                p = self._params[name]
                if g.shape != p.shape:
                    raise ValueError(f"gradient shape mismatch for {name}")
                p -= learning_rate * g.astype(p.dtype, copy=False)


def apply_update(store: SharedParams, grads: dict, learning_rate: float) -> None:
    """Atomically decrement the shared parameters by lr * grads."""
    store.apply(grads, learning_rate)


def _clip_gradients(grads: dict, clip: float) -> None:
    if clip <= 0:
        return
    total = np.sqrt(sum(float(np.sum(g.astype(np.float64) ** 2))
                        for g in grads.values()))
    if total > clip:
        factor = clip / total
        for g in grads.values():
            g *= factor


def _random_patch(image: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    h, w = image.shape[:2]
    if h <= size and w <= size:
        return image
    top = int(rng.integers(0, max(h - size, 0) + 1))
    left = int(rng.integers(0, max(w - size, 0) + 1))
    return image[top : top + min(h, size), left : left + min(w, size)]


def run_episode(net: nn.PolicyValueNet, image, config: TrainConfig,
                weights: rl.RewardWeights, scorer, rng: np.random.Generator):
    """Roll out one stochastic episode; returns (trace, stats)."""
    env = rl.Environment(
        image,
        rl.EpisodeConfig(config.steps_per_episode, config.gamma),
        weights,
        scorer,
    )
    trace = nn.EpisodeTrace(caches=[])
    infos = []
    rewards = []
    while not env.done:
        obs = env.observation()
        logits, values, cache = net.forward_cached(obs)
        actions = nn.sample_actions(logits, mode="stochastic", rng=rng)
        _, reward, _ = env.step(actions)
        trace.states.append(obs)
        trace.actions.append(actions)
        trace.rewards.append(reward)
        trace.values.append(values)
        trace.caches.append(cache)
        rewards.append(reward)
        infos.append(env.last_info)

    stats = {
        "mean_reward": float(np.mean(rewards)),
        "mean_r_iq": float(np.mean([i["r_iq"] for i in infos])),
        "mean_r_amp": float(np.mean([i["r_amp"] for i in infos])),
        "mean_zfc_gap": float(np.mean(
            [rl.amplitude_exposure_reward(i["zfc"], weights.zfc_bar) for i in infos]
        )),
        "final_zfc": infos[-1]["normalized_zfc"],
    }
    return trace, stats


def train(config: TrainConfig, dataset, weights: rl.RewardWeights | None = None,
          scorer=None, out_dir=None, checkpoint_every: int = 0,
          record_hook=None) -> Checkpoint:
    """Train a policy/value net on a dataset of low-light images.

    `dataset` is any sequence of (H, W, 3) images in [0, 1] (a
    PairedDataset's `lows` works directly). One round is one episode;
    each worker applies a gradient update every `batch_size` episodes.
    Emits one log record per round via `record_hook` and to
    out_dir/train_log.jsonl when `out_dir` is given, plus periodic
    checkpoints every `checkpoint_every` rounds.
    """
    images = list(dataset)
    if not images:
        raise ValueError("empty training dataset")
    weights = weights or rl.RewardWeights()
    scorer = scorer or rl.quality_score

    template = nn.PolicyValueNet(seed=config.seed)
    store = SharedParams(template.params)

    counter_lock = threading.Lock()
    io_lock = threading.Lock()
    rounds_started = 0

    log_file = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        log_file = open(out_dir / "train_log.jsonl", "w", encoding="utf-8")

    def claim_round() -> int:
        nonlocal rounds_started
        with counter_lock:
            if rounds_started >= config.max_rounds:
                return -1
            rounds_started += 1
            return rounds_started - 1

    def emit(record: dict) -> None:
        with io_lock:
            if log_file is not None:
                log_file.write(json.dumps(record) + "\n")
            if record_hook is not None:
                record_hook(record)

    def save_periodic(round_idx: int) -> None:
        if out_dir is None or checkpoint_every <= 0:
            return
        if (round_idx + 1) % checkpoint_every == 0:
            ckpt = _checkpoint(store.snapshot(), template, config, round_idx + 1)
            with io_lock:
                save_checkpoint(ckpt, Path(out_dir) / f"round_{round_idx + 1:06d}.ckpt")

    def worker(worker_id: int) -> None:
        rng = np.random.default_rng([config.seed, worker_id])
        local = nn.PolicyValueNet(seed=config.seed)
        while True:
            local.set_params(store.snapshot())
            batch_grads = None
            batch_rounds = []
            for _ in range(config.batch_size):
                round_idx = claim_round()
                if round_idx < 0:
                    break
                image = images[int(rng.integers(len(images)))]
                patch = _random_patch(image, config.patch_size, rng)
                trace, stats = run_episode(local, patch, config, weights, scorer, rng)
                trace.rewards = [r * config.reward_scale for r in trace.rewards]
                _, grads, _ = nn.a3c_losses(
                    local, trace, gamma=config.gamma,
                    entropy_coeff=config.entropy_coeff,
                )
                if batch_grads is None:
                    batch_grads = grads
                else:
                    for name in batch_grads:
                        batch_grads[name] += grads[name]
                batch_rounds.append(round_idx)
                emit({"round": round_idx, **stats})
            if batch_grads is not None:
                _clip_gradients(batch_grads, config.grad_clip)
                store.apply(batch_grads, config.learning_rate)
                for round_idx in batch_rounds:
                    save_periodic(round_idx)
            if not batch_rounds or len(batch_rounds) < config.batch_size:
                return

    if config.workers == 1:
        worker(0)
    else:
        # One BLAS thread per worker; oversubscription stalls the pool.
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=1, user_api="blas"):
            threads = [
                threading.Thread(target=worker, args=(i,), name=f"a3c-worker-{i}")
                for i in range(config.workers)
            ]
            for t in threads:
                t.start()
            for t in threads:
                t.join()

    if log_file is not None:
        log_file.close()

    ckpt = _checkpoint(store.snapshot(), template, config, rounds_started)
    if out_dir is not None:
        save_checkpoint(ckpt, Path(out_dir) / "final.ckpt")
    return ckpt


def _checkpoint(params: dict, template: nn.PolicyValueNet, config: TrainConfig,
                rounds: int) -> Checkpoint:
    return Checkpoint(
        params=params,
        architecture=template.describe(),
        metadata={"round": rounds, "seed": config.seed, "config": asdict(config)},
    )
