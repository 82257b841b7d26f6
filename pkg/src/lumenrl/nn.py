"""Fully-convolutional policy/value network with hand-written backward.

The trunk is three 3x3 same-padding convolutions (3 -> C -> C -> C,
ReLU after each); a 1x1 policy head emits per-cell logits over the 31
actions and a 1x1 value head emits per-cell value estimates, so the
network runs on any H, W >= 8. Gradients are computed by explicit
reverse-mode passes (im2col forward, tap-wise adjoints backward), no
autodiff framework involved; this keeps single-worker training
bit-reproducible and makes the finite-difference checks in the test
suite meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rl import N_ACTIONS
from .validation import MIN_DIM

DEFAULT_CHANNELS = 32


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _im2col(x: np.ndarray, k: int) -> np.ndarray:
    """(H, W, C) -> (H*W, k*k*C) patch matrix for a same-padded k x k conv.

    Patch rows are tap-major, ordered (ki, kj, c), matching the weight
    layout.
    """
    h, w, c = x.shape
    p = k // 2
    xp = np.pad(x, ((p, p), (p, p), (0, 0)))
    v = np.lib.stride_tricks.sliding_window_view(xp, (k, k), axis=(0, 1))
    return np.ascontiguousarray(v.transpose(0, 1, 3, 4, 2)).reshape(h * w, k * k * c)


def _conv_backward(x_in: np.ndarray, dz: np.ndarray, weight: np.ndarray,
                   k: int, need_dx: bool):
    """Weight and (optionally) input gradients of a same-padded conv.

    Runs tap by tap against contiguous slices of the padded input; this
    is the adjoint of the _im2col matmul but avoids materializing the
    patch matrix twice.
    """
    h, w, c = x_in.shape
    cout = dz.shape[1]
    p = k // 2
    xp = np.pad(x_in, ((p, p), (p, p), (0, 0)))
    w_taps = weight.reshape(k, k, c, cout)
    dw = np.empty((k, k, c, cout), dtype=dz.dtype)
    dxp = np.zeros((h + 2 * p, w + 2 * p, c), dtype=dz.dtype) if need_dx else None
    for ki in range(k):
        for kj in range(k):
            s = np.ascontiguousarray(xp[ki : ki + h, kj : kj + w, :]).reshape(-1, c)
            dw[ki, kj] = s.T @ dz
            if need_dx:
                dxp[ki : ki + h, kj : kj + w, :] += (
                    dz @ w_taps[ki, kj].T
                ).reshape(h, w, c)
    dx = dxp[p : p + h, p : p + w, :] if need_dx else None
    return dw.reshape(k * k * c, cout), dx


class PolicyValueNet:
    """Policy/value network over RGB images in [0, 1].

    Parameters are held in an insertion-ordered dict (the declaration
    order used by checkpoints). Weight matrices are stored im2col-style
    as (k * k * C_in, C_out) with tap-major rows; initialization is
    uniform in +-sqrt(1 / fan_in), seeded.
    """

    KERNEL = 3

    def __init__(self, channels: int = DEFAULT_CHANNELS, n_actions: int = N_ACTIONS,
                 seed: int = 0, dtype=np.float32, zero_init: bool = False):
        self.channels = channels
        self.n_actions = n_actions
        self.dtype = np.dtype(dtype)
        k = self.KERNEL
        layers = [
            ("conv1", 3 * k * k, channels),
            ("conv2", channels * k * k, channels),
            ("conv3", channels * k * k, channels),
            ("policy", channels, n_actions),
            ("value", channels, 1),
        ]
        rng = _as_rng(seed)
        self.params: dict[str, np.ndarray] = {}
        for name, fan_in, fan_out in layers:
            limit = np.sqrt(1.0 / fan_in)
            for suffix, shape in ((".w", (fan_in, fan_out)), (".b", (fan_out,))):
                if zero_init:
                    self.params[name + suffix] = np.zeros(shape, dtype=self.dtype)
                else:
                    self.params[name + suffix] = rng.uniform(
                        -limit, limit, shape
                    ).astype(self.dtype)

    @classmethod
    def from_params(cls, params: dict, dtype=None) -> "PolicyValueNet":
        channels = params["conv1.w"].shape[1]
        n_actions = params["policy.w"].shape[1]
        dtype = dtype or params["conv1.w"].dtype
        net = cls(channels=channels, n_actions=n_actions, dtype=dtype, zero_init=True)
        net.set_params(params)
        return net

    def set_params(self, params: dict) -> None:
        for name, value in params.items():
            if name not in self.params:
                raise ValueError(f"unknown parameter {name!r}")
            if value.shape != self.params[name].shape:
                raise ValueError(
                    f"shape mismatch for {name}: {value.shape} vs "
                    f"{self.params[name].shape}"
                )
            self.params[name] = np.asarray(value, dtype=self.dtype)

    def describe(self) -> dict:
        return {
            "channels": self.channels,
            "n_actions": self.n_actions,
            "kernel": self.KERNEL,
            "params": [
                {"name": n, "shape": list(p.shape)} for n, p in self.params.items()
            ],
        }

    def _check_input(self, image: np.ndarray) -> np.ndarray:
        x = np.asarray(image, dtype=self.dtype)
        if x.ndim != 3 or x.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) input, got {x.shape}")
        if x.shape[0] < MIN_DIM or x.shape[1] < MIN_DIM:
            raise ValueError(f"input dimensions must be >= {MIN_DIM}, got {x.shape[:2]}")
        if not np.isfinite(x).all():
            raise ValueError("input contains non-finite values")
        for p in self.params.values():
            if not np.isfinite(p).all():
                raise ValueError("network parameters contain non-finite values")
        return x

    def forward(self, image):
        """Per-cell logits (H, W, A) and value estimates (H, W, 1)."""
        logits, values, _ = self.forward_cached(image)
        return logits, values

    def forward_cached(self, image):
        """Forward pass that also returns the activations for `backward`."""
        x = self._check_input(image)
        h, w, _ = x.shape
        p = self.params
        a1 = np.maximum(
            _im2col(x, self.KERNEL) @ p["conv1.w"] + p["conv1.b"], 0
        ).reshape(h, w, self.channels)
        a2 = np.maximum(
            _im2col(a1, self.KERNEL) @ p["conv2.w"] + p["conv2.b"], 0
        ).reshape(h, w, self.channels)
        a3 = np.maximum(
            _im2col(a2, self.KERNEL) @ p["conv3.w"] + p["conv3.b"], 0
        ).reshape(h, w, self.channels)
        feat = a3.reshape(h * w, self.channels)
        logits = (feat @ p["policy.w"] + p["policy.b"]).reshape(h, w, self.n_actions)
        values = (feat @ p["value.w"] + p["value.b"]).reshape(h, w, 1)
        cache = (x, a1, a2, a3)
        return logits, values, cache

    def backward(self, cache, dlogits: np.ndarray, dvalues: np.ndarray) -> dict:
        """Gradients of a scalar loss given its logits/values adjoints.

        dlogits has shape (H, W, A) or (H*W, A); dvalues (H, W, 1) or
        (H*W, 1). Returns a dict shaped like `params`.
        """
        x, a1, a2, a3 = cache
        h, w, _ = x.shape
        m = h * w
        k = self.KERNEL
        p = self.params
        dl = dlogits.reshape(m, self.n_actions).astype(self.dtype, copy=False)
        dv = dvalues.reshape(m, 1).astype(self.dtype, copy=False)
        feat = a3.reshape(m, self.channels)

        grads = {
            "policy.w": feat.T @ dl,
            "policy.b": dl.sum(axis=0),
            "value.w": feat.T @ dv,
            "value.b": dv.sum(axis=0),
        }
        da = (dl @ p["policy.w"].T + dv @ p["value.w"].T).reshape(h, w, self.channels)

        for name, below, act in (("conv3", a2, a3), ("conv2", a1, a2), ("conv1", x, a1)):
            dz = (da * (act > 0)).reshape(m, self.channels)
            need_dx = name != "conv1"
            dw, dx = _conv_backward(below, dz, p[f"{name}.w"], k, need_dx)
            grads[f"{name}.w"] = dw
            grads[f"{name}.b"] = dz.sum(axis=0)
            if need_dx:
                da = dx
        return {name: grads[name] for name in self.params}


# --- action sampling and returns -------------------------------------------

def sample_actions(logits, mode: str = "greedy", rng=None) -> np.ndarray:
    """Action-index grid from per-cell logits.

    greedy: per-cell argmax, ties broken by the lowest index.
    stochastic: per-cell sample from the softmax, reproducible for a
    given seed or Generator.
    """
    z = np.asarray(logits)
    if mode == "greedy":
        return np.argmax(z, axis=-1)
    if mode != "stochastic":
        raise ValueError(f"unknown sampling mode {mode!r}")
    probs = softmax(z.astype(np.float64))
    cdf = np.cumsum(probs, axis=-1)
    u = _as_rng(rng).random(z.shape[:-1] + (1,))
    idx = (cdf < u).sum(axis=-1)
    return np.minimum(idx, z.shape[-1] - 1)


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def discounted_returns(rewards, gamma: float, bootstrap: float = 0.0) -> np.ndarray:
    """R_t = r_t + gamma * R_{t+1}, seeded by `bootstrap` past the end."""
    out = np.empty(len(rewards), dtype=np.float64)
    acc = float(bootstrap)
    for t in range(len(rewards) - 1, -1, -1):
        acc = float(rewards[t]) + gamma * acc
        out[t] = acc
    return out


# --- episode trace and the actor-critic loss -------------------------------

@dataclass
class EpisodeTrace:
    """Per-step rollout record consumed by the loss.

    `caches` optionally carries the forward activations captured during
    the rollout so the update can skip recomputing them.
    """

    states: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    values: list = field(default_factory=list)
    caches: list | None = None

    def __len__(self) -> int:
        return len(self.states)


def a3c_losses(net: PolicyValueNet, trace: EpisodeTrace, gamma: float = 0.95,
               entropy_coeff: float = 0.01, bootstrap: float = 0.0,
               advantages=None):
    """Advantage actor-critic loss and its parameter gradients.

    The scalar step rewards are broadcast to every grid cell. The value
    estimate is treated as constant inside the policy term (standard
    detached advantage); `advantages` can be supplied explicitly to pin
    them, which the finite-difference tests rely on. The total loss is
    policy_loss + 0.5 * value_loss with the entropy bonus folded into
    the policy loss.

    Returns (total_loss, grads, info).
    """
    t_steps = len(trace)
    if t_steps == 0:
        raise ValueError("empty episode trace")
    returns = discounted_returns(trace.rewards, gamma, bootstrap)

    grads = None
    pg_sum = entropy_sum = value_sum = 0.0
    n_cells_total = 0
    per_step = []

    for t in range(t_steps):
        if trace.caches is not None:
            logits, values, cache = (*_outputs_from_cache(net, trace.caches[t]),
                                     trace.caches[t])
        else:
            logits, values, cache = net.forward_cached(trace.states[t])
        h, w, n_act = logits.shape
        m = h * w
        n_cells_total += m
        flat_logits = logits.reshape(m, n_act).astype(np.float64)
        v = values.reshape(m).astype(np.float64)

        logp = log_softmax(flat_logits)
        probs = np.exp(logp)
        entropy = -(probs * logp).sum(axis=1)

        if advantages is not None:
            adv = np.asarray(advantages[t], dtype=np.float64).reshape(m)
        else:
            adv = returns[t] - v

        act = np.asarray(trace.actions[t]).reshape(m)
        chosen_logp = logp[np.arange(m), act]

        pg_sum += -(chosen_logp * adv).sum()
        entropy_sum += entropy.sum()
        value_sum += ((returns[t] - v) ** 2).sum()
        per_step.append((cache, logp, probs, entropy, adv, act, v, returns[t]))

    scale = 1.0 / n_cells_total
    policy_loss = (pg_sum - entropy_coeff * entropy_sum) * scale
    value_loss = value_sum * scale
    total = policy_loss + 0.5 * value_loss

    for cache, logp, probs, entropy, adv, act, v, ret in per_step:
        m = probs.shape[0]
        onehot_minus_p = -probs
        onehot_minus_p[np.arange(m), act] += 1.0
        dlogits = (-adv[:, None] * onehot_minus_p
                   + entropy_coeff * probs * (logp + entropy[:, None])) * scale
        dvalues = ((v - ret) * scale)[:, None]
        step_grads = net.backward(cache, dlogits, dvalues)
        if grads is None:
            grads = step_grads
        else:
            for name in grads:
                grads[name] += step_grads[name]

    info = {
        "policy_loss": float(policy_loss),
        "value_loss": float(value_loss),
        "entropy": float(entropy_sum * scale),
        "returns": returns,
    }
    return float(total), grads, info


def _outputs_from_cache(net: PolicyValueNet, cache):
    """Recompute head outputs from cached trunk activations."""
    x, _, _, a3 = cache
    h, w, _ = x.shape
    feat = a3.reshape(h * w, net.channels)
    p = net.params
    logits = (feat @ p["policy.w"] + p["policy.b"]).reshape(h, w, net.n_actions)
    values = (feat @ p["value.w"] + p["value.b"]).reshape(h, w, 1)
    return logits, values
