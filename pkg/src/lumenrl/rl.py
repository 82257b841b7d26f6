"""Reinforcement-learning environment: actions, rewards, episode mechanics.

Actions are indices into a 31-value ladder of log-gains alpha in
[-0.1, 0.2] with step 0.01; the gain applied to an amplitude bin is
e^alpha, so index 10 is the identity. Rewards combine a no-reference
quality score delta against the episode's initial image with a penalty
for missing the configured zero-frequency (brightness) target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .metrics import bt601_luminance
from .validation import check_image

ALPHA_MIN = -0.1
ALPHA_MAX = 0.2
ALPHA_STEP = 0.01
N_ACTIONS = 31
IDENTITY_ACTION = 10

# Penalty returned for essentially black images, where the relative
# brightness gap would blow up.
ZFC_FLOOR = 1e-6
ZFC_GAP_CAP = 10.0


def action_alphas() -> np.ndarray:
    """The 31 log-gain values, index 10 being exactly 0."""
    return ALPHA_MIN + ALPHA_STEP * np.arange(N_ACTIONS)


def action_to_gain(index: int) -> float:
    """Gain e^alpha for one action index."""
    if not 0 <= index < N_ACTIONS:
        raise ValueError(f"action index {index} out of range [0, {N_ACTIONS - 1}]")
    return float(np.exp(ALPHA_MIN + ALPHA_STEP * index))


def gains_from_actions(actions: np.ndarray) -> np.ndarray:
    """Per-cell gain plane for a grid of action indices."""
    idx = np.asarray(actions)
    if idx.min() < 0 or idx.max() >= N_ACTIONS:
        raise ValueError("action indices out of range")
    return np.exp(ALPHA_MIN + ALPHA_STEP * idx.astype(np.float64))


@dataclass
class RewardWeights:
    """Weights of the combined reward w_iq * r_iq - w_amp * r_amp.

    zfc_bar is the brightness target. By default it is the normalized
    zero-frequency component (mean luminance, resolution-independent);
    with raw_zfc=True it is compared against the raw luminance sum, so
    absolute literature values such as 2.5e5 can be used directly.
    """

    w_iq: float = 1000.0
    w_amp: float = 60.0
    zfc_bar: float = 0.45
    raw_zfc: bool = False

    def __post_init__(self):
        if self.zfc_bar <= 0:
            raise ValueError("zfc_bar must be positive")
        if self.w_iq < 0 or self.w_amp < 0:
            raise ValueError("reward weights must be non-negative")


@dataclass
class EpisodeConfig:
    steps_per_episode: int = 10
    gamma: float = 0.95

    def __post_init__(self):
        if self.steps_per_episode < 1:
            raise ValueError("steps_per_episode must be >= 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")


# --- quality scorers ------------------------------------------------------

def quality_score(image) -> float:
    """Built-in no-reference quality proxy.

    S = 0.7 * W + 0.3 * min(sigma_Y / 0.25, 1), with W a Gaussian
    well-exposedness weight exp(-(mu_Y - 0.5)^2 / (2 * 0.2^2)) on the
    mean luminance and sigma_Y the luminance standard deviation.
    Deterministic; any callable image -> float can replace it.
    """
    y = bt601_luminance(image)
    mu = float(y.mean())
    sigma = float(y.std())
    well_exposed = float(np.exp(-((mu - 0.5) ** 2) / (2.0 * 0.2**2)))
    contrast = min(sigma / 0.25, 1.0)
    return 0.7 * well_exposed + 0.3 * contrast


def constant_score(image) -> float:
    """Degenerate scorer; useful to isolate the brightness reward."""
    return 0.0


SCORERS = {
    "proxy": quality_score,
    "constant": constant_score,
}


def register_scorer(name: str, fn) -> None:
    SCORERS[name] = fn


def get_scorer(name: str):
    try:
        return SCORERS[name]
    except KeyError:
        raise KeyError(f"unknown scorer {name!r}; registered: {sorted(SCORERS)}")


# --- rewards --------------------------------------------------------------

def image_quality_reward(s_t, s_0, scorer=quality_score) -> float:
    """Score difference between the current and the initial image."""
    return scorer(s_t) - scorer(s_0)


def amplitude_exposure_reward(zfc_t: float, zfc_bar: float) -> float:
    """Relative gap |zfc_bar / zfc_t - 1|, capped for black images."""
    if zfc_bar <= 0:
        raise ValueError("zfc_bar must be positive")
    if zfc_t < ZFC_FLOOR:
        return ZFC_GAP_CAP
    return abs(zfc_bar / zfc_t - 1.0)


def immediate_reward(r_iq: float, r_amp: float, weights: RewardWeights) -> float:
    return weights.w_iq * r_iq - weights.w_amp * r_amp


# --- environment ----------------------------------------------------------

@dataclass
class Transition:
    state_image: np.ndarray
    actions: np.ndarray
    reward: float
    value_estimate: np.ndarray | None = None


class Environment:
    """Single-owner enhancement episode.

    Holds the frequency-domain state, the cached initial quality score,
    and the step counter; `step` applies an action grid and returns the
    combined reward computed on the clamped materialized image.
    """

    def __init__(self, image, config: EpisodeConfig | None = None,
                 weights: RewardWeights | None = None, scorer=quality_score):
        img = check_image(image)
        self.config = config or EpisodeConfig()
        self.weights = weights or RewardWeights()
        self.scorer = scorer
        self.state = engine.init_state(img)
        self.t = 0
        self.s0_score = scorer(self.state.rgb)

    @property
    def done(self) -> bool:
        return self.t >= self.config.steps_per_episode

    def observation(self) -> np.ndarray:
        return engine.materialize(self.state)

    def current_zfc(self) -> float:
        """Brightness statistic in the scale selected by the weights."""
        raw = engine.state_luminance_zfc(self.state)
        if self.weights.raw_zfc:
            return raw
        return raw / (self.state.height * self.state.width)

    def step(self, actions):
        """Apply an action grid; returns (next_image, reward, done).

        Reward pieces for the step are kept in `last_info`.
        """
        if self.done:
            raise RuntimeError("episode is done; create a new environment")
        gains = gains_from_actions(actions)
        self.state = engine.step_state(self.state, gains)
        self.t += 1

        image = self.state.rgb
        r_iq = self.scorer(image) - self.s0_score
        r_amp = amplitude_exposure_reward(self.current_zfc(), self.weights.zfc_bar)
        reward = immediate_reward(r_iq, r_amp, self.weights)
        self.last_info = {
            "r_iq": r_iq,
            "r_amp": r_amp,
            "zfc": self.current_zfc(),
            "normalized_zfc": engine.state_luminance_zfc(self.state)
            / (self.state.height * self.state.width),
        }
        return image, reward, self.done
