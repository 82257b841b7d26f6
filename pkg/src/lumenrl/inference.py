"""Personalized adaptive enhancement at inference time.

The greedy policy is applied step by step until the image's normalized
zero-frequency component (mean luminance) matches the user's target:
a reference image, an explicit brightness value, or a fixed number of
iterations. Brightness comparisons reuse the training reward's distance
|zfc_ref / zfc_t - 1|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine, nn, rl
from .metrics import bt601_luminance
from .validation import check_image

DEGENERATE_ZFC = 1e-6


@dataclass
class PersonalizationTarget:
    """Exactly one of reference_image, zfc_target, fixed_iterations.

    `zfc_target` is a normalized mean-luminance value unless
    `zfc_is_raw` is set, in which case it is a raw luminance sum
    interpreted against the input image's pixel count.
    """

    reference_image: np.ndarray | None = None
    zfc_target: float | None = None
    fixed_iterations: int | None = None
    zfc_is_raw: bool = False

    def __post_init__(self):
        populated = sum(
            v is not None
            for v in (self.reference_image, self.zfc_target, self.fixed_iterations)
        )
        if populated != 1:
            raise ValueError(
                "exactly one of reference_image, zfc_target or fixed_iterations "
                f"must be set, got {populated}"
            )
        if self.zfc_target is not None and self.zfc_target <= 0:
            raise ValueError("zfc_target must be positive")
        if self.fixed_iterations is not None and self.fixed_iterations < 1:
            raise ValueError("fixed_iterations must be >= 1")


@dataclass
class InferenceConfig:
    epsilon: float = 0.05
    max_iterations: int = 20
    record_trajectory: bool = False
    stochastic: bool = False  # diagnostics only; greedy is the default
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class EnhanceResult:
    output: np.ndarray
    iterations_used: int
    converged: bool
    zfc_trajectory: list  # [(step, normalized_zfc), ...], length iterations_used + 1
    step_images: list | None = None


def normalized_zfc(image) -> float:
    """Mean BT.601 luminance; the resolution-independent brightness statistic."""
    y = bt601_luminance(image)
    return float(y.mean())


def resolve_target(target: PersonalizationTarget, pixel_count: int | None = None):
    """Reduce a personalization target to ("zfc", value) or ("iterations", n)."""
    if target.fixed_iterations is not None:
        return "iterations", target.fixed_iterations
    if target.reference_image is not None:
        ref = check_image(target.reference_image, min_dim=1, name="reference")
        value = normalized_zfc(ref)
        if value < DEGENERATE_ZFC:
            raise ValueError("degenerate reference: zero brightness")
        return "zfc", value
    value = target.zfc_target
    if target.zfc_is_raw:
        if pixel_count is None:
            raise ValueError("raw zfc target requires the input pixel count")
        value = value / pixel_count
    if value < DEGENERATE_ZFC:
        raise ValueError("degenerate zfc target")
    return "zfc", float(value)


def _greedy_gap(zfc_ref: float, zfc_t: float) -> float:
    return rl.amplitude_exposure_reward(zfc_t, zfc_ref)


def enhance_adaptive(net: nn.PolicyValueNet, image, target: PersonalizationTarget,
                     config: InferenceConfig | None = None) -> EnhanceResult:
    """Iterate the policy until the brightness target is met.

    ZFC modes stop once |zfc_ref/zfc_t - 1| <= epsilon (converged) or at
    max_iterations (not converged); if the gap grows for three
    consecutive steps the best state seen so far is returned instead.
    Fixed-iterations mode runs exactly N steps and never consults
    epsilon.
    """
    config = config or InferenceConfig()
    img = check_image(image)
    mode, goal = resolve_target(target, pixel_count=img.shape[0] * img.shape[1])
    rng = np.random.default_rng(config.seed) if config.stochastic else None

    state = engine.init_state(img)
    pixels = img.shape[0] * img.shape[1]
    trajectory = [(0, engine.state_luminance_zfc(state) / pixels)]
    images = [engine.materialize(state)] if config.record_trajectory else None

    def act(current: engine.EnhanceState) -> engine.EnhanceState:
        logits, _ = net.forward(engine.materialize(current))
        if rng is None:
            actions = nn.sample_actions(logits, mode="greedy")
        else:
            actions = nn.sample_actions(logits, mode="stochastic", rng=rng)
        return engine.step_state(current, rl.gains_from_actions(actions))

    if mode == "iterations":
        for _ in range(goal):
            state = act(state)
            trajectory.append((state.step, engine.state_luminance_zfc(state) / pixels))
            if images is not None:
                images.append(engine.materialize(state))
        return EnhanceResult(
            output=engine.materialize(state),
            iterations_used=goal,
            converged=True,
            zfc_trajectory=trajectory,
            step_images=images,
        )

    def converged_result() -> EnhanceResult:
        return EnhanceResult(
            output=engine.materialize(state),
            iterations_used=state.step,
            converged=True,
            zfc_trajectory=trajectory,
            step_images=images,
        )

    best_idx, best_state = 0, state
    best_gap = prev_gap = _greedy_gap(goal, trajectory[0][1])
    if best_gap <= config.epsilon:
        return converged_result()

    rising_streak = 0
    while state.step < config.max_iterations:
        state = act(state)
        trajectory.append((state.step, engine.state_luminance_zfc(state) / pixels))
        if images is not None:
            images.append(engine.materialize(state))
        gap = _greedy_gap(goal, trajectory[-1][1])
        if gap <= config.epsilon:
            return converged_result()
        if gap < best_gap:
            best_gap, best_state, best_idx = gap, state, state.step
        rising_streak = rising_streak + 1 if gap > prev_gap else 0
        prev_gap = gap
        if rising_streak >= 3:
            break

    # Target not reached (cap hit or the gap kept growing); hand back the
    # best state seen, truncating the record to keep it consistent.
    return EnhanceResult(
        output=engine.materialize(best_state),
        iterations_used=best_idx,
        converged=False,
        zfc_trajectory=trajectory[: best_idx + 1],
        step_images=images[: best_idx + 1] if images is not None else None,
    )
