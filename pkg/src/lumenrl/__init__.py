"""Low-light image enhancement by reinforcement-learned Fourier amplitude scaling.

An image's brightness lives almost entirely in the amplitude of its
Fourier spectrum; this package trains a fully-convolutional policy
(advantage actor-critic) to scale that amplitude iteratively, and at
inference adapts the number of iterations until the image's
zero-frequency component (mean luminance) matches a user-supplied
target: a reference image, an explicit brightness value, or a fixed
step count.
"""

from .engine import EnhanceState, init_state, materialize, state_luminance_zfc, step_state
from .estimator import FourierPolicyEnhancer
from .fourier import (
    Spectrum,
    forward_transform,
    inverse_transform,
    scale_amplitude,
    zero_frequency_component,
)
from .inference import (
    EnhanceResult,
    InferenceConfig,
    PersonalizationTarget,
    enhance_adaptive,
    normalized_zfc,
    resolve_target,
)
from .a3c import SharedParams, TrainConfig, train
from .data import (
    Checkpoint,
    PairedDataset,
    load_checkpoint,
    load_image,
    save_checkpoint,
    save_image,
    synth_dataset,
)
from .metrics import (
    bt601_luminance,
    luminance_histogram,
    psnr,
    psnr_y,
    rgb_to_ycbcr,
    ssim,
)
from .nn import EpisodeTrace, PolicyValueNet, a3c_losses, discounted_returns, sample_actions
from .rl import (
    Environment,
    EpisodeConfig,
    RewardWeights,
    action_to_gain,
    amplitude_exposure_reward,
    image_quality_reward,
    immediate_reward,
    quality_score,
    register_scorer,
)

__version__ = "0.1.0"

__all__ = [
    "Checkpoint",
    "EnhanceResult",
    "EnhanceState",
    "Environment",
    "EpisodeConfig",
    "EpisodeTrace",
    "FourierPolicyEnhancer",
    "InferenceConfig",
    "PairedDataset",
    "PersonalizationTarget",
    "PolicyValueNet",
    "RewardWeights",
    "SharedParams",
    "Spectrum",
    "TrainConfig",
    "a3c_losses",
    "action_to_gain",
    "amplitude_exposure_reward",
    "bt601_luminance",
    "discounted_returns",
    "enhance_adaptive",
    "forward_transform",
    "image_quality_reward",
    "immediate_reward",
    "init_state",
    "inverse_transform",
    "load_checkpoint",
    "load_image",
    "luminance_histogram",
    "materialize",
    "normalized_zfc",
    "psnr",
    "psnr_y",
    "quality_score",
    "register_scorer",
    "resolve_target",
    "rgb_to_ycbcr",
    "sample_actions",
    "save_checkpoint",
    "save_image",
    "scale_amplitude",
    "ssim",
    "state_luminance_zfc",
    "step_state",
    "synth_dataset",
    "train",
    "zero_frequency_component",
]
