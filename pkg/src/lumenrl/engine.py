"""Iterative enhancement state: frequency-domain amplitudes, frozen phase.

The canonical state of an enhancement episode lives in the frequency
domain: one amplitude plane per RGB channel, multiplied in place by each
step's gain map, plus the input's phase planes which never change. The
RGB image is a materialized view, clamped to [0, 1]; clamping never
feeds back into the canonical amplitudes, so repeated gain applications
compose exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fourier
from .metrics import bt601_luminance
from .validation import check_gains, check_image, readonly


@dataclass(frozen=True)
class EnhanceState:
    step: int
    amplitude: np.ndarray  # (H, W, 3), canonical, unclamped
    phase0: np.ndarray  # (H, W, 3), frozen at step 0
    rgb: np.ndarray  # (H, W, 3), clamped materialized view

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def width(self) -> int:
        return self.rgb.shape[1]


def init_state(image) -> EnhanceState:
    """Decompose an RGB image into its per-channel centered spectra."""
    img = check_image(image)
    h, w, _ = img.shape
    amplitude = np.empty((h, w, 3))
    phase0 = np.empty((h, w, 3))
    for c in range(3):
        spec = fourier.forward_transform(img[:, :, c])
        amplitude[:, :, c] = spec.amplitude
        phase0[:, :, c] = spec.phase
    return EnhanceState(
        step=0,
        amplitude=readonly(amplitude),
        phase0=readonly(phase0),
        rgb=readonly(img.copy()),
    )


def _materialize_channels(amplitude: np.ndarray, phase0: np.ndarray) -> np.ndarray:
    rgb = np.empty_like(amplitude)
    for c in range(3):
        spec = fourier.Spectrum(amplitude[:, :, c], phase0[:, :, c])
        rgb[:, :, c] = fourier.inverse_transform(spec)
    return np.clip(rgb, 0.0, 1.0)


def step_state(state: EnhanceState, gains) -> EnhanceState:
    """Apply one gain plane to all three channel amplitudes.

    A single gain map is shared across R, G and B, which preserves hue
    ratios. The returned state's rgb view is re-materialized and
    clamped; the canonical amplitude keeps the unclamped product.
    """
    g = check_gains(gains, state.rgb.shape[:2])
    amplitude = state.amplitude * g[:, :, None]
    rgb = _materialize_channels(amplitude, state.phase0)
    return EnhanceState(
        step=state.step + 1,
        amplitude=readonly(amplitude),
        phase0=state.phase0,
        rgb=readonly(rgb),
    )


def materialize(state: EnhanceState) -> np.ndarray:
    """Clamped RGB view of the state (read-only, no recomputation)."""
    return state.rgb


def state_luminance_zfc(state: EnhanceState) -> float:
    """Zero-frequency component of the clamped image's luminance plane.

    Equals the sum of BT.601 Y values under the package's transform
    convention.
    """
    return float(bt601_luminance(state.rgb).sum())
