"""Full-reference quality metrics and luminance histogram tooling.

BT.601 luminance (Y = 0.299 R + 0.587 G + 0.114 B) is used throughout
the package so that metrics, rewards and illumination targets all agree
on what "brightness" means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

PSNR_CAP_DB = 100.0

_YR, _YG, _YB = 0.299, 0.587, 0.114


def bt601_luminance(image) -> np.ndarray:
    """Y plane of an (H, W, 3) RGB image.

    Summation order keeps the weights adding to exactly 1.0 in float64,
    so gray pixels map to their own value (0.5 gray has Y exactly 0.5).
    """
    img = np.asarray(image, dtype=np.float64)
    return _YR * img[..., 0] + (_YG * img[..., 1] + _YB * img[..., 2])


def rgb_to_ycbcr(image):
    """Split an RGB image into (Y, Cb, Cr) planes, all in [0, 1]."""
    img = np.asarray(image, dtype=np.float64)
    y = bt601_luminance(img)
    cb = (img[..., 2] - y) / 1.772 + 0.5
    cr = (img[..., 0] - y) / 1.402 + 0.5
    return y, cb, cr


def psnr(a, b) -> float:
    """PSNR in dB for [0, 1]-ranged arrays; capped at 100 dB."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    mse = float(np.mean((x - y) ** 2))
    if mse < 1e-10:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(1.0 / mse), PSNR_CAP_DB)


def psnr_y(a, b) -> float:
    """PSNR on the BT.601 luminance planes of two RGB images."""
    return psnr(bt601_luminance(a), bt601_luminance(b))


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(a, b, window_size: int = 11, sigma: float = 1.5) -> float:
    """Single-scale SSIM on luminance, averaged over valid window positions.

    Canonical constants: 11x11 Gaussian window with sigma 1.5,
    C1 = 0.01^2 and C2 = 0.03^2 on the [0, 1] range.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.ndim == 3:
        x, y = bt601_luminance(x), bt601_luminance(y)
    if min(x.shape) < window_size:
        raise ValueError(f"inputs smaller than the {window_size}x{window_size} window")

    c1, c2 = 0.01**2, 0.03**2
    w = _gaussian_window(window_size, sigma)

    mu_x = convolve2d(x, w, mode="valid")
    mu_y = convolve2d(y, w, mode="valid")
    mu_xx, mu_yy, mu_xy = mu_x * mu_x, mu_y * mu_y, mu_x * mu_y
    var_x = convolve2d(x * x, w, mode="valid") - mu_xx
    var_y = convolve2d(y * y, w, mode="valid") - mu_yy
    cov = convolve2d(x * y, w, mode="valid") - mu_xy

    num = (2.0 * mu_xy + c1) * (2.0 * cov + c2)
    den = (mu_xx + mu_yy + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def luminance_histogram(image, bins: int) -> np.ndarray:
    """Counts of luminance values over `bins` equal-width bins on [0, 1].

    Counts always sum to the pixel count; the value 1.0 lands in the
    final bin.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    y = np.clip(bt601_luminance(image), 0.0, 1.0)
    counts, _ = np.histogram(y, bins=bins, range=(0.0, 1.0))
    return counts


@dataclass
class MetricReport:
    """Per-pair metric rows plus their arithmetic means."""

    rows: list

    @property
    def mean_psnr_rgb(self) -> float:
        return float(np.mean([r["psnr_rgb"] for r in self.rows]))

    @property
    def mean_psnr_y(self) -> float:
        return float(np.mean([r["psnr_y"] for r in self.rows]))

    @property
    def mean_ssim(self) -> float:
        return float(np.mean([r["ssim"] for r in self.rows]))

    def aggregate(self) -> dict:
        return {
            "aggregate": True,
            "count": len(self.rows),
            "psnr_rgb": self.mean_psnr_rgb,
            "psnr_y": self.mean_psnr_y,
            "ssim": self.mean_ssim,
        }


def evaluate_pair(enhanced, reference, name: str = "") -> dict:
    return {
        "name": name,
        "psnr_rgb": psnr(enhanced, reference),
        "psnr_y": psnr_y(enhanced, reference),
        "ssim": ssim(enhanced, reference),
    }
