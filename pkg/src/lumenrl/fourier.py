"""Centered 2-D Fourier decomposition of single-channel planes.

Convention: unnormalized forward transform, 1/(H*W) on the inverse, so
the amplitude of the zero-frequency bin of a non-negative plane equals
the plain sum of its values. Spectra are stored centered, i.e. the
zero-frequency bin sits at row H//2, column W//2, for odd and even
sizes alike. Any H, W >= 8 is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_gains, check_plane, readonly


@dataclass(frozen=True)
class Spectrum:
    """Per-bin polar form of a centered 2-D spectrum.

    amplitude is non-negative; phase lies in (-pi, pi] and is defined
    as 0 wherever the amplitude is exactly 0.
    """

    amplitude: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        amp, pha = self.amplitude, self.phase
        if amp.ndim != 2 or amp.shape != pha.shape:
            raise ValueError(
                f"amplitude/phase shapes differ: {amp.shape} vs {pha.shape}"
            )
        if not (np.isfinite(amp).all() and np.isfinite(pha).all()):
            raise ValueError("spectrum contains non-finite values")
        if (amp < 0).any():
            raise ValueError("amplitude must be non-negative")
        if (pha <= -np.pi).any() or (pha > np.pi).any():
            raise ValueError("phase must lie in (-pi, pi]")
        readonly(amp)
        readonly(pha)

    @property
    def height(self) -> int:
        return self.amplitude.shape[0]

    @property
    def width(self) -> int:
        return self.amplitude.shape[1]


def forward_transform(plane) -> Spectrum:
    """Decompose a real plane into a centered amplitude/phase spectrum."""
    p = check_plane(plane)
    f = np.fft.fftshift(np.fft.fft2(p))
    amplitude = np.abs(f)
    phase = np.angle(f)
    # np.angle can return -pi (signed-zero imaginary part); fold onto +pi.
    phase[phase == -np.pi] = np.pi
    phase[amplitude == 0.0] = 0.0
    return Spectrum(amplitude, phase)


def inverse_transform(spectrum: Spectrum) -> np.ndarray:
    """Rebuild the real plane from a centered spectrum.

    The complex coefficients are reassembled as amp*cos(phase) +
    j*amp*sin(phase); the inverse transform's residual imaginary part is
    discarded. For spectra whose amplitude map was edited per-bin the
    result is the real part of the (generally complex) inverse.
    """
    amp, pha = spectrum.amplitude, spectrum.phase
    real = amp * np.cos(pha)
    imag = amp * np.sin(pha)
    x = np.fft.ifft2(np.fft.ifftshift(real + 1j * imag))
    return np.ascontiguousarray(x.real)


def zero_frequency_component(spectrum: Spectrum) -> float:
    """Amplitude of the centered zero-frequency bin.

    Under this module's convention it equals the value sum of the
    originating plane when that plane is real and non-negative.
    """
    return float(spectrum.amplitude[spectrum.height // 2, spectrum.width // 2])


def scale_amplitude(spectrum: Spectrum, gains) -> Spectrum:
    """Multiply the amplitude element-wise by a positive gain plane."""
    g = check_gains(gains, spectrum.amplitude.shape)
    return Spectrum(spectrum.amplitude * g, spectrum.phase)
