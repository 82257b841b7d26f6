import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    return rng.random((16, 16, 3))


def constant_image(value: float, h: int = 16, w: int = 16) -> np.ndarray:
    return np.full((h, w, 3), float(value))


def checkerboard_image(h: int = 16, w: int = 16) -> np.ndarray:
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    plane = ((yy + xx) % 2).astype(np.float64)
    return np.repeat(plane[:, :, None], 3, axis=2)
