import numpy as np
import pytest

from image_io import GrayImage


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise_image(rng):
    """64x64 uniform noise; dense coefficients at every Q."""
    return GrayImage.from_rows(rng.integers(0, 256, size=(64, 64)))


@pytest.fixture
def smooth_image():
    """16x16 gradient with a bright square, small enough for any scheme but neqr."""
    y, x = np.mgrid[0:16, 0:16]
    pixels = 8 * x + 4 * y
    pixels[4:10, 5:11] = 230
    return GrayImage.from_rows(pixels)


def write_pgm(path, img: GrayImage):
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    path.write_bytes(header + img.pixels.tobytes())
    return path
