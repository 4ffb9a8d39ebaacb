# transform.py

"""
Classical pre/post-processing: 8x8 block DCT, scalar quantization with sign
extraction, dequantization and the inverse DCT.

Blocks are numpy arrays indexed [row, column]; in-block Y is the row and X
the column, for pixels and coefficients alike.
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from config import DEFAULT_CONFIGS
from errors import QOutOfRange

BLOCK = DEFAULT_CONFIGS["BLOCK_SIZE"]
LEVEL = 128


def round_half_away(values) -> np.ndarray:
    """Rounds to the nearest integer, ties away from zero."""
    values = np.asarray(values, dtype=float)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def dct_forward(block, level_shift: bool = False) -> np.ndarray:
    """
    2-D DCT-II of a block (or a stack of blocks on the last two axes).

    norm="ortho" gives C(0) = 1/(2*sqrt(2)) and C(k) = 1/2 for an 8-point
    transform, so an all-128 block maps to F(0,0) = 1024.
    """
    values = np.asarray(block, dtype=float)
    if level_shift:
        values = values - LEVEL
    return dctn(values, type=2, norm="ortho", axes=(-2, -1))


def dct_inverse_real(coeffs, level_shift: bool = False) -> np.ndarray:
    """Inverse DCT without rounding or clamping."""
    values = idctn(np.asarray(coeffs, dtype=float), type=2, norm="ortho", axes=(-2, -1))
    if level_shift:
        values = values + LEVEL
    return values


def dct_inverse(coeffs, level_shift: bool = False) -> np.ndarray:
    """Inverse DCT rounded half away from zero and clamped to [0, 255]."""
    values = round_half_away(dct_inverse_real(coeffs, level_shift))
    return np.clip(values, 0, 255).astype(np.int64)


def check_q(q) -> int:
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or q < 1:
        raise QOutOfRange(f"quantization factor must be a positive integer, got {q!r}")
    return int(q)


@dataclass(frozen=True, eq=False)
class QuantizedBlock:
    magnitudes: np.ndarray
    signs: np.ndarray
    q_factor: int

    def __post_init__(self):
        check_q(self.q_factor)
        magnitudes = np.asarray(self.magnitudes, dtype=np.int64)
        signs = np.asarray(self.signs, dtype=np.int64)
        if magnitudes.shape != signs.shape:
            raise ValueError("magnitudes and signs must have the same shape")
        if (magnitudes < 0).any():
            raise ValueError("magnitudes must be non-negative")
        if not np.isin(signs, (-1, 0, 1)).all():
            raise ValueError("signs must be -1, 0 or +1")
        if not np.array_equal(signs == 0, magnitudes == 0):
            raise ValueError("a sign is zero exactly when its magnitude is zero")
        object.__setattr__(self, "magnitudes", magnitudes)
        object.__setattr__(self, "signs", signs)

    @property
    def values(self) -> np.ndarray:
        """Signed quantized coefficients F_Q."""
        return self.signs * self.magnitudes

    def nonzero_count(self) -> int:
        return int(np.count_nonzero(self.magnitudes))

    def __eq__(self, other):
        if not isinstance(other, QuantizedBlock):
            return NotImplemented
        return (
            self.q_factor == other.q_factor
            and np.array_equal(self.magnitudes, other.magnitudes)
            and np.array_equal(self.signs, other.signs)
        )


def quantize(coeffs, q: int) -> QuantizedBlock:
    """F_Q = round(F / Q), split into magnitude and sign planes."""
    q = check_q(q)
    values = round_half_away(np.asarray(coeffs, dtype=float) / q).astype(np.int64)
    return QuantizedBlock(magnitudes=np.abs(values), signs=np.sign(values), q_factor=q)


def dequantize(qb: QuantizedBlock) -> np.ndarray:
    """F' = sign * magnitude * Q."""
    return (qb.signs * qb.magnitudes * qb.q_factor).astype(float)


# -- Whole-image helpers --


def split_blocks(pixels: np.ndarray, block: int = BLOCK) -> np.ndarray:
    """(H, W) raster with block-multiple sides -> (rows, cols, block, block) stack."""
    height, width = pixels.shape
    return (
        pixels.reshape(height // block, block, width // block, block)
        .swapaxes(1, 2)
    )


def assemble_blocks(blocks: np.ndarray) -> np.ndarray:
    rows, cols, bh, bw = blocks.shape
    return blocks.swapaxes(1, 2).reshape(rows * bh, cols * bw)


@dataclass(frozen=True, eq=False)
class QuantizedGrid:
    """Quantized blocks of a whole (padded) image, stored as stacked planes."""

    magnitudes: np.ndarray  # (rows, cols, 8, 8)
    signs: np.ndarray
    q_factor: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.magnitudes.shape[0], self.magnitudes.shape[1]

    def block(self, row: int, col: int) -> QuantizedBlock:
        return QuantizedBlock(self.magnitudes[row, col], self.signs[row, col], self.q_factor)

    def blocks(self) -> list[list[QuantizedBlock]]:
        rows, cols = self.shape
        return [[self.block(r, c) for c in range(cols)] for r in range(rows)]

    @classmethod
    def from_blocks(cls, blocks) -> "QuantizedGrid":
        rows = [list(row) for row in blocks]
        if not rows or not rows[0]:
            raise ValueError("empty block grid")
        q = rows[0][0].q_factor
        if any(b.q_factor != q for row in rows for b in row):
            raise ValueError("all blocks of a grid share one quantization factor")
        magnitudes = np.array([[b.magnitudes for b in row] for row in rows], dtype=np.int64)
        signs = np.array([[b.signs for b in row] for row in rows], dtype=np.int64)
        return cls(magnitudes=magnitudes, signs=signs, q_factor=q)


def quantize_pixels(pixels: np.ndarray, q: int, level_shift: bool = False) -> QuantizedGrid:
    """Block DCT and quantization of a padded raster in one vectorised pass."""
    q = check_q(q)
    coeffs = dct_forward(split_blocks(np.asarray(pixels)), level_shift)
    values = round_half_away(coeffs / q).astype(np.int64)
    return QuantizedGrid(magnitudes=np.abs(values), signs=np.sign(values), q_factor=q)


def reconstruct_pixels(grid: QuantizedGrid, level_shift: bool = False) -> np.ndarray:
    coeffs = (grid.signs * grid.magnitudes * grid.q_factor).astype(float)
    return assemble_blocks(dct_inverse(coeffs, level_shift))
