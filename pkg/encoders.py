# encoders.py

import logging
from dataclasses import dataclass

import numpy as np

from circuit import Circuit, CircuitBuilder, Gate, Polarity, QubitRegister
from config import DEFAULT_CONFIGS
from errors import ImageTooLarge, RegisterTooSmall
from image_io import GrayImage
from transform import QuantizedGrid
from utils import ilog2, set_bits

logger = logging.getLogger(__name__)

BLOCK = DEFAULT_CONFIGS["BLOCK_SIZE"]
COEFF_QUBITS = DEFAULT_CONFIGS["COEFF_QUBITS"]
MAX_MAGNITUDE = (1 << COEFF_QUBITS) - 1


@dataclass(frozen=True)
class SparseCoefficient:
    """One non-zero quantized coefficient and where it sits."""

    block_row: int
    block_col: int
    x: int
    y: int
    magnitude: int
    sign: int = 1

    def __post_init__(self):
        if self.magnitude < 1:
            raise ValueError(f"only non-zero coefficients are encoded, got magnitude {self.magnitude}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be -1 or +1, got {self.sign}")
        if min(self.block_row, self.block_col, self.x, self.y) < 0:
            raise ValueError("block indices and positions must be non-negative")

    @property
    def value(self) -> int:
        return self.sign * self.magnitude


def sparsify(blocks) -> list[SparseCoefficient]:
    """
    Lists the non-zero coefficients of a quantized block grid in raster
    order (block_row, block_col, y, x).

    Magnitudes above 255 do not fit the coefficient register and are clamped
    with a warning.
    """
    grid = blocks if isinstance(blocks, QuantizedGrid) else QuantizedGrid.from_blocks(blocks)
    magnitudes = grid.magnitudes
    too_big = magnitudes > MAX_MAGNITUDE
    if too_big.any():
        logger.warning(
            "clamping %d coefficient(s) to %d (largest was %d) at Q=%d",
            int(too_big.sum()), MAX_MAGNITUDE, int(magnitudes.max()), grid.q_factor,
        )
        magnitudes = np.minimum(magnitudes, MAX_MAGNITUDE)
    rows, cols, ys, xs = np.nonzero(magnitudes)
    mags = magnitudes[rows, cols, ys, xs]
    signs = grid.signs[rows, cols, ys, xs]
    return [
        SparseCoefficient(int(r), int(c), int(x), int(y), int(m), int(s))
        for r, c, y, x, m, s in zip(rows, cols, ys, xs, mags, signs)
    ]


def register_for(coeffs, block: int = BLOCK, coeff_bits: int = COEFF_QUBITS) -> QubitRegister:
    """
    Smallest register for a coefficient list: the sign shares the top
    coefficient qubit unless some magnitude needs that bit.
    """
    pos = ilog2(block)
    largest = max((c.magnitude for c in coeffs), default=0)
    dedicated = largest >= 1 << (coeff_bits - 1)
    return QubitRegister(coeff=coeff_bits, aux=1, pos_x=pos, pos_y=pos, sign=int(dedicated))


def _check_fits(coeffs, reg: QubitRegister) -> None:
    if reg.aux != 1:
        raise RegisterTooSmall("block encoders need exactly one auxiliary qubit")
    for c in coeffs:
        if c.x >= 1 << reg.pos_x or c.y >= 1 << reg.pos_y:
            raise RegisterTooSmall(
                f"position ({c.x},{c.y}) needs more than {reg.pos_x}+{reg.pos_y} position qubits"
            )
        if c.magnitude > reg.max_magnitude:
            raise RegisterTooSmall(
                f"magnitude {c.magnitude} does not fit {reg.coeff} coefficient qubits"
                + ("" if reg.sign else " with a shared sign qubit")
            )


def _encode(coeffs, reg, scheme: str, keep_zeros: bool, close_with_reset: bool, source) -> Circuit:
    coeffs = list(coeffs)
    if reg is None:
        reg = register_for(coeffs)
    _check_fits(coeffs, reg)
    aux = reg.aux_qubit
    builder = CircuitBuilder(reg, scheme)
    builder.prepare()
    for c in coeffs:
        trigger = Gate.mcx(aux, reg.position_controls(c.x, c.y, keep_zeros=keep_zeros))
        builder.begin_group()
        builder.add(trigger)
        for bit in set_bits(c.magnitude):
            builder.add(Gate.mcx(reg.coeff_qubit(bit), [(aux, Polarity.ONE)]))
        if c.sign < 0:
            builder.add(Gate.mcx(reg.sign_qubit, [(aux, Polarity.ONE)]))
        builder.add(Gate.reset(aux) if close_with_reset else trigger)
        builder.end_group(c.block_row, c.block_col, c.x, c.y, c.magnitude, c.sign)
    return builder.build(source)


def build_mtgsc(coeffs, reg: QubitRegister | None = None, source=None) -> Circuit:
    """
    Modified Toffoli gate state connection: the auxiliary trigger keeps only
    the position qubits whose digit is 1; zero digits get no control at all.
    Each group closes with a single reset of the auxiliary qubit.
    """
    return _encode(coeffs, reg, "mtgsc", keep_zeros=False, close_with_reset=True, source=source)


def build_scmneqr(coeffs, reg: QubitRegister | None = None, source=None) -> Circuit:
    """Full-control trigger (anti-controls for 0 digits), closed by a reset."""
    return _encode(coeffs, reg, "scmneqr", keep_zeros=True, close_with_reset=True, source=source)


def build_dctefrqi(coeffs, reg: QubitRegister | None = None, source=None) -> Circuit:
    """Full-control trigger, closed by a second identical trigger."""
    return _encode(coeffs, reg, "dctefrqi", keep_zeros=True, close_with_reset=False, source=source)


def neqr_register(width: int, height: int, coeff_bits: int = COEFF_QUBITS) -> QubitRegister:
    return QubitRegister(
        coeff=coeff_bits,
        aux=0,
        pos_x=(width - 1).bit_length(),
        pos_y=(height - 1).bit_length(),
        sign=0,
    )


def build_neqr(image: GrayImage, reg: QubitRegister | None = None, source=None) -> Circuit:
    """
    Pixel-wise baseline: every 1-bit of every pixel is a NOT on that
    coefficient qubit controlled by all position qubits. Capped at one block.
    """
    if image.width > BLOCK or image.height > BLOCK:
        raise ImageTooLarge(f"neqr takes at most {BLOCK}x{BLOCK} images, got {image.width}x{image.height}")
    if reg is None:
        reg = neqr_register(image.width, image.height)
    if reg.aux != 0:
        raise RegisterTooSmall("neqr registers carry no auxiliary qubit")
    if image.width > 1 << reg.pos_x or image.height > 1 << reg.pos_y:
        raise RegisterTooSmall(f"{image.width}x{image.height} image does not fit the position register")
    if int(image.pixels.max()) > (1 << reg.coeff) - 1:
        raise RegisterTooSmall(f"pixel values need more than {reg.coeff} coefficient qubits")

    builder = CircuitBuilder(reg, "neqr")
    builder.prepare()
    for y in range(image.height):
        for x in range(image.width):
            value = int(image.pixels[y, x])
            if not value:
                continue
            controls = reg.position_controls(x, y, keep_zeros=True)
            builder.begin_group()
            for bit in set_bits(value):
                builder.add(Gate.mcx(reg.coeff_qubit(bit), controls))
            builder.end_group(0, 0, x, y, value, 1)
    return builder.build(source)


BUILDERS = {
    "mtgsc": build_mtgsc,
    "scmneqr": build_scmneqr,
    "dctefrqi": build_dctefrqi,
}


def build(scheme: str, coeffs, reg: QubitRegister | None = None, source=None) -> Circuit:
    try:
        builder = BUILDERS[scheme]
    except KeyError:
        raise ValueError(f"unknown block scheme {scheme!r}, expected one of {sorted(BUILDERS)}")
    return builder(coeffs, reg, source)


# -- Worked examples from the literature, kept as fixtures --


def _from_global(entries) -> list[SparseCoefficient]:
    """(magnitude, X, Y) triples on a global grid -> 8x8-block coefficients."""
    return [
        SparseCoefficient(Y // BLOCK, X // BLOCK, X % BLOCK, Y % BLOCK, magnitude)
        for magnitude, X, Y in entries
    ]


WORKED_EXAMPLES = {
    # single coefficient used to show the zero-control modification
    "example_62": _from_global([(62, 3, 2)]),
    # reset-gate circuit example: 125(0,0), 1(1,0), 1(4,0), 4(0,1), 16(X=0,Y=3)
    "scmfrqi": _from_global([(125, 0, 0), (1, 1, 0), (1, 4, 0), (4, 0, 1), (16, 0, 3)]),
    # two-Toffoli circuit example pixels
    "efrqi": _from_global([(205, 1, 0), (49, 0, 1), (255, 1, 1)]),
    # 16x16 deer at Q=70; (8,1) is listed twice in the source and kept that way
    "deer16": _from_global([
        (126, 1, 1), (1, 1, 0), (1, 4, 0), (126, 8, 0), (4, 0, 1),
        (1, 8, 1), (1, 9, 1), (1, 8, 1), (1, 8, 5), (138, 0, 8),
        (140, 8, 8), (1, 12, 8), (2, 0, 9), (2, 8, 9), (1, 2, 11),
    ]),
    # all-ones position: nothing to discard
    "corner_77": _from_global([(62, 7, 7)]),
}

NEQR_EXAMPLE = GrayImage.from_list(2, 2, [0, 100, 200, 255])
