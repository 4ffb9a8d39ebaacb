# codec_metrics.py

import logging
import math
from dataclasses import dataclass

import numpy as np

from circuit import RESET_SCHEMES, Circuit, GateKind, Polarity
from config import DEFAULT_CONFIGS
from encoders import SparseCoefficient
from errors import CoefficientOutOfBounds, DimensionMismatch, MalformedGroup
from image_io import GrayImage, padded_dims
from transform import QuantizedGrid, check_q, reconstruct_pixels

logger = logging.getLogger(__name__)

BLOCK = DEFAULT_CONFIGS["BLOCK_SIZE"]
PEAK = DEFAULT_CONFIGS["PSNR_PEAK"]
QUALITY_COLUMNS = ["mse", "psnr"]


@dataclass(frozen=True)
class QualityReport:
    mse: float
    psnr: float  # math.inf for identical images
    image_name: str = ""
    scheme: str = ""
    q_factor: int = 0

    def csv_row(self) -> list[str]:
        psnr = "inf" if math.isinf(self.psnr) else f"{self.psnr:.4f}"
        return [f"{self.mse:.6f}", psnr]


@dataclass
class _ParsedGroup:
    x: int
    y: int
    magnitude: int
    sign: int
    span: tuple[int, int]


# -- Structural decode --


def _position(circuit: Circuit, controls, where: str) -> tuple[int, int]:
    """On-one position controls are 1-bits; on-zero or missing controls are 0-bits."""
    reg = circuit.register
    x = y = 0
    for control in controls:
        if not 0 <= control.qubit < reg.n_pos:
            raise MalformedGroup(f"{where}: control on non-position qubit {control.qubit}")
        if control.polarity is not Polarity.ONE:
            continue
        if control.qubit < reg.pos_x:
            x |= 1 << control.qubit
        else:
            y |= 1 << (control.qubit - reg.pos_x)
    return x, y


def _is_trigger(gate, aux: int) -> bool:
    return gate.kind in (GateKind.NOT, GateKind.CNOT) and gate.target == aux


def _parse_aux_groups(circuit: Circuit) -> list[_ParsedGroup]:
    reg = circuit.register
    aux = reg.aux_qubit
    aux_control = ((aux, Polarity.ONE),)
    # True: reset closes a group, False: a repeated trigger does, None: either
    closes_with_reset = None
    if circuit.scheme in RESET_SCHEMES:
        closes_with_reset = True
    elif circuit.scheme == "dctefrqi":
        closes_with_reset = False
    gates = circuit.gates
    parsed = []
    i = circuit.prep_length
    while i < len(gates):
        first = i
        trigger = gates[i]
        if not _is_trigger(trigger, aux):
            raise MalformedGroup(f"gate {i}: expected an auxiliary trigger, got {trigger.kind.value}")
        x, y = _position(circuit, trigger.controls, f"gate {i}")
        magnitude, sign = 0, 1
        i += 1
        while True:
            if i >= len(gates):
                raise MalformedGroup(f"unterminated group starting at gate {first}")
            gate = gates[i]
            if gate.kind is GateKind.RESET and gate.target == aux and closes_with_reset is not False:
                break
            if gate == trigger and closes_with_reset is not True:
                break
            if _is_trigger(gate, aux):
                raise MalformedGroup(f"unterminated group starting at gate {first}: new trigger at gate {i}")
            if gate.kind is not GateKind.CNOT or tuple(gate.controls) != aux_control:
                raise MalformedGroup(f"gate {i}: body gates must be NOTs controlled by the auxiliary qubit")
            if gate.target == reg.sign_qubit:
                if sign < 0:
                    raise MalformedGroup(f"gate {i}: repeated sign gate")
                sign = -1
            elif gate.target in reg.coeff_qubits:
                bit = 1 << (gate.target - reg.coeff_qubit(0))
                if magnitude & bit:
                    raise MalformedGroup(f"gate {i}: repeated coefficient bit")
                magnitude |= bit
            else:
                raise MalformedGroup(f"gate {i}: target {gate.target} is not a coefficient qubit")
            i += 1
        if magnitude == 0:
            raise MalformedGroup(f"group starting at gate {first} sets no coefficient bit")
        parsed.append(_ParsedGroup(x, y, magnitude, sign, (first, i)))
        i += 1
    return parsed


def _parse_pixel_groups(circuit: Circuit) -> list[_ParsedGroup]:
    """NEQR: consecutive NOTs sharing one full position control set form a pixel."""
    reg = circuit.register
    gates = circuit.gates
    parsed = []
    i = circuit.prep_length
    while i < len(gates):
        first = i
        controls = gates[i].controls
        if len(controls) != reg.n_pos and reg.n_pos:
            raise MalformedGroup(f"gate {i}: pixel gates need a control on every position qubit")
        x, y = _position(circuit, controls, f"gate {i}")
        value = 0
        while i < len(gates) and gates[i].controls == controls:
            gate = gates[i]
            if gate.kind not in (GateKind.NOT, GateKind.CNOT) or gate.target not in reg.coeff_qubits:
                raise MalformedGroup(f"gate {i}: pixel gates must target coefficient qubits")
            bit = 1 << (gate.target - reg.coeff_qubit(0))
            if value & bit:
                raise MalformedGroup(f"gate {i}: repeated pixel bit")
            value |= bit
            i += 1
        parsed.append(_ParsedGroup(x, y, value, 1, (first, i - 1)))
    return parsed


def decode_circuit(circuit: Circuit) -> list[SparseCoefficient]:
    """
    Recovers the coefficient list from the gate sequence alone.

    Block addresses are not gates, so they come from the group metadata,
    which must agree with what the gates say; a circuit without metadata
    decodes into block (0, 0).
    """
    if circuit.register.aux_qubit is None:
        parsed = _parse_pixel_groups(circuit)
    else:
        parsed = _parse_aux_groups(circuit)

    if not circuit.groups:
        return [SparseCoefficient(0, 0, p.x, p.y, p.magnitude, p.sign) for p in parsed]
    if len(parsed) != len(circuit.groups):
        raise MalformedGroup(f"gates hold {len(parsed)} groups, metadata lists {len(circuit.groups)}")

    coeffs = []
    for k, (p, meta) in enumerate(zip(parsed, circuit.groups)):
        if p.span != tuple(meta.gate_span):
            raise MalformedGroup(f"group {k}: gates span {p.span}, metadata says {meta.gate_span}")
        if (p.x, p.y, p.magnitude, p.sign) != (meta.x, meta.y, meta.magnitude, meta.sign):
            raise MalformedGroup(
                f"group {k}: gates encode {p.sign * p.magnitude}({p.x},{p.y}), "
                f"metadata says {meta.sign * meta.magnitude}({meta.x},{meta.y})"
            )
        coeffs.append(SparseCoefficient(meta.block_row, meta.block_col, p.x, p.y, p.magnitude, p.sign))
    return coeffs


# -- Reconstruction and quality --


def densify(coeffs, dims: tuple[int, int], q: int) -> QuantizedGrid:
    """Scatters sparse coefficients into a block grid; a repeated position keeps the last value."""
    width, height = dims
    padded_w, padded_h = padded_dims(width, height)
    rows, cols = padded_h // BLOCK, padded_w // BLOCK
    magnitudes = np.zeros((rows, cols, BLOCK, BLOCK), dtype=np.int64)
    signs = np.zeros_like(magnitudes)
    for c in coeffs:
        if c.block_row >= rows or c.block_col >= cols or c.x >= BLOCK or c.y >= BLOCK:
            raise CoefficientOutOfBounds(
                f"coefficient at block ({c.block_row},{c.block_col}) position ({c.x},{c.y}) "
                f"lies outside a {width}x{height} image"
            )
        magnitudes[c.block_row, c.block_col, c.y, c.x] = c.magnitude
        signs[c.block_row, c.block_col, c.y, c.x] = c.sign
    return QuantizedGrid(magnitudes=magnitudes, signs=signs, q_factor=check_q(q))


def reconstruct(coeffs, dims: tuple[int, int], q: int, level_shift: bool = False) -> GrayImage:
    width, height = dims
    pixels = reconstruct_pixels(densify(coeffs, dims, q), level_shift)
    return GrayImage(width=width, height=height, pixels=pixels[:height, :width])


def psnr(original: GrayImage, reconstructed: GrayImage, image_name: str = "", scheme: str = "", q_factor: int = 0) -> QualityReport:
    if (original.width, original.height) != (reconstructed.width, reconstructed.height):
        raise DimensionMismatch(
            f"cannot compare {original.width}x{original.height} with "
            f"{reconstructed.width}x{reconstructed.height}"
        )
    diff = original.pixels.astype(np.float64) - reconstructed.pixels.astype(np.float64)
    mse = float(np.mean(diff ** 2))
    value = math.inf if mse == 0 else 10 * math.log10(PEAK ** 2 / mse)
    return QualityReport(mse=mse, psnr=value, image_name=image_name, scheme=scheme, q_factor=q_factor)
