# gate_stats.py

from dataclasses import dataclass

from circuit import RESET_SCHEMES, Circuit, GateKind
from config import DEFAULT_CONFIGS
from errors import InvalidCircuit, MissingGroupMetadata
from utils import address_bits, ilog2

BLOCK = DEFAULT_CONFIGS["BLOCK_SIZE"]

STATS_COLUMNS = [
    "scheme", "image", "q", "n_tcn", "q_o", "s_bit", "a_bit",
    "b_t", "b_rg", "b_z", "b_s0", "bpe", "total", "gates_per_pixel",
]


@dataclass(frozen=True)
class GateStats:
    """
    Gate accounting for one encoded image. "Gates" are connections: every
    control or target line a gate touches counts once, multi-controlled NOTs
    are not decomposed.
    """

    scheme: str
    n_tcn: int = 0
    q_o: int = 0
    s_bit: int = 0
    a_bit: int = 0
    b_t: int = 0
    b_rg: int = 0
    b_z: int = 0
    b_s0: int = 0
    bpe: int = 0
    prep_gates: int = 0
    total_gates: int = 0
    pixels: int = 1
    gates_per_pixel: float = 0.0

    def csv_row(self, image: str, q: int) -> list[str]:
        return [
            self.scheme, image, str(q), str(self.n_tcn), str(self.q_o), str(self.s_bit),
            str(self.a_bit), str(self.b_t), str(self.b_rg), str(self.b_z), str(self.b_s0),
            str(self.bpe), str(self.total_gates), f"{self.gates_per_pixel:.6f}",
        ]


def block_position_term(width: int, height: int, block: int = BLOCK) -> int:
    """N_rb * N_cb * (B_rbc + B_rbr) for the block grid covering the image."""
    n_rb = -(-height // block)
    n_cb = -(-width // block)
    return n_rb * n_cb * (address_bits(n_cb) + address_bits(n_rb))


def _group_terms(circuit: Circuit, gates) -> dict[str, int]:
    """Gate terms of one coefficient group (a NEQR pixel counts as a group)."""
    reg = circuit.register
    n_pos = reg.n_pos
    terms = dict(n_tcn=1, q_o=0, s_bit=0, a_bit=0, b_t=0, b_rg=0, b_z=0)
    if circuit.scheme == "neqr":
        for gate in gates:
            terms["b_t"] += len(gate.controls)
            terms["q_o"] += 1
        return terms
    terms["a_bit"] = 1
    terms["b_z"] = n_pos - len(gates[0].controls)
    if circuit.scheme in RESET_SCHEMES:
        terms["b_t"] = n_pos + 1
        terms["b_rg"] = 1
    else:
        terms["b_t"] = n_pos + n_pos + 1
    for gate in gates[1:-1]:
        if gate.target == reg.sign_qubit:
            terms["s_bit"] += 1
        else:
            terms["q_o"] += 1
    return terms


def _connections(terms: dict[str, int]) -> int:
    return terms["b_t"] + terms["b_rg"] - terms["b_z"] + terms["q_o"] + terms["s_bit"] + terms["a_bit"]


def count_gates(circuit: Circuit, image_dims: tuple[int, int], scheme: str | None = None) -> GateStats:
    """
    Counts the gate terms of a circuit.

    For the auxiliary-qubit schemes each group contributes
    B_T += n_pos + C_T, with C_T = 1 when a reset closes the group and
    n_pos + 1 when a second Toffoli does; MTGSC's discarded zero controls
    go to B_z, so B_s0 = B_T + B_rg - B_z is the real connection count.
    """
    scheme = scheme or circuit.scheme
    if scheme != circuit.scheme:
        raise InvalidCircuit(f"circuit was built as {circuit.scheme}, not {scheme}")
    if not circuit.groups and len(circuit.gates) > circuit.prep_length:
        raise MissingGroupMetadata("circuit has coefficient gates but no group metadata")
    width, height = image_dims
    prep = sum(1 for g in circuit.gates if g.kind in (GateKind.HADAMARD, GateKind.IDENTITY))

    counts = dict(n_tcn=0, q_o=0, s_bit=0, a_bit=0, b_t=0, b_rg=0, b_z=0)
    for group in circuit.groups:
        for key, value in _group_terms(circuit, circuit.group_gates(group)).items():
            counts[key] += value

    bpe = 0 if scheme == "neqr" else block_position_term(width, height)
    b_s0 = counts["b_t"] + counts["b_rg"] - counts["b_z"]
    total = counts["q_o"] + counts["s_bit"] + b_s0 + counts["a_bit"] + prep + bpe
    pixels = width * height
    return GateStats(
        scheme=scheme,
        b_s0=b_s0,
        bpe=bpe,
        prep_gates=prep,
        total_gates=total,
        pixels=pixels,
        gates_per_pixel=total / pixels,
        **counts,
    )


def block_connections(circuit: Circuit) -> dict[tuple[int, int], tuple[int, int]]:
    """Per block: (non-zero coefficient count, B_s0 + q_o + S_bit + A_bit)."""
    per_block: dict[tuple[int, int], tuple[int, int]] = {}
    for group in circuit.groups:
        lines = _connections(_group_terms(circuit, circuit.group_gates(group)))
        key = (group.block_row, group.block_col)
        n, total = per_block.get(key, (0, 0))
        per_block[key] = (n + 1, total + lines)
    return per_block


def complexity_bound(q: int, s_x: int, s_y: int) -> int:
    """3q + log2(S_X) + log2(S_Y) + q * S_X * S_Y."""
    if q < 0:
        raise ValueError(f"coefficient count must be non-negative, got {q}")
    return 3 * q + ilog2(s_x) + ilog2(s_y) + q * s_x * s_y


def jpeg_bpp_proxy(coeffs, pixels: int) -> float:
    """
    Entropy-free classical reference: magnitude bits plus one sign bit per
    non-zero coefficient, per pixel. Not a JPEG bit rate.
    """
    bits = sum(c.magnitude.bit_length() + 1 for c in coeffs)
    return bits / pixels


def gate_saving(proposed: GateStats, baseline: GateStats) -> float:
    """Percentage of the baseline's gates per pixel that the proposed scheme saves."""
    if baseline.gates_per_pixel == 0:
        return 0.0
    return 100.0 * (1.0 - proposed.gates_per_pixel / baseline.gates_per_pixel)
