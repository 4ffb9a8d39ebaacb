# circuit.py

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple
from urllib.parse import quote

from config import DEFAULT_CONFIGS
from errors import InvalidCircuit, TooManyQubits

SCHEMES = ("mtgsc", "scmneqr", "dctefrqi", "neqr", "raw")  # raw: free-form, no group structure
RESET_SCHEMES = ("mtgsc", "scmneqr")
QUIRK_URL = "https://algassert.com/quirk#circuit="


class GateKind(str, Enum):
    HADAMARD = "hadamard"
    IDENTITY = "identity"
    NOT = "not"
    CNOT = "cnot"
    RESET = "reset"


class Polarity(str, Enum):
    ONE = "one"
    ZERO = "zero"


class Control(NamedTuple):
    qubit: int
    polarity: Polarity = Polarity.ONE


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int
    controls: tuple[Control, ...] = ()

    @classmethod
    def h(cls, target: int) -> "Gate":
        return cls(GateKind.HADAMARD, target)

    @classmethod
    def i(cls, target: int) -> "Gate":
        return cls(GateKind.IDENTITY, target)

    @classmethod
    def x(cls, target: int) -> "Gate":
        return cls(GateKind.NOT, target)

    @classmethod
    def reset(cls, target: int) -> "Gate":
        return cls(GateKind.RESET, target)

    @classmethod
    def mcx(cls, target: int, controls) -> "Gate":
        """Multi-controlled NOT; with no controls this is a plain NOT."""
        controls = tuple(Control(q, Polarity(p)) for q, p in controls)
        if not controls:
            return cls.x(target)
        return cls(GateKind.CNOT, target, controls)

    @property
    def qubits(self) -> list[int]:
        return [c.qubit for c in self.controls] + [self.target]


@dataclass(frozen=True)
class QubitRegister:
    """
    Role-tagged register. Qubit order: X position bits (LSB first), Y
    position bits, the auxiliary qubit, coefficient magnitude bits (LSB
    first), then the dedicated sign qubit if there is one.
    """

    coeff: int = 8
    aux: int = 1
    pos_x: int = 3
    pos_y: int = 3
    sign: int = 0  # 0: sign shares the top coefficient qubit

    @property
    def n_pos(self) -> int:
        return self.pos_x + self.pos_y

    @property
    def total(self) -> int:
        return self.coeff + self.aux + self.n_pos + self.sign

    @property
    def pos_x_qubits(self) -> list[int]:
        return list(range(self.pos_x))

    @property
    def pos_y_qubits(self) -> list[int]:
        return list(range(self.pos_x, self.n_pos))

    @property
    def position_qubits(self) -> list[int]:
        return list(range(self.n_pos))

    @property
    def aux_qubit(self) -> int | None:
        return self.n_pos if self.aux else None

    def coeff_qubit(self, bit: int) -> int:
        return self.n_pos + self.aux + bit

    @property
    def coeff_qubits(self) -> list[int]:
        return [self.coeff_qubit(b) for b in range(self.coeff)]

    @property
    def sign_qubit(self) -> int:
        if self.sign:
            return self.n_pos + self.aux + self.coeff
        return self.coeff_qubit(self.coeff - 1)

    @property
    def max_magnitude(self) -> int:
        """Largest magnitude that leaves the sign qubit free."""
        bits = self.coeff if self.sign else self.coeff - 1
        return (1 << bits) - 1

    def position_controls(self, x: int, y: int, keep_zeros: bool) -> list[Control]:
        """Controls selecting in-block position (x, y); zero digits are dropped unless keep_zeros."""
        controls = []
        for bit, qubit in enumerate(self.pos_x_qubits):
            controls.append((qubit, (x >> bit) & 1))
        for bit, qubit in enumerate(self.pos_y_qubits):
            controls.append((qubit, (y >> bit) & 1))
        return [
            Control(q, Polarity.ONE if digit else Polarity.ZERO)
            for q, digit in controls
            if digit or keep_zeros
        ]

    def to_dict(self) -> dict:
        return {"coeff": self.coeff, "aux": self.aux, "pos_x": self.pos_x, "pos_y": self.pos_y, "sign": self.sign}


@dataclass(frozen=True)
class CoefficientGroup:
    block_row: int
    block_col: int
    x: int
    y: int
    magnitude: int
    sign: int
    gate_span: tuple[int, int]  # inclusive


@dataclass(frozen=True)
class Circuit:
    register: QubitRegister
    gates: tuple[Gate, ...] = ()
    groups: tuple[CoefficientGroup, ...] = ()
    scheme: str = "raw"
    source: tuple[int, int, int] | None = None  # (width, height, q) of the encoded image

    @property
    def prep_length(self) -> int:
        n = 0
        for gate in self.gates:
            if gate.kind is not GateKind.HADAMARD:
                break
            n += 1
        return n

    def group_gates(self, group: CoefficientGroup) -> tuple[Gate, ...]:
        first, last = group.gate_span
        return self.gates[first:last + 1]


class CircuitBuilder:
    """Accumulates gates and group spans, then freezes them into a Circuit."""

    def __init__(self, register: QubitRegister, scheme: str):
        self.register = register
        self.scheme = scheme
        self.gates: list[Gate] = []
        self.groups: list[CoefficientGroup] = []
        self._open: int | None = None

    def add(self, gate: Gate) -> None:
        self.gates.append(gate)

    def prepare(self) -> None:
        for qubit in self.register.position_qubits:
            self.add(Gate.h(qubit))

    def begin_group(self) -> None:
        self._open = len(self.gates)

    def end_group(self, block_row, block_col, x, y, magnitude, sign) -> None:
        span = (self._open, len(self.gates) - 1)
        self.groups.append(CoefficientGroup(block_row, block_col, x, y, magnitude, sign, span))
        self._open = None

    def build(self, source=None) -> Circuit:
        return Circuit(self.register, tuple(self.gates), tuple(self.groups), self.scheme, source)


# -- Validation --


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)


def _aux_triggers(circuit: Circuit, gates) -> list[Gate]:
    aux = circuit.register.aux_qubit
    return [g for g in gates if g.kind in (GateKind.NOT, GateKind.CNOT) and g.target == aux]


def validate(circuit: Circuit) -> ValidationReport:
    """Lists every invariant violation; an empty report means the circuit is well-formed."""
    report = ValidationReport()
    reg = circuit.register
    if circuit.scheme not in SCHEMES:
        report.add(f"unknown scheme {circuit.scheme!r}")
    if min(reg.coeff, reg.pos_x, reg.pos_y) < 0 or reg.coeff < 1:
        report.add("register counts must be non-negative with at least one coefficient qubit")
    if reg.aux not in (0, 1) or reg.sign not in (0, 1):
        report.add("aux and sign qubit counts must be 0 or 1")
    if circuit.scheme == "neqr" and reg.aux:
        report.add("neqr registers carry no auxiliary qubit")
    if circuit.scheme in RESET_SCHEMES + ("dctefrqi",) and not reg.aux:
        report.add(f"{circuit.scheme} registers need an auxiliary qubit")

    for i, gate in enumerate(circuit.gates):
        if not 0 <= gate.target < reg.total:
            report.add(f"gate {i}: target {gate.target} out of range")
        seen = set()
        for control in gate.controls:
            if not 0 <= control.qubit < reg.total:
                report.add(f"gate {i}: control {control.qubit} out of range")
            if control.qubit == gate.target:
                report.add(f"gate {i}: self-control on qubit {gate.target}")
            if control.qubit in seen:
                report.add(f"gate {i}: duplicate control on qubit {control.qubit}")
            seen.add(control.qubit)
        if gate.kind is GateKind.CNOT and not gate.controls:
            report.add(f"gate {i}: controlled NOT without controls")
        if gate.kind is not GateKind.CNOT and gate.controls:
            report.add(f"gate {i}: {gate.kind.value} gate cannot carry controls")

    _validate_groups(circuit, report)
    return report


def _validate_groups(circuit: Circuit, report: ValidationReport) -> None:
    if circuit.scheme == "raw":
        return
    expected = circuit.prep_length
    n = len(circuit.gates)
    for k, group in enumerate(circuit.groups):
        first, last = group.gate_span
        if first != expected:
            report.add(f"group {k}: starts at gate {first}, expected {expected}")
        if first < 0 or last < first or last >= n:
            report.add(f"group {k}: span {group.gate_span} out of range")
            return
        expected = last + 1
        if group.magnitude < 1:
            report.add(f"group {k}: magnitude must be at least 1")
        if group.sign not in (-1, 1):
            report.add(f"group {k}: sign must be -1 or +1")
        _validate_group_body(circuit, k, circuit.group_gates(group), report)
    if expected < n:
        report.add(f"gates {expected}..{n - 1} belong to no group")


def _validate_group_body(circuit: Circuit, k: int, gates, report: ValidationReport) -> None:
    reg = circuit.register
    if circuit.scheme == "neqr":
        for gate in gates:
            if gate.kind not in (GateKind.NOT, GateKind.CNOT) or gate.target not in reg.coeff_qubits:
                report.add(f"group {k}: neqr groups hold only NOTs onto coefficient qubits")
                return
        return

    triggers = _aux_triggers(circuit, gates)
    resets = [g for g in gates if g.kind is GateKind.RESET]
    if not triggers or gates[0] is not triggers[0]:
        report.add(f"group {k}: does not open with an auxiliary trigger")
    if circuit.scheme in RESET_SCHEMES:
        if not resets:
            report.add(f"group {k}: unterminated group (no reset)")
        elif len(resets) > 1 or gates[-1].kind is not GateKind.RESET or gates[-1].target != reg.aux_qubit:
            report.add(f"group {k}: group must close with a single reset on the auxiliary qubit")
        if len(triggers) != 1:
            report.add(f"group {k}: expected one auxiliary trigger, found {len(triggers)}")
    elif circuit.scheme == "dctefrqi":
        if len(triggers) < 2:
            report.add(f"group {k}: unterminated group (no closing trigger)")
        elif len(triggers) > 2 or gates[-1] != triggers[0]:
            report.add(f"group {k}: group must close with a copy of its opening trigger")
        if resets:
            report.add(f"group {k}: dctefrqi groups carry no reset")


# -- Serialization --


def _control_pairs(controls) -> list[list]:
    return [[c.qubit, c.polarity.value] for c in controls]


def to_dict(circuit: Circuit) -> dict:
    doc = {
        "scheme": circuit.scheme,
        "register": circuit.register.to_dict(),
        "gates": [
            {"kind": g.kind.value, "target": g.target, "controls": _control_pairs(g.controls)}
            for g in circuit.gates
        ],
        "groups": [
            {
                "block": [g.block_row, g.block_col],
                "x": g.x,
                "y": g.y,
                "mag": g.magnitude,
                "sign": g.sign,
                "span": list(g.gate_span),
            }
            for g in circuit.groups
        ],
    }
    if circuit.source is not None:
        width, height, q = circuit.source
        doc["source"] = {"width": width, "height": height, "q": q}
    return doc


def serialize(circuit: Circuit) -> str:
    """Canonical JSON: fixed key order, compact separators, plain integers."""
    return json.dumps(to_dict(circuit), separators=(",", ":"))


def deserialize(text: str) -> Circuit:
    try:
        doc = json.loads(text)
        reg = doc["register"]
        register = QubitRegister(
            coeff=int(reg["coeff"]),
            aux=int(reg["aux"]),
            pos_x=int(reg["pos_x"]),
            pos_y=int(reg["pos_y"]),
            sign=int(reg.get("sign", 0)),
        )
        gates = tuple(
            Gate(
                GateKind(g["kind"]),
                int(g["target"]),
                tuple(Control(int(q), Polarity(p)) for q, p in g.get("controls", [])),
            )
            for g in doc["gates"]
        )
        groups = tuple(
            CoefficientGroup(
                block_row=int(g["block"][0]),
                block_col=int(g["block"][1]),
                x=int(g["x"]),
                y=int(g["y"]),
                magnitude=int(g["mag"]),
                sign=int(g["sign"]),
                gate_span=(int(g["span"][0]), int(g["span"][1])),
            )
            for g in doc.get("groups", [])
        )
        source = doc.get("source")
        if source is not None:
            source = (int(source["width"]), int(source["height"]), int(source["q"]))
        return Circuit(register, gates, groups, str(doc.get("scheme", "raw")), source)
    except (ValueError, KeyError, TypeError, IndexError) as e:
        raise InvalidCircuit(f"circuit document does not parse: {e}")


# -- Visual export --

_QUIRK_SYMBOLS = {
    GateKind.HADAMARD: "H",
    GateKind.IDENTITY: 1,
    GateKind.NOT: "X",
    GateKind.CNOT: "X",
    GateKind.RESET: "|0⟩⟨0|",
}


def export_visual(circuit: Circuit) -> str:
    """
    Column-per-gate layout in the drag-and-drop simulator's JSON format.

    Anti-controls become "◦", controls "•", and Reset is shown with the
    post-selection symbol.
    """
    total = circuit.register.total
    limit = DEFAULT_CONFIGS["EXPORT_MAX_QUBITS"]
    if total > limit:
        raise TooManyQubits(f"register has {total} qubits, export supports at most {limit}")
    cols = []
    for gate in circuit.gates:
        col = [1] * total
        col[gate.target] = _QUIRK_SYMBOLS[gate.kind]
        for control in gate.controls:
            col[control.qubit] = "•" if control.polarity is Polarity.ONE else "◦"
        cols.append(col)
    return json.dumps({"cols": cols}, ensure_ascii=False, separators=(",", ":"))


def quirk_url(circuit: Circuit) -> str:
    return QUIRK_URL + quote(export_visual(circuit), safe="")
