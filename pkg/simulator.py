# simulator.py

"""
Dense statevector simulation for circuit-ir circuits of up to 20 qubits.

Qubit k is bit k of the basis-state index. Amplitudes are complex128 and
gates update a private working copy in place; returned StateVectors are
read-only.
"""

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from circuit import Circuit, GateKind, Polarity, validate
from config import DEFAULT_CONFIGS
from errors import InvalidCircuit, NondeterministicReset, RegisterMismatch, TooManyQubits

logger = logging.getLogger(__name__)

SQRT1_2 = 1 / math.sqrt(2)
SUPPORT_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    n: int
    # marginal P(qubit = 1) seen by each Reset just before it acted
    reset_probabilities: tuple[float, ...] = ()

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(self.probabilities().sum()))

    def basis_state(self) -> int | None:
        """Index of the single populated basis state, or None for a superposition."""
        populated = np.flatnonzero(self.probabilities() > SUPPORT_EPS)
        return int(populated[0]) if len(populated) == 1 else None


@dataclass(frozen=True)
class Distribution:
    probabilities: dict[int, float]

    def total(self) -> float:
        return float(sum(self.probabilities.values()))

    def tv_distance(self, other: "Distribution") -> float:
        keys = set(self.probabilities) | set(other.probabilities)
        return 0.5 * sum(
            abs(self.probabilities.get(k, 0.0) - other.probabilities.get(k, 0.0)) for k in keys
        )


@dataclass(frozen=True)
class EquivalenceReport:
    tv_distance: float
    max_amp_dev: float
    equivalent: bool
    subset: tuple[int, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "tv_distance": self.tv_distance,
            "max_amp_dev": self.max_amp_dev,
            "equivalent": self.equivalent,
            "subset": list(self.subset),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# -- Gate kernels (operate in place on a [2]*n view) --


def _view(state: np.ndarray, n: int) -> np.ndarray:
    return state.reshape([2] * n) if n else state.reshape(())


def _index(n: int, fixed: dict[int, int]) -> tuple:
    idx = [slice(None)] * n
    for qubit, value in fixed.items():
        idx[n - 1 - qubit] = value
    return tuple(idx)


def _control_values(gate) -> dict[int, int]:
    return {c.qubit: 1 if c.polarity is Polarity.ONE else 0 for c in gate.controls}


def _apply_not(t: np.ndarray, n: int, target: int, controls: dict[int, int]) -> None:
    i0 = _index(n, {**controls, target: 0})
    i1 = _index(n, {**controls, target: 1})
    low = t[i0].copy()
    t[i0] = t[i1]
    t[i1] = low


def _apply_hadamard(t: np.ndarray, n: int, target: int) -> None:
    i0 = _index(n, {target: 0})
    i1 = _index(n, {target: 1})
    a0 = t[i0].copy()
    a1 = t[i1].copy()
    t[i0] = (a0 + a1) * SQRT1_2
    t[i1] = (a0 - a1) * SQRT1_2


def _apply_reset(t: np.ndarray, n: int, target: int, rng) -> float:
    """
    Returns the pre-reset P(target = 1).

    The reset is deterministic when the target's value is fixed by the rest
    of the register: the |0> and |1> branches then occupy disjoint basis
    states and the |1> branch is folded onto |0> without interference.
    """
    i0 = _index(n, {target: 0})
    i1 = _index(n, {target: 1})
    zero, one = t[i0], t[i1]
    p1 = float(np.sum(np.abs(one) ** 2))
    if p1 <= SUPPORT_EPS:
        t[i1] = 0
        return p1

    overlap = (np.abs(zero) > SUPPORT_EPS) & (np.abs(one) > SUPPORT_EPS)
    if not overlap.any():
        t[i0] = zero + one
        t[i1] = 0
        return p1

    if rng is None:
        raise NondeterministicReset(
            f"qubit {target} is in superposition independent of the rest of the register (P(1)={p1:.6g})"
        )
    if rng.random() < p1:
        t[i0] = one / math.sqrt(p1)
    else:
        t[i0] = zero / math.sqrt(1.0 - p1)
    t[i1] = 0
    return p1


def run(circuit: Circuit, rng: np.random.Generator | None = None, initial: int = 0) -> StateVector:
    """
    Applies the circuit to |initial>. Passing rng enables sampling for
    resets that are not deterministic; encoder output never needs it.
    """
    n = circuit.register.total
    limit = DEFAULT_CONFIGS["SIM_MAX_QUBITS"]
    if n > limit:
        raise TooManyQubits(f"{n} qubits exceeds the simulator limit of {limit}")
    report = validate(circuit)
    if not report.ok:
        raise InvalidCircuit("; ".join(report.violations[:5]))

    state = np.zeros(1 << n, dtype=np.complex128)
    state[initial] = 1.0
    t = _view(state, n)
    resets = []
    for gate in circuit.gates:
        if gate.kind is GateKind.HADAMARD:
            _apply_hadamard(t, n, gate.target)
        elif gate.kind in (GateKind.NOT, GateKind.CNOT):
            _apply_not(t, n, gate.target, _control_values(gate))
        elif gate.kind is GateKind.RESET:
            resets.append(_apply_reset(t, n, gate.target, rng))
        # identity: nothing to do

    state.setflags(write=False)
    return StateVector(amplitudes=state, n=n, reset_probabilities=tuple(resets))


def measure_distribution(state: StateVector, qubit_subset, given: dict[int, int] | None = None) -> Distribution:
    """
    Exact marginal over qubit_subset; bit i of each key is the value of
    qubit_subset[i]. `given` conditions on fixed values of other qubits.
    """
    subset = list(qubit_subset)
    for q in subset + list(given or {}):
        if not 0 <= q < state.n:
            raise ValueError(f"qubit {q} is outside a {state.n}-qubit state")
    probs = state.probabilities()
    indices = np.arange(probs.size)
    if given:
        mask = np.ones(probs.size, dtype=bool)
        for qubit, value in given.items():
            mask &= ((indices >> qubit) & 1) == value
        probs = np.where(mask, probs, 0.0)
        total = probs.sum()
        if total <= SUPPORT_EPS:
            raise ValueError(f"condition {given} has zero probability")
        probs = probs / total

    keys = np.zeros(probs.size, dtype=np.int64)
    for i, qubit in enumerate(subset):
        keys |= ((indices >> qubit) & 1) << i
    marginal = np.bincount(keys, weights=probs, minlength=1 << len(subset))
    return Distribution({int(k): float(p) for k, p in enumerate(marginal) if p > SUPPORT_EPS})


def compare_circuits(a: Circuit, b: Circuit, subset=None) -> EquivalenceReport:
    if a.register != b.register:
        raise RegisterMismatch("circuits are defined on different registers")
    subset = tuple(range(a.register.total)) if subset is None else tuple(subset)
    state_a = run(a)
    state_b = run(b)
    tv = measure_distribution(state_a, subset).tv_distance(measure_distribution(state_b, subset))
    max_dev = float(np.max(np.abs(state_a.amplitudes - state_b.amplitudes)))
    tolerance = DEFAULT_CONFIGS["EQUIVALENCE_TOLERANCE"]
    return EquivalenceReport(tv_distance=tv, max_amp_dev=max_dev, equivalent=tv <= tolerance, subset=subset)
