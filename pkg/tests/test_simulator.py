import itertools

import numpy as np
import pytest

from circuit import Circuit, Control, Gate, GateKind, Polarity, QubitRegister
from encoders import WORKED_EXAMPLES, build_mtgsc, build_scmneqr
from errors import InvalidCircuit, NondeterministicReset, RegisterMismatch, TooManyQubits
from simulator import Distribution, compare_circuits, measure_distribution, run

# qubits 0, 1 position; 2 aux; 3 coefficient
SMALL = QubitRegister(coeff=1, aux=1, pos_x=1, pos_y=1)
POLARITIES = (Polarity.ZERO, Polarity.ONE)


def _raw(*gates, reg=SMALL):
    return Circuit(reg, tuple(gates))


def test_not_flips_basis_state():
    assert run(_raw(Gate.x(2))).basis_state() == 0b0100
    assert run(_raw(Gate.x(0), Gate.x(3))).basis_state() == 0b1001


@pytest.mark.parametrize("p0, p1", list(itertools.product(POLARITIES, repeat=2)))
@pytest.mark.parametrize("initial", range(4))
def test_two_control_truth_table(p0, p1, initial):
    gate = Gate(GateKind.CNOT, 3, (Control(0, p0), Control(1, p1)))
    fires = all((initial >> q & 1) == (p is Polarity.ONE) for q, p in ((0, p0), (1, p1)))
    expected = initial ^ 0b1000 if fires else initial
    assert run(_raw(gate), initial=initial).basis_state() == expected


@pytest.mark.parametrize("polarities", list(itertools.product(POLARITIES, repeat=3)))
@pytest.mark.parametrize("initial", range(8))
def test_three_control_truth_table(polarities, initial):
    controls = tuple(Control(q, p) for q, p in zip((0, 1, 2), polarities))
    gate = Gate(GateKind.CNOT, 3, controls)
    fires = all((initial >> c.qubit & 1) == (c.polarity is Polarity.ONE) for c in controls)
    expected = initial ^ 0b1000 if fires else initial
    assert run(_raw(gate), initial=initial).basis_state() == expected


def test_hadamard():
    state = run(_raw(Gate.h(0)))
    assert measure_distribution(state, [0]).probabilities == pytest.approx({0: 0.5, 1: 0.5})
    assert run(_raw(Gate.h(0), Gate.h(0))).basis_state() == 0


def test_identity_does_nothing():
    assert run(_raw(Gate.x(1), Gate.i(1))).basis_state() == 0b10


def test_reset_on_classical_qubit():
    state = run(_raw(Gate.x(2), Gate.reset(2)))
    assert state.basis_state() == 0
    assert state.reset_probabilities == (pytest.approx(1.0),)


def test_reset_of_position_determined_aux():
    circuit = _raw(Gate.h(0), Gate.mcx(2, [(0, "one")]), Gate.mcx(3, [(2, "one")]), Gate.reset(2))
    state = run(circuit)
    assert state.norm() == pytest.approx(1.0)
    assert measure_distribution(state, [2]).probabilities == pytest.approx({0: 1.0})
    # the coefficient qubit still follows the position
    assert measure_distribution(state, [0, 3]).probabilities == pytest.approx({0b00: 0.5, 0b11: 0.5})


def test_reset_of_free_superposition():
    circuit = _raw(Gate.h(2), Gate.reset(2))
    with pytest.raises(NondeterministicReset):
        run(circuit)
    state = run(circuit, rng=np.random.default_rng(0))
    assert state.norm() == pytest.approx(1.0)
    assert state.basis_state() == 0


def test_norm_preserved_on_random_circuits(rng):
    for _ in range(100):
        n = int(rng.integers(3, 13))
        reg = QubitRegister(coeff=n - 2, aux=0, pos_x=1, pos_y=1)
        gates = []
        for _ in range(int(rng.integers(1, 30))):
            kind = rng.integers(3)
            target = int(rng.integers(n))
            if kind == 0:
                gates.append(Gate.h(target))
            elif kind == 1:
                gates.append(Gate.x(target))
            else:
                others = [q for q in range(n) if q != target]
                picked = rng.choice(others, size=int(rng.integers(1, min(4, n - 1) + 1)), replace=False)
                gates.append(Gate.mcx(target, [(int(q), POLARITIES[int(rng.integers(2))]) for q in picked]))
        state = run(Circuit(reg, tuple(gates)))
        assert abs(state.norm() - 1.0) < 1e-9


def test_measure_distribution_key_order():
    state = run(_raw(Gate.x(3)))
    assert measure_distribution(state, [3, 0]).probabilities == {1: 1.0}
    assert measure_distribution(state, [0, 3]).probabilities == {2: 1.0}
    with pytest.raises(ValueError):
        measure_distribution(state, [9])


def test_encoded_block_reads_back_under_condition():
    circuit = build_scmneqr(WORKED_EXAMPLES["example_62"])
    state = run(circuit)
    reg = circuit.register
    position = {0: 1, 1: 1, 2: 0, 3: 0, 4: 1, 5: 0}  # x=3, y=2
    assert measure_distribution(state, reg.coeff_qubits, given=position).probabilities == pytest.approx({62: 1.0})
    assert state.reset_probabilities == (pytest.approx(1 / 64),)


def test_modified_controls_fire_on_superset_positions():
    coeffs = WORKED_EXAMPLES["example_62"]
    report = compare_circuits(build_scmneqr(coeffs), build_mtgsc(coeffs))
    assert report.tv_distance == pytest.approx(7 / 64)
    assert not report.equivalent
    coeffs = WORKED_EXAMPLES["corner_77"]
    report = compare_circuits(build_scmneqr(coeffs), build_mtgsc(coeffs))
    assert report.tv_distance == 0
    assert report.equivalent


def test_compare_on_subset():
    coeffs = WORKED_EXAMPLES["example_62"]
    reg = build_mtgsc(coeffs).register
    report = compare_circuits(build_scmneqr(coeffs), build_mtgsc(coeffs), subset=reg.position_qubits)
    assert report.equivalent


def test_compare_requires_same_register():
    a = build_mtgsc(WORKED_EXAMPLES["example_62"])
    b = build_mtgsc(WORKED_EXAMPLES["efrqi"])
    with pytest.raises(RegisterMismatch):
        compare_circuits(a, b)


def test_limits_and_validation():
    with pytest.raises(TooManyQubits):
        run(Circuit(QubitRegister(coeff=12, pos_x=4, pos_y=4)))
    with pytest.raises(InvalidCircuit):
        run(_raw(Gate(GateKind.CNOT, 3)))


def test_tv_distance():
    a = Distribution({0: 0.5, 1: 0.5})
    b = Distribution({0: 1.0})
    assert a.tv_distance(b) == pytest.approx(0.5)
    assert a.total() == pytest.approx(1.0)


@pytest.mark.parametrize("builder", [build_mtgsc, build_scmneqr])
def test_runs_are_repeatable(builder):
    circuit = builder(WORKED_EXAMPLES["scmfrqi"])
    first, second = run(circuit), run(circuit)
    assert np.array_equal(first.amplitudes, second.amplitudes)
    assert first.reset_probabilities == second.reset_probabilities


def test_corner_block_gates_match_one_for_one():
    coeffs = WORKED_EXAMPLES["corner_77"]
    full, modified = build_scmneqr(coeffs), build_mtgsc(coeffs)
    assert modified.register == full.register
    assert modified.gates == full.gates
    assert modified.groups == full.groups
