import math

import numpy as np
import pytest

from pulsevqe import simulator as sim
from pulsevqe.qubitop import (
    MeasurementGroup,
    PauliSum,
    exact_ground,
    group_qubitwise,
    pauli_expectation,
)


def _embed_two_qubit(u, qubits, n):
    """Independent Kronecker-embedding oracle: entry-by-entry construction of
    the full 2^n unitary for a 2-qubit gate on `qubits` (qubits[0] = LSB of
    the small index)."""
    q0, q1 = qubits
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=complex)
    rest_mask = (dim - 1) ^ (1 << q0) ^ (1 << q1)
    for i in range(dim):
        for j in range(dim):
            if (i & rest_mask) != (j & rest_mask):
                continue
            row = ((i >> q1) & 1) * 2 + ((i >> q0) & 1)
            col = ((j >> q1) & 1) * 2 + ((j >> q0) & 1)
            full[i, j] = u[row, col]
    return full


def _random_unitary(dim, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ---------------------------------------------------------------------------
# apply()

def test_apply_x_flips_qubit():
    state = sim.zero_state(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    sim.apply(state, x, (1,))
    expected = np.zeros(4, dtype=complex)
    expected[2] = 1.0  # qubit 1 set
    assert np.allclose(state, expected)


def test_apply_inverse_restores_state():
    rng = np.random.default_rng(4)
    state = rng.normal(size=8) + 1j * rng.normal(size=8)
    state /= np.linalg.norm(state)
    u = _random_unitary(4, 5)
    work = state.copy()
    sim.apply(work, u, (0, 2))
    assert abs(np.linalg.norm(work) - 1.0) < 1e-10
    sim.apply(work, u.conj().T, (0, 2))
    assert np.abs(work - state).max() < 1e-10


@pytest.mark.parametrize("qubits", [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2)])
def test_apply_matches_kronecker_oracle(qubits):
    rng = np.random.default_rng(hash(qubits) % 2**31)
    state = rng.normal(size=8) + 1j * rng.normal(size=8)
    state /= np.linalg.norm(state)
    u = _random_unitary(4, sum(qubits))
    work = state.copy()
    sim.apply(work, u, qubits)
    assert np.abs(work - _embed_two_qubit(u, qubits, 3) @ state).max() < 1e-12


def test_apply_validates_arguments():
    state = sim.zero_state(2)
    u = np.eye(4, dtype=complex)
    with pytest.raises(ValueError):
        sim.apply(state, u, (0, 0))
    with pytest.raises(ValueError):
        sim.apply(state, u, (0, 2))
    with pytest.raises(ValueError):
        sim.apply(state, np.eye(2, dtype=complex), (0, 1))


def test_bitstring_rendering_qubit0_leftmost():
    assert sim.bitstring(1, 3) == "100"
    assert sim.bitstring(4, 3) == "001"
    assert sim.bitstring_index("100") == 1
    assert sim.bitstring_index("011") == 6


# ---------------------------------------------------------------------------
# Sampling.

def test_sample_z_basis_deterministic_state():
    state = sim.zero_state(2)
    group = MeasurementGroup(("ZZ",), "ZZ")
    counts = sim.sample_group(state, group, 500, rng=sim.make_rng(1))
    assert counts == {"00": 500}


def test_sample_x_basis_plus_state():
    plus = np.array([1, 1, 1, 1], dtype=complex) / 2.0
    group = MeasurementGroup(("XX",), "XX")
    counts = sim.sample_group(plus, group, 300, rng=sim.make_rng(2))
    assert counts == {"00": 300}


def test_sample_y_basis_eigenstate():
    state = np.array([1.0, 1j], dtype=complex) / math.sqrt(2.0)  # +1 of Y
    group = MeasurementGroup(("Y",), "Y")
    counts = sim.sample_group(state, group, 200, rng=sim.make_rng(3))
    assert counts == {"0": 200}


def test_sampling_is_seed_deterministic():
    rng_state = np.random.default_rng(8)
    state = rng_state.normal(size=4) + 1j * rng_state.normal(size=4)
    state /= np.linalg.norm(state)
    group = MeasurementGroup(("XZ",), "XZ")
    a = sim.sample_group(state, group, 4096, rng=sim.make_rng(42, 1, 2))
    b = sim.sample_group(state, group, 4096, rng=sim.make_rng(42, 1, 2))
    c = sim.sample_group(state, group, 4096, rng=sim.make_rng(42, 1, 3))
    assert a == b
    assert a != c


def test_readout_injection_binomial():
    state = sim.zero_state(1)
    rm = sim.ReadoutModel.symmetric(1, 0.05)
    group = MeasurementGroup(("Z",), "Z")
    shots = 100_000
    counts = sim.sample_group(state, group, shots, rm, sim.make_rng(7))
    frequency = counts.get("1", 0) / shots
    sigma = math.sqrt(0.05 * 0.95 / shots)
    assert abs(frequency - 0.05) < 3 * sigma


# ---------------------------------------------------------------------------
# Readout model and mitigation.

def test_readout_model_validation():
    with pytest.raises(ValueError):
        sim.ReadoutModel((np.array([[0.9, 0.2], [0.2, 0.8]]),))  # columns not 1
    with pytest.raises(ValueError):
        sim.ReadoutModel((np.array([[1.5, -0.5], [-0.5, 1.5]]),))


def test_mitigation_identity_rm_is_noop():
    rm = sim.ReadoutModel.symmetric(2, 0.0)
    counts = {"00": 70, "11": 30}
    quasi = sim.mitigate_tensored(counts, rm)
    assert quasi[0] == pytest.approx(0.7)
    assert quasi[3] == pytest.approx(0.3)


def test_mitigation_inverts_injection_exactly():
    rng = np.random.default_rng(11)
    probs = rng.dirichlet(np.ones(8))
    rm = sim.ReadoutModel.symmetric(3, [0.02, 0.04, 0.05])
    recovered = rm.inverse_map(rm.apply_to_probs(probs))
    assert np.abs(recovered - probs).max() < 1e-12
    assert recovered.sum() == pytest.approx(1.0, abs=1e-9)


def test_mitigation_rejects_singular_confusion():
    rm = sim.ReadoutModel.symmetric(1, 0.5)
    with pytest.raises(ValueError):
        sim.mitigate_tensored({"0": 10}, rm)


def test_mitigated_ghz_z_expectations():
    n = 3
    state = np.zeros(8, dtype=complex)
    state[0] = state[7] = 1 / math.sqrt(2.0)
    rm = sim.ReadoutModel.symmetric(n, 0.03)
    group = MeasurementGroup(("ZZZ", "ZZI", "IZZ"), "ZZZ")
    shots = 100_000
    counts = sim.sample_group(state, group, shots, rm, sim.make_rng(5))
    quasi = sim.mitigate_tensored(counts, rm)
    raw = sim.counts_to_vector(counts, n) / shots
    for label, exact in [("ZZZ", 0.0), ("ZZI", 1.0), ("IZZ", 1.0)]:
        support = sum(1 << q for q, ch in enumerate(label) if ch != "I")
        signs = 1.0 - 2.0 * (np.bitwise_count(np.arange(8, dtype=np.uint64)
                                              & np.uint64(support)) & 1)
        estimate = float(quasi @ signs)
        # mitigated Z-string estimator = kappa * raw parity, kappa over support
        kappa = (1.0 / (1.0 - 2 * 0.03)) ** bin(support).count("1")
        p_raw = float(raw @ signs)
        sigma = kappa * math.sqrt(max(1 - p_raw**2, 1.0 / shots) / shots)
        assert abs(estimate - exact) < 3 * sigma, label


def test_counts_csv():
    text = sim.counts_to_csv({"01": 3, "00": 5})
    assert text.splitlines() == ["bitstring,count", "00,5", "01,3"]


# ---------------------------------------------------------------------------
# Energy estimation.

def test_estimate_energy_exact_matches_pauli_expectation(h2_problem):
    reduced = h2_problem["reduced"]
    _, ground = exact_ground(reduced)
    groups = group_qubitwise(reduced)
    energy, err = sim.estimate_energy(ground, reduced, groups, "exact")
    assert err == 0.0
    assert energy == pytest.approx(pauli_expectation(ground, reduced), abs=1e-12)
    e0, _ = exact_ground(reduced)
    assert energy == pytest.approx(e0, abs=1e-10)


def test_estimate_energy_exact_invariant_under_regrouping(h2_problem):
    reduced = h2_problem["reduced"]
    _, ground = exact_ground(reduced)
    groups = group_qubitwise(reduced)
    singles = [MeasurementGroup((l,), l.replace("I", "Z"))
               for l in reduced.non_identity_terms()]
    a, _ = sim.estimate_energy(ground, reduced, groups, "exact")
    b, _ = sim.estimate_energy(ground, reduced, singles, "exact")
    assert a == pytest.approx(b, abs=1e-12)


def test_groupwise_parity_sums_equal_expectation_exactly(h2_problem):
    # exact probabilities, no sampling: group-wise parity sums + identity
    # constant reproduce the statevector expectation
    reduced = h2_problem["reduced"]
    rng = np.random.default_rng(17)
    state = rng.normal(size=4) + 1j * rng.normal(size=4)
    state /= np.linalg.norm(state)
    total = reduced.identity_coefficient
    for group in group_qubitwise(reduced):
        probs = sim.group_probabilities(state, group)
        for label in group.labels:
            support = sum(1 << q for q, ch in enumerate(label) if ch != "I")
            signs = 1.0 - 2.0 * (np.bitwise_count(np.arange(4, dtype=np.uint64)
                                                  & np.uint64(support)) & 1)
            total += reduced.terms[label] * float(probs @ signs)
    assert total == pytest.approx(pauli_expectation(state, reduced), abs=1e-12)


def test_estimate_energy_shots_within_four_sigma(h2_problem):
    reduced = h2_problem["reduced"]
    e0, ground = exact_ground(reduced)
    groups = group_qubitwise(reduced)
    energy, err = sim.estimate_energy(ground, reduced, groups, 4096, seed=12)
    assert err > 0
    assert abs(energy - e0) < 4 * err


def test_estimate_energy_checks_group_coverage(h2_problem):
    reduced = h2_problem["reduced"]
    _, ground = exact_ground(reduced)
    partial = [MeasurementGroup(("XX",), "XX")]
    with pytest.raises(ValueError):
        sim.estimate_energy(ground, reduced, partial, 128)


def test_estimate_energy_mitigated_recovers_noisy_estimate(h2_problem):
    reduced = h2_problem["reduced"]
    e0, ground = exact_ground(reduced)
    groups = group_qubitwise(reduced)
    rm = sim.ReadoutModel.symmetric(2, 0.04)
    noisy, _ = sim.estimate_energy(ground, reduced, groups, 40_000, rm, seed=3)
    fixed, err = sim.estimate_energy(ground, reduced, groups, 40_000, rm,
                                     seed=3, mitigate=True)
    assert abs(noisy - e0) > 0.01  # injection visibly biases
    assert abs(fixed - e0) < 4 * max(err, 1e-3)
