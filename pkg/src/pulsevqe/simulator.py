"""Statevector simulation, measurement-group sampling, readout-error
injection, and tensored readout-error mitigation.

Bitstrings are rendered with qubit 0 as the leftmost character, matching the
Pauli-label convention; index i of a probability vector carries qubit q in
bit (i >> q) & 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qubitop import MeasurementGroup, PauliSum, pauli_expectation

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)
_BASIS_ROTATION = {"I": None, "Z": None, "X": _H, "Y": _H @ _SDG}


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Seeded counter-based generator (Philox); sub-streams are derived from
    (seed, *stream) so shot noise is reproducible per group and iteration."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, *stream))))


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(1 << n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def n_qubits_of(state: np.ndarray) -> int:
    n = int(round(math.log2(state.size)))
    if 1 << n != state.size:
        raise ValueError(f"state length {state.size} is not a power of two")
    return n


def apply(state: np.ndarray, unitary: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    """Apply a 1- or 2-qubit unitary in place; ``qubits[0]`` is the least
    significant bit of the unitary's index."""
    n = n_qubits_of(state)
    k = len(qubits)
    if unitary.shape != (1 << k, 1 << k):
        raise ValueError(f"unitary shape {unitary.shape} does not match {k} qubits")
    if len(set(qubits)) != k:
        raise ValueError(f"duplicate qubit indices {qubits}")
    if any(not 0 <= q < n for q in qubits):
        raise ValueError(f"qubit index out of range in {qubits}")
    psi = state.reshape((2,) * n)
    u = unitary.reshape((2,) * (2 * k))
    in_axes = [2 * k - 1 - j for j in range(k)]
    psi_axes = [n - 1 - q for q in qubits]
    out = np.tensordot(u, psi, axes=(in_axes, psi_axes))
    # tensordot leaves the row axes first, ordered qubits[k-1] .. qubits[0]
    out = np.moveaxis(out, range(k), [n - 1 - q for q in reversed(qubits)])
    state[...] = out.reshape(state.shape)
    return state


def bitstring(index: int, n_qubits: int) -> str:
    return "".join("1" if (index >> q) & 1 else "0" for q in range(n_qubits))


def bitstring_index(bits: str) -> int:
    return sum(1 << q for q, b in enumerate(bits) if b == "1")


@dataclass(frozen=True)
class ReadoutModel:
    """Per-qubit confusion matrices [[p(0|0), p(0|1)], [p(1|0), p(1|1)]]
    (column = prepared state, row = measured)."""

    confusions: tuple

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.confusions)
        for m in mats:
            if m.shape != (2, 2) or np.any(m < -1e-12) or np.any(m > 1 + 1e-12):
                raise ValueError("confusion entries must lie in [0, 1]")
            if not np.allclose(m.sum(axis=0), 1.0, atol=1e-9):
                raise ValueError("confusion columns must sum to 1")
        object.__setattr__(self, "confusions", mats)

    @property
    def n_qubits(self) -> int:
        return len(self.confusions)

    @staticmethod
    def symmetric(n_qubits: int, eps) -> "ReadoutModel":
        """Equal flip probability eps per qubit (scalar or per-qubit list)."""
        eps = np.broadcast_to(np.asarray(eps, dtype=float), (n_qubits,))
        return ReadoutModel(tuple(
            np.array([[1 - e, e], [e, 1 - e]]) for e in eps
        ))

    def _apply_matrices(self, probs: np.ndarray, mats) -> np.ndarray:
        n = self.n_qubits
        p = np.asarray(probs, dtype=float).reshape((2,) * n)
        for q, m in enumerate(mats):
            axis = n - 1 - q
            p = np.moveaxis(np.tensordot(m, p, axes=([1], [axis])), 0, axis)
        return p.reshape(-1)

    def apply_to_probs(self, probs: np.ndarray) -> np.ndarray:
        """Forward (noise-injecting) tensored confusion map."""
        return self._apply_matrices(probs, self.confusions)

    def inverse_map(self, probs: np.ndarray) -> np.ndarray:
        """Tensored inverse map; raises on singular confusion matrices."""
        inverses = []
        for m in self.confusions:
            if abs(np.linalg.det(m)) < 1e-12:
                raise ValueError("singular confusion matrix")
            inverses.append(np.linalg.inv(m))
        return self._apply_matrices(probs, inverses)


def group_probabilities(state: np.ndarray, group: MeasurementGroup) -> np.ndarray:
    """Measurement-basis probabilities after the group's single-qubit
    pre-rotations (H for X, S-dagger then H for Y)."""
    work = np.array(state, copy=True)
    for q, letter in enumerate(group.basis):
        rot = _BASIS_ROTATION[letter]
        if rot is not None:
            apply(work, rot, (q,))
    probs = np.abs(work) ** 2
    return probs / probs.sum()


def sample_group(
    state: np.ndarray,
    group: MeasurementGroup,
    shots: int,
    rm: ReadoutModel | None = None,
    rng: np.random.Generator | int = 0,
) -> dict[str, int]:
    """Multinomial shot sampling in the group's measurement basis.

    Readout noise, when present, is applied to the probability vector before
    sampling (statistically identical to flipping sampled bits and cheaper).
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if isinstance(rng, (int, np.integer)):
        rng = make_rng(int(rng))
    probs = group_probabilities(state, group)
    if rm is not None:
        probs = rm.apply_to_probs(probs)
    n = n_qubits_of(state)
    draws = rng.multinomial(shots, probs)
    return {bitstring(i, n): int(c) for i, c in enumerate(draws) if c > 0}


def counts_to_vector(counts: dict[str, int], n_qubits: int) -> np.ndarray:
    vec = np.zeros(1 << n_qubits)
    for bits, c in counts.items():
        vec[bitstring_index(bits)] = c
    return vec


def counts_to_csv(counts: dict[str, int]) -> str:
    lines = ["bitstring,count"]
    for bits in sorted(counts):
        lines.append(f"{bits},{counts[bits]}")
    return "\n".join(lines) + "\n"


def mitigate_tensored(counts: dict[str, int], rm: ReadoutModel) -> np.ndarray:
    """Quasi-probability vector from inverting the tensored confusion map.

    Small negative entries are kept as-is (clipping would bias expectation
    values); the vector sums to one within 1e-9.
    """
    n = rm.n_qubits
    vec = counts_to_vector(counts, n)
    total = vec.sum()
    if total <= 0:
        raise ValueError("empty counts")
    return rm.inverse_map(vec / total)


def _parity_signs(label: str) -> np.ndarray:
    """(-1)^(bit parity on the term's support) for every basis index."""
    support = sum(1 << q for q, ch in enumerate(label) if ch != "I")
    idx = np.arange(1 << len(label), dtype=np.uint64)
    return 1.0 - 2.0 * (np.bitwise_count(idx & np.uint64(support)) & 1)


def estimate_energy(
    state: np.ndarray,
    hamiltonian: PauliSum,
    groups: list[MeasurementGroup],
    shots: int | str,
    rm: ReadoutModel | None = None,
    seed: int = 0,
    iteration: int = 0,
    mitigate: bool = False,
) -> tuple[float, float]:
    """Energy and standard error from group-wise sampled parities.

    ``shots="exact"`` bypasses sampling and returns the statevector
    expectation with zero error.  With a ReadoutModel present the noise is
    injected before sampling; ``mitigate=True`` additionally applies the
    tensored inverse to each group's counts before the parity sums.
    """
    if shots == "exact" or shots is None:
        return pauli_expectation(state, hamiltonian), 0.0
    covered = set()
    for g in groups:
        covered.update(g.labels)
    missing = set(hamiltonian.non_identity_terms()) - covered
    if missing:
        raise ValueError(f"groups do not cover terms: {sorted(missing)[:4]}...")

    energy = hamiltonian.identity_coefficient
    variance = 0.0
    terms = hamiltonian.terms
    for gi, group in enumerate(groups):
        counts = sample_group(state, group, int(shots), rm,
                              make_rng(seed, gi, iteration))
        if mitigate:
            if rm is None:
                raise ValueError("mitigate=True requires a ReadoutModel")
            weights = mitigate_tensored(counts, rm)
        else:
            weights = counts_to_vector(counts, hamiltonian.n_qubits) / float(shots)
        group_values = np.zeros(weights.size)
        for label in group.labels:
            if label in terms:
                group_values += terms[label] * _parity_signs(label)
        mean = float(weights @ group_values)
        second = float(weights @ group_values**2)
        energy += mean
        variance += max(second - mean * mean, 0.0) / float(shots)
    return energy, math.sqrt(variance)
