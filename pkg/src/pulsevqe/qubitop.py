"""Pauli-operator algebra: fermion-to-qubit mappings, qubit-wise commuting
measurement groups, dense matrices, and exact diagonalization.

Conventions, used everywhere and asserted in tests:

* a Pauli label is a string over {I, X, Y, Z} where ``label[q]`` is the
  letter acting on qubit ``q`` (leftmost character = qubit 0);
* qubit 0 is the least-significant tensor factor of every dense matrix and
  statevector index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .chem import MoHamiltonian

PRUNE_THRESHOLD = 1e-12

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class MappingError(RuntimeError):
    """Internal consistency failure in a fermion-to-qubit mapping."""


@dataclass(frozen=True)
class PauliSum:
    """Real-weighted sum of Pauli strings (a Hermitian observable)."""

    n_qubits: int
    terms: dict[str, float]

    @staticmethod
    def from_terms(
        n_qubits: int, terms: dict[str, float], prune: float = PRUNE_THRESHOLD
    ) -> "PauliSum":
        clean: dict[str, float] = {}
        for label, coeff in terms.items():
            if len(label) != n_qubits or any(ch not in "IXYZ" for ch in label):
                raise ValueError(f"bad Pauli label {label!r} for {n_qubits} qubits")
            coeff = float(coeff)
            if abs(coeff) >= prune:
                clean[label] = clean.get(label, 0.0) + coeff
        return PauliSum(n_qubits, clean)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def identity_coefficient(self) -> float:
        return self.terms.get("I" * self.n_qubits, 0.0)

    def non_identity_terms(self) -> dict[str, float]:
        identity = "I" * self.n_qubits
        return {l: c for l, c in self.terms.items() if l != identity}

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        merged = dict(self.terms)
        for label, coeff in other.terms.items():
            merged[label] = merged.get(label, 0.0) + coeff
        return PauliSum.from_terms(self.n_qubits, merged)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum.from_terms(
            self.n_qubits, {l: scalar * c for l, c in self.terms.items()}
        )

    __rmul__ = __mul__

    def shifted(self, constant: float) -> "PauliSum":
        """Add a multiple of the identity."""
        identity = "I" * self.n_qubits
        merged = dict(self.terms)
        merged[identity] = merged.get(identity, 0.0) + constant
        return PauliSum.from_terms(self.n_qubits, merged)


def dumps_pauli_sum(p: PauliSum) -> str:
    """One `LABEL coefficient` line per term under an `n_qubits = N` header."""
    lines = [f"n_qubits = {p.n_qubits}"]
    for label in sorted(p.terms):
        lines.append(f"{label} {p.terms[label]:.17e}")
    return "\n".join(lines) + "\n"


def loads_pauli_sum(text: str) -> PauliSum:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or "=" not in lines[0]:
        raise ValueError("missing 'n_qubits = N' header")
    key, value = (part.strip() for part in lines[0].split("=", 1))
    if key.lower() != "n_qubits":
        raise ValueError("missing 'n_qubits = N' header")
    n = int(value)
    terms: dict[str, float] = {}
    for line in lines[1:]:
        label, coeff = line.split()
        terms[label] = float(coeff)
    return PauliSum.from_terms(n, terms, prune=0.0)


# ---------------------------------------------------------------------------
# Symplectic Pauli algebra on (x, z) bit masks.  W(x, z) denotes the product
# of X^x_q Z^z_q per qubit, so the qubit letter is I/X/Z/XZ with XZ = -iY.

def _label_to_masks(label: str) -> tuple[int, int, int]:
    """(x_mask, z_mask, n_y) for a Pauli label."""
    x = z = ny = 0
    for q, ch in enumerate(label):
        if ch == "X":
            x |= 1 << q
        elif ch == "Z":
            z |= 1 << q
        elif ch == "Y":
            x |= 1 << q
            z |= 1 << q
            ny += 1
    return x, z, ny


def _masks_to_label(x: int, z: int, n: int) -> str:
    letters = []
    for q in range(n):
        xb, zb = (x >> q) & 1, (z >> q) & 1
        letters.append("IXZY"[xb + 2 * zb])
    return "".join(letters)


def _ladder_jw(p: int, n: int, dagger: bool):
    """Jordan-Wigner ladder operator as [(coeff, (x, z)), ...]."""
    chain = (1 << p) - 1
    x = 1 << p
    sign = 1.0 if dagger else -1.0
    return [(0.5, (x, chain)), (0.5 * sign, (x, chain | (1 << p)))]


def _ladder_parity(p: int, n: int, dagger: bool):
    """Parity-basis ladder operator: X chain above p, (Z_{p-1} X_p -+ i Y_p)/2."""
    x = (((1 << n) - 1) & ~((1 << (p + 1)) - 1)) | (1 << p)
    z_prev = (1 << (p - 1)) if p > 0 else 0
    sign = 1.0 if dagger else -1.0
    return [(0.5, (x, z_prev)), (0.5 * sign, (x, 1 << p))]


def _accumulate_product(acc: dict, prefactor: float, factors) -> None:
    """Accumulate prefactor * prod(factors) into the (x, z) -> coeff map."""
    for combo in itertools.product(*factors):
        coeff = prefactor
        x = z = 0
        for cf, (xf, zf) in combo:
            if (z & xf).bit_count() & 1:
                coeff = -coeff
            coeff *= cf
            x ^= xf
            z ^= zf
        key = (x, z)
        acc[key] = acc.get(key, 0.0) + coeff


def _map_hamiltonian(mo: MoHamiltonian, ladder, prune: float) -> PauliSum:
    n = mo.n_spin_orbitals
    h, g = mo.one_body, mo.two_body
    acc: dict[tuple[int, int], complex] = {}
    if mo.constant != 0.0:
        acc[(0, 0)] = complex(mo.constant)

    raising = [ladder(p, n, True) for p in range(n)]
    lowering = [ladder(p, n, False) for p in range(n)]

    for p in range(n):
        for q in range(n):
            if abs(h[p, q]) > 1e-14:
                _accumulate_product(acc, h[p, q], (raising[p], lowering[q]))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    coeff = g[p, q, r, s]
                    if abs(coeff) > 1e-14:
                        _accumulate_product(
                            acc,
                            0.5 * coeff,
                            (raising[p], raising[q], lowering[s], lowering[r]),
                        )

    terms: dict[str, float] = {}
    for (x, z), coeff in acc.items():
        coeff = coeff * (-1j) ** (x & z).bit_count()
        if abs(coeff.imag) > 1e-10:
            raise MappingError(f"non-Hermitian coefficient {coeff} for masks {(x, z)}")
        if abs(coeff.real) >= prune:
            terms[_masks_to_label(x, z, n)] = coeff.real
    return PauliSum(n, terms)


def jordan_wigner(mo: MoHamiltonian, prune: float = PRUNE_THRESHOLD) -> PauliSum:
    """Standard Jordan-Wigner image of the second-quantized Hamiltonian."""
    return _map_hamiltonian(mo, _ladder_jw, prune)


def parity_map(mo: MoHamiltonian, prune: float = PRUNE_THRESHOLD) -> PauliSum:
    """Parity-basis image (qubit j stores the occupation parity of modes 0..j)."""
    return _map_hamiltonian(mo, _ladder_parity, prune)


def _taper(p: PauliSum, sector: dict[int, int]) -> PauliSum:
    """Replace Z at the given qubit positions by +-1 eigenvalues and drop them."""
    kept = [q for q in range(p.n_qubits) if q not in sector]
    terms: dict[str, float] = {}
    for label, coeff in p.terms.items():
        for q, eigenvalue in sector.items():
            letter = label[q]
            if letter in ("X", "Y"):
                raise MappingError(f"qubit {q} is not a Z2-symmetry axis in {label}")
            if letter == "Z":
                coeff *= eigenvalue
        new_label = "".join(label[q] for q in kept)
        terms[new_label] = terms.get(new_label, 0.0) + coeff
    return PauliSum.from_terms(len(kept), terms)


def parity_map_reduce_h2(mo: MoHamiltonian, prune: float = PRUNE_THRESHOLD) -> PauliSum:
    """Parity-map the 4-spin-orbital singlet Hamiltonian and remove the two
    parity-accumulator qubits (positions 1 and 3 under block spin order).

    The symmetry sector is selected so the reduced ground energy reproduces
    the 4-qubit ground energy; failing that, :class:`MappingError` is raised.
    """
    if mo.n_spin_orbitals != 4 or mo.n_alpha != 1 or mo.n_beta != 1:
        raise ValueError("two-qubit reduction applies to 4 spin orbitals and 2 electrons")
    full = parity_map(mo, prune)
    e_full, _ = exact_ground(jordan_wigner(mo, prune))
    for s1, s3 in itertools.product((1, -1), repeat=2):
        reduced = _taper(full, {1: s1, 3: s3})
        e_reduced, _ = exact_ground(reduced)
        if abs(e_reduced - e_full) < 1e-9:
            return reduced
    raise MappingError("no symmetry sector reproduces the 4-qubit ground energy")


# ---------------------------------------------------------------------------
# Measurement grouping.

@dataclass(frozen=True)
class MeasurementGroup:
    """Pauli terms that commute qubit-wise, measurable after one layer of
    single-qubit basis rotations given by ``basis``."""

    labels: tuple[str, ...]
    basis: str

    def __post_init__(self):
        for label in self.labels:
            for ch, b in zip(label, self.basis):
                if ch != "I" and ch != b:
                    raise ValueError(f"term {label} incompatible with basis {self.basis}")


def _qubitwise_commute(a: str, b: str) -> bool:
    return all(ca == "I" or cb == "I" or ca == cb for ca, cb in zip(a, b))


def group_qubitwise(p: PauliSum) -> list[MeasurementGroup]:
    """Greedy largest-degree-first coloring of the qubit-wise conflict graph.

    The identity term is excluded (it is a constant offset).  Ordering ties
    break by descending |coefficient|, then lexicographic label, which makes
    the group count deterministic.
    """
    if not p.terms:
        raise ValueError("cannot group an empty PauliSum")
    work = p.non_identity_terms()
    labels = sorted(work, key=lambda l: (-abs(work[l]), l))
    m = len(labels)
    if m == 0:
        return []
    conflict = [
        [not _qubitwise_commute(labels[i], labels[j]) for j in range(m)]
        for i in range(m)
    ]
    degree = [sum(row) for row in conflict]
    order = sorted(range(m), key=lambda i: -degree[i])

    color = [-1] * m
    n_colors = 0
    for i in order:
        used = {color[j] for j in range(m) if conflict[i][j] and color[j] >= 0}
        c = 0
        while c in used:
            c += 1
        color[i] = c
        n_colors = max(n_colors, c + 1)

    groups = []
    for c in range(n_colors):
        members = tuple(labels[i] for i in range(m) if color[i] == c)
        basis = []
        for q in range(p.n_qubits):
            letter = "I"
            for label in members:
                if label[q] != "I":
                    letter = label[q]
                    break
            basis.append(letter)
        groups.append(MeasurementGroup(members, "".join(basis)))
    return groups


# ---------------------------------------------------------------------------
# Dense matrices and exact diagonalization.

_DENSE_QUBIT_GUARD = 12


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of one Pauli string, qubit 0 least significant."""
    n = len(label)
    if n > _DENSE_QUBIT_GUARD:
        raise ValueError(f"dense guard: {n} qubits > {_DENSE_QUBIT_GUARD}")
    out = np.array([[1.0 + 0j]])
    for q in range(n - 1, -1, -1):
        out = np.kron(out, _PAULI_1Q[label[q]])
    return out


def _term_action(label: str):
    """(x_mask, signs, phase) so that P |b> = phase * signs[b] * |b ^ x_mask>."""
    x, z, ny = _label_to_masks(label)
    dim = 1 << len(label)
    idx = np.arange(dim, dtype=np.uint64)
    parity = np.bitwise_count(idx & np.uint64(z)) & 1
    signs = 1.0 - 2.0 * parity
    return x, signs, 1j ** ny


def pauli_sum_matrix(p: PauliSum) -> np.ndarray:
    """Dense Hermitian matrix of a PauliSum."""
    if p.n_qubits > _DENSE_QUBIT_GUARD:
        raise ValueError(f"dense guard: {p.n_qubits} qubits > {_DENSE_QUBIT_GUARD}")
    dim = 1 << p.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for label, coeff in p.terms.items():
        x, signs, phase = _term_action(label)
        out[idx ^ x, idx] += coeff * phase * signs
    return out


def pauli_expectation(state: np.ndarray, p: PauliSum) -> float:
    """<state| P |state> for a real-weighted PauliSum; real to 1e-10."""
    state = np.asarray(state).ravel()
    dim = 1 << p.n_qubits
    if state.size != dim:
        raise ValueError(f"state has {state.size} amplitudes, expected {dim}")
    idx = np.arange(dim)
    value = 0.0 + 0.0j
    for label, coeff in p.terms.items():
        x, signs, phase = _term_action(label)
        value += coeff * phase * np.sum(np.conj(state[idx ^ x]) * signs * state)
    if abs(value.imag) > 1e-10:
        raise MappingError(f"expectation has imaginary part {value.imag:.2e}")
    return float(value.real)


def exact_ground(p: PauliSum) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue and eigenvector of the dense matrix (the full-CI
    oracle for mapped molecular Hamiltonians)."""
    m = pauli_sum_matrix(p)
    evals, vecs = np.linalg.eigh(m)
    e0, v0 = float(evals[0]), vecs[:, 0]
    residual = np.linalg.norm(m @ v0 - e0 * v0)
    scale = max(abs(evals[0]), abs(evals[-1]), 1e-300)
    if residual > 1e-8 * scale:
        raise RuntimeError(f"eigensolver residual {residual:.2e} too large")
    return e0, v0
