"""Hydrogen-cluster geometries, STO-3G integrals, Hartree-Fock, and the
second-quantized Hamiltonian in a molecular-orbital spin basis.

Internal units are Bohr and Hartree throughout; Angstrom values are converted
once at the construction boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903

# STO-3G hydrogen 1s shell (zeta = 1.24 scaled tabulation of Hehre, Stewart
# and Pople, as distributed by the Basis Set Exchange).
STO3G_H_EXPONENTS = (3.425250914, 0.6239137298, 0.1688554040)
STO3G_H_COEFFS = (0.1543289673, 0.5353281423, 0.4446345422)

_MIN_ATOM_SEPARATION = 1e-8  # Bohr


class GeometryError(ValueError):
    """Invalid cluster geometry (coincident atoms, bad parameters)."""


class LinearDependenceError(ValueError):
    """The AO overlap matrix is numerically singular."""


class ScfConvergenceError(RuntimeError):
    """SCF failed to converge within the iteration budget."""


@dataclass(frozen=True)
class Geometry:
    """Hydrogen cluster with coordinates in Bohr.

    ``multiplicity`` defaults to the low-spin value for the electron count
    (1 for even, 2 for odd).
    """

    coords: np.ndarray
    charge: int = 0
    multiplicity: int = 0  # 0 means "pick the low-spin default"

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if coords.ndim != 2 or coords.shape[1] != 3:
            raise GeometryError(f"coordinates must be (n, 3), got {coords.shape}")
        if not 1 <= len(coords) <= 4:
            raise GeometryError(f"supported cluster sizes are 1..4 atoms, got {len(coords)}")
        for i in range(len(coords)):
            for j in range(i + 1, len(coords)):
                if np.linalg.norm(coords[i] - coords[j]) <= _MIN_ATOM_SEPARATION:
                    raise GeometryError(f"atoms {i} and {j} coincide")
        object.__setattr__(self, "coords", coords)
        n_el = self.n_electrons
        mult = self.multiplicity
        if mult == 0:
            mult = 1 if n_el % 2 == 0 else 2
            object.__setattr__(self, "multiplicity", mult)
        if (n_el - (mult - 1)) % 2 != 0 or mult - 1 > n_el:
            raise GeometryError(f"multiplicity {mult} impossible for {n_el} electrons")

    @property
    def n_atoms(self) -> int:
        return len(self.coords)

    @property
    def n_electrons(self) -> int:
        return self.n_atoms - self.charge

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.multiplicity - 1) // 2

    @property
    def n_beta(self) -> int:
        return self.n_electrons - self.n_alpha


def _to_bohr(value: float, units: str) -> float:
    u = units.strip().lower()
    if u in ("bohr", "au", "a.u."):
        return value
    if u in ("angstrom", "ang", "a", "aa"):
        return value * BOHR_PER_ANGSTROM
    raise GeometryError(f"unknown length unit {units!r}")


def h2_geometry(d: float, units: str = "angstrom") -> Geometry:
    """Two hydrogens on the z axis separated by ``d``."""
    if d <= 0:
        raise GeometryError("H2 distance must be positive")
    d = _to_bohr(d, units)
    return Geometry(np.array([[0.0, 0.0, 0.0], [0.0, 0.0, d]]))


def h3_geometry(alpha_deg: float, side: float, units: str = "angstrom") -> Geometry:
    """Isosceles H3: two sides of length ``side`` from the apex, opened by
    ``alpha_deg``.  ``alpha_deg = 60`` gives the equilateral triangle."""
    if side <= 0:
        raise GeometryError("H3 side must be positive")
    if not 0.0 < alpha_deg < 180.0:
        raise GeometryError("H3 angle must lie strictly between 0 and 180 degrees")
    side = _to_bohr(side, units)
    half = math.radians(alpha_deg) / 2.0
    coords = np.array(
        [
            [0.0, 0.0, 0.0],
            [side * math.cos(half), side * math.sin(half), 0.0],
            [side * math.cos(half), -side * math.sin(half), 0.0],
        ]
    )
    return Geometry(coords)


def h4_geometry(alpha_deg: float, diagonal: float, units: str = "angstrom") -> Geometry:
    """Rectangular H4 with both diagonals of length ``diagonal`` crossing at
    ``alpha_deg``.  The sides are d*sin(alpha/2) and d*cos(alpha/2)."""
    if diagonal <= 0:
        raise GeometryError("H4 diagonal must be positive")
    if not 0.0 < alpha_deg < 180.0:
        raise GeometryError("H4 angle must lie strictly between 0 and 180 degrees")
    r = _to_bohr(diagonal, units) / 2.0
    half = math.radians(alpha_deg) / 2.0
    x, y = r * math.cos(half), r * math.sin(half)
    coords = np.array([[x, y, 0.0], [x, -y, 0.0], [-x, -y, 0.0], [-x, y, 0.0]])
    return Geometry(coords)


def build_geometry(system: str, units: str = "angstrom", **params) -> Geometry:
    """Dispatch on ``system`` in {h2, h3, h4, explicit}.

    Parameters are ``d`` (H2), ``alpha_deg``/``side`` (H3),
    ``alpha_deg``/``diagonal`` (H4), ``coords`` (explicit, in ``units``).
    """
    name = system.strip().lower()
    if name == "h2":
        return h2_geometry(params["d"], units)
    if name == "h3":
        return h3_geometry(params["alpha_deg"], params["side"], units)
    if name == "h4":
        return h4_geometry(params["alpha_deg"], params["diagonal"], units)
    if name == "explicit":
        coords = np.asarray(params["coords"], dtype=float)
        scale = _to_bohr(1.0, units)
        return Geometry(
            coords * scale,
            charge=params.get("charge", 0),
            multiplicity=params.get("multiplicity", 0),
        )
    raise GeometryError(f"unknown system {system!r}")


def parse_geometry(text: str) -> Geometry:
    """Parse the structured geometry record format.

    Records are ``key = value`` lines (case-insensitive), e.g.::

        system = h3
        alpha_deg = 40
        side_angstrom = 1.43

    or explicit ``atom = H x y z`` lines with an optional
    ``units = angstrom|bohr`` line (default bohr).
    """
    keys: dict[str, str] = {}
    atoms: list[list[float]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GeometryError(f"malformed geometry line: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key == "atom":
            fields = value.split()
            if len(fields) != 4 or fields[0].upper() != "H":
                raise GeometryError(f"bad atom record: {raw!r}")
            atoms.append([float(v) for v in fields[1:]])
        else:
            keys[key] = value
    system = keys.get("system", "explicit" if atoms else None)
    if system is None:
        raise GeometryError("geometry record needs a 'system' key or atom lines")
    system = system.lower()

    def length(base: str):
        if f"{base}_angstrom" in keys:
            return float(keys[f"{base}_angstrom"]), "angstrom"
        if f"{base}_bohr" in keys:
            return float(keys[f"{base}_bohr"]), "bohr"
        raise GeometryError(f"missing {base}_angstrom or {base}_bohr")

    if system == "h2":
        d, units = length("d")
        return h2_geometry(d, units)
    if system == "h3":
        side, units = length("side")
        return h3_geometry(float(keys["alpha_deg"]), side, units)
    if system == "h4":
        diag, units = length("diagonal")
        return h4_geometry(float(keys["alpha_deg"]), diag, units)
    if system == "explicit":
        if not atoms:
            raise GeometryError("explicit geometry needs atom lines")
        return build_geometry(
            "explicit",
            units=keys.get("units", "bohr"),
            coords=atoms,
            charge=int(keys.get("charge", 0)),
            multiplicity=int(keys.get("multiplicity", 0)),
        )
    raise GeometryError(f"unknown system {system!r}")


def nuclear_repulsion(geometry: Geometry) -> float:
    """Point-charge repulsion sum over nucleus pairs, in Hartree."""
    coords = geometry.coords
    energy = 0.0
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            energy += 1.0 / np.linalg.norm(coords[i] - coords[j])
    return energy


def boys_f0(x: float) -> float:
    """Boys function F0(x) = (1/2) sqrt(pi/x) erf(sqrt(x)), series near 0."""
    if x < 0:
        raise ValueError("boys_f0 requires x >= 0")
    if x < 1e-8:
        return 1.0 - x / 3.0 + x * x / 10.0 - x * x * x / 42.0
    return 0.5 * math.sqrt(math.pi / x) * math.erf(math.sqrt(x))


@dataclass(frozen=True)
class BasisShell:
    """Contracted s-type Gaussian shell on one atomic center."""

    center: int
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.coefficients):
            raise ValueError("exponents and coefficients differ in length")
        if any(a <= 0 for a in self.exponents):
            raise ValueError("Gaussian exponents must be positive")


def sto3g_hydrogen_basis(geometry: Geometry) -> list[BasisShell]:
    """One STO-3G 1s shell per hydrogen atom."""
    return [
        BasisShell(i, STO3G_H_EXPONENTS, STO3G_H_COEFFS)
        for i in range(geometry.n_atoms)
    ]


@dataclass(frozen=True)
class AoIntegrals:
    """Atomic-orbital integrals for s-type contracted Gaussians."""

    overlap: np.ndarray
    kinetic: np.ndarray
    nuclear: np.ndarray
    eri: np.ndarray  # chemist (pq|rs), 8-fold symmetric
    e_nuclear: float

    @property
    def n_orbitals(self) -> int:
        return self.overlap.shape[0]

    @property
    def core_hamiltonian(self) -> np.ndarray:
        return self.kinetic + self.nuclear


def _primitive_norm(alpha: float) -> float:
    return (2.0 * alpha / math.pi) ** 0.75


def _shell_prims(shell: BasisShell, coords: np.ndarray):
    """(exponent, normalized coefficient, center) triples with the contracted
    function renormalized to unit self-overlap."""
    center = coords[shell.center]
    prims = [
        (a, c * _primitive_norm(a)) for a, c in zip(shell.exponents, shell.coefficients)
    ]
    self_overlap = 0.0
    for a, ca in prims:
        for b, cb in prims:
            self_overlap += ca * cb * (math.pi / (a + b)) ** 1.5
    scale = 1.0 / math.sqrt(self_overlap)
    return [(a, c * scale, center) for a, c in prims]


def ao_integrals(geometry: Geometry, basis: list[BasisShell] | None = None) -> AoIntegrals:
    """Closed-form S, T, V and (pq|rs) for contracted s-type Gaussians.

    The contracted functions are normalized so the overlap diagonal is one.
    Raises :class:`LinearDependenceError` when the overlap matrix is
    numerically singular.
    """
    if basis is None:
        basis = sto3g_hydrogen_basis(geometry)
    coords = geometry.coords
    shells = [_shell_prims(shell, coords) for shell in basis]
    n = len(shells)

    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s = t = v = 0.0
            for a, ca, ra in shells[i]:
                for b, cb, rb in shells[j]:
                    p = a + b
                    mu = a * b / p
                    rab2 = float(np.dot(ra - rb, ra - rb))
                    k = ca * cb * math.exp(-mu * rab2)
                    s_prim = k * (math.pi / p) ** 1.5
                    s += s_prim
                    t += mu * (3.0 - 2.0 * mu * rab2) * s_prim
                    centroid = (a * ra + b * rb) / p
                    for rc in coords:
                        pc2 = float(np.dot(centroid - rc, centroid - rc))
                        v -= k * (2.0 * math.pi / p) * boys_f0(p * pc2)
            S[i, j] = S[j, i] = s
            T[i, j] = T[j, i] = t
            V[i, j] = V[j, i] = v

    if np.linalg.eigvalsh(S).min() < 1e-10:
        raise LinearDependenceError("AO overlap matrix is numerically singular")

    G = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    val = 0.0
                    for a, ca, ra in shells[i]:
                        for b, cb, rb in shells[j]:
                            p = a + b
                            rp = (a * ra + b * rb) / p
                            kab = math.exp(-a * b / p * float(np.dot(ra - rb, ra - rb)))
                            for c, cc, rc in shells[k]:
                                for d, cd, rd in shells[l]:
                                    q = c + d
                                    rq = (c * rc + d * rd) / q
                                    kcd = math.exp(
                                        -c * d / q * float(np.dot(rc - rd, rc - rd))
                                    )
                                    rpq2 = float(np.dot(rp - rq, rp - rq))
                                    val += (
                                        ca * cb * cc * cd * kab * kcd
                                        * 2.0 * math.pi ** 2.5
                                        / (p * q * math.sqrt(p + q))
                                        * boys_f0(p * q / (p + q) * rpq2)
                                    )
                    G[i, j, k, l] = val

    return AoIntegrals(S, T, V, G, nuclear_repulsion(geometry))


def lowdin_orbitals(ints: AoIntegrals) -> np.ndarray:
    """Symmetrically orthogonalized AOs, C = S^(-1/2)."""
    evals, vecs = np.linalg.eigh(ints.overlap)
    if evals.min() < 1e-10:
        raise LinearDependenceError("AO overlap matrix is numerically singular")
    return vecs @ np.diag(evals ** -0.5) @ vecs.T


@dataclass
class HfResult:
    """Converged SCF solution.  ``mo_coeff`` columns satisfy C^T S C = 1."""

    energy: float
    mo_coeff: np.ndarray
    mo_coeff_beta: np.ndarray
    orbital_energies: np.ndarray
    orbital_energies_beta: np.ndarray
    restricted: bool
    n_iter: int
    energy_trace: list[float] = field(default_factory=list)


def hartree_fock(
    ints: AoIntegrals,
    n_alpha: int,
    n_beta: int,
    *,
    max_iter: int = 1000,
    density_tol: float = 1e-8,
) -> HfResult:
    """Restricted SCF when n_alpha == n_beta, unrestricted otherwise.

    Converged when the largest density-matrix change drops below
    ``density_tol``.  After three oscillating iterations (energy going up) a
    fixed 50% density damping is switched on; no other accelerator is used,
    so near-degenerate open-shell cases converge slowly but reliably to the
    lower, symmetry-broken solution.  Raises :class:`ScfConvergenceError`
    when the iteration budget runs out.
    """
    nbf = ints.n_orbitals
    if n_alpha < 0 or n_beta < 0 or n_alpha + n_beta > 2 * nbf:
        raise ValueError(f"cannot place {n_alpha}+{n_beta} electrons in {nbf} orbitals")
    X = lowdin_orbitals(ints)
    hcore = ints.core_hamiltonian
    eri = ints.eri
    restricted = n_alpha == n_beta

    def solve(fock):
        f_ortho = X.T @ fock @ X
        eps, c_ortho = np.linalg.eigh(f_ortho)
        return eps, X @ c_ortho

    def density(c, n_occ):
        occ = c[:, :n_occ]
        return occ @ occ.T

    if n_alpha + n_beta == 0:
        eps, c = solve(hcore)
        return HfResult(ints.e_nuclear, c, c, eps, eps, True, 0, [ints.e_nuclear])

    eps_a, c_a = solve(hcore)
    eps_b, c_b = eps_a, c_a
    d_a = density(c_a, n_alpha)
    d_b = density(c_b, n_beta)

    def fock_pair(d_a, d_b):
        j = np.einsum("pqrs,rs->pq", eri, d_a + d_b)
        k_a = np.einsum("prqs,rs->pq", eri, d_a)
        k_b = np.einsum("prqs,rs->pq", eri, d_b)
        return hcore + j - k_a, hcore + j - k_b

    def electronic_energy(d_a, d_b, f_a, f_b):
        return 0.5 * (
            np.sum((d_a + d_b) * hcore) + np.sum(d_a * f_a) + np.sum(d_b * f_b)
        )

    energies: list[float] = []
    last_energy = math.inf
    oscillations = 0
    damping_on = False
    for iteration in range(1, max_iter + 1):
        f_a, f_b = fock_pair(d_a, d_b)
        energy = electronic_energy(d_a, d_b, f_a, f_b) + ints.e_nuclear
        energies.append(energy)

        eps_a, c_a = solve(f_a)
        if restricted:
            eps_b, c_b = eps_a, c_a
        else:
            eps_b, c_b = solve(f_b)
        d_a_new = density(c_a, n_alpha)
        d_b_new = density(c_b, n_beta)
        delta = max(np.abs(d_a_new - d_a).max(), np.abs(d_b_new - d_b).max())
        if energy > last_energy + 1e-12:
            oscillations += 1
            if oscillations >= 3:
                damping_on = True
        last_energy = energy
        if damping_on:
            d_a_new = 0.5 * (d_a_new + d_a)
            d_b_new = 0.5 * (d_b_new + d_b)
        d_a, d_b = d_a_new, d_b_new
        if delta < density_tol:
            return HfResult(
                energy, c_a, c_b, eps_a, eps_b, restricted, iteration, energies
            )
    raise ScfConvergenceError(
        f"SCF not converged after {max_iter} iterations (last change {delta:.3e})"
    )


@dataclass(frozen=True)
class MoHamiltonian:
    """Second-quantized Hamiltonian over spin orbitals, block spin order
    (all alpha spatial orbitals first, then all beta).

    ``two_body[p,q,r,s]`` holds physicist-convention <pq|rs> matrix elements;
    the Hamiltonian is  constant + sum h[p,q] a+_p a_q
    + 1/2 sum <pq|rs> a+_p a+_q a_s a_r.
    """

    one_body: np.ndarray
    two_body: np.ndarray
    constant: float
    n_alpha: int
    n_beta: int
    convention: str = "physicist <pq|rs>"

    @property
    def n_spin_orbitals(self) -> int:
        return self.one_body.shape[0]

    @property
    def n_spatial(self) -> int:
        return self.n_spin_orbitals // 2


def mo_hamiltonian(
    ints: AoIntegrals, c: np.ndarray, n_alpha: int, n_beta: int
) -> MoHamiltonian:
    """Transform AO integrals with orbital coefficients ``c`` and expand to
    spin orbitals.  ``c`` must be orthonormal under the AO overlap."""
    n = ints.n_orbitals
    if c.shape != (n, n):
        raise ValueError(f"orbital coefficients must be {n}x{n}, got {c.shape}")
    if not np.allclose(c.T @ ints.overlap @ c, np.eye(n), atol=1e-8):
        raise ValueError("orbital coefficients are not orthonormal under S")

    h_mo = c.T @ ints.core_hamiltonian @ c
    g = np.einsum("pi,pqrs->iqrs", c, ints.eri)
    g = np.einsum("qj,iqrs->ijrs", c, g)
    g = np.einsum("rk,ijrs->ijks", c, g)
    g_mo = np.einsum("sl,ijks->ijkl", c, g)  # chemist (ij|kl) in MO basis

    m = 2 * n
    h_spin = np.zeros((m, m))
    h_spin[:n, :n] = h_mo
    h_spin[n:, n:] = h_mo

    spatial = np.arange(m) % n
    spin = np.arange(m) // n
    g_spin = np.zeros((m, m, m, m))
    # <pq|rs> = (pr|qs) with spin conservation p~r and q~s
    for p in range(m):
        for q in range(m):
            for r in range(m):
                if spin[p] != spin[r]:
                    continue
                for s in range(m):
                    if spin[q] != spin[s]:
                        continue
                    g_spin[p, q, r, s] = g_mo[spatial[p], spatial[r], spatial[q], spatial[s]]

    return MoHamiltonian(h_spin, g_spin, ints.e_nuclear, n_alpha, n_beta)
