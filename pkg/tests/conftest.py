import pytest

from pulsevqe import chem, pulsemodel, qubitop


@pytest.fixture(scope="session")
def h2_problem():
    """H2 at 0.74 A: integrals, SCF, spin Hamiltonian, reduced qubit operator."""
    geometry = chem.h2_geometry(0.74)
    ints = chem.ao_integrals(geometry)
    hf = chem.hartree_fock(ints, 1, 1)
    mo = chem.mo_hamiltonian(ints, hf.mo_coeff, 1, 1)
    reduced = qubitop.parity_map_reduce_h2(mo)
    return {"geometry": geometry, "ints": ints, "hf": hf, "mo": mo,
            "reduced": reduced}


@pytest.fixture(scope="session")
def h3_jw():
    """Equilateral H3 at 1.43 A mapped with Jordan-Wigner (62 terms)."""
    geometry = chem.h3_geometry(60.0, 1.43)
    ints = chem.ao_integrals(geometry)
    hf = chem.hartree_fock(ints, 2, 1)
    mo = chem.mo_hamiltonian(ints, hf.mo_coeff, 2, 1)
    return qubitop.jordan_wigner(mo)


@pytest.fixture(scope="session")
def h4_jw():
    """Rectangular H4 (alpha=40 deg, 1.8 A diagonals) under Jordan-Wigner."""
    geometry = chem.h4_geometry(40.0, 1.8)
    ints = chem.ao_integrals(geometry)
    hf = chem.hartree_fock(ints, 2, 2)
    mo = chem.mo_hamiltonian(ints, hf.mo_coeff, 2, 2)
    return qubitop.jordan_wigner(mo)


@pytest.fixture(scope="session")
def lagos_models():
    return pulsemodel.load_cr_fixtures(pulsemodel.builtin_fixture_path("lagos"))


@pytest.fixture(scope="session")
def mumbai_models():
    return pulsemodel.load_cr_fixtures(pulsemodel.builtin_fixture_path("mumbai"))


@pytest.fixture(scope="session")
def echo_model():
    fixtures = pulsemodel.load_cr_fixtures(
        pulsemodel.builtin_fixture_path("lagos_echo_01"))
    return fixtures[(0, 1)]
