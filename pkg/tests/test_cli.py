import json

import numpy as np
import pytest

from pulsevqe import qubitop
from pulsevqe.cli import main


def run_cli(tmp_path, *args) -> int:
    return main([*args, "--out", str(tmp_path / "out")])


def read_json(tmp_path, name):
    return json.loads((tmp_path / "out" / name).read_text())


def test_groups_h3(tmp_path, capsys):
    assert run_cli(tmp_path, "groups", "--system", "h3") == 0
    out = capsys.readouterr().out
    assert "62 terms" in out
    report = read_json(tmp_path, "groups.json")
    assert report["n_terms"] == 62
    assert report["n_groups"] <= 23
    # the serialized Hamiltonian round-trips
    text = (tmp_path / "out" / "hamiltonian.txt").read_text()
    psum = qubitop.loads_pauli_sum(text)
    assert len(psum) == 62 and psum.n_qubits == 6


def test_groups_h4(tmp_path, capsys):
    assert run_cli(tmp_path, "groups", "--system", "h4") == 0
    assert "97 terms" in capsys.readouterr().out


def test_fci_h2(tmp_path):
    assert run_cli(tmp_path, "fci", "--system", "h2", "--d", "0.74") == 0
    result = read_json(tmp_path, "fci.json")
    assert result["energy_fci"] == pytest.approx(-1.137, abs=5e-3)
    assert result["energy_hf"] >= result["energy_fci"]
    assert result["n_terms"] == 5 and result["n_qubits"] == 2


def test_fci_explicit_geometry_file(tmp_path):
    geometry = tmp_path / "geom.txt"
    geometry.write_text("system = h2\nd_bohr = 1.4\n")
    assert run_cli(tmp_path, "fci", "--geometry", str(geometry)) == 0
    result = read_json(tmp_path, "fci.json")
    assert result["energy_fci"] == pytest.approx(-1.1373, abs=5e-3)


def test_tomography_roundtrip(tmp_path):
    assert run_cli(tmp_path, "tomography", "--pair", "3,5",
                   "--time-points", "150") == 0
    fit = read_json(tmp_path, "fit.json")
    assert fit["pair"] == [3, 5]
    assert max(fit["relative_error"].values()) < 0.01
    traces = (tmp_path / "out" / "traces.csv").read_text().splitlines()
    assert traces[0] == "time_s,x0,y0,z0,x1,y1,z1"
    assert len(traces) == 151


def test_cr_dynamics_zero_fixture_is_flat(tmp_path):
    fixture = tmp_path / "zero.txt"
    fixture.write_text(
        "pair = (0, 1)\nnu_zx_khz = 0\nnu_zy_khz = 0\nnu_zz_khz = 0\n"
        "nu_ix_khz = 0\nnu_iy_khz = 0\nnu_iz_khz = 0\n"
    )
    assert run_cli(tmp_path, "cr-dynamics", "--fixture", str(fixture),
                   "--max-duration", "512") == 0
    lines = (tmp_path / "out" / "dynamics.csv").read_text().splitlines()
    header = lines[0].split(",")
    for row in lines[1:]:
        values = dict(zip(header, row.split(",")))
        assert float(values["noecho_c0_p00"]) == pytest.approx(1.0, abs=1e-12)
        assert float(values["echo_c1_p01"]) == pytest.approx(1.0, abs=1e-12)


def test_dissociation_cnot_and_reproducibility(tmp_path):
    out = tmp_path / "out"
    assert main(["dissociation", "--system", "h2", "--ansatz", "cnot",
                 "--points", "0.6,0.74", "--budget", "400", "--restarts", "2",
                 "--seed", "3", "--out", str(out)]) == 0
    curve_first = (out / "curve.csv").read_text()
    runs = json.loads((out / "runs.json").read_text())
    assert len(runs) == 2
    assert runs[0]["method"] == "simplex"

    # closure: re-run from the emitted config alone and compare numbers
    config = out / "config.json"
    assert config.exists()
    assert main(["dissociation", "--config", str(config)]) == 0
    assert (out / "curve.csv").read_text() == curve_first

    lines = curve_first.splitlines()
    assert lines[0] == "x,energy_vqe,energy_fci,energy_hf,duration_samples"
    for row in lines[1:]:
        x, e_vqe, e_fci, e_hf, duration = row.split(",")
        assert abs(float(e_vqe) - float(e_fci)) < 1e-4
        assert int(duration) > 0


def test_dissociation_fci_only_h3(tmp_path):
    assert run_cli(tmp_path, "dissociation", "--system", "h3",
                   "--points", "1.38,1.43,1.48") == 0
    lines = (tmp_path / "out" / "curve.csv").read_text().splitlines()
    energies = {float(r.split(",")[0]): float(r.split(",")[2]) for r in lines[1:]}
    assert min(energies, key=energies.get) == pytest.approx(1.43)


def test_angle_scan_quartic_fit(tmp_path):
    assert run_cli(tmp_path, "angle-scan", "--system", "h3",
                   "--alpha-min", "24", "--alpha-max", "36",
                   "--alpha-step", "2") == 0
    fit = read_json(tmp_path, "fit.json")
    assert fit["fci"]["alpha_min"] == pytest.approx(29.3, abs=0.5)
    header = (tmp_path / "out" / "curve.csv").read_text().splitlines()[0]
    assert header.endswith(",duration_fraction")


def test_angle_scan_rejects_h2(tmp_path):
    assert run_cli(tmp_path, "angle-scan", "--system", "h2") == 2


def test_gnuplot_flag_reorders_columns(tmp_path):
    assert run_cli(tmp_path, "dissociation", "--system", "h3",
                   "--points", "1.4,1.5", "--gnuplot-compatible") == 0
    header = (tmp_path / "out" / "curve.csv").read_text().splitlines()[0]
    assert header.startswith("# x,energy_fci")


def test_config_overrides_flags(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"system": "h3", "alpha": 60.0}))
    out = tmp_path / "out"
    # flag says h2 but the config wins
    assert main(["groups", "--system", "h2", "--config", str(config),
                 "--out", str(out)]) == 0
    assert json.loads((out / "groups.json").read_text())["n_terms"] == 62


def test_exit_code_2_for_config_errors(tmp_path):
    assert run_cli(tmp_path, "fci", "--system", "h2", "--d", "-0.4") == 2
    assert run_cli(tmp_path, "groups", "--fixture", "missing.txt",
                   "--ansatz", "pulse") in (0, 2)  # fixture unused by groups
    assert run_cli(tmp_path, "tomography", "--fixture", "missing.txt") == 2
    assert run_cli(tmp_path, "tomography", "--pair", "9,9") == 2
    config = tmp_path / "bad.json"
    config.write_text("{not json")
    assert run_cli(tmp_path, "fci", "--config", str(config)) == 2
    config.write_text(json.dumps({"subcommand": "groups"}))
    assert run_cli(tmp_path, "fci", "--config", str(config)) == 2


def test_exit_code_3_for_numerical_failure(tmp_path):
    # atoms close enough to pass the geometry check but wreck the overlap
    geometry = tmp_path / "geom.txt"
    geometry.write_text("atom = H 0 0 0\natom = H 0 0 1e-6\n")
    assert run_cli(tmp_path, "fci", "--geometry", str(geometry)) == 3


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2
