"""Command-line front end: dissociation curves, angle scans, CR dynamics,
tomography, grouping reports, and FCI baselines.  Every run echoes its fully
resolved configuration (seed and all defaults included) into the output
directory, and can be reproduced from that file alone with ``--config``.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import chem, pulsemodel as pm, qubitop, vqe


class ConfigError(ValueError):
    pass


_USAGE_ERRORS = (ConfigError, chem.GeometryError, pm.FixtureError, FileNotFoundError)
_NUMERICAL_ERRORS = (
    chem.ScfConvergenceError,
    chem.LinearDependenceError,
    qubitop.MappingError,
    pm.TomographyFitError,
    np.linalg.LinAlgError,
    FloatingPointError,
    RuntimeError,
)


def _parse_shots(text: str):
    if text.lower() == "exact":
        return "exact"
    shots = int(text)
    if shots <= 0:
        raise ConfigError("--shots must be positive or 'exact'")
    return shots


def _parse_pair(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.replace("(", "").replace(")", "").split(",")]
    if len(parts) != 2:
        raise ConfigError(f"bad pair {text!r}, expected 'i,j'")
    return int(parts[0]), int(parts[1])


def _parse_points(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file; overrides flags")
    parser.add_argument("--system", choices=["h2", "h3", "h4"], default="h2")
    parser.add_argument("--geometry", help="explicit geometry record file")
    parser.add_argument("--d", type=float, default=0.74, help="H2 distance (Angstrom)")
    parser.add_argument("--alpha", type=float, default=None, help="H3/H4 angle (degrees)")
    parser.add_argument("--side", type=float, default=1.43, help="H3 side (Angstrom)")
    parser.add_argument("--diagonal", type=float, default=1.8, help="H4 diagonal (Angstrom)")
    parser.add_argument("--mapping", choices=["auto", "jw", "parity-reduced"], default="auto")
    parser.add_argument("--ansatz", choices=["none", "cnot", "pulse"], default="none")
    parser.add_argument("--depth", type=int, default=1)
    parser.add_argument("--phases", action="store_true",
                        help="parameterized virtual-Z before each CR pulse")
    parser.add_argument("--shots", type=_parse_shots, default="exact")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=1500)
    parser.add_argument("--restarts", type=int, default=4)
    parser.add_argument("--fixture", help="CR fixture file (default: shipped tables)")
    parser.add_argument("--out", default="out")
    parser.add_argument("--gnuplot-compatible", action="store_true")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulsevqe",
        description="Pulse-level VQE laboratory for hydrogen clusters.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dissociation", help="energy curve over a geometry scan")
    _add_common(p)
    p.add_argument("--points", type=_parse_points, default=None,
                   help="comma-separated scan points (Angstrom)")
    p.add_argument("--anchor", type=float, default=None,
                   help="warm-start anchor point (default 0.74 for H2)")

    p = sub.add_parser("angle-scan", help="energy versus the H3/H4 angle")
    _add_common(p)
    p.add_argument("--alpha-min", type=float, default=20.0)
    p.add_argument("--alpha-max", type=float, default=60.0)
    p.add_argument("--alpha-step", type=float, default=2.0)

    p = sub.add_parser("cr-dynamics", help="CR populations versus pulse duration")
    _add_common(p)
    p.add_argument("--pair", default=None, help="fixture pair 'i,j' (default: first)")
    p.add_argument("--max-duration", type=int, default=1040)
    p.add_argument("--duration-step", type=int, default=16)

    p = sub.add_parser("tomography", help="synthesize traces and fit the CR model")
    _add_common(p)
    p.add_argument("--pair", default=None, help="fixture pair 'i,j' (default: first)")
    p.add_argument("--time-points", type=int, default=200)
    p.add_argument("--span-periods", type=float, default=1.5)

    p = sub.add_parser("groups", help="Pauli terms and qubit-wise commuting groups")
    _add_common(p)

    p = sub.add_parser("fci", help="exact ground energy of the mapped Hamiltonian")
    _add_common(p)
    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid config JSON: {exc}") from exc
    if "subcommand" in data and data["subcommand"] != args.subcommand:
        raise ConfigError(
            f"config is for {data['subcommand']!r}, not {args.subcommand!r}"
        )
    for key, value in data.items():
        if key == "subcommand":
            continue
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"unknown config key {key!r}")
        if attr == "shots" and isinstance(value, str):
            value = _parse_shots(value)
        setattr(args, attr, value)
    return args


def _echo_config(args: argparse.Namespace, out: Path):
    data = {}
    for key, value in sorted(vars(args).items()):
        if key == "config":
            continue
        if isinstance(value, Path):
            value = str(value)
        data[key] = value
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(data, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Problem assembly.

def _geometry_from_args(args) -> chem.Geometry:
    if args.geometry:
        path = Path(args.geometry)
        if not path.exists():
            raise ConfigError(f"geometry file not found: {path}")
        return chem.parse_geometry(path.read_text())
    if args.system == "h2":
        return chem.h2_geometry(args.d)
    if args.system == "h3":
        alpha = 60.0 if args.alpha is None else args.alpha
        return chem.h3_geometry(alpha, args.side)
    alpha = 40.0 if args.alpha is None else args.alpha
    return chem.h4_geometry(alpha, args.diagonal)


def _mapping_for(args, geometry: chem.Geometry) -> str:
    if args.mapping != "auto":
        return args.mapping
    return "parity-reduced" if geometry.n_atoms == 2 else "jw"


def build_hamiltonian(geometry: chem.Geometry, mapping: str):
    """(PauliSum, fci_energy, hf_energy) for a geometry.

    Orbitals are the converged SCF coefficients (alpha set for open shells),
    the choice that reproduces the reference Pauli-term counts.
    """
    ints = chem.ao_integrals(geometry)
    hf = chem.hartree_fock(ints, geometry.n_alpha, geometry.n_beta)
    mo = chem.mo_hamiltonian(ints, hf.mo_coeff, geometry.n_alpha, geometry.n_beta)
    if mapping == "parity-reduced":
        psum = qubitop.parity_map_reduce_h2(mo)
    else:
        psum = qubitop.jordan_wigner(mo)
    e_fci, _ = qubitop.exact_ground(psum)
    return psum, e_fci, hf.energy


def _fixture_models(args) -> dict[tuple[int, int], pm.CrModel]:
    if args.fixture:
        path = Path(args.fixture)
        if not path.exists():
            raise ConfigError(f"fixture file not found: {path}")
        return pm.load_cr_fixtures(path)
    name = "mumbai" if args.system == "h4" else "lagos"
    return pm.load_cr_fixtures(pm.builtin_fixture_path(name))


def logical_models(models: dict[tuple[int, int], pm.CrModel]):
    """Relabel device qubits to 0..n-1 by sorted id; returns (coupling, models)."""
    qubits = sorted({q for pair in models for q in pair})
    relabel = {q: i for i, q in enumerate(qubits)}
    coupling = []
    logical = {}
    for (c, t), m in models.items():
        edge = (relabel[c], relabel[t])
        coupling.append(edge)
        logical[edge] = m
    return tuple(coupling), logical


def _ansatz_for(args, n_qubits: int, coupling):
    if args.ansatz == "cnot":
        return vqe.build_cnot_ansatz(n_qubits, coupling, args.depth)
    if args.ansatz == "pulse":
        return vqe.build_pulse_ansatz(n_qubits, coupling, args.depth,
                                      with_cr_phase_params=args.phases)
    return None


def _scan_geometry(args, x: float) -> chem.Geometry:
    if args.system == "h2":
        return chem.h2_geometry(x)
    if args.system == "h3":
        return chem.h3_geometry(60.0, x)  # equilateral, side x
    return chem.h4_geometry(90.0, 2.0 * x)  # square, center-vertex distance x


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_dissociation(args) -> int:
    out = Path(args.out)
    _echo_config(args, out)
    mapping = "parity-reduced" if args.system == "h2" else "jw"
    if args.mapping != "auto":
        mapping = args.mapping

    points = args.points
    if points is None:
        points = {
            "h2": [0.3, 0.5, 0.74, 1.0, 1.5, 2.0, 2.5],
            "h3": [round(x, 3) for x in np.arange(1.2, 1.7001, 0.05)],
            "h4": [round(x, 3) for x in np.arange(0.7, 1.1001, 0.02)],
        }[args.system]
    points = sorted(points)

    cache: dict[float, tuple] = {}

    def problem(x):
        if x not in cache:
            cache[x] = build_hamiltonian(_scan_geometry(args, x), mapping)
        return cache[x]

    ansatz = None
    models = None
    if args.ansatz != "none":
        all_models = _fixture_models(args)
        coupling, models = logical_models(all_models)
        n_qubits = problem(points[0])[0].n_qubits
        if n_qubits == 2:
            coupling = (coupling[0],)
        ansatz = _ansatz_for(args, n_qubits, coupling)

    if ansatz is None:
        records = vqe.scan(problem, points)
    else:
        # warm-started continuation outward from the anchor, as published,
        # with fresh random restarts on top at every point
        anchor = args.anchor
        if anchor is None:
            anchor = 0.74 if args.system == "h2" and 0.74 in points else points[0]
        upward = [x for x in points if x >= anchor]
        downward = [x for x in points if x < anchor][::-1]
        kwargs = dict(shots=args.shots, seed=args.seed, budget=args.budget,
                      warm_start=True, restarts=args.restarts)
        recs = vqe.scan(problem, upward, ansatz, models, **kwargs)
        recs += vqe.scan(problem, downward, ansatz, models, **kwargs)
        records = sorted(recs, key=lambda r: r.x)

    (out / "curve.csv").write_text(vqe.curve_csv(records, args.gnuplot_compatible))
    if ansatz is not None:
        runs = [
            vqe.run_record(r.result, system=args.system,
                           geometry={"x": r.x, "scan": "dissociation"},
                           mapping=mapping, ansatz=ansatz)
            for r in records
        ]
        (out / "runs.json").write_text(json.dumps(runs, indent=2) + "\n")
    worst = max((abs(r.energy_vqe - r.energy_fci) for r in records
                 if r.energy_vqe is not None), default=None)
    print(f"dissociation: {len(records)} points -> {out / 'curve.csv'}")
    if worst is not None:
        print(f"max |E_vqe - E_fci| = {worst:.3e} Ha")
    return 0


def cmd_angle_scan(args) -> int:
    if args.system == "h2":
        raise ConfigError("angle-scan needs --system h3 or h4")
    out = Path(args.out)
    _echo_config(args, out)
    alphas = list(np.arange(args.alpha_min, args.alpha_max + 1e-9, args.alpha_step))

    def geometry(alpha):
        if args.system == "h3":
            return chem.h3_geometry(alpha, args.side)
        return chem.h4_geometry(alpha, args.diagonal)

    cache: dict[float, tuple] = {}

    def problem(alpha):
        if alpha not in cache:
            cache[alpha] = build_hamiltonian(geometry(alpha), "jw")
        return cache[alpha]

    ansatz = None
    models = None
    cnot_duration = None
    if args.ansatz != "none":
        coupling, models = logical_models(_fixture_models(args))
        n_qubits = problem(alphas[0])[0].n_qubits
        ansatz = _ansatz_for(args, n_qubits, coupling)
        reference = vqe.build_cnot_ansatz(n_qubits, coupling, args.depth)
        cnot_duration = vqe.bind(reference, np.zeros(reference.n_parameters),
                                 models).duration_samples

    records = vqe.scan(problem, alphas, ansatz, models, shots=args.shots,
                       seed=args.seed, budget=args.budget, warm_start=True,
                       restarts=args.restarts)

    csv = vqe.curve_csv(records, args.gnuplot_compatible).rstrip("\n").splitlines()
    csv[0] += ",duration_fraction"
    for i, r in enumerate(records):
        frac = "" if cnot_duration is None or r.energy_vqe is None \
            else f"{r.duration_samples / cnot_duration:.6f}"
        csv[i + 1] += f",{frac}"
    (out / "curve.csv").write_text("\n".join(csv) + "\n")

    fits = {}
    coeffs, amin, boundary = vqe.quartic_fit_min(
        [r.x for r in records], [r.energy_fci for r in records])
    fits["fci"] = {"coefficients": list(coeffs), "alpha_min": amin,
                   "at_boundary": boundary}
    if ansatz is not None:
        coeffs, amin, boundary = vqe.quartic_fit_min(
            [r.x for r in records], [r.energy_vqe for r in records])
        fits["vqe"] = {"coefficients": list(coeffs), "alpha_min": amin,
                       "at_boundary": boundary}
        fits["cnot_reference_duration_samples"] = cnot_duration
    (out / "fit.json").write_text(json.dumps(fits, indent=2) + "\n")
    print(f"angle-scan: {len(records)} points -> {out / 'curve.csv'}")
    print(f"FCI quartic alpha_min = {fits['fci']['alpha_min']:.2f} deg")
    if "vqe" in fits:
        print(f"VQE quartic alpha_min = {fits['vqe']['alpha_min']:.2f} deg")
    return 0


def _pick_model(args) -> pm.CrModel:
    models = _fixture_models(args)
    if args.pair:
        pair = _parse_pair(args.pair)
        if pair not in models:
            raise ConfigError(f"pair {pair} not in fixture ({sorted(models)})")
        return models[pair]
    return models[sorted(models)[0]]


def cmd_cr_dynamics(args) -> int:
    out = Path(args.out)
    _echo_config(args, out)
    model = _pick_model(args)
    durations = list(range(pm.DURATION_MIN, args.max_duration + 1, args.duration_step))
    variants = {
        "noecho": (model, False),
        "echo": (model, True),
        "zxonly": (pm.zx_only_model(model), False),
    }
    columns = {}
    for name, (m, echo) in variants.items():
        _, pops = pm.cr_population_dynamics(m, durations, echo=echo)
        columns[name] = pops
    # states reported in the |target, control> labeling
    header = ["duration_samples"]
    for name in variants:
        for c in (0, 1):
            for tc in ("00", "01", "10", "11"):
                header.append(f"{name}_c{c}_p{tc}")
    lines = [",".join(header)]
    for j, dur in enumerate(durations):
        row = [str(dur)]
        for name in variants:
            for c in (0, 1):
                for tc in ("00", "01", "10", "11"):
                    target, control = int(tc[0]), int(tc[1])
                    row.append(f"{columns[name][c, j, 2 * control + target]:.9f}")
        lines.append(",".join(row))
    (out / "dynamics.csv").write_text("\n".join(lines) + "\n")
    print(f"cr-dynamics: pair ({model.control}, {model.target}), "
          f"{len(durations)} durations -> {out / 'dynamics.csv'}")
    return 0


def cmd_tomography(args) -> int:
    out = Path(args.out)
    _echo_config(args, out)
    model = _pick_model(args)
    scale = max(abs(v) for v in (model.nu_zx, model.nu_zy, model.nu_zz,
                                 model.nu_ix, model.nu_iy, model.nu_iz, 1.0))
    times = np.linspace(0.0, args.span_periods / scale, args.time_points)
    traces = pm.tomography_traces(model, times)
    (out / "traces.csv").write_text(traces.to_csv())
    fitted = pm.fit_tomography(traces)
    report = {"pair": [model.control, model.target], "device": model.device,
              "fit_khz": {}, "fixture_khz": {}, "relative_error": {}}
    for name in ("nu_zx", "nu_zy", "nu_zz", "nu_ix", "nu_iy", "nu_iz"):
        true, fit = getattr(model, name), getattr(fitted, name)
        report["fixture_khz"][name] = true / 1e3
        report["fit_khz"][name] = fit / 1e3
        report["relative_error"][name] = abs(fit - true) / max(abs(true), 1.0)
    (out / "fit.json").write_text(json.dumps(report, indent=2) + "\n")
    worst = max(report["relative_error"].values())
    print(f"tomography: pair ({model.control}, {model.target}), "
          f"worst relative error {worst:.2e} -> {out / 'fit.json'}")
    return 0


def cmd_groups(args) -> int:
    out = Path(args.out)
    _echo_config(args, out)
    geometry = _geometry_from_args(args)
    mapping = _mapping_for(args, geometry)
    psum, e_fci, e_hf = build_hamiltonian(geometry, mapping)
    groups = qubitop.group_qubitwise(psum)
    report = {
        "system": args.system,
        "mapping": mapping,
        "n_qubits": psum.n_qubits,
        "n_terms": len(psum),
        "n_groups": len(groups),
        "groups": [{"basis": g.basis, "members": list(g.labels)} for g in groups],
    }
    (out / "groups.json").write_text(json.dumps(report, indent=2) + "\n")
    (out / "hamiltonian.txt").write_text(qubitop.dumps_pauli_sum(psum))
    print(f"{report['n_terms']} terms in {report['n_groups']} "
          f"qubit-wise commuting groups ({psum.n_qubits} qubits)")
    return 0


def cmd_fci(args) -> int:
    out = Path(args.out)
    _echo_config(args, out)
    geometry = _geometry_from_args(args)
    mapping = _mapping_for(args, geometry)
    psum, e_fci, e_hf = build_hamiltonian(geometry, mapping)
    result = {
        "system": args.system,
        "mapping": mapping,
        "n_qubits": psum.n_qubits,
        "n_terms": len(psum),
        "energy_fci": e_fci,
        "energy_hf": e_hf,
    }
    (out / "fci.json").write_text(json.dumps(result, indent=2) + "\n")
    print(f"FCI total energy {e_fci:.9f} Ha (HF {e_hf:.9f} Ha)")
    return 0


_COMMANDS = {
    "dissociation": cmd_dissociation,
    "angle-scan": cmd_angle_scan,
    "cr-dynamics": cmd_cr_dynamics,
    "tomography": cmd_tomography,
    "groups": cmd_groups,
    "fci": cmd_fci,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return _COMMANDS[args.subcommand](args)
    except _USAGE_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
