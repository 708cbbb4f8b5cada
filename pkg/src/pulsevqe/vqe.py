"""Ansatz construction (CNOT-based and pulse-based), parameter binding
through hardware wrappers, derivative-free optimization, warm-started scans,
and quartic-fit minimum extraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize as sciopt

from . import pulsemodel as pm
from .qubitop import PauliSum, group_qubitwise, pauli_sum_matrix
from .simulator import estimate_energy, apply, make_rng, zero_state

WRAP_IDENTITY = "identity"
WRAP_AMPLITUDE = "amplitude"
WRAP_DURATION = "duration"

_WRAP_FN = {
    WRAP_IDENTITY: lambda t: t,
    WRAP_AMPLITUDE: pm.wrap_amplitude,
    WRAP_DURATION: pm.wrap_duration,
}


@dataclass(frozen=True)
class Instruction:
    """One ansatz element.

    kind: "sq_rot" (axis "x" = amplitude-parameterized pulse, "y" = angle
    rotation), "virtual_z", "cr" (params = duration, amplitude), "cnot", or
    "barrier".
    """

    kind: str
    qubits: tuple[int, ...] = ()
    params: tuple[int, ...] = ()
    axis: str = ""


BARRIER_INSTRUCTION = Instruction("barrier")


@dataclass(frozen=True)
class Ansatz:
    n_qubits: int
    coupling: tuple[tuple[int, int], ...]
    instructions: tuple[Instruction, ...]
    wrappers: tuple[str, ...]  # one per parameter
    kind: str
    depth: int

    @property
    def n_parameters(self) -> int:
        return len(self.wrappers)

    def __post_init__(self):
        used = sorted({i for inst in self.instructions for i in inst.params})
        if used != list(range(len(self.wrappers))):
            raise ValueError("parameter indices must be contiguous 0..k-1")
        edges = set(self.coupling)
        for inst in self.instructions:
            if inst.kind in ("cr", "cnot") and inst.qubits not in edges:
                raise ValueError(f"edge {inst.qubits} not in the coupling map")
            if inst.kind == "cr" and len(inst.params) != 2:
                raise ValueError("cr instructions need (duration, amplitude) params")


def build_cnot_ansatz(n_qubits: int, coupling, depth: int) -> Ansatz:
    """RealAmplitude-style form: depth+1 layers of per-qubit Y rotations with
    a CNOT ladder over the coupling between consecutive layers."""
    coupling = tuple(tuple(e) for e in coupling)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not coupling:
        raise ValueError("coupling map is empty")
    instructions: list[Instruction] = []
    wrappers: list[str] = []

    def new_param(wrapper: str) -> int:
        wrappers.append(wrapper)
        return len(wrappers) - 1

    for layer in range(depth + 1):
        for q in range(n_qubits):
            instructions.append(
                Instruction("sq_rot", (q,), (new_param(WRAP_IDENTITY),), axis="y")
            )
        if layer < depth:
            instructions.append(BARRIER_INSTRUCTION)
            for edge in coupling:
                instructions.append(Instruction("cnot", edge))
            instructions.append(BARRIER_INSTRUCTION)
    return Ansatz(n_qubits, coupling, tuple(instructions), tuple(wrappers),
                  "cnot", depth)


def build_pulse_ansatz(
    n_qubits: int,
    coupling,
    depth: int,
    with_pre_cr_phase: bool = False,
    with_cr_phase_params: bool = False,
) -> Ansatz:
    """Pulse-based form: depth+1 layers of amplitude-parameterized X pulses
    with a CR ladder between layers; every CR carries one duration and one
    amplitude parameter, plus an optional virtual-Z on the target before it.

    ``with_pre_cr_phase`` inserts the virtual-Z instructions;
    ``with_cr_phase_params`` additionally gives each one an optimizer
    parameter (implies the instruction is present).
    """
    coupling = tuple(tuple(e) for e in coupling)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not coupling:
        raise ValueError("coupling map is empty")
    with_pre_cr_phase = with_pre_cr_phase or with_cr_phase_params
    instructions: list[Instruction] = []
    wrappers: list[str] = []

    def new_param(wrapper: str) -> int:
        wrappers.append(wrapper)
        return len(wrappers) - 1

    for layer in range(depth + 1):
        for q in range(n_qubits):
            instructions.append(
                Instruction("sq_rot", (q,), (new_param(WRAP_AMPLITUDE),), axis="x")
            )
        if layer < depth:
            instructions.append(BARRIER_INSTRUCTION)
            for edge in coupling:
                if with_pre_cr_phase:
                    params = (new_param(WRAP_IDENTITY),) if with_cr_phase_params else ()
                    instructions.append(
                        Instruction("virtual_z", (edge[1],), params)
                    )
                dur = new_param(WRAP_DURATION)
                amp = new_param(WRAP_AMPLITUDE)
                instructions.append(Instruction("cr", edge, (dur, amp)))
            instructions.append(BARRIER_INSTRUCTION)
    return Ansatz(n_qubits, coupling, tuple(instructions), tuple(wrappers),
                  "pulse", depth)


@dataclass(frozen=True)
class BoundAnsatz:
    """Compiled instruction sequence: (unitary, qubits) pairs with qubits[0]
    the least-significant index of the unitary, plus the pulse schedule."""

    operations: tuple
    schedule: tuple
    duration_samples: int
    wrapped_values: tuple


def bind(
    ansatz: Ansatz,
    theta,
    models: dict[tuple[int, int], pm.CrModel] | None = None,
    dt: float = pm.DEFAULT_DT,
) -> BoundAnsatz:
    """Apply the parameter wrappers and compile every instruction to a
    unitary plus its schedule contribution."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ansatz.n_parameters,):
        raise ValueError(
            f"expected {ansatz.n_parameters} parameters, got {theta.shape}"
        )
    values = tuple(_WRAP_FN[w](t) for w, t in zip(ansatz.wrappers, theta))
    needs_models = any(i.kind in ("cr", "cnot") for i in ansatz.instructions)
    if needs_models and models is None:
        raise ValueError("this ansatz needs CR fixture models per edge")

    ops = []
    schedule: list = []
    cnot_cache: dict[tuple[int, int], pm.ModelCnot] = {}
    for inst in ansatz.instructions:
        if inst.kind == "barrier":
            schedule.append(pm.BARRIER)
        elif inst.kind == "sq_rot":
            q = inst.qubits[0]
            v = values[inst.params[0]]
            if inst.axis == "x":
                assert abs(v) <= 1.0 + 1e-12
                ops.append((pm.rx_unitary(v), (q,)))
                schedule.append(pm.ScheduleEntry((q,), pm.DRAG_DURATION, "rx"))
            else:
                ops.append((pm.ry_unitary(v), (q,)))
                # R_Y decomposes to two sqrt-X pulses plus virtual-Z frames
                schedule.append(pm.ScheduleEntry((q,), 2 * pm.DRAG_DURATION, "ry"))
        elif inst.kind == "virtual_z":
            lam = values[inst.params[0]] if inst.params else 0.0
            ops.append((pm.rz_unitary(lam), inst.qubits))
        elif inst.kind == "cr":
            c, t = inst.qubits
            dur = values[inst.params[0]]
            amp = values[inst.params[1]]
            assert dur % 16 == 0 and pm.DURATION_MIN <= dur <= pm.DURATION_MAX
            assert abs(amp) <= 1.0 + 1e-12
            pulse = pm.gaussian_square(int(dur), amp)
            ops.append((pm.cr_unitary(models[(c, t)], pulse, 0.0, dt), (t, c)))
            schedule.append(pm.ScheduleEntry((c, t), int(dur), "cr"))
        elif inst.kind == "cnot":
            edge = inst.qubits
            if edge not in cnot_cache:
                cnot_cache[edge] = pm.build_model_cnot(models[edge], dt)
            model = cnot_cache[edge]
            ops.append((model.unitary, (edge[1], edge[0])))
            schedule.extend(model.entries)
        else:
            raise ValueError(f"unknown instruction kind {inst.kind!r}")
    return BoundAnsatz(tuple(ops), tuple(schedule),
                       pm.schedule_duration(schedule), values)


def prepare_state(bound: BoundAnsatz, n_qubits: int) -> np.ndarray:
    state = zero_state(n_qubits)
    for unitary, qubits in bound.operations:
        apply(state, unitary, qubits)
    return state


# ---------------------------------------------------------------------------
# Derivative-free optimization.

@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    trace: list[float]
    n_evaluations: int
    method: str
    status: str = "ok"


class _NonFiniteObjective(RuntimeError):
    pass


def minimize(objective, x0, method: str = "simplex", budget: int = 1000,
             seed: int = 0) -> MinimizeResult:
    """Derivative-free descent returning the best point ever evaluated.

    ``simplex`` is a Nelder-Mead with the standard 1, 2, 0.5, 0.5
    coefficients, restarted from the incumbent (with a seeded jitter) until
    the budget is used; ``cobyla`` is the linearly-constrained trust-region
    alternative behind the same interface.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    trace: list[float] = []
    best = {"x": x0.copy(), "f": math.inf}

    def wrapped(x):
        if len(trace) >= budget:
            raise StopIteration
        f = float(objective(np.asarray(x, dtype=float)))
        if not math.isfinite(f):
            raise _NonFiniteObjective(f"objective returned {f}")
        trace.append(f)
        if f < best["f"]:
            best["f"] = f
            best["x"] = np.array(x, dtype=float)
        return f

    status = "ok"
    rng = make_rng(seed, 0xD1CE)
    try:
        if method == "simplex":
            restart = 0
            jitter = 0.05
            while len(trace) < budget and restart < 10 * budget:
                f_before = best["f"]
                start = best["x"] if math.isfinite(best["f"]) else x0
                if restart > 0:
                    start = start + jitter * rng.standard_normal(start.shape)
                sciopt.minimize(
                    wrapped, start, method="Nelder-Mead",
                    options={"maxfev": budget - len(trace), "xatol": 1e-9,
                             "fatol": 1e-12, "adaptive": False},
                )
                restart += 1
                # polish while improving; escalate the perturbation when stuck
                jitter = 0.05 if best["f"] < f_before - 1e-12 else min(jitter * 4.0, 3.0)
        elif method == "cobyla":
            sciopt.minimize(wrapped, x0, method="COBYLA",
                            options={"maxiter": budget, "tol": 1e-10})
        else:
            raise ValueError(f"unknown method {method!r}")
    except StopIteration:
        pass
    except _NonFiniteObjective:
        status = "aborted-non-finite"
    if not math.isfinite(best["f"]):
        raise RuntimeError("objective never returned a finite value")
    return MinimizeResult(best["x"], best["f"], trace, len(trace), method, status)


# ---------------------------------------------------------------------------
# VQE driver.

@dataclass
class VqeResult:
    best_params: np.ndarray
    best_energy: float
    trace: list[dict]  # {"eval", "energy", "duration_samples"}
    n_evaluations: int
    duration_samples: int
    seed: int
    method: str
    shots: int | str
    status: str = "ok"


def random_initial_point(n_parameters: int, seed: int) -> np.ndarray:
    """Uniform draw from [0, pi]^k, the documented initial-point convention."""
    return make_rng(seed, 0x1417).uniform(0.0, math.pi, n_parameters)


def vqe_minimize(
    hamiltonian: PauliSum,
    ansatz: Ansatz,
    models: dict | None = None,
    *,
    shots: int | str = "exact",
    rm=None,
    mitigate: bool = False,
    seed: int = 0,
    budget: int = 2000,
    x0=None,
    method: str = "simplex",
    dt: float = pm.DEFAULT_DT,
    free_mask=None,
) -> VqeResult:
    """Minimize the estimated energy of the bound ansatz state.

    ``free_mask`` restricts the optimization to a subset of parameters (the
    others stay at their ``x0`` values), which implements staged protocols
    such as amplitudes-and-durations first, phases second.
    """
    if hamiltonian.n_qubits != ansatz.n_qubits:
        raise ValueError("Hamiltonian and ansatz qubit counts differ")
    k = ansatz.n_parameters
    x0 = random_initial_point(k, seed) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (k,):
        raise ValueError(f"x0 must have {k} entries")
    free = np.ones(k, dtype=bool) if free_mask is None else np.asarray(free_mask, bool)

    exact = shots == "exact" or shots is None
    dense = pauli_sum_matrix(hamiltonian) if exact else None
    groups = None if exact else group_qubitwise(hamiltonian)

    trace: list[dict] = []
    base = x0.copy()

    def objective(sub):
        theta = base.copy()
        theta[free] = sub
        bound = bind(ansatz, theta, models, dt)
        state = prepare_state(bound, ansatz.n_qubits)
        if exact:
            energy = float(np.real(np.vdot(state, dense @ state)))
        else:
            energy, _ = estimate_energy(state, hamiltonian, groups, shots, rm,
                                        seed=seed, iteration=len(trace),
                                        mitigate=mitigate)
        trace.append({"eval": len(trace), "energy": energy,
                      "duration_samples": bound.duration_samples})
        return energy

    res = minimize(objective, x0[free], method=method, budget=budget, seed=seed)
    best = base.copy()
    best[free] = res.x
    duration = bind(ansatz, best, models, dt).duration_samples
    return VqeResult(best, res.fun, trace, res.n_evaluations, duration,
                     seed, method, shots, res.status)


def run_record(result: VqeResult, *, system: str, geometry: dict, mapping: str,
               ansatz: Ansatz) -> dict:
    """JSON-serializable record of one VQE run (reproducible from itself)."""
    return {
        "system": system,
        "geometry": geometry,
        "mapping": mapping,
        "ansatz": {
            "kind": ansatz.kind,
            "depth": ansatz.depth,
            "n_qubits": ansatz.n_qubits,
            "coupling": [list(e) for e in ansatz.coupling],
            "n_parameters": ansatz.n_parameters,
        },
        "wrappers": list(ansatz.wrappers),
        "seed": result.seed,
        "method": result.method,
        "shots": result.shots,
        "trace": result.trace,
        "best": {
            "params": [float(v) for v in result.best_params],
            "energy": result.best_energy,
            "duration_samples": result.duration_samples,
        },
    }


# ---------------------------------------------------------------------------
# Scans and curve fitting.

@dataclass
class ScanRecord:
    x: float
    energy_vqe: float | None
    energy_fci: float
    energy_hf: float
    duration_samples: int
    params: np.ndarray | None = None
    result: VqeResult | None = None


def scan(
    build_problem,
    points,
    ansatz: Ansatz | None = None,
    models: dict | None = None,
    *,
    shots: int | str = "exact",
    rm=None,
    seed: int = 0,
    budget: int = 2000,
    warm_start: bool = True,
    restarts: int = 1,
    method: str = "simplex",
    dt: float = pm.DEFAULT_DT,
) -> list[ScanRecord]:
    """Solve a family of problems along ordered ``points``.

    ``build_problem(x)`` returns (hamiltonian, fci_energy, hf_energy).  With
    ``warm_start`` each point's first run starts from the previous best
    parameters; additional ``restarts`` use fresh seeded random points.
    Without an ansatz the scan records the classical baselines only.
    """
    records: list[ScanRecord] = []
    previous: np.ndarray | None = None
    for i, x in enumerate(points):
        hamiltonian, e_fci, e_hf = build_problem(x)
        if ansatz is None:
            records.append(ScanRecord(float(x), None, e_fci, e_hf, 0))
            continue
        best: VqeResult | None = None
        for run in range(max(1, restarts)):
            if run == 0 and warm_start and previous is not None:
                x0 = previous
            else:
                x0 = random_initial_point(ansatz.n_parameters,
                                          seed + 7919 * i + 104729 * run)
            res = vqe_minimize(hamiltonian, ansatz, models, shots=shots, rm=rm,
                               seed=seed + 7919 * i + 104729 * run,
                               budget=budget, x0=x0, method=method, dt=dt)
            if best is None or res.best_energy < best.best_energy:
                best = res
        previous = best.best_params
        records.append(ScanRecord(float(x), best.best_energy, e_fci, e_hf,
                                  best.duration_samples, best.best_params, best))
    return records


def curve_csv(records: list[ScanRecord], gnuplot_compatible: bool = False) -> str:
    """Curve CSV `x, energy_vqe, energy_fci, energy_hf, duration_samples`;
    the gnuplot flag only reorders columns (classical baselines first)."""
    if gnuplot_compatible:
        header = "# x,energy_fci,energy_hf,energy_vqe,duration_samples"
        order = ("x", "energy_fci", "energy_hf", "energy_vqe", "duration_samples")
    else:
        header = "x,energy_vqe,energy_fci,energy_hf,duration_samples"
        order = ("x", "energy_vqe", "energy_fci", "energy_hf", "duration_samples")
    lines = [header]
    for r in records:
        fields = []
        for name in order:
            v = getattr(r, name)
            if v is None:
                fields.append("")
            elif name == "duration_samples":
                fields.append(str(int(v)))
            else:
                fields.append(f"{v:.12e}")
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def quartic_fit_min(xs, ys) -> tuple[np.ndarray, float, bool]:
    """Least-squares quartic on centered/scaled abscissas.

    Returns (coefficients in ascending powers of x, x_min, at_boundary).
    ``x_min`` is the real root of the derivative inside [min(xs), max(xs)]
    with the lowest fitted value (ties toward smaller x); when no interior
    minimum exists the lower-valued boundary is reported with
    ``at_boundary=True``.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 6:
        raise ValueError("need at least 6 points for a quartic fit")
    if len(np.unique(xs)) != len(xs):
        raise ValueError("abscissas must be distinct")
    poly = np.polynomial.Polynomial.fit(xs, ys, 4)
    lo, hi = float(xs.min()), float(xs.max())
    candidates = []
    for root in poly.deriv().roots():
        if abs(root.imag) < 1e-9 * max(1.0, abs(root.real)):
            x = float(root.real)
            if lo <= x <= hi:
                candidates.append(x)
    at_boundary = not candidates
    if at_boundary:
        candidates = [lo, hi]
    values = poly(np.array(candidates))
    best = min(zip(values, candidates), key=lambda vc: (vc[0], vc[1]))
    coeffs = poly.convert().coef
    coeffs = np.pad(coeffs, (0, 5 - len(coeffs)))
    return coeffs, float(best[1]), at_boundary


# ---------------------------------------------------------------------------
# Depth study (convergence traces for several entangler repetitions).

def depth_study(
    hamiltonian: PauliSum,
    coupling,
    models: dict,
    *,
    depths=(1, 2, 3),
    seeds=(0, 1, 2),
    shots: int | str = 4096,
    budget: int = 150,
    method: str = "simplex",
) -> tuple[list[tuple[int, int, VqeResult]], str]:
    """CNOT-ansatz convergence study: every (depth, seed) run starts from a
    fresh uniform [0, pi] point.  Returns the runs and a convergence-trace
    CSV `depth,seed,eval,energy`."""
    runs = []
    lines = ["depth,seed,eval,energy"]
    for depth in depths:
        ansatz = build_cnot_ansatz(hamiltonian.n_qubits, coupling, depth)
        for seed in seeds:
            res = vqe_minimize(hamiltonian, ansatz, models, shots=shots,
                               seed=seed, budget=budget, method=method)
            runs.append((depth, seed, res))
            for row in res.trace:
                lines.append(f"{depth},{seed},{row['eval']},{row['energy']:.12e}")
    return runs, "\n".join(lines) + "\n"
