"""Cross-resonance pulse model: parameter wrappers, pulse envelopes, the
effective two-qubit generator with drive-phase control, echo sequences,
Hamiltonian tomography, and schedule-duration accounting.

Tensor convention for two-qubit matrices: control (x) target, i.e. the
control qubit is the most-significant bit of the 4-dimensional index.  All
frequencies are linear (Hz); generators carry the 2*pi.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

DEFAULT_DT = 0.222e-9  # seconds per AWG sample

# Single-qubit DRAG calibration record (typical backend X-gate values).  The
# DRAG beta has no effect on the ideal two-level unitary; it only shapes the
# envelope and is carried for serialization and duration accounting.
DRAG_DURATION = 160  # samples
DRAG_SIGMA = 40.0
DRAG_BETA = 0.6

GS_SIGMA = 64.0  # GaussianSquare flank standard deviation, samples
GS_RISEFALL = 256  # 4 sigma total (each flank is 2 sigma)

DURATION_MIN = 256
DURATION_MAX = 1040

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class FixtureError(ValueError):
    """Malformed cross-resonance fixture file."""


class TomographyFitError(RuntimeError):
    """Tomography fit residual above threshold; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


# ---------------------------------------------------------------------------
# Parameter wrappers (hardware constraints on amplitude and duration).

def wrap_amplitude(theta: float) -> float:
    """Smooth, 2*pi-periodic map of an unconstrained angle into [-1, 1]."""
    if not math.isfinite(theta):
        raise ValueError("amplitude parameter must be finite")
    return math.sin(theta)


def wrap_duration(theta: float) -> int:
    """Map an unconstrained angle to a valid pulse duration in samples.

    Sinusoidal in theta, discretized to multiples of 16 and clamped to
    [256, 1040] so the GaussianSquare width stays non-negative.
    """
    if not math.isfinite(theta):
        raise ValueError("duration parameter must be finite")
    center = (DURATION_MAX + DURATION_MIN) / 2.0
    span = (DURATION_MAX - DURATION_MIN) / 2.0
    raw = 16 * round((center + span * math.sin(theta)) / 16.0)
    return int(min(DURATION_MAX, max(DURATION_MIN, raw)))


# ---------------------------------------------------------------------------
# Pulse shapes and envelopes.

@dataclass(frozen=True)
class PulseShape:
    """DRAG or GaussianSquare envelope in AWG units.

    Durations are integer samples (multiples of 16), amplitudes fractions of
    the maximum AWG output (|amplitude| <= 1).
    """

    kind: str  # "drag" | "gaussian_square"
    duration: int
    amplitude: complex
    sigma: float
    width: int = 0  # GaussianSquare flat-top length
    beta: float = 0.0  # DRAG derivative weight
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("drag", "gaussian_square"):
            raise ValueError(f"unknown pulse kind {self.kind!r}")
        if self.duration % 16 != 0 or self.duration <= 0:
            raise ValueError("pulse duration must be a positive multiple of 16")
        if abs(self.amplitude) > 1.0 + 1e-12:
            raise ValueError(f"|amplitude| = {abs(self.amplitude):.6f} exceeds 1")
        if self.width < 0:
            raise ValueError("flat-top width must be non-negative")
        if self.kind == "gaussian_square" and self.duration != self.width + 4 * int(self.sigma):
            raise ValueError("GaussianSquare needs duration = width + 4*sigma")


def gaussian_square(duration: int, amplitude: complex, phase: float = 0.0,
                    sigma: float = GS_SIGMA) -> PulseShape:
    """Flat-top pulse with Gaussian flanks of 2*sigma on each side."""
    width = duration - 4 * int(sigma)
    return PulseShape("gaussian_square", duration, amplitude, sigma,
                      width=width, phase=phase)


def drag(amplitude: complex, duration: int = DRAG_DURATION,
         sigma: float = DRAG_SIGMA, beta: float = DRAG_BETA,
         phase: float = 0.0) -> PulseShape:
    """Single-qubit DRAG pulse with the fixed calibration record defaults."""
    return PulseShape("drag", duration, amplitude, sigma, beta=beta, phase=phase)


def envelope_samples(p: PulseShape) -> np.ndarray:
    """Complex AWG samples of the envelope.

    Both shapes use the lifted-Gaussian normalization: the envelope is zero
    at the first and last sample and reaches the full amplitude at the peak
    (flat top for GaussianSquare, center for DRAG).
    """
    k = np.arange(p.duration, dtype=float)
    if p.kind == "gaussian_square":
        rise = 2.0 * p.sigma
        g = np.ones(p.duration)
        left = k < rise
        g[left] = np.exp(-((k[left] - rise) ** 2) / (2.0 * p.sigma ** 2))
        right = k >= rise + p.width
        mirror = p.duration - 1 - k[right]
        g[right] = np.exp(-((mirror - rise) ** 2) / (2.0 * p.sigma ** 2))
        g0 = math.exp(-(rise ** 2) / (2.0 * p.sigma ** 2))
        shape = (g - g0) / (1.0 - g0)
    else:
        center = (p.duration - 1) / 2.0
        g = np.exp(-((k - center) ** 2) / (2.0 * p.sigma ** 2))
        g0 = math.exp(-(center ** 2) / (2.0 * p.sigma ** 2))
        lifted = (g - g0) / (1.0 - g0)
        derivative = -(k - center) / (p.sigma ** 2) * g / (1.0 - g0)
        shape = lifted + 1j * p.beta * derivative
    return p.amplitude * np.exp(1j * p.phase) * shape


def envelope_area(p: PulseShape) -> float:
    """Sample sum of the unit-amplitude, zero-phase envelope."""
    unit = PulseShape(p.kind, p.duration, 1.0, p.sigma,
                      width=p.width, beta=p.beta, phase=0.0)
    return float(np.real(np.sum(envelope_samples(unit))))


def gaussian_square_flank_area(sigma: float = GS_SIGMA) -> float:
    """Sample sum of both Gaussian flanks of a unit GaussianSquare."""
    return envelope_area(gaussian_square(4 * int(sigma), 1.0, sigma=sigma))


# ---------------------------------------------------------------------------
# Cross-resonance effective model.

@dataclass(frozen=True)
class CrModel:
    """Seven coefficients of the effective CR generator for one directed
    (control, target) pair, in Hz at unit normalized drive amplitude."""

    control: int
    target: int
    nu_zx: float
    nu_zy: float
    nu_zz: float
    nu_ix: float
    nu_iy: float
    nu_iz: float
    nu_zi: float = 0.0  # never reported by tomography; configurable
    uncertainties: dict[str, float] = field(default_factory=dict)
    device: str = ""

    def __post_init__(self):
        for name in ("nu_zx", "nu_zy", "nu_zz", "nu_ix", "nu_iy", "nu_iz", "nu_zi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


_FIXTURE_KEYS = {
    "nu_zx_khz": "nu_zx", "nu_zy_khz": "nu_zy", "nu_zz_khz": "nu_zz",
    "nu_ix_khz": "nu_ix", "nu_iy_khz": "nu_iy", "nu_iz_khz": "nu_iz",
    "nu_zi_khz": "nu_zi",
}


def parse_cr_fixtures(text: str) -> dict[tuple[int, int], CrModel]:
    """Parse the textual fixture format (``pair = (i, j)`` records with
    ``nu_??_khz = value [± uncertainty]`` lines, case-insensitive)."""
    models: dict[tuple[int, int], CrModel] = {}
    device = ""
    current: dict | None = None

    def finish():
        nonlocal current
        if current is None:
            return
        pair = current.pop("pair")
        unc = current.pop("uncertainties")
        models[pair] = CrModel(pair[0], pair[1], uncertainties=unc,
                               device=device, **current)
        current = None

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FixtureError(f"malformed fixture line: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key == "device":
            device = value
        elif key == "pair":
            finish()
            m = re.fullmatch(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", value)
            if not m:
                raise FixtureError(f"bad pair record: {raw!r}")
            current = {"pair": (int(m.group(1)), int(m.group(2))),
                       "uncertainties": {}}
        elif key in _FIXTURE_KEYS:
            if current is None:
                raise FixtureError(f"{key} outside a pair record")
            parts = [p.strip() for p in re.split(r"±|\+-", value)]
            name = _FIXTURE_KEYS[key]
            current[name] = float(parts[0]) * 1e3
            if len(parts) > 1:
                current["uncertainties"][name] = float(parts[1]) * 1e3
        else:
            raise FixtureError(f"unknown fixture key {key!r}")
    finish()
    if not models:
        raise FixtureError("fixture file contains no pair records")
    return models


def load_cr_fixtures(path: str | Path) -> dict[tuple[int, int], CrModel]:
    return parse_cr_fixtures(Path(path).read_text())


def builtin_fixture_path(name: str) -> Path:
    """Path of one of the shipped fixture files (lagos, mumbai, lagos_echo_01)."""
    base = resources.files("pulsevqe") / "fixtures" / f"{name}.txt"
    with resources.as_file(base) as path:
        return Path(path)


def cr_generator(m: CrModel, phi: float = 0.0) -> np.ndarray:
    """Effective generator (rad/s) at unit drive amplitude and phase ``phi``.

    The drive phase rotates the (nu_zx, nu_zy) and (nu_ix, nu_iy) pairs in
    their XY planes; the Z-axis coefficients are phase-independent.
    """
    c, s = math.cos(phi), math.sin(phi)
    zx, zy = c * m.nu_zx - s * m.nu_zy, s * m.nu_zx + c * m.nu_zy
    ix, iy = c * m.nu_ix - s * m.nu_iy, s * m.nu_ix + c * m.nu_iy
    b = m.nu_zi * _I2 + zx * _X + zy * _Y + m.nu_zz * _Z
    cmat = ix * _X + iy * _Y + m.nu_iz * _Z
    return 2.0 * math.pi * 0.5 * (np.kron(_Z, b) + np.kron(_I2, cmat))


def _expm_hermitian(angle_times_h: np.ndarray) -> np.ndarray:
    """exp(-i H) for Hermitian H via eigendecomposition (exactly unitary)."""
    evals, vecs = np.linalg.eigh(angle_times_h)
    return (vecs * np.exp(-1j * evals)) @ vecs.conj().T


def cr_unitary(m: CrModel, p: PulseShape, phi: float = 0.0,
               dt: float = DEFAULT_DT) -> np.ndarray:
    """Unitary of one CR tone: exp(-i G(phi + arg(amp)) |amp| A dt) with A
    the unit-amplitude envelope sample sum.  Exact, because the generator
    direction is constant in time."""
    amp = p.amplitude * np.exp(1j * p.phase)
    if abs(amp) == 0.0:
        return np.eye(4, dtype=complex)
    g = cr_generator(m, phi + float(np.angle(amp)))
    return _expm_hermitian(g * (abs(amp) * envelope_area(p) * dt))


def echo_kept_generator(m: CrModel) -> np.ndarray:
    """First-order generator surviving the echo: ZX, ZY and IZ terms."""
    b = m.nu_zx * _X + m.nu_zy * _Y
    return 2.0 * math.pi * 0.5 * (np.kron(_Z, b) + m.nu_iz * np.kron(_I2, _Z))


def echoed_cr_unitary(m: CrModel, p: PulseShape, dt: float = DEFAULT_DT) -> np.ndarray:
    """Echo sequence X_c . CR(p, pi) . X_c . CR(p, 0); each half plays ``p``.

    To first order in the pulse area the IX/IY/ZZ/ZI terms cancel and only
    ZX, ZY and IZ survive.
    """
    x_c = np.kron(_X, _I2)
    return x_c @ cr_unitary(m, p, math.pi, dt) @ x_c @ cr_unitary(m, p, 0.0, dt)


def rx_unitary(a: float, amp_to_angle: float = math.pi) -> np.ndarray:
    """Single-qubit X rotation with amplitude-to-angle map theta = pi * a."""
    if abs(a) > 1.0 + 1e-12:
        raise ValueError(f"|amplitude| = {abs(a):.6f} exceeds 1")
    theta = amp_to_angle * a
    return math.cos(theta / 2) * _I2 - 1j * math.sin(theta / 2) * _X


def ry_unitary(theta: float) -> np.ndarray:
    return math.cos(theta / 2) * _I2 - 1j * math.sin(theta / 2) * _Y


def rz_unitary(lam: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * lam), 0], [0, np.exp(0.5j * lam)]])


CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


# ---------------------------------------------------------------------------
# Hamiltonian tomography.

def _conditioned_omegas(m: CrModel) -> list[np.ndarray]:
    """Target Bloch angular velocities (rad/s) for control in |0>, |1>."""
    z = np.array([m.nu_zx, m.nu_zy, m.nu_zz])
    i = np.array([m.nu_ix, m.nu_iy, m.nu_iz])
    return [2.0 * math.pi * (i + z), 2.0 * math.pi * (i - z)]


def _bloch_rotation(omega: np.ndarray, times: np.ndarray) -> np.ndarray:
    """r(t) for r(0) = e_z rotating at constant angular velocity omega;
    returns an array of shape (len(times), 3)."""
    norm = np.linalg.norm(omega)
    r0 = np.array([0.0, 0.0, 1.0])
    if norm == 0.0:
        return np.tile(r0, (len(times), 1))
    axis = omega / norm
    theta = norm * times[:, None]
    cross = np.cross(np.tile(axis, (len(times), 1)), np.tile(r0, (len(times), 1)))
    return (
        r0 * np.cos(theta)
        + cross * np.sin(theta)
        + axis * (axis @ r0) * (1.0 - np.cos(theta))
    )


@dataclass(frozen=True)
class TomographyTraces:
    """Target <X>,<Y>,<Z> traces for control prepared in |0> and |1>."""

    times: np.ndarray
    control0: np.ndarray  # (n_times, 3)
    control1: np.ndarray

    def to_csv(self) -> str:
        lines = ["time_s,x0,y0,z0,x1,y1,z1"]
        for t, r0, r1 in zip(self.times, self.control0, self.control1):
            lines.append(
                f"{t:.12e},{r0[0]:.12e},{r0[1]:.12e},{r0[2]:.12e},"
                f"{r1[0]:.12e},{r1[1]:.12e},{r1[2]:.12e}"
            )
        return "\n".join(lines) + "\n"


def tomography_traces(m: CrModel, times) -> TomographyTraces:
    """Exact target Bloch traces under the control-conditioned generator."""
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("tomography times must be non-negative")
    om0, om1 = _conditioned_omegas(m)
    return TomographyTraces(times, _bloch_rotation(om0, times),
                            _bloch_rotation(om1, times))


def _fit_rotation(times: np.ndarray, trace: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares fit of a constant-axis Bloch rotation to one trace;
    returns (omega, rms residual)."""

    def residual(omega):
        return (_bloch_rotation(omega, times) - trace).ravel()

    # |omega| estimate from the z-trace oscillation, axis candidates from the
    # time-averaged Bloch vector m = n (n.e_z) and from the early derivative.
    z = trace[:, 2]
    spectrum = np.abs(np.fft.rfft(z - z.mean()))
    freqs = 2.0 * math.pi * np.fft.rfftfreq(len(times), times[1] - times[0])
    w_est = freqs[1 + int(np.argmax(spectrum[1:]))] if len(spectrum) > 1 else 0.0
    mean = trace.mean(axis=0)
    guesses = []
    nz = math.sqrt(min(1.0, np.linalg.norm(mean)))
    if nz > 1e-6:
        axis = mean / np.linalg.norm(mean)
        guesses += [w_est * axis * s for s in (1.0, -1.0)]
    dt0 = times[1] - times[0]
    slope = (trace[1] - trace[0]) / dt0  # dr/dt(0) = omega x e_z = (w_y, -w_x, 0)
    for wz in (w_est, -w_est, 0.0):
        guesses.append(np.array([-slope[1], slope[0], wz]))
    best, best_cost = None, np.inf
    for g in guesses:
        sol = least_squares(residual, g, method="lm", xtol=1e-14, ftol=1e-14)
        if sol.cost < best_cost:
            best, best_cost = sol.x, sol.cost
    rms = math.sqrt(2.0 * best_cost / trace.size)
    return best, rms


def fit_tomography(traces: TomographyTraces, residual_tol: float = 1e-3) -> CrModel:
    """Recover the CR model from conditioned Bloch traces.

    Fits one constant-axis rotation per control state and combines the
    conditional frequencies as nu_Z* = (nu^0 - nu^1)/2, nu_I* = (nu^0 +
    nu^1)/2.  Raises :class:`TomographyFitError` when the residual exceeds
    ``residual_tol``.
    """
    if len(traces.times) < 12:
        raise ValueError("need at least 12 time points")
    om0, rms0 = _fit_rotation(traces.times, traces.control0)
    om1, rms1 = _fit_rotation(traces.times, traces.control1)
    rms = max(rms0, rms1)
    if rms > residual_tol:
        raise TomographyFitError(f"tomography fit residual {rms:.3e}", rms)
    nu0 = om0 / (2.0 * math.pi)
    nu1 = om1 / (2.0 * math.pi)
    nu_z = 0.5 * (nu0 - nu1)
    nu_i = 0.5 * (nu0 + nu1)
    return CrModel(0, 1, nu_zx=nu_z[0], nu_zy=nu_z[1], nu_zz=nu_z[2],
                   nu_ix=nu_i[0], nu_iy=nu_i[1], nu_iz=nu_i[2])


# ---------------------------------------------------------------------------
# Schedules: timed pulse entries with barriers, critical-path duration.

@dataclass(frozen=True)
class ScheduleEntry:
    """One pulse occupying its qubits for ``duration`` samples."""

    qubits: tuple[int, ...]
    duration: int
    label: str = ""


class Barrier:
    """Synchronization point across all qubits."""

    def __repr__(self):
        return "Barrier()"


BARRIER = Barrier()


def schedule_duration(schedule) -> int:
    """Critical-path length of a schedule in samples.

    Entries start as soon as all their qubits are free; barriers align every
    qubit.  Late (ALAP) alignment of single-qubit pulses shifts start times
    only, so the critical path is the schedule duration either way.
    """
    clock: dict[int, int] = {}
    floor = 0  # earliest start after the last barrier, for all qubits
    for entry in schedule:
        if isinstance(entry, Barrier):
            floor = max([floor, *clock.values()]) if clock else floor
            continue
        start = max(floor, *(clock.get(q, 0) for q in entry.qubits)) \
            if entry.qubits else floor
        for q in entry.qubits:
            clock[q] = start + entry.duration
    return max([floor, *clock.values()]) if clock else floor


def _ceil16(value: float) -> int:
    return int(16 * math.ceil(value / 16.0))


@dataclass(frozen=True)
class ModelCnot:
    """Echoed-CR CNOT stand-in: ideal unitary plus a fixture-calibrated
    schedule (two CR halves with interleaved control X pulses and one
    single-qubit dressing pulse on the target)."""

    unitary: np.ndarray
    entries: tuple
    duration: int


def build_model_cnot(m: CrModel, dt: float = DEFAULT_DT,
                     drag_duration: int = DRAG_DURATION) -> ModelCnot:
    """Durations follow the fixture: each echoed half carries a quarter-turn
    of ZX area, 2*pi*|nu_zx|*A*dt = pi/4 over the full echo."""
    area_half = 1.0 / (8.0 * abs(m.nu_zx) * dt)
    width = max(0.0, area_half - gaussian_square_flank_area())
    cr_dur = max(DURATION_MIN, _ceil16(width + GS_RISEFALL))
    c, t = m.control, m.target
    entries = (
        ScheduleEntry((c, t), cr_dur, "cr_half"),
        ScheduleEntry((c,), drag_duration, "x"),
        ScheduleEntry((c, t), cr_dur, "cr_half"),
        ScheduleEntry((c,), drag_duration, "x"),
        ScheduleEntry((t,), drag_duration, "sx"),
    )
    return ModelCnot(CNOT_MATRIX.copy(), entries, schedule_duration(entries))


# ---------------------------------------------------------------------------
# Population dynamics (echo illustration).

def cr_population_dynamics(m: CrModel, durations, dt: float = DEFAULT_DT,
                           echo: bool = False, amplitude: float = 1.0):
    """Populations of |control, target> basis states versus pulse duration
    for the control prepared in |0> and |1> (target starts in |0>).

    Returns (durations, populations) with populations shaped
    (2, len(durations), 4); the basis index is control*2 + target.
    """
    durations = [int(d) for d in durations]
    pops = np.zeros((2, len(durations), 4))
    for j, dur in enumerate(durations):
        pulse = gaussian_square(dur, amplitude)
        u = echoed_cr_unitary(m, pulse, dt) if echo else cr_unitary(m, pulse, 0.0, dt)
        for control in (0, 1):
            state = np.zeros(4, dtype=complex)
            state[2 * control] = 1.0
            pops[control, j] = np.abs(u @ state) ** 2
    return durations, pops


def zx_only_model(m: CrModel) -> CrModel:
    """Reference model retaining only the ZX coefficient."""
    return CrModel(m.control, m.target, nu_zx=m.nu_zx, nu_zy=0.0, nu_zz=0.0,
                   nu_ix=0.0, nu_iy=0.0, nu_iz=0.0, device=m.device)
