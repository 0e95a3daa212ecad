"""Steady-state sweeps and transient protocols over the dimer model.

Sweep grids default to ranges that resolve the dark-state resonance, the
polariton branches and the collapse scales of the model; every grid point is
an independent steady-state solve, executed sequentially or by a worker pool
with order-preserving assembly (parallel and sequential runs produce
identical grids).
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, SolverError
from .hilbert import DensityMatrix
from .liouvillian import build_liouvillian
from .model import SystemParams, identify_dark_state
from .solvers import Schedule, Trajectory, evolve, resolve_observable, steady_state

__all__ = [
    "SweepAxis",
    "SweepSpec",
    "SweepResult",
    "run_sweep",
    "sweep_phase_detuning",
    "sweep_detuning",
    "sweep_dephasing",
    "sweep_splitting",
    "dynamics_run",
    "stark_switch_protocol",
    "optimal_transfer_time",
    "oscillation_period",
    "default_phi_grid",
    "default_delta_grid",
    "default_qd_detuning_grid",
    "default_gamma_d_grid",
    "QD_GAMMA_FAMILY",
    "INITIAL_STATES",
]

# emitter loss rates (ueV) used as the default multi-curve family
QD_GAMMA_FAMILY = (0.0, 0.66, 3.3, 6.6)


def default_phi_grid() -> np.ndarray:
    return np.linspace(0.0, 2.0 * np.pi, 61)


def default_delta_grid(coupling: float = 110.0) -> np.ndarray:
    g = abs(coupling)
    return np.linspace(-3.0 * g, 3.0 * g, 121)


def default_qd_detuning_grid() -> np.ndarray:
    return np.linspace(-50.0, 50.0, 101)


def default_gamma_d_grid() -> np.ndarray:
    return np.linspace(0.0, 5.0, 51)


# ---------------------------------------------------------------------------
# generic sweep engine
# ---------------------------------------------------------------------------

def _set_phi(params: SystemParams, value) -> SystemParams:
    return params.with_drive(phase1=float(value), phase2=0.0)


def _set_delta(params: SystemParams, value) -> SystemParams:
    return params.with_drive_detuning(float(value))


def _set_qd2_detuning(params: SystemParams, value) -> SystemParams:
    return params.with_qd2_detuning(float(value))


def _set_gamma_d(params: SystemParams, value) -> SystemParams:
    return params.with_dephasing(float(value))


def _set_splitting(params: SystemParams, value) -> SystemParams:
    """Move the upper mode and re-tune the drive onto the shifted dark state
    (the dark resonance tracks the splitting; a fixed drive frequency would
    just fall off resonance instead of probing the protection)."""
    moved = params.with_splitting(float(value))
    dark = identify_dark_state(moved)
    return moved.with_drive_detuning(dark.detuning)


def _set_mode_linewidths(params: SystemParams, value) -> SystemParams:
    gamma1, gamma2 = value
    return params.with_mode_linewidths(float(gamma1), float(gamma2))


def _set_qd_gamma(params: SystemParams, value) -> SystemParams:
    return params.with_qd_decay(float(value))


_AXIS_SETTERS = {
    "phi": _set_phi,
    "delta": _set_delta,
    "qd2_detuning": _set_qd2_detuning,
    "gamma_d": _set_gamma_d,
    "splitting": _set_splitting,
    "mode_linewidths": _set_mode_linewidths,
    "qd_gamma": _set_qd_gamma,
}

_AXIS_COLUMNS = {
    "phi": ("phi_rad",),
    "delta": ("delta_ueV",),
    "qd2_detuning": ("qd2_detuning_ueV",),
    "gamma_d": ("gamma_d_ueV",),
    "splitting": ("splitting_ueV",),
    "mode_linewidths": ("gamma_m1_ueV", "gamma_m2_ueV"),
    "qd_gamma": ("qd_gamma_ueV",),
}


@dataclass(frozen=True)
class SweepAxis:
    """One named sweep parameter with its value grid."""

    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in _AXIS_SETTERS:
            raise DomainError(
                f"unknown sweep axis {self.name!r}; known: {sorted(_AXIS_SETTERS)}"
            )
        values = tuple(
            tuple(float(x) for x in v) if np.iterable(v) else float(v)
            for v in self.values
        )
        if not values:
            raise DomainError(f"axis {self.name!r} has an empty grid")
        flat = [x for v in values for x in (v if isinstance(v, tuple) else (v,))]
        if not np.all(np.isfinite(flat)):
            raise DomainError(f"axis {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SweepSpec:
    """Base parameters plus one or two axes and a steady-state observable."""

    base: SystemParams
    axes: tuple[SweepAxis, ...]
    observable: str = "negativity"

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise DomainError("a sweep takes one or two axes")
        resolve_observable(self.observable)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(ax) for ax in self.axes)

    def point_params(self, indices) -> SystemParams:
        params = self.base
        for axis, k in zip(self.axes, indices):
            params = _AXIS_SETTERS[axis.name](params, axis.values[k])
        return params


@dataclass(frozen=True)
class SweepResult:
    """Observable grid with per-point solver diagnostics."""

    axes: tuple[SweepAxis, ...]
    observable: str
    values: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    converged: np.ndarray = field(repr=False)
    failures: tuple[str, ...] = ()

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def argmax(self) -> tuple:
        """Axis values at the grid maximum (NaN-safe)."""
        flat = np.nanargmax(self.values)
        indices = np.unravel_index(flat, self.values.shape)
        return tuple(ax.values[k] for ax, k in zip(self.axes, indices))

    def to_records(self):
        """(column names, row iterator) for CSV serialization, C-order."""
        columns = []
        for ax in self.axes:
            columns.extend(_AXIS_COLUMNS[ax.name])
        columns += [self.observable, "residual", "converged"]
        rows = []
        for indices in itertools.product(*(range(len(ax)) for ax in self.axes)):
            row = []
            for ax, k in zip(self.axes, indices):
                v = ax.values[k]
                row.extend(v if isinstance(v, tuple) else (v,))
            row.append(float(self.values[indices]))
            row.append(float(self.residuals[indices]))
            row.append(int(self.converged[indices]))
            rows.append(tuple(row))
        return tuple(columns), tuple(rows)


def _evaluate_point(args):
    """Solve one steady state; never raises (failures are reported inline)."""
    params, observable = args
    func = resolve_observable(observable)
    try:
        rho, info = steady_state(build_liouvillian(params), return_info=True)
        return float(func(params, rho)), info.residual, True, ""
    except SolverError as exc:
        return float("nan"), float("nan"), False, str(exc)


def run_sweep(spec: SweepSpec, n_workers: int = 1) -> SweepResult:
    """Evaluate the sweep grid point by point in fixed C-order.

    Per-point solver failures are recorded (NaN value, converged=False) and
    the sweep continues.  Results are bit-identical for any worker count.
    """
    shape = spec.shape
    index_list = list(itertools.product(*(range(n) for n in shape)))
    tasks = [(spec.point_params(idx), spec.observable) for idx in index_list]

    if n_workers > 1:
        chunk = max(1, len(tasks) // (8 * n_workers))
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(_evaluate_point, tasks, chunksize=chunk))
    else:
        outcomes = [_evaluate_point(t) for t in tasks]

    values = np.empty(shape)
    residuals = np.empty(shape)
    converged = np.empty(shape, dtype=bool)
    failures = []
    for idx, (value, residual, ok, message) in zip(index_list, outcomes):
        values[idx] = value
        residuals[idx] = residual
        converged[idx] = ok
        if not ok:
            failures.append(f"point {idx}: {message}")
    return SweepResult(
        axes=spec.axes,
        observable=spec.observable,
        values=values,
        residuals=residuals,
        converged=converged,
        failures=tuple(failures),
    )


# ---------------------------------------------------------------------------
# the standard steady-state studies
# ---------------------------------------------------------------------------

def _require_resonant(params: SystemParams, both: bool = True):
    omega_ref = params.modes[0].omega
    targets = params.dots if both else params.dots[:1]
    if any(d.omega != omega_ref for d in targets):
        raise DomainError(
            "emitters must start resonant with the lower normal mode"
        )


def sweep_phase_detuning(base: SystemParams, phi_grid=None, delta_grid=None,
                         n_workers: int = 1) -> SweepResult:
    """Steady-state negativity over drive phase difference and drive detuning."""
    _require_resonant(base)
    phi = default_phi_grid() if phi_grid is None else np.asarray(phi_grid, float)
    g = abs(base.coupling.as_array()[0, 0])
    delta = default_delta_grid(g) if delta_grid is None else np.asarray(delta_grid, float)
    spec = SweepSpec(base, (SweepAxis("phi", tuple(phi)),
                            SweepAxis("delta", tuple(delta))))
    return run_sweep(spec, n_workers)


def sweep_detuning(base: SystemParams, detuning_grid=None,
                   n_workers: int = 1) -> SweepResult:
    """Steady-state negativity versus the emitter-emitter detuning."""
    _require_resonant(base, both=False)
    grid = (default_qd_detuning_grid() if detuning_grid is None
            else np.asarray(detuning_grid, float))
    spec = SweepSpec(base, (SweepAxis("qd2_detuning", tuple(grid)),))
    return run_sweep(spec, n_workers)


def sweep_dephasing(base: SystemParams, gamma_d_grid=None,
                    n_workers: int = 1) -> SweepResult:
    """Steady-state negativity versus the (joint) pure-dephasing rate."""
    grid = (default_gamma_d_grid() if gamma_d_grid is None
            else np.asarray(gamma_d_grid, float))
    spec = SweepSpec(base, (SweepAxis("gamma_d", tuple(grid)),))
    return run_sweep(spec, n_workers)


def sweep_splitting(base: SystemParams, splitting_grid, linewidth_sets=None,
                    n_workers: int = 1) -> SweepResult:
    """Steady-state negativity versus the normal-mode splitting.

    Stands in for the interdot-distance dependence: the splitting (and
    optionally the mode linewidth pair) is the physically controlling variable.
    """
    _require_resonant(base)
    axes = [SweepAxis("splitting", tuple(np.asarray(splitting_grid, float)))]
    if linewidth_sets is not None:
        axes.append(SweepAxis("mode_linewidths",
                              tuple(tuple(pair) for pair in linewidth_sets)))
    spec = SweepSpec(base, tuple(axes))
    return run_sweep(spec, n_workers)


# ---------------------------------------------------------------------------
# transient dynamics
# ---------------------------------------------------------------------------

INITIAL_STATES = {
    "qd1_excited": (1, 0, 0, 0),
    "photon_mode1": (0, 0, 1, 0),
    "vacuum": (0, 0, 0, 0),
}


def _dark_drive(params: SystemParams) -> SystemParams:
    """Drive both emitters at the dark-state frequency with the optimal
    (antisymmetric) phase difference."""
    dark = identify_dark_state(params)
    return (params
            .with_drive(phase1=np.pi, phase2=0.0)
            .with_drive_detuning(dark.detuning))


def dynamics_run(base: SystemParams, initial: str, horizon: float,
                 samples: int = 801) -> Trajectory:
    """Free dynamics under constant dark-state drive from a chosen initial
    state ('qd1_excited', 'photon_mode1' or 'vacuum')."""
    try:
        occupations = INITIAL_STATES[initial]
    except KeyError:
        raise DomainError(
            f"unknown initial state {initial!r}; choose from {sorted(INITIAL_STATES)}"
        ) from None
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    params = _dark_drive(base)
    rho0 = DensityMatrix.basis_state(params.space(), occupations)
    t_grid = np.linspace(0.0, horizon, samples)
    return evolve(Schedule.constant(params, horizon), rho0, t_grid)


def stark_switch_protocol(base: SystemParams, tau: float,
                          initial_detuning: float, horizon: float,
                          samples: int = 801) -> Trajectory:
    """Two-segment protocol: emitter 2 starts detuned while the initial
    exciton in emitter 1 swaps into the resonant mode, then is switched into
    resonance at t = tau (instantaneous frequency switch).

    The drive stays at the dark-state frequency of the resonant configuration
    with the antisymmetric phase for all times.
    """
    if not 0 < tau < horizon:
        raise DomainError("tau must lie strictly inside (0, horizon)")
    resonant = _dark_drive(base)
    detuned = resonant.with_qd2_detuning(initial_detuning)
    rho0 = DensityMatrix.basis_state(resonant.space(), INITIAL_STATES["qd1_excited"])
    schedule = Schedule(((tau, detuned), (horizon - tau, resonant)))
    t_grid = np.linspace(0.0, horizon, samples)
    return evolve(schedule, rho0, t_grid)


def optimal_transfer_time(base: SystemParams, initial_detuning: float,
                          t_max: float = 15.0, samples: int = 751):
    """Scan the first protocol segment for the time that maximally populates
    the resonant mode; returns (t_opt, peak population)."""
    resonant = _dark_drive(base)
    detuned = resonant.with_qd2_detuning(initial_detuning)
    rho0 = DensityMatrix.basis_state(resonant.space(), INITIAL_STATES["qd1_excited"])
    t_grid = np.linspace(0.0, t_max, samples)
    trajectory = evolve(Schedule.constant(detuned, t_max), rho0, t_grid)
    return trajectory.peak("pop_m1")


def oscillation_period(times, values, prominence_fraction: float = 0.1) -> float:
    """Period estimate from successive maxima of an oscillating series."""
    from scipy.signal import find_peaks

    values = np.asarray(values, float)
    span = float(values.max() - values.min())
    if span <= 0:
        raise DomainError("series does not oscillate")
    peaks, _ = find_peaks(values, prominence=prominence_fraction * span)
    if len(peaks) < 2:
        raise DomainError(
            f"found {len(peaks)} peaks; need at least 2 to measure a period"
        )
    return float(np.mean(np.diff(np.asarray(times, float)[peaks])))
