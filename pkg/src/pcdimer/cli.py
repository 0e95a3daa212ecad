"""Command-line front end: sectioned key-value configs in, CSV datasets plus
a JSON run manifest out.

Output format is frozen for reproducibility: UTF-8 CSV, LF line endings,
17 significant digits (round-trip exact for doubles), a leading comment line
binding each file to the run id, and a manifest carrying the resolved
configuration and the content hash of every output file.  Identical configs
produce byte-identical CSVs.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import ConfigError, DomainError, SolverError
from .hilbert import NumericPolicy
from .model import (
    CouplingMatrix,
    DriveParams,
    ModeParams,
    PRESET_NAMES,
    QDParams,
    SystemParams,
    identify_dark_state,
    preset_params,
)
from .liouvillian import build_liouvillian
from .solvers import convergence_scan, steady_state
from .experiments import (
    default_delta_grid,
    default_gamma_d_grid,
    default_phi_grid,
    default_qd_detuning_grid,
    dynamics_run,
    stark_switch_protocol,
    sweep_dephasing,
    sweep_detuning,
    sweep_phase_detuning,
    sweep_splitting,
)

__all__ = ["RunConfig", "parse_config", "run", "main"]

COMMANDS = ("steady", "dynamics", "sweep", "protocol", "convergence")
SWEEP_KINDS = ("phase_detuning", "qd_detuning", "dephasing", "splitting")
INITIALS = ("qd1_excited", "photon_mode1", "vacuum")

# key -> (type, validator description); every known key of each section
_RUN_KEYS = {"command", "preset", "truncation", "threads", "seed",
             "allow_point_failures"}
_SYSTEM_KEYS = {
    "mode1_omega", "mode1_gamma", "mode1_pump",
    "mode2_omega", "mode2_gamma", "mode2_pump",
    "qd1_omega", "qd1_gamma", "qd1_gamma_d",
    "qd2_omega", "qd2_gamma", "qd2_gamma_d",
    "coupling_m1_qd1", "coupling_m1_qd2", "coupling_m2_qd1", "coupling_m2_qd2",
    "truncation",
}
_DRIVE_KEYS = {"amplitude", "phase1", "phase2", "pump_freq", "delta",
               "at_dark_state"}
_SWEEP_KEYS = {"kind",
               "phi_min", "phi_max", "phi_points",
               "delta_min", "delta_max", "delta_points",
               "detuning_min", "detuning_max", "detuning_points",
               "gamma_d_min", "gamma_d_max", "gamma_d_points",
               "splitting_min", "splitting_max", "splitting_points",
               "linewidth_sets"}
_DYNAMICS_KEYS = {"initial", "horizon_ps", "samples"}
_PROTOCOL_KEYS = {"tau_ps", "initial_detuning_uev", "horizon_ps", "samples"}
_CONVERGENCE_KEYS = {"cutoffs", "observable"}
_OUTPUT_KEYS = {"directory", "prefix"}
_NUMERICS_KEYS = {"algebraic_tol", "positivity_slack"}

_SECTIONS = {
    "run": _RUN_KEYS,
    "system": _SYSTEM_KEYS,
    "drive": _DRIVE_KEYS,
    "sweep": _SWEEP_KEYS,
    "dynamics": _DYNAMICS_KEYS,
    "protocol": _PROTOCOL_KEYS,
    "convergence": _CONVERGENCE_KEYS,
    "output": _OUTPUT_KEYS,
    "numerics": _NUMERICS_KEYS,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration."""

    command: str
    params: SystemParams
    preset: str | None = None
    at_dark_state: bool = True
    threads: int = 1
    seed: int | None = None  # reserved; all computations are deterministic
    allow_point_failures: bool = False
    sweep_kind: str | None = None
    sweep_grids: dict | None = None
    linewidth_sets: tuple | None = None
    initial: str = "photon_mode1"
    horizon_ps: float = 4000.0
    samples: int = 801
    tau_ps: float = 9.0
    initial_detuning_uev: float = 1500.0
    cutoffs: tuple[int, ...] = (1, 2)
    observable: str = "negativity"
    output_dir: str = "."
    prefix: str | None = None
    algebraic_tol: float = 1e-10
    positivity_slack: float = 1e-8

    def policy(self) -> NumericPolicy:
        return NumericPolicy(self.algebraic_tol, self.positivity_slack)

    def to_json_dict(self) -> dict:
        """Canonical resolved-physics dictionary; the run id hashes this."""
        p = self.params
        g = p.coupling.as_array()
        d = {
            "command": self.command,
            "system": {
                "mode1": dataclasses.asdict(p.modes[0]),
                "mode2": dataclasses.asdict(p.modes[1]),
                "qd1": dataclasses.asdict(p.dots[0]),
                "qd2": dataclasses.asdict(p.dots[1]),
                "coupling": [[g[m, n].real for n in range(2)] for m in range(2)],
                "truncation": p.truncation,
            },
            "drive": dataclasses.asdict(p.drive),
            "at_dark_state": self.at_dark_state,
            "numerics": {"algebraic_tol": self.algebraic_tol,
                         "positivity_slack": self.positivity_slack},
        }
        if self.command == "sweep":
            d["sweep"] = {"kind": self.sweep_kind, "grids": self.sweep_grids,
                          "linewidth_sets": self.linewidth_sets}
        elif self.command == "dynamics":
            d["dynamics"] = {"initial": self.initial,
                             "horizon_ps": self.horizon_ps,
                             "samples": self.samples}
        elif self.command == "protocol":
            d["protocol"] = {"tau_ps": self.tau_ps,
                             "initial_detuning_uev": self.initial_detuning_uev,
                             "horizon_ps": self.horizon_ps,
                             "samples": self.samples}
        elif self.command == "convergence":
            d["convergence"] = {"cutoffs": list(self.cutoffs),
                                "observable": self.observable}
        return d

    def run_id(self) -> str:
        payload = json.dumps(self.to_json_dict(), sort_keys=True,
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_config_text(self) -> str:
        """Serialize back to config format; reparsing yields an equivalent
        (fully explicit, preset-free) configuration."""
        p = self.params
        g = p.coupling.as_array()
        lines = ["[run]", f"command = {self.command}",
                 f"threads = {self.threads}",
                 f"allow_point_failures = {str(self.allow_point_failures).lower()}"]
        lines += ["", "[system]"]
        for k, mode in (("mode1", p.modes[0]), ("mode2", p.modes[1])):
            lines += [f"{k}_omega = {mode.omega!r}", f"{k}_gamma = {mode.gamma!r}",
                      f"{k}_pump = {mode.pump!r}"]
        for k, dot in (("qd1", p.dots[0]), ("qd2", p.dots[1])):
            lines += [f"{k}_omega = {dot.omega!r}", f"{k}_gamma = {dot.gamma!r}",
                      f"{k}_gamma_d = {dot.gamma_d!r}"]
        for m in range(2):
            for n in range(2):
                lines.append(f"coupling_m{m+1}_qd{n+1} = {float(g[m, n].real)!r}")
        lines.append(f"truncation = {p.truncation}")
        lines += ["", "[drive]",
                  f"amplitude = {p.drive.amplitude!r}",
                  f"phase1 = {p.drive.phase1!r}",
                  f"phase2 = {p.drive.phase2!r}",
                  f"pump_freq = {p.drive.pump_freq!r}",
                  f"at_dark_state = {str(self.at_dark_state).lower()}"]
        if self.command == "sweep":
            lines += ["", "[sweep]", f"kind = {self.sweep_kind}"]
            for name, grid in (self.sweep_grids or {}).items():
                lines += [f"{name}_min = {grid[0]!r}", f"{name}_max = {grid[1]!r}",
                          f"{name}_points = {grid[2]}"]
            if self.linewidth_sets:
                joined = ",".join(f"{a!r}:{b!r}" for a, b in self.linewidth_sets)
                lines.append(f"linewidth_sets = {joined}")
        elif self.command == "dynamics":
            lines += ["", "[dynamics]", f"initial = {self.initial}",
                      f"horizon_ps = {self.horizon_ps!r}",
                      f"samples = {self.samples}"]
        elif self.command == "protocol":
            lines += ["", "[protocol]", f"tau_ps = {self.tau_ps!r}",
                      f"initial_detuning_uev = {self.initial_detuning_uev!r}",
                      f"horizon_ps = {self.horizon_ps!r}",
                      f"samples = {self.samples}"]
        elif self.command == "convergence":
            lines += ["", "[convergence]",
                      "cutoffs = " + ",".join(str(c) for c in self.cutoffs),
                      f"observable = {self.observable}"]
        lines += ["", "[output]", f"directory = {self.output_dir}"]
        if self.prefix:
            lines.append(f"prefix = {self.prefix}")
        lines += ["", "[numerics]",
                  f"algebraic_tol = {self.algebraic_tol!r}",
                  f"positivity_slack = {self.positivity_slack!r}"]
        return "\n".join(lines) + "\n"


class _SectionReader:
    """Typed access to one config section with unknown-key rejection."""

    def __init__(self, parser: configparser.ConfigParser, name: str):
        self.name = name
        self.items = dict(parser.items(name)) if parser.has_section(name) else {}
        known = _SECTIONS[name]
        for key in self.items:
            if key not in known:
                raise ConfigError(
                    f"unknown key {key!r} in section [{name}]; "
                    f"known keys: {', '.join(sorted(known))}"
                )

    def __contains__(self, key):
        return key in self.items

    def _get(self, key, cast, default, describe):
        if key not in self.items:
            return default
        raw = self.items[key]
        try:
            return cast(raw)
        except (TypeError, ValueError):
            raise ConfigError(
                f"invalid value {raw!r} for [{self.name}] {key}: expected {describe}"
            ) from None

    def text(self, key, default=None, choices=None):
        value = self._get(key, str, default, "text")
        if value is not None and choices is not None and value not in choices:
            raise ConfigError(
                f"invalid value {value!r} for [{self.name}] {key}: "
                f"expected one of {', '.join(choices)}"
            )
        return value

    def real(self, key, default=None, minimum=None):
        value = self._get(key, float, default, "a real number")
        if value is not None and minimum is not None and value < minimum:
            raise ConfigError(
                f"invalid value {value!r} for [{self.name}] {key}: "
                f"expected >= {minimum}"
            )
        return value

    def integer(self, key, default=None, minimum=None):
        value = self._get(key, int, default, "an integer")
        if value is not None and minimum is not None and value < minimum:
            raise ConfigError(
                f"invalid value {value!r} for [{self.name}] {key}: "
                f"expected >= {minimum} (minimum {minimum})"
            )
        return value

    def flag(self, key, default=False):
        table = {"true": True, "false": False, "1": True, "0": False,
                 "yes": True, "no": False}
        return self._get(key, lambda s: table[s.strip().lower()], default,
                         "a boolean (true/false)")


def _build_params(system: _SectionReader, drive: _SectionReader,
                  preset: str | None) -> tuple[SystemParams, bool]:
    if preset is not None:
        physical = set(system.items) - {"truncation"}
        if physical:
            raise ConfigError(
                "give either a preset or an explicit [system] section, not "
                f"both (offending keys: {', '.join(sorted(physical))}; only "
                "truncation may override a preset)"
            )
        try:
            params = preset_params(preset)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
    else:
        required = sorted(_SYSTEM_KEYS - {"mode1_pump", "mode2_pump",
                                          "qd1_gamma", "qd1_gamma_d",
                                          "qd2_gamma", "qd2_gamma_d",
                                          "truncation"})
        missing = [k for k in required if k not in system]
        if missing:
            raise ConfigError(
                "no preset given and [system] is incomplete; missing keys: "
                + ", ".join(missing)
            )
        try:
            params = SystemParams(
                modes=(
                    ModeParams(system.real("mode1_omega"),
                               system.real("mode1_gamma", minimum=0.0),
                               system.real("mode1_pump", 0.0, minimum=0.0)),
                    ModeParams(system.real("mode2_omega"),
                               system.real("mode2_gamma", minimum=0.0),
                               system.real("mode2_pump", 0.0, minimum=0.0)),
                ),
                dots=(
                    QDParams(system.real("qd1_omega"),
                             system.real("qd1_gamma", 0.0, minimum=0.0),
                             system.real("qd1_gamma_d", 0.0, minimum=0.0)),
                    QDParams(system.real("qd2_omega"),
                             system.real("qd2_gamma", 0.0, minimum=0.0),
                             system.real("qd2_gamma_d", 0.0, minimum=0.0)),
                ),
                coupling=CouplingMatrix((
                    (system.real("coupling_m1_qd1"), system.real("coupling_m1_qd2")),
                    (system.real("coupling_m2_qd1"), system.real("coupling_m2_qd2")),
                )),
                drive=DriveParams(amplitude=0.0),
                truncation=system.integer("truncation", 1, minimum=1),
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    truncation = system.integer("truncation", None, minimum=1)
    if preset is not None and truncation is not None:
        params = params.with_truncation(truncation)

    amplitude = drive.real("amplitude", params.drive.amplitude, minimum=0.0)
    phase1 = drive.real("phase1", None)
    phase2 = drive.real("phase2", 0.0)
    at_dark = drive.flag("at_dark_state", True)
    if "pump_freq" in drive and "delta" in drive:
        raise ConfigError("give either [drive] pump_freq or delta, not both")
    params = params.with_drive(
        amplitude=amplitude,
        phase1=np.pi if (phase1 is None and at_dark) else (phase1 or 0.0),
        phase2=phase2,
    )
    if "pump_freq" in drive:
        params = params.with_drive(pump_freq=drive.real("pump_freq"))
    elif "delta" in drive:
        params = params.with_drive_detuning(drive.real("delta"))
    elif at_dark:
        params = params.with_drive_detuning(identify_dark_state(params).detuning)
    return params, at_dark


def _grid_spec(section: _SectionReader, name: str, default_grid) -> tuple:
    lo = section.real(f"{name}_min")
    hi = section.real(f"{name}_max")
    n = section.integer(f"{name}_points", minimum=2)
    if lo is None and hi is None and n is None:
        g = default_grid
        return (float(g[0]), float(g[-1]), int(len(g)))
    if None in (lo, hi, n):
        raise ConfigError(
            f"[sweep] {name} grid needs all of {name}_min, {name}_max, "
            f"{name}_points"
        )
    if hi <= lo:
        raise ConfigError(f"[sweep] {name}_max must exceed {name}_min")
    return (lo, hi, n)


def parse_config(text: str) -> RunConfig:
    """Parse and fully resolve a sectioned key-value configuration."""
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from None

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(
                f"unknown section [{section}]; known sections: "
                + ", ".join(sorted(_SECTIONS))
            )

    run = _SectionReader(parser, "run")
    command = run.text("command", choices=COMMANDS)
    if command is None:
        raise ConfigError(
            "missing required key [run] command; expected one of "
            + ", ".join(COMMANDS)
        )
    preset = run.text("preset", choices=PRESET_NAMES)

    system = _SectionReader(parser, "system")
    drive = _SectionReader(parser, "drive")
    if preset is None and not system.items:
        raise ConfigError(
            "required: either [run] preset or an explicit [system] section "
            f"(presets: {', '.join(PRESET_NAMES)})"
        )
    params, at_dark = _build_params(system, drive, preset)

    numerics = _SectionReader(parser, "numerics")
    output = _SectionReader(parser, "output")

    kwargs = dict(
        command=command,
        params=params,
        preset=preset,
        at_dark_state=at_dark,
        threads=run.integer("threads", 1, minimum=1),
        seed=run.integer("seed", None),
        allow_point_failures=run.flag("allow_point_failures", False),
        output_dir=output.text("directory", "."),
        prefix=output.text("prefix", None),
        algebraic_tol=numerics.real("algebraic_tol", 1e-10, minimum=0.0),
        positivity_slack=numerics.real("positivity_slack", 1e-8, minimum=0.0),
    )

    if command == "sweep":
        sweep = _SectionReader(parser, "sweep")
        kind = sweep.text("kind", choices=SWEEP_KINDS)
        if kind is None:
            raise ConfigError("missing required key [sweep] kind")
        g = abs(params.coupling.as_array()[0, 0])
        grids = {}
        if kind == "phase_detuning":
            grids["phi"] = _grid_spec(sweep, "phi", default_phi_grid())
            grids["delta"] = _grid_spec(sweep, "delta", default_delta_grid(g))
        elif kind == "qd_detuning":
            grids["detuning"] = _grid_spec(sweep, "detuning",
                                           default_qd_detuning_grid())
        elif kind == "dephasing":
            grids["gamma_d"] = _grid_spec(sweep, "gamma_d", default_gamma_d_grid())
        elif kind == "splitting":
            top = 3.0 * params.splitting if params.splitting > 0 else 6600.0
            grids["splitting"] = _grid_spec(sweep, "splitting",
                                            np.linspace(0.0, top, 41))
        sets = None
        raw_sets = sweep.text("linewidth_sets")
        if raw_sets:
            try:
                sets = tuple(
                    tuple(float(x) for x in pair.split(":"))
                    for pair in raw_sets.split(",")
                )
                if any(len(s) != 2 for s in sets):
                    raise ValueError
            except ValueError:
                raise ConfigError(
                    "invalid [sweep] linewidth_sets; expected g1:g2,g1:g2,..."
                ) from None
        kwargs.update(sweep_kind=kind, sweep_grids=grids, linewidth_sets=sets)
    elif command == "dynamics":
        dyn = _SectionReader(parser, "dynamics")
        kwargs.update(
            initial=dyn.text("initial", "photon_mode1", choices=INITIALS),
            horizon_ps=dyn.real("horizon_ps", 4000.0, minimum=1e-9),
            samples=dyn.integer("samples", 801, minimum=2),
        )
    elif command == "protocol":
        proto = _SectionReader(parser, "protocol")
        kwargs.update(
            tau_ps=proto.real("tau_ps", 9.0, minimum=1e-9),
            initial_detuning_uev=proto.real("initial_detuning_uev", 1500.0),
            horizon_ps=proto.real("horizon_ps", 4000.0, minimum=1e-9),
            samples=proto.integer("samples", 801, minimum=2),
        )
    elif command == "convergence":
        conv = _SectionReader(parser, "convergence")
        raw = conv.text("cutoffs", "1,2")
        try:
            cutoffs = tuple(int(c) for c in raw.split(","))
        except ValueError:
            raise ConfigError(
                f"invalid [convergence] cutoffs {raw!r}; expected e.g. 1,2,3"
            ) from None
        if any(c < 1 for c in cutoffs):
            raise ConfigError("[convergence] cutoffs must be >= 1 (minimum 1)")
        kwargs.update(cutoffs=cutoffs, observable=conv.text("observable",
                                                            "negativity"))
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path: Path, run_id: str, columns, rows) -> str:
    lines = [f"# manifest={run_id}", ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    data = ("\n".join(lines) + "\n").encode("utf-8")
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _trajectory_rows(trajectory):
    columns = ("t_ps", "negativity", "pop_qd1", "pop_qd2", "pop_m1", "pop_m2")
    obs = trajectory.observables
    rows = [
        (t, obs["negativity"][k], obs["pop_qd1"][k], obs["pop_qd2"][k],
         obs["pop_m1"][k], obs["pop_m2"][k])
        for k, t in enumerate(trajectory.times)
    ]
    return columns, rows


def _linspace(spec):
    lo, hi, n = spec
    return np.linspace(lo, hi, n)


def run(config: RunConfig, quiet: bool = False) -> int:
    """Execute one resolved configuration; returns the process exit code."""
    started = time.time()
    run_id = config.run_id()
    out_dir = Path(config.output_dir)
    prefix = config.prefix or config.command
    diagnostics: dict = {}
    outputs: dict[str, str] = {}
    exit_code = 0

    def emit(name, columns, rows):
        path = out_dir / name
        outputs[name] = _write_csv(path, run_id, columns, rows)
        if not quiet:
            print(f"wrote {path}")

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        params = config.params

        if config.command == "steady":
            rho, info = steady_state(build_liouvillian(params), return_info=True)
            from .solvers import OBSERVABLES
            row = tuple(OBSERVABLES[name](params, rho) for name in
                        ("negativity", "pop_qd1", "pop_qd2", "pop_m1", "pop_m2"))
            emit(f"{prefix}.csv",
                 ("negativity", "pop_qd1", "pop_qd2", "pop_m1", "pop_m2",
                  "residual"),
                 [row + (info.residual,)])
            diagnostics = {"residual": info.residual}

        elif config.command == "sweep":
            grids = config.sweep_grids
            if config.sweep_kind == "phase_detuning":
                result = sweep_phase_detuning(
                    params, _linspace(grids["phi"]), _linspace(grids["delta"]),
                    n_workers=config.threads)
            elif config.sweep_kind == "qd_detuning":
                result = sweep_detuning(params, _linspace(grids["detuning"]),
                                        n_workers=config.threads)
            elif config.sweep_kind == "dephasing":
                result = sweep_dephasing(params, _linspace(grids["gamma_d"]),
                                         n_workers=config.threads)
            else:
                result = sweep_splitting(params, _linspace(grids["splitting"]),
                                         linewidth_sets=config.linewidth_sets,
                                         n_workers=config.threads)
            columns, rows = result.to_records()
            emit(f"{prefix}_{config.sweep_kind}.csv", columns, rows)
            diagnostics = {
                "n_points": int(result.values.size),
                "n_converged": int(np.sum(result.converged)),
                "max_residual": float(np.nanmax(result.residuals)),
            }
            if result.failures and not config.allow_point_failures:
                print(f"{len(result.failures)} sweep points failed; first: "
                      f"{result.failures[0]}", file=sys.stderr)
                exit_code = 3

        elif config.command == "dynamics":
            trajectory = dynamics_run(params, config.initial,
                                      config.horizon_ps, config.samples)
            emit(f"{prefix}.csv", *_trajectory_rows(trajectory))
            diagnostics = {"n_samples": int(len(trajectory.times)),
                           "peak_negativity":
                               float(trajectory.observables["negativity"].max())}

        elif config.command == "protocol":
            trajectory = stark_switch_protocol(
                params, config.tau_ps, config.initial_detuning_uev,
                config.horizon_ps, config.samples)
            emit(f"{prefix}.csv", *_trajectory_rows(trajectory))
            diagnostics = {"n_samples": int(len(trajectory.times)),
                           "peak_negativity":
                               float(trajectory.observables["negativity"].max())}

        elif config.command == "convergence":
            report = convergence_scan(params, config.observable,
                                      cutoffs=config.cutoffs)
            columns = ("cutoff", config.observable, "rel_diff_prev", "converged")
            rows = []
            for k, cutoff in enumerate(report.cutoffs):
                rel = report.relative_differences[k - 1] if k else 0.0
                flag = report.converged[k - 1] if k else True
                rows.append((cutoff, report.values[k], rel, flag))
            emit(f"{prefix}.csv", columns, rows)
            diagnostics = {"relative_differences":
                           list(report.relative_differences),
                           "all_converged": report.all_converged}

    except (SolverError, DomainError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4

    manifest = {
        "tool": "pcdimer",
        "version": __version__,
        "command": config.command,
        "preset": config.preset,
        "run_id": run_id,
        "config": config.to_json_dict(),
        "threads": config.threads,
        "seed": config.seed,
        "wall_time_s": time.time() - started,
        "diagnostics": diagnostics,
        "outputs": outputs,
    }
    try:
        manifest_path = out_dir / f"{prefix}_manifest.json"
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True)
                                 + "\n", encoding="utf-8")
        if not quiet:
            print(f"wrote {manifest_path}")
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4
    return exit_code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pcdimer",
        description="Steady-state and transient entanglement of two emitters "
                    "coupled through the normal modes of a photonic dimer.",
    )
    parser.add_argument("--config", required=True,
                        help="path to the run configuration file")
    parser.add_argument("--output", default=None,
                        help="output directory (overrides [output] directory)")
    parser.add_argument("--truncation", type=int, default=None,
                        help="override the per-mode Fock cutoff")
    parser.add_argument("--threads", type=int, default=None,
                        help="sweep worker count (overrides [run] threads)")
    parser.add_argument("--seed", type=int, default=None,
                        help="reserved; all computations are deterministic")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 4

    try:
        config = parse_config(text)
        overrides = {}
        if args.output is not None:
            overrides["output_dir"] = args.output
        if args.truncation is not None:
            if args.truncation < 1:
                raise ConfigError(
                    f"invalid --truncation {args.truncation}: minimum 1")
            overrides["params"] = config.params.with_truncation(args.truncation)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError(f"invalid --threads {args.threads}: minimum 1")
            overrides["threads"] = args.threads
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            config = dataclasses.replace(config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    return run(config, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
