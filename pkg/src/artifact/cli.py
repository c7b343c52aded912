"""Command-line interface: reproducible runs with config and manifest.

Subcommands
-----------
bands      Band energies along a Brillouin-zone path -> CSV.
design     Optimize a pulse sequence -> sequence YAML + fidelity-trace CSV.
eval       Fidelity report for a sequence file (or shipped reference).
ramsey     Ensemble Ramsey fringe -> fringe CSV + contrast CSV + coherence.
echo       Ensemble echo fringe (n pi pulses) -> same outputs.
coherence  Re-analyze an existing fringe CSV offline.

Every run writes a ``manifest.json`` into the output directory carrying the
config snapshot, input-file hashes, derived constants (recoil frequency, S-D
gap, fringe period), code version, timestamps, and the hash of every output
artifact.  CSV files carry a ``#`` header block with the run id so plots
stay traceable to configs.  Identical config + seed produce byte-identical
CSVs regardless of thread count.

Config files are YAML with explicit unit suffixes::

    lattice:
      geometry: triangular      # or "1d"
      wavelength_nm: 1064.0
      depth_Er: 5.0
      atom_mass_kg: 1.4432e-25
    basis:
      shell_radius: 5
    ensemble:
      delta_q_hk: 0.72          # measured width ...
      width_reading: fwhm       # ... read as FWHM (or "two_sigma")
      quadrature: 21
    optimizer:
      max_iters: 200
      restarts: 10
    rng_seed: 0

Exit codes: 0 success, 2 validation error, 3 threshold not met,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .dynamics import PulseSequence, solve_bands
from .interferometer import (
    EnsembleSpec,
    FringeCurve,
    FringeKind,
    IdealPulses,
    SequencePulses,
    coherence_time,
    contrast_curve,
    ensemble_fringe,
)
from .lattice import (
    Geometry,
    LatticeSpec,
    build_basis,
    fringe_period_us,
    hamiltonian_on,
    recoil_energy,
    reciprocal_primitives,
    sd_gap,
)
from .sequences import REFERENCE_SEQUENCES
from .shortcut import (
    ObjectiveKind,
    OptimizerOptions,
    build_objective,
    design_sequence,
    fidelity_report,
)

CONFIG_ENV_VAR = "ARTIFACT_CONFIG"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_THRESHOLD = 3
EXIT_NUMERICAL = 4

_GEOMETRY_NAMES = {
    "triangular": Geometry.TRIANGULAR_3BEAM,
    "1d": Geometry.STANDING_WAVE_1D,
}


class ValidationError(ValueError):
    """Bad config, arguments, or input files."""


@dataclass
class RunConfig:
    """Validated run configuration with explicit units."""

    geometry: str = "triangular"
    wavelength_nm: float = 1064.0
    depth_Er: float = 5.0
    atom_mass_kg: float = 1.4432e-25
    shell_radius: int = 5
    distribution: str = "gaussian"
    delta_q_hk: float = 0.72
    width_reading: str = "fwhm"
    quadrature: int = 21
    width_schedule: list = field(default_factory=list)
    optimizer: dict = field(default_factory=dict)
    rng_seed: int = 0
    threads: int = 1

    @classmethod
    def load(cls, path: str | None, overrides: dict | None = None) -> "RunConfig":
        data: dict = {}
        if path:
            p = Path(path)
            if not p.is_file():
                raise ValidationError(f"config file not found: {path}")
            with open(p) as f:
                data = yaml.safe_load(f) or {}
        cfg = cls()
        lat = data.get("lattice", {})
        cfg.geometry = str(lat.get("geometry", cfg.geometry))
        cfg.wavelength_nm = float(lat.get("wavelength_nm", cfg.wavelength_nm))
        cfg.depth_Er = float(lat.get("depth_Er", cfg.depth_Er))
        cfg.atom_mass_kg = float(lat.get("atom_mass_kg", cfg.atom_mass_kg))
        cfg.shell_radius = int(data.get("basis", {}).get("shell_radius", cfg.shell_radius))
        ens = data.get("ensemble", {})
        cfg.distribution = str(ens.get("distribution", cfg.distribution))
        cfg.delta_q_hk = float(ens.get("delta_q_hk", cfg.delta_q_hk))
        cfg.width_reading = str(ens.get("width_reading", cfg.width_reading))
        cfg.quadrature = int(ens.get("quadrature", cfg.quadrature))
        cfg.width_schedule = list(ens.get("width_schedule", []))
        cfg.optimizer = dict(data.get("optimizer", {}))
        cfg.rng_seed = int(data.get("rng_seed", cfg.rng_seed))
        for key, value in (overrides or {}).items():
            if value is not None:
                setattr(cfg, key, value)
        if cfg.geometry not in _GEOMETRY_NAMES:
            raise ValidationError(
                f"geometry must be one of {sorted(_GEOMETRY_NAMES)}, got {cfg.geometry!r}"
            )
        return cfg

    def lattice_spec(self) -> LatticeSpec:
        try:
            return LatticeSpec(
                geometry=_GEOMETRY_NAMES[self.geometry],
                wavelength=self.wavelength_nm * 1e-9,
                depth=self.depth_Er,
                atom_mass=self.atom_mass_kg,
            )
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    def ensemble_spec(self) -> EnsembleSpec:
        try:
            if self.distribution == "delta":
                return EnsembleSpec(distribution="delta", sigma_q=0.0)
            ens = EnsembleSpec.from_width(
                self.delta_q_hk, reading=self.width_reading, quadrature=self.quadrature
            )
            if self.width_schedule:
                ens = EnsembleSpec(
                    distribution=ens.distribution,
                    sigma_q=ens.sigma_q,
                    quadrature=ens.quadrature,
                    width_schedule=tuple(
                        (float(t), float(s)) for t, s in self.width_schedule
                    ),
                )
            return ens
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc

    def optimizer_options(self) -> OptimizerOptions:
        o = self.optimizer
        try:
            return OptimizerOptions(
                max_iters=int(o.get("max_iters", 200)),
                fd_step=float(o.get("fd_step_us", 0.01)),
                learning_rate=float(o.get("learning_rate", 50.0)),
                grid_quantum=float(o.get("grid_quantum_us", 0.1)),
                restarts=int(o.get("restarts", 10)),
                rng_seed=self.rng_seed,
                convergence_tol=float(o.get("convergence_tol", 1e-6)),
                on_range=(0.0, float(o.get("on_max_us", 30.0))),
                off_range=(0.0, float(o.get("off_max_us", 40.0))),
            )
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc


# --------------------------------------------------------------------------
# Output helpers


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class RunWriter:
    """Collects outputs for one run and writes the manifest last."""

    def __init__(self, command: str, out_dir: Path, config: RunConfig, args: dict):
        self.command = command
        self.out_dir = out_dir
        self.config = config
        self.args = {k: v for k, v in args.items() if v is not None}
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.derived: dict[str, float] = {}
        # threads is an execution detail: results are thread-count
        # invariant, so it must not perturb the run id.
        id_config = {k: v for k, v in asdict(config).items() if k != "threads"}
        snapshot = {"command": command, "config": id_config, "args": self.args}
        self.run_id = hashlib.sha256(_canonical_json(snapshot).encode()).hexdigest()[:16]
        self.started = datetime.datetime.now(datetime.timezone.utc).isoformat()
        out_dir.mkdir(parents=True, exist_ok=True)

    def note_input(self, path: str | Path) -> None:
        p = Path(path)
        if p.is_file():
            self.inputs[str(p)] = _sha256_file(p)

    def header_lines(self, extra: dict | None = None) -> list[str]:
        lines = [
            f"# generated-by: artifact {__version__}",
            f"# command: {self.command}",
            f"# run_id: {self.run_id}",
        ]
        for k, v in (extra or {}).items():
            lines.append(f"# {k}: {v}")
        return lines

    def write_csv(
        self,
        name: str,
        columns: list[str],
        rows,
        extra_header: dict | None = None,
    ) -> Path:
        path = self.out_dir / name
        with open(path, "w") as f:
            for line in self.header_lines(extra_header):
                f.write(line + "\n")
            f.write(",".join(columns) + "\n")
            for row in rows:
                f.write(",".join(_fmt(v) for v in row) + "\n")
        self.outputs[name] = _sha256_file(path)
        return path

    def write_yaml(self, name: str, data: dict) -> Path:
        path = self.out_dir / name
        with open(path, "w") as f:
            yaml.safe_dump(data, f, sort_keys=False)
        self.outputs[name] = _sha256_file(path)
        return path

    def write_json(self, name: str, data: dict) -> Path:
        path = self.out_dir / name
        with open(path, "w") as f:
            json.dump(data, f, indent=2, sort_keys=True)
            f.write("\n")
        self.outputs[name] = _sha256_file(path)
        return path

    def finish(self) -> Path:
        manifest = {
            "run_id": self.run_id,
            "command": self.command,
            "code_version": __version__,
            "started_utc": self.started,
            "finished_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "config": asdict(self.config),
            "args": self.args,
            "input_hashes": self.inputs,
            "derived_constants": self.derived,
            "outputs": self.outputs,
        }
        path = self.out_dir / "manifest.json"
        with open(path, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        return path


def _fmt(v) -> str:
    if isinstance(v, float):
        # shortest string that round-trips to the same float64
        return repr(float(v))
    return str(v)


def _note_derived(writer: RunWriter, spec: LatticeSpec, basis) -> None:
    _, f_hz = recoil_energy(spec)
    gap = sd_gap(spec, basis)
    writer.derived.update(
        {
            "recoil_frequency_Hz": f_hz,
            "sd_gap_Er": gap,
            "fringe_period_us": 1e6 / (gap * f_hz),
        }
    )


# --------------------------------------------------------------------------
# Sequence files


def save_sequence(
    writer: RunWriter, name: str, seq: PulseSequence, meta: dict
) -> Path:
    data = seq.to_dict()
    data.update(meta)
    return writer.write_yaml(name, data)


def load_sequence(token: str) -> PulseSequence:
    """Load a sequence from a YAML file or a ``reference:<name>`` token."""
    if token.startswith("reference:"):
        name = token.split(":", 1)[1]
        if name not in REFERENCE_SEQUENCES:
            raise ValidationError(
                f"unknown reference sequence {name!r}; have {sorted(REFERENCE_SEQUENCES)}"
            )
        return REFERENCE_SEQUENCES[name]
    p = Path(token)
    if not p.is_file():
        raise ValidationError(f"sequence file not found: {token}")
    with open(p) as f:
        data = yaml.safe_load(f)
    try:
        return PulseSequence.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed sequence file {token}: {exc}") from exc


# --------------------------------------------------------------------------
# Subcommands


def _waypoint(token: str, geometry: Geometry) -> np.ndarray:
    prims = reciprocal_primitives(geometry)
    named = {
        "G": np.zeros(2),
        "M": prims[0] / 2.0,
        "K": (2.0 * prims[0] + prims[1]) / 3.0,
    }
    t = token.strip()
    if t.upper() in named:
        return named[t.upper()]
    parts = t.split(":")
    if len(parts) != 2:
        raise ValidationError(
            f"waypoint {token!r} is neither G/M/K nor 'qx:qy' coordinates"
        )
    try:
        return np.array([float(parts[0]), float(parts[1])])
    except ValueError as exc:
        raise ValidationError(f"bad waypoint coordinates {token!r}") from exc


def cmd_bands(cfg: RunConfig, args, out_dir: Path) -> int:
    spec = cfg.lattice_spec()
    basis = build_basis(spec, cfg.shell_radius)
    writer = RunWriter("bands", out_dir, cfg, {"path": args.path, "samples": args.samples})
    if args.config:
        writer.note_input(args.config)
    _note_derived(writer, spec, basis)
    waypoints = [_waypoint(t, spec.geometry) for t in args.path.split(",")]
    if len(waypoints) < 2:
        raise ValidationError("path needs at least two waypoints")
    rows = []
    coord = 0.0
    n_bands = min(6, basis.size)
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        seg = np.linspace(0.0, 1.0, args.samples, endpoint=False)
        for f in seg:
            q = a + f * (b - a)
            sol = solve_bands(hamiltonian_on(basis, spec, q))
            rows.append(
                [coord + f * float(np.linalg.norm(b - a)), q[0], q[1]]
                + [float(e) for e in sol.energies[:n_bands]]
            )
        coord += float(np.linalg.norm(b - a))
    q = waypoints[-1]
    sol = solve_bands(hamiltonian_on(basis, spec, q))
    rows.append([coord, q[0], q[1]] + [float(e) for e in sol.energies[:n_bands]])
    cols = ["path_coord", "q_x", "q_y"] + [f"E{i+1}_Er" for i in range(n_bands)]
    writer.write_csv("bands.csv", cols, rows)
    writer.finish()
    print(f"wrote {out_dir / 'bands.csv'} ({len(rows)} rows)")
    return EXIT_OK


def cmd_design(cfg: RunConfig, args, out_dir: Path) -> int:
    spec = cfg.lattice_spec()
    basis = build_basis(spec, cfg.shell_radius)
    kind = ObjectiveKind(args.kind)
    default_threshold = 0.93 if kind is ObjectiveKind.PI else 0.98
    threshold = args.threshold if args.threshold is not None else default_threshold
    writer = RunWriter(
        "design",
        out_dir,
        cfg,
        {
            "kind": args.kind,
            "steps": args.steps,
            "variable_amplitude": args.variable_amplitude,
            "threshold": threshold,
        },
    )
    if args.config:
        writer.note_input(args.config)
    _note_derived(writer, spec, basis)
    opts = cfg.optimizer_options()
    result = design_sequence(
        kind,
        args.steps,
        spec,
        basis,
        opts,
        variable_amplitude=args.variable_amplitude,
        depth_bounds=(args.depth_min, args.depth_max),
    )
    save_sequence(
        writer,
        "sequence.yaml",
        result.sequence,
        {
            "provenance": f"designed by artifact {__version__}, kind={args.kind}, "
            f"seed={cfg.rng_seed}, restarts={opts.restarts}",
            "fidelity": result.fidelity,
            "fidelity_pre_rounding": result.fidelity_pre_rounding,
        },
    )
    writer.write_csv(
        "trace.csv",
        ["iteration", "fidelity"],
        [[i, f] for i, f in enumerate(result.trace)],
        {"restart": result.restart},
    )
    writer.finish()
    print(
        f"designed {args.kind} sequence: fidelity {result.fidelity:.4f} "
        f"(pre-rounding {result.fidelity_pre_rounding:.4f}), "
        f"restart {result.restart}, wrote {out_dir / 'sequence.yaml'}"
    )
    if result.fidelity < threshold:
        print(f"fidelity below threshold {threshold}", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_eval(cfg: RunConfig, args, out_dir: Path) -> int:
    spec = cfg.lattice_spec()
    basis = build_basis(spec, cfg.shell_radius)
    seq = load_sequence(args.sequence)
    writer = RunWriter("eval", out_dir, cfg, {"sequence": args.sequence, "kind": args.kind})
    if args.config:
        writer.note_input(args.config)
    if not args.sequence.startswith("reference:"):
        writer.note_input(args.sequence)
    _note_derived(writer, spec, basis)
    obj = build_objective(ObjectiveKind(args.kind), spec, basis)
    report = fidelity_report(seq, obj)
    writer.write_json("report.json", report)
    writer.finish()
    print(f"kind: {report['kind']}")
    print(f"fidelity: {report['fidelity']:.4f}")
    for i, o in enumerate(report["pair_overlaps"]):
        print(
            f"pair {i + 1}: |overlap| = {o['magnitude']:.4f}, "
            f"phase = {o['phase_rad']:+.4f} rad"
        )
    for i, (mid, above) in enumerate(
        zip(report["leakage_mid_bands"], report["leakage_above_d"])
    ):
        print(
            f"state {i + 1} leakage: mid-bands {mid:.4f}, above-D {above:.4f}"
        )
    return EXIT_OK


def _fringe_times(args, period: float) -> np.ndarray:
    if args.dt >= period / 8.0:
        raise ValidationError(
            f"dt = {args.dt} us undersamples the fringe: need dt < period/8 "
            f"= {period / 8.0:.3f} us"
        )
    return np.arange(0.0, args.t_max, args.dt)


def _pulse_model(args, need_pi: bool):
    if args.pi2 == "ideal":
        return IdealPulses()
    pi_seq = None
    if need_pi:
        if args.pi is None or args.pi == "ideal":
            raise ValidationError(
                "echo with sequence pulses needs --pi (mixing ideal and "
                "sequence pulses is not supported)"
            )
        pi_seq = load_sequence(args.pi)
    return SequencePulses(
        pi2=load_sequence(args.pi2), pi=pi_seq, phase_locked=not args.no_phase_lock
    )


def _run_fringe(kind: FringeKind, cfg: RunConfig, args, out_dir: Path) -> int:
    spec = cfg.lattice_spec()
    basis = build_basis(spec, cfg.shell_radius)
    period = args.period if args.period is not None else fringe_period_us(spec, basis)
    times = _fringe_times(args, period)
    need_pi = kind is FringeKind.ECHO
    model = _pulse_model(args, need_pi)
    ens = cfg.ensemble_spec() if not args.single_q else EnsembleSpec(
        distribution="delta", sigma_q=0.0
    )
    writer = RunWriter(
        kind.value,
        out_dir,
        cfg,
        {
            "pi2": args.pi2,
            "pi": getattr(args, "pi", None),
            "t_max": args.t_max,
            "dt": args.dt,
            "n_echo": getattr(args, "n_echo", None),
            "period": period,
            "single_q": args.single_q,
        },
    )
    if args.config:
        writer.note_input(args.config)
    for token in (args.pi2, getattr(args, "pi", None)):
        if token and token != "ideal" and not token.startswith("reference:"):
            writer.note_input(token)
    _note_derived(writer, spec, basis)
    fringe = ensemble_fringe(
        kind,
        model,
        times,
        ens,
        spec,
        basis,
        n_echo=getattr(args, "n_echo", 2) or 2,
        threads=cfg.threads,
    )
    contrast = contrast_curve(fringe, args.contrast_window or period)
    coh = coherence_time(contrast)
    writer.write_csv(
        "fringe.csv",
        ["t_us", "p_d"],
        list(zip(fringe.times, fringe.p_d)),
        {"fringe_kind": kind.value},
    )
    writer.write_csv(
        "contrast.csv",
        ["t_us", "contrast"],
        list(zip(contrast.times, contrast.contrast)),
        {"window_us": _fmt(args.contrast_window or period)},
    )
    writer.write_json(
        "coherence.json",
        {
            "crossing_1e_us": coh.crossing_us,
            "fit_tau_us": None if math.isinf(coh.fit_tau_us) else coh.fit_tau_us,
            "fit_amplitude": coh.fit_amplitude,
        },
    )
    writer.finish()
    cross = "not crossed" if coh.crossing_us is None else f"{coh.crossing_us:.1f} us"
    tau = "inf" if math.isinf(coh.fit_tau_us) else f"{coh.fit_tau_us:.1f} us"
    print(
        f"{kind.value}: contrast[0] = {contrast.contrast[0]:.3f}, "
        f"1/e crossing = {cross}, fit tau = {tau}"
    )
    return EXIT_OK


def cmd_coherence(cfg: RunConfig, args, out_dir: Path) -> int:
    p = Path(args.fringe)
    if not p.is_file():
        raise ValidationError(f"fringe CSV not found: {args.fringe}")
    times, p_d = [], []
    with open(p) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("t_us"):
                continue
            t, v = line.split(",")
            times.append(float(t))
            p_d.append(float(v))
    if len(times) < 3:
        raise ValidationError("fringe CSV holds fewer than 3 samples")
    fringe = FringeCurve(times=np.array(times), p_d=np.array(p_d))
    writer = RunWriter(
        "coherence", out_dir, cfg, {"fringe": args.fringe, "period": args.period}
    )
    writer.note_input(args.fringe)
    contrast = contrast_curve(fringe, args.period)
    coh = coherence_time(contrast)
    writer.write_csv(
        "contrast.csv",
        ["t_us", "contrast"],
        list(zip(contrast.times, contrast.contrast)),
        {"window_us": _fmt(args.period)},
    )
    writer.write_json(
        "coherence.json",
        {
            "crossing_1e_us": coh.crossing_us,
            "fit_tau_us": None if math.isinf(coh.fit_tau_us) else coh.fit_tau_us,
            "fit_amplitude": coh.fit_amplitude,
        },
    )
    writer.finish()
    cross = "not crossed" if coh.crossing_us is None else f"{coh.crossing_us:.1f} us"
    tau = "inf" if math.isinf(coh.fit_tau_us) else f"{coh.fit_tau_us:.1f} us"
    print(f"coherence: 1/e crossing = {cross}, fit tau = {tau}")
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artifact",
        description="Bloch-band interferometry in a triangular optical lattice.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=os.environ.get(CONFIG_ENV_VAR),
        help=f"YAML config path (default: ${CONFIG_ENV_VAR})",
    )
    common.add_argument("--out", default="runs/out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="RNG seed override")
    common.add_argument("--threads", type=int, default=1, help="quadrature threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bands", help="band energies along a BZ path", parents=[common])
    p.add_argument("--path", default="G,M,K,G", help="comma list of G/M/K or qx:qy")
    p.add_argument("--samples", type=int, default=40, help="samples per segment")

    p = sub.add_parser("design", help="optimize a pulse sequence", parents=[common])
    p.add_argument("--kind", choices=["pi2", "pi", "load"], required=True)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--variable-amplitude", action="store_true")
    p.add_argument("--depth-min", type=float, default=3.0)
    p.add_argument("--depth-max", type=float, default=6.0)
    p.add_argument("--threshold", type=float, default=None)

    p = sub.add_parser("eval", help="fidelity report for a sequence", parents=[common])
    p.add_argument("--sequence", required=True, help="YAML path or reference:<name>")
    p.add_argument("--kind", choices=["pi2", "pi", "load"], required=True)

    for name in ("ramsey", "echo"):
        p = sub.add_parser(name, help=f"ensemble {name} fringe", parents=[common])
        p.add_argument("--pi2", default="ideal", help="sequence file, reference:<name>, or 'ideal'")
        if name == "echo":
            p.add_argument("--pi", default=None, help="pi sequence file or reference:<name>")
            p.add_argument("--n-echo", type=int, default=2)
        p.add_argument("--t-max", type=float, required=True, help="max hold time (us)")
        p.add_argument("--dt", type=float, required=True, help="hold-time step (us)")
        p.add_argument("--single-q", action="store_true", help="no ensemble, q = 0 only")
        p.add_argument("--period", type=float, default=None, help="fringe period hint (us)")
        p.add_argument(
            "--contrast-window",
            type=float,
            default=None,
            help="contrast window (us, default = period)",
        )
        p.add_argument("--no-phase-lock", action="store_true")

    p = sub.add_parser("coherence", help="re-analyze a fringe CSV", parents=[common])
    p.add_argument("--fringe", required=True, help="fringe CSV path")
    p.add_argument("--period", type=float, required=True, help="window period (us)")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(
            args.config,
            overrides={"rng_seed": args.seed, "threads": args.threads},
        )
        out_dir = Path(args.out)
        if args.command == "bands":
            return cmd_bands(cfg, args, out_dir)
        if args.command == "design":
            return cmd_design(cfg, args, out_dir)
        if args.command == "eval":
            return cmd_eval(cfg, args, out_dir)
        if args.command == "ramsey":
            return _run_fringe(FringeKind.RAMSEY, cfg, args, out_dir)
        if args.command == "echo":
            return _run_fringe(FringeKind.ECHO, cfg, args, out_dir)
        if args.command == "coherence":
            return cmd_coherence(cfg, args, out_dir)
        raise ValidationError(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
