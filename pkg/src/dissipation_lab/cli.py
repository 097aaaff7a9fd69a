"""Scenario runner.

    dissipation-lab run CONFIG.ini
    dissipation-lab acceptance [--output DIR]
    dissipation-lab list-scenarios

Configs are INI files; see ``configs/classical.ini`` for an
annotated example. Unknown sections or keys are rejected. Output goes to
``[output] directory`` unless ``DISSIPATION_LAB_OUTPUT`` is set.

Exit codes: 0 success, 1 bad config or input, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance as acc
from . import doubling, dynamics, langevin, ncplane, quantum, spectral, su11
from .errors import ConfigError, LabError, NumericError, ValidationError
from .model import OscillatorParams, derive_params
from .output import read_csv, write_csv, write_json

OUTPUT_ENV = "DISSIPATION_LAB_OUTPUT"

SCENARIOS = {
    "classical": "integrate the doubled oscillator and trace C, J2, H and the thermodynamic reading",
    "langevin": "Euler-Maruyama Brownian ensemble and its <v^2> summary",
    "quantum": "doubled density-matrix evolution, Bohr spectrum, Wigner snapshots, radial levels",
    "phase": "interference phase of a closed path in the noncommutative plane",
    "spectral": "cutoff momenta and the truncated spectral action",
    "doubling": "theta-vacuum overlap table and coproduct check",
    "acceptance": "run every acceptance criterion and write a pass/fail report",
}


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _ints(text):
    return [int(v) for v in text.replace(",", " ").split()]


def _bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _words(text):
    return [v for v in text.replace(",", " ").split() if v]


# section -> key -> (parser, default)
SCHEMA = {
    "scenario": {"name": (str, None)},
    "params": {
        "m": (float, 1.0), "gamma": (float, 0.2), "k": (float, 1.0),
        "hbar": (float, 1.0), "charge_e": (float, 1.0), "light_c": (float, 1.0),
    },
    "numerics": {
        "dt": (float, None), "t_end": (float, None), "periods": (float, 10.0),
        "method": (str, "rk4"), "rtol": (float, 1e-10), "seed": (int, 12345),
        "n_paths": (int, 2000), "record_every": (int, 100),
        "grid_n": (int, 256), "half_width": (float, 8.0),
        "radial_n": (int, 2000), "r_max": (float, 12.0), "n_levels": (int, 3),
        "radial_rtol": (float, 1e-3), "snapshots": (int, 4), "truncation": (int, 64),
    },
    "initial": {"x": (float, 1.0), "y": (float, 1.0), "vx": (float, 0.0), "vy": (float, 0.0)},
    "langevin": {
        "kBT": (float, 1.0), "x0": (float, 0.0), "v0": (float, 0.0),
        "spring": (_bool, False), "dump_paths": (int, 0),
    },
    "quantum": {"levels": (_ints, [0, 1]), "track_offset": (int, 12)},
    "phase": {"path_file": (str, ""), "L2": (float, None)},
    "spectral": {
        "cutoff": (str, "gaussian"), "u_max": (float, 1.0), "samples_file": (str, ""),
        "a0": (float, 1.0), "a2": (float, 1.0), "a4": (float, 1.0), "Lambda": (float, 1.0),
    },
    "doubling": {
        "thetas": (_floats, [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8]),
        "modes": (_ints, [1, 2, 4, 8, 16, 32]), "q": (float, 2.0), "dim": (int, 4),
        "verify_up_to": (int, 4),
    },
    "output": {"directory": (str, "output"), "formats": (_words, ["csv", "json"])},
}


@dataclass
class ScenarioConfig:
    scenario: str
    params: OscillatorParams
    sections: dict
    output_dir: Path
    formats: list
    config_hash: str
    base_dir: Path = field(default_factory=Path.cwd)

    def get(self, section, key):
        return self.sections[section][key]


def _resolve(raw: dict, base_dir: Path) -> ScenarioConfig:
    sections = {}
    for section, keys in SCHEMA.items():
        given = raw.get(section, {})
        resolved = {}
        for key, (parse, default) in keys.items():
            if key in given:
                try:
                    resolved[key] = parse(given[key])
                except ValueError as exc:
                    raise ConfigError(f"[{section}] {key}: {exc}") from None
            else:
                resolved[key] = default
        sections[section] = resolved
    name = sections["scenario"]["name"]
    if name is None:
        raise ConfigError("[scenario] name is required")
    if name not in SCENARIOS:
        raise ConfigError(f"[scenario] name: unknown scenario {name!r}")
    bad_formats = set(sections["output"]["formats"]) - {"csv", "json"}
    if bad_formats:
        raise ConfigError(f"[output] formats: unsupported {sorted(bad_formats)}")
    params = OscillatorParams(**sections["params"])
    hashed = {s: v for s, v in sections.items() if s != "output"}
    digest = hashlib.sha256(json.dumps(hashed, sort_keys=True, default=str).encode()).hexdigest()
    out_dir = os.environ.get(OUTPUT_ENV) or sections["output"]["directory"]
    out = Path(out_dir)
    if not out.is_absolute():
        out = Path.cwd() / out
    return ScenarioConfig(name, params, sections, out, sections["output"]["formats"], digest,
                          base_dir)


def parse_config_text(text: str, base_dir: Path | None = None) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    raw = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
        raw[section] = dict(parser.items(section))
    return _resolve(raw, base_dir or Path.cwd())


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, path.parent.resolve())


def default_config(name: str) -> ScenarioConfig:
    return _resolve({"scenario": {"name": name}}, Path.cwd())


# -- scenarios ---------------------------------------------------------------

def _want(cfg, fmt):
    return fmt in cfg.formats


def run_classical(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    d = derive_params(p)
    num = cfg.sections["numerics"]
    init = cfg.sections["initial"]
    dt = num["dt"] or 1e-3 * d.tau
    t_end = num["t_end"] or num["periods"] * d.tau
    s0 = dynamics.PhaseStateXY(init["x"], init["y"], init["vx"], init["vy"])
    traj = dynamics.integrate(dynamics.eom_xy, s0, p, dt, t_end, method=num["method"],
                              rtol=num["rtol"])
    trace = su11.observable_trace(traj, p)
    drift = {
        "C": su11.relative_drift(trace[:, 1]),
        "J2": su11.relative_drift(trace[:, 2]),
        "H": su11.relative_drift(trace[:, 3]),
    }
    files = []
    if _want(cfg, "csv"):
        rows = np.column_stack([traj.t, traj.data])
        files.append(write_csv(cfg.output_dir / "classical_trajectory.csv", traj.csv_header(),
                               rows, "dissipation_lab.dynamics", cfg.config_hash))
        files.append(write_csv(cfg.output_dir / "classical_observables.csv", su11.TRACE_COLUMNS,
                               trace, "dissipation_lab.su11", cfg.config_hash))
    summary = {
        "Gamma": d.Gamma, "Omega": d.Omega, "tau": d.tau, "dt": dt, "t_end": t_end,
        "n_samples": len(traj), "relative_drift": drift,
        "C0": float(trace[0, 1]), "J2_0": float(trace[0, 2]), "H0": float(trace[0, 3]),
    }
    if _want(cfg, "json"):
        files.append(write_json(cfg.output_dir / "classical_summary.json", summary,
                                "dissipation_lab.su11", cfg.config_hash))
    return {"files": files, "summary": summary}


def run_langevin(cfg: ScenarioConfig) -> dict:
    num = cfg.sections["numerics"]
    lv = cfg.sections["langevin"]
    dt = num["dt"] or 1e-3
    t_end = num["t_end"] or 10.0
    ens = langevin.simulate_langevin(cfg.params, lv["kBT"], dt, t_end, num["n_paths"],
                                     num["seed"], x0=lv["x0"], v0=lv["v0"], spring=lv["spring"],
                                     record_every=num["record_every"])
    summary = ens.summary()
    summary["expected_v2"] = lv["kBT"] / cfg.params.m
    files = []
    if _want(cfg, "json"):
        files.append(write_json(cfg.output_dir / "langevin_summary.json", summary,
                                "dissipation_lab.langevin", cfg.config_hash))
    if _want(cfg, "csv") and lv["dump_paths"] > 0:
        rows = []
        for idx, path in enumerate(ens.paths[:lv["dump_paths"]]):
            rows.extend((idx, t, x, v) for t, x, v in zip(path.times, path.x, path.v))
        files.append(write_csv(cfg.output_dir / "langevin_paths.csv", ("path", "t", "x", "v"),
                               rows, "dissipation_lab.langevin", cfg.config_hash))
    return {"files": files, "summary": summary}


def run_quantum(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    d = derive_params(p)
    num = cfg.sections["numerics"]
    qs = cfg.sections["quantum"]
    grid = quantum.Grid1D(-num["half_width"], num["half_width"], num["grid_n"])
    V = quantum.harmonic_potential(grid, p.m, d.Omega)
    levels = qs["levels"]
    if not levels or min(levels) < 0:
        raise ConfigError("[quantum] levels must list non-negative level indices")
    energies, states = quantum.eigenstates(grid, V, p.m, p.hbar, max(levels) + 1)
    psi0 = quantum.superposition([states[i] for i in levels], [1.0] * len(levels))
    rho0 = quantum.density_from_wavefunction(psi0)
    dt = num["dt"] or 0.01 * d.tau / (2 * math.pi)
    t_end = num["t_end"] or 32.0 * d.tau
    n_steps = int(math.floor(t_end / dt + 1e-9))
    entry = (grid.n // 2, min(grid.n - 1, grid.n // 2 + qs["track_offset"]))
    every = max(1, n_steps // max(1, num["snapshots"]))
    ev = quantum.evolve_doubled(rho0, V, p.m, p.hbar, dt, t_end, record_every=every,
                                track=[entry])
    peaks = quantum.bohr_frequencies(ev.tracked[entry], dt)
    gaps = sorted({round(float(abs(energies[a] - energies[b]) / p.hbar), 12)
                   for a in levels for b in levels if a < b})
    radial = quantum.radial_spectrum(d, p.m, p.hbar, num["radial_n"], num["r_max"],
                                     num["n_levels"], num["radial_rtol"])
    files = []
    if _want(cfg, "csv"):
        for idx, (t, dm) in enumerate(zip(ev.snapshot_times, ev.snapshots)):
            W = quantum.wigner_transform(dm, p.hbar)
            X, P = np.meshgrid(W.x, W.p, indexing="ij")
            rows = np.column_stack([X.ravel(), P.ravel(), W.W.ravel()])
            files.append(write_csv(cfg.output_dir / f"wigner_{idx:03d}.csv", ("x", "p", "W"),
                                   rows, "dissipation_lab.quantum", cfg.config_hash))
    summary = {
        "entry": list(entry),
        "bohr_peaks": [{"omega": w, "amplitude": a} for w, a in peaks],
        "expected_gaps": gaps,
        "resolution": quantum.frequency_resolution(ev.times.size, dt),
        "max_trace_drift": float(np.max(np.abs(ev.trace - 1.0))),
        "max_hermiticity_error": float(np.max(ev.hermiticity)),
        "snapshot_times": ev.snapshot_times,
    }
    if _want(cfg, "json"):
        files.append(write_json(cfg.output_dir / "quantum_summary.json", summary,
                                "dissipation_lab.quantum", cfg.config_hash))
        files.append(write_json(cfg.output_dir / "radial_spectrum.json", {"levels": radial},
                                "dissipation_lab.quantum", cfg.config_hash))
    summary["radial_levels"] = radial
    return {"files": files, "summary": summary}


def unit_square() -> ncplane.PathPolygon:
    return ncplane.PathPolygon(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float))


def load_path(path) -> ncplane.PathPolygon:
    header, data = read_csv(path)
    if header[:2] != ["x", "y"]:
        raise ConfigError(f"path file {path} needs an 'x,y' header, got {header}")
    return ncplane.PathPolygon(data[:, :2])


def run_phase(cfg: ScenarioConfig) -> dict:
    ph = cfg.sections["phase"]
    if ph["path_file"]:
        path = load_path(cfg.base_dir / ph["path_file"])
    else:
        path = unit_square()
    L2 = ph["L2"]
    if L2 is None:
        _, L2 = ncplane.velocity_commutator_scale(cfg.params)
    summary = ncplane.phase_report(path, L2)
    pair = ncplane.build_nc_pair(L2, cfg.sections["numerics"]["truncation"], cfg.params.hbar)
    summary["subblock_residual"] = pair.subblock_residual()
    files = []
    if _want(cfg, "json"):
        files.append(write_json(cfg.output_dir / "phase.json", summary,
                                "dissipation_lab.ncplane", cfg.config_hash))
    return {"files": files, "summary": summary}


def run_spectral(cfg: ScenarioConfig) -> dict:
    sp = cfg.sections["spectral"]
    if sp["cutoff"] == "sampled":
        if not sp["samples_file"]:
            raise ConfigError("[spectral] samples_file is required for a sampled cutoff")
        header, data = read_csv(cfg.base_dir / sp["samples_file"])
        f = spectral.CutoffFunction("sampled", grid=data[:, 0], values=data[:, 1])
    else:
        f = spectral.CutoffFunction(sp["cutoff"], u_max=sp["u_max"])
    summary = spectral.action_report(f, sp["a0"], sp["a2"], sp["a4"], sp["Lambda"])
    files = []
    if _want(cfg, "json"):
        files.append(write_json(cfg.output_dir / "spectral.json", summary,
                                "dissipation_lab.spectral", cfg.config_hash))
    return {"files": files, "summary": summary}


def run_doubling(cfg: ScenarioConfig) -> dict:
    db = cfg.sections["doubling"]
    table = doubling.overlap_table(db["thetas"], db["modes"])
    worst = 0.0
    for theta in db["thetas"]:
        for n in range(1, db["verify_up_to"] + 1):
            worst = max(worst, abs(doubling.theta_vacuum_explicit(theta, n)
                                   - doubling.theta_vacuum_overlap(theta, n)))
    mode = doubling.TruncatedMode(db["dim"])
    deformed = doubling.coproduct(mode.a_dag, db["q"]).matrix
    inverse = doubling.coproduct(mode.a_dag, 1.0 / db["q"]).matrix
    swap = doubling.swap_operator(db["dim"])
    summary = {
        "max_explicit_overlap_error": worst,
        "q1_equals_hopf": bool(np.array_equal(doubling.coproduct(mode.a_dag, 1.0).matrix,
                                              doubling.hopf_coproduct(mode.a_dag))),
        "swap_symmetry_error": float(np.max(np.abs(swap @ deformed @ swap - inverse))),
    }
    files = []
    if _want(cfg, "csv"):
        files.append(write_csv(cfg.output_dir / "overlaps.csv", ("theta", "N", "overlap"),
                               table, "dissipation_lab.doubling", cfg.config_hash))
    if _want(cfg, "json"):
        files.append(write_json(cfg.output_dir / "doubling.json", summary,
                                "dissipation_lab.doubling", cfg.config_hash))
    return {"files": files, "summary": summary}


def run_acceptance(cfg: ScenarioConfig, echo=print) -> dict:
    results = acc.run_all(echo)
    rep = acc.report(results)
    files = [write_json(cfg.output_dir / "acceptance_report.json", rep,
                        "dissipation_lab.acceptance", cfg.config_hash)]
    return {"files": files, "summary": rep, "passed": rep["all_passed"]}


RUNNERS = {
    "classical": run_classical,
    "langevin": run_langevin,
    "quantum": run_quantum,
    "phase": run_phase,
    "spectral": run_spectral,
    "doubling": run_doubling,
    "acceptance": run_acceptance,
}


def execute(cfg: ScenarioConfig) -> int:
    """Run a scenario and translate failures into exit codes."""
    try:
        result = RUNNERS[cfg.scenario](cfg)
    except ValidationError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    except (NumericError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    for path in result["files"]:
        print(f"wrote {path}")
    if result.get("passed") is False:
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dissipation-lab",
                                 description="Doubled-coordinate dissipation experiments")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the scenario described by a config file")
    run.add_argument("config")
    accept = sub.add_parser("acceptance", help="run the acceptance suite on shipped defaults")
    accept.add_argument("--output", help="report directory (default: ./output)")
    sub.add_parser("list-scenarios", help="print the available scenarios")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name, blurb in SCENARIOS.items():
            print(f"{name:12s} {blurb}")
        return 0
    try:
        if args.command == "acceptance":
            cfg = default_config("acceptance")
            if args.output and not os.environ.get(OUTPUT_ENV):
                cfg.output_dir = Path(args.output).resolve()
        else:
            cfg = load_config(args.config)
    except LabError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
