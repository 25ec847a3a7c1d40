"""Command line: solve, verify, evolve and sweep from INI configs.

Exit codes: 0 converged and verified, 2 rejected input, 3 failure to
converge, 4 converged but a structural property failed. All file
output is deterministic for a given config: floats are written with
17 significant digits (exact round-trip), JSON keys are sorted, and
sweep rows are emitted in config order regardless of worker count.
"""

import argparse
import configparser
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import svgplot
from .errors import (BracketViolation, ConfigError, DarksolError,
                     LineSearchFailure, MonotonicityLoss, NonConvergence,
                     NoSignChange, PhaseUndefined, SingularLinearization,
                     StepDivergence, TailUnderflow, ValidationError)
from .evolve import (EvolveOptions, evolve_nls, kink_drift, make_ansatz,
                     modulus_deviation, phase_rotation_check)
from .kink import MinimizeOptions, make_truncated_grid, select_truncation
from .model import Grid, Problem, Profile, sample_coefficient, validate_problem
from .periodic import PeriodicOptions
from .pipeline import run_background, run_soliton
from .reduction import residual_reduced, to_allen_cahn
from .verify import build_report

SCHEMA_VERSION = 1

_KNOWN_KEYS = {
    "problem": {"kind", "lambda", "period", "n_per_period", "g", "g_table",
                "v", "v_table", "g1"},
    "domain": {"l", "tail_fraction"},
    "periodic": {"residual_tol", "max_newton_iters", "damping", "oracle_tol"},
    "minimize": {"grad_tol", "max_outer_iters", "newton_polish"},
    "evolve": {"dt", "t_max", "snapshot_every", "initial", "modulus_tol",
               "phase_tol"},
    "sweep": {"lambda", "amplitude"},
}


@dataclass(frozen=True)
class RunConfig:
    kind: str
    lam: float
    period: float
    n_per_period: int
    g_source: object
    v_source: object
    g1: float
    half_length: float | None
    tail_fraction: float
    periodic: PeriodicOptions
    oracle_tol: float
    minimize: MinimizeOptions
    dt: float | None
    t_max: float | None
    snapshot_every: int
    initial: str
    modulus_tol: float
    phase_tol: float
    sweep_lambdas: tuple
    sweep_amplitudes: tuple | None
    raw: dict
    config_hash: str


def _float_list(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def load_config(path) -> RunConfig:
    """Parse and validate an INI run configuration."""
    try:
        with open(path, "rb") as handle:
            blob = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(blob.decode("utf-8"))
    except (UnicodeDecodeError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")

    def get(section, key, cast, default=None, required=False):
        if not cp.has_option(section, key):
            if required:
                raise ConfigError(f"missing required key {key!r} in [{section}]")
            return default
        text = cp.get(section, key)
        try:
            if cast is bool:
                return cp.getboolean(section, key)
            return cast(text)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(
                f"bad value {text!r} for {key!r} in [{section}]") from exc

    kind = get("problem", "kind", str, required=True)
    if kind not in ("cubic", "cubic-quintic"):
        raise ConfigError(f"unknown problem kind {kind!r}")
    lam = get("problem", "lambda", float, required=True)
    period = get("problem", "period", float, default=1.0)
    n_per = get("problem", "n_per_period", int, default=256)

    g_source = v_source = None
    if kind == "cubic":
        expr = get("problem", "g", str)
        table = get("problem", "g_table", str)
        if (expr is None) == (table is None):
            raise ConfigError("cubic model needs exactly one of g / g_table")
        g_source = expr if expr is not None else _float_list(table)
    else:
        expr = get("problem", "v", str)
        table = get("problem", "v_table", str)
        if (expr is None) == (table is None):
            raise ConfigError(
                "cubic-quintic model needs exactly one of v / v_table")
        v_source = expr if expr is not None else _float_list(table)
    g1 = get("problem", "g1", float, default=0.0)

    periodic = PeriodicOptions(
        residual_tol=get("periodic", "residual_tol", float, default=1e-10),
        max_newton_iters=get("periodic", "max_newton_iters", int, default=50),
        damping=get("periodic", "damping", float, default=1.0))
    minimize_opts = MinimizeOptions(
        grad_tol=get("minimize", "grad_tol", float, default=1e-8),
        max_outer_iters=get("minimize", "max_outer_iters", int, default=20000),
        newton_polish=get("minimize", "newton_polish", bool, default=True))

    raw = {section: dict(cp[section]) for section in cp.sections()}
    return RunConfig(
        kind=kind, lam=lam, period=period, n_per_period=n_per,
        g_source=g_source, v_source=v_source, g1=g1,
        half_length=get("domain", "l", float),
        tail_fraction=get("domain", "tail_fraction", float, default=0.25),
        periodic=periodic,
        oracle_tol=get("periodic", "oracle_tol", float, default=1e-10),
        minimize=minimize_opts,
        dt=get("evolve", "dt", float),
        t_max=get("evolve", "t_max", float),
        snapshot_every=get("evolve", "snapshot_every", int, default=100),
        initial=get("evolve", "initial", str, default="soliton"),
        modulus_tol=get("evolve", "modulus_tol", float, default=1e-4),
        phase_tol=get("evolve", "phase_tol", float, default=1e-3),
        sweep_lambdas=_float_list(get("sweep", "lambda", str, default="")),
        sweep_amplitudes=(
            _float_list(get("sweep", "amplitude", str))
            if cp.has_option("sweep", "amplitude") else None),
        raw=raw,
        config_hash=hashlib.sha256(blob).hexdigest())


def build_problem(cfg: RunConfig, lam: float | None = None,
                  amplitude: float | None = None) -> Problem:
    """Instantiate the problem, optionally overriding lambda and binding
    the sweep amplitude variable `a` in coefficient expressions."""
    variables = {} if amplitude is None else {"a": amplitude}
    lam = cfg.lam if lam is None else lam
    if cfg.kind == "cubic":
        g = sample_coefficient(cfg.g_source, cfg.period, cfg.n_per_period,
                               positive=True, variables=variables)
        return Problem(kind="cubic", lam=lam, period=cfg.period, g=g)
    pot = sample_coefficient(cfg.v_source, cfg.period, cfg.n_per_period,
                             variables=variables)
    return Problem(kind="cubic-quintic", lam=lam, period=cfg.period,
                   potential=pot, g1=cfg.g1)


def _fmt(value) -> str:
    return format(float(value), ".17g")


def write_csv(path, names, columns):
    rows = len(columns[0])
    for col in columns:
        if len(col) != rows:
            raise ValueError("ragged csv columns")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(",".join(names) + "\n")
        for i in range(rows):
            handle.write(",".join(
                col[i] if isinstance(col[i], str) else _fmt(col[i])
                for col in columns) + "\n")


def read_csv(path):
    """Read a CSV written by write_csv back into named float columns."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = [line.strip() for line in handle if line.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ConfigError(f"{path} is empty")
    names = lines[0].split(",")
    data = {name: [] for name in names}
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(names):
            raise ConfigError(f"ragged row in {path}")
        for name, part in zip(names, parts):
            try:
                data[name].append(float(part))
            except ValueError:
                data[name].append(np.nan)
    return {name: np.asarray(vals) for name, vals in data.items()}


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _problem_block(problem: Problem) -> dict:
    block = {
        "kind": problem.kind,
        "lambda": problem.lam,
        "period": problem.period,
        "n_per_period": problem.n_per,
    }
    if problem.is_cubic:
        block["g_min"] = problem.g.cmin
        block["g_max"] = problem.g.cmax
        diag = problem.diagnostics
        if diag is not None:
            block["uniqueness_margin"] = diag.margin
            block["uniqueness_holds"] = diag.holds
    else:
        block["v_min"] = problem.potential.cmin
        block["v_max"] = problem.potential.cmax
        block["g1"] = problem.g1
    return block


_NOTES = {
    "coefficient_extrema": "coefficient extrema are taken over the sampled "
                           "nodes, not the continuous expression",
    "dynamics_tolerances": "dynamical tolerances are discretization-dependent "
                           "run settings, not model constants",
}


def _base_report(command, cfg: RunConfig, seed) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config_hash": cfg.config_hash,
        "config": cfg.raw,
        "seed": seed,
        "notes": _NOTES,
    }


def cmd_solve_periodic(cfg: RunConfig, out_dir, seed) -> int:
    problem = build_problem(cfg)
    problem, periodic, monotone, agreement = run_background(
        problem, cfg.periodic, oracle_tol=cfg.oracle_tol)
    x = periodic.profile.grid.x()
    write_csv(os.path.join(out_dir, "phi_plus.csv"), ["x", "phi_plus"],
              [x, periodic.profile.values])
    report = _base_report("solve-periodic", cfg, seed)
    verified = periodic.residual_sup <= cfg.periodic.residual_tol
    report.update({
        "problem": _problem_block(problem),
        "bracket": {"lower": periodic.bracket.lower,
                    "upper": periodic.bracket.upper},
        "periodic": {
            "residual_sup": periodic.residual_sup,
            "newton_iterations": periodic.iterations,
            "clamp_count": periodic.clamp_count,
            "monotone_iterations": monotone.iterations,
            "monotone_gap_sup": monotone.gap_sup,
            "monotone_agreement_sup": agreement,
        },
        "verified": verified,
        "status": "ok" if verified else "property_violation",
    })
    write_json(os.path.join(out_dir, "report.json"), report)
    svgplot.line_plot(os.path.join(out_dir, "plot.svg"),
                      [("phi_plus", x, periodic.profile.values)],
                      title="periodic background", xlabel="x",
                      ylabel="phi_plus")
    return 0 if verified else 4


def _soliton_report_payload(cfg: RunConfig, seed, run) -> dict:
    report = _base_report("solve-soliton", cfg, seed)
    report.update({
        "problem": _problem_block(run.problem),
        "bracket": {"lower": run.periodic.bracket.lower,
                    "upper": run.periodic.bracket.upper},
        "periodic": {
            "residual_sup": run.periodic.residual_sup,
            "newton_iterations": run.periodic.iterations,
            "clamp_count": run.periodic.clamp_count,
            "monotone_iterations": run.monotone.iterations,
            "monotone_gap_sup": run.monotone.gap_sup,
            "monotone_agreement_sup": run.monotone_agreement_sup,
        },
        "truncation": {
            "half_length": run.half_length,
            "n_nodes": run.grid.n,
            "h": run.grid.h,
            "tail_fraction": run.tail_fraction,
        },
        "minimize": {
            "flow_iterations": run.minimize.flow_iterations,
            "polish_iterations": run.minimize.polish_iterations,
            "grad_sup_per_h": run.minimize.grad_sup_per_h,
            "final_energy": run.minimize.final_energy,
            "crossing": run.crossing,
        },
        "front_existence_margin": run.existence_margin,
        "run_flags": sorted(run.run_flags),
        "soliton_report": run.report.to_dict(),
        "verified": run.report.verified and run.status == "ok",
        "status": run.status,
    })
    return report


def cmd_solve_soliton(cfg: RunConfig, out_dir, seed) -> int:
    problem = build_problem(cfg)
    run = run_soliton(problem, half_length=cfg.half_length,
                      periodic_options=cfg.periodic,
                      minimize_options=cfg.minimize,
                      tail_fraction=cfg.tail_fraction)
    xp = run.periodic.profile.grid.x()
    write_csv(os.path.join(out_dir, "phi_plus.csv"), ["x", "phi_plus"],
              [xp, run.periodic.profile.values])
    x = run.grid.x()
    ac = to_allen_cahn(run.problem, run.background_ext)
    res = residual_reduced(run.w, ac)
    write_csv(os.path.join(out_dir, "soliton.csv"),
              ["x", "phi_plus_ext", "w", "phi", "residual_reduced"],
              [x, run.background_ext.values, run.w.values, run.phi.values,
               res.values])
    write_json(os.path.join(out_dir, "report.json"),
               _soliton_report_payload(cfg, seed, run))
    svgplot.line_plot(os.path.join(out_dir, "plot.svg"),
                      [("phi", x, run.phi.values),
                       ("phi_plus_ext", x, run.background_ext.values),
                       ("w", x, run.w.values)],
                      title="front profile", xlabel="x", ylabel="value")
    return 0 if run.status == "ok" else 4


def cmd_verify(cfg: RunConfig, out_dir, seed) -> int:
    """Re-read a solve-soliton output directory and recompute its report.

    The recomputed scalar block must equal the stored one exactly;
    profiles are written with round-trip precision, so any difference
    means the files no longer describe the run.
    """
    report_path = os.path.join(out_dir, "report.json")
    try:
        with open(report_path, "r", encoding="utf-8") as handle:
            stored = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {report_path}: {exc}") from exc
    if stored.get("config_hash") != cfg.config_hash:
        raise ConfigError("config file does not match the stored run")
    columns = read_csv(os.path.join(out_dir, "soliton.csv"))
    for name in ("x", "phi_plus_ext", "w", "phi", "residual_reduced"):
        if name not in columns:
            raise ConfigError(f"soliton.csv is missing column {name!r}")

    problem = build_problem(cfg)
    x = columns["x"]
    grid = Grid(xmin=float(x[0]), xmax=float(x[-1]), n=int(x.size))
    problem = validate_problem(problem, grid)
    background = Profile(grid, columns["phi_plus_ext"])
    w = Profile(grid, columns["w"])
    recomputed = build_report(problem, w, background,
                              tail_fraction=cfg.tail_fraction)

    mismatches = []
    ac = to_allen_cahn(problem, background)
    if not np.array_equal(background.values * w.values, columns["phi"]):
        mismatches.append("phi column is not the lifted ratio")
    if not np.array_equal(residual_reduced(w, ac).values,
                          columns["residual_reduced"]):
        mismatches.append("residual_reduced column does not match the data")
    stored_block = stored.get("soliton_report")
    recomputed_block = json.loads(json.dumps(recomputed.to_dict()))
    if stored_block != recomputed_block:
        mismatches.append("recomputed report differs from the stored one")

    payload = _base_report("verify", cfg, seed)
    payload.update({
        "source_report": report_path,
        "match": not mismatches,
        "mismatches": mismatches,
        "soliton_report": recomputed.to_dict(),
        "verified": recomputed.verified and not mismatches,
    })
    write_json(os.path.join(out_dir, "verify_report.json"), payload)
    return 0 if payload["verified"] else 4


def cmd_evolve(cfg: RunConfig, out_dir, seed) -> int:
    if cfg.dt is None or cfg.t_max is None:
        raise ConfigError("evolve needs dt and t_max in [evolve]")
    options = EvolveOptions(dt=cfg.dt, t_max=cfg.t_max,
                            snapshot_every=cfg.snapshot_every)
    if cfg.initial not in ("soliton", "background"):
        raise ConfigError(f"unknown initial state {cfg.initial!r}")

    problem = build_problem(cfg)
    track_front = cfg.initial == "soliton"
    if track_front:
        run = run_soliton(problem, half_length=cfg.half_length,
                          periodic_options=cfg.periodic,
                          minimize_options=cfg.minimize,
                          tail_fraction=cfg.tail_fraction)
        problem, reference = run.problem, run.phi
    else:
        problem, periodic, _, _ = run_background(problem, cfg.periodic,
                                                 oracle_tol=cfg.oracle_tol)
        half = cfg.half_length
        if half is None:
            half = select_truncation(problem)
        grid = make_truncated_grid(problem.period, half, problem.n_per)
        reference = Profile(grid, periodic.coefficient.on_grid(grid))

    psi0 = make_ansatz(reference, problem.lam)
    traj = evolve_nls(psi0, problem, options)
    deviation = modulus_deviation(traj, reference)
    phase = phase_rotation_check(traj, problem.lam)
    drift = kink_drift(traj, problem.lam) if track_front else None

    h = reference.grid.h
    drift_ok = drift is None or drift < 2.0 * h
    verified = (deviation <= cfg.modulus_tol
                and phase.rel_err <= cfg.phase_tol and drift_ok)

    times, xs, res, ims, mods = [], [], [], [], []
    x = reference.grid.x()
    for t, field in zip(traj.times, traj.fields):
        times.append(np.full(x.size, t))
        xs.append(x)
        res.append(field.re)
        ims.append(field.im)
        mods.append(field.modulus())
    write_csv(os.path.join(out_dir, "snapshots.csv"),
              ["t", "x", "re", "im", "modulus"],
              [np.concatenate(times), np.concatenate(xs),
               np.concatenate(res), np.concatenate(ims),
               np.concatenate(mods)])

    payload = _base_report("evolve", cfg, seed)
    payload.update({
        "problem": _problem_block(problem),
        "dt": options.dt,
        "t_max_effective": traj.n_steps * options.dt,
        "n_steps": traj.n_steps,
        "boundary": options.bc,
        "initial": cfg.initial,
        "modulus_deviation_sup": deviation,
        "modulus_tol": cfg.modulus_tol,
        "phase": {"slope": phase.slope, "rel_err": phase.rel_err,
                  "ref_index": phase.ref_index, "tol": cfg.phase_tol},
        "front_drift": drift,
        "front_drift_limit": 2.0 * h if track_front else None,
        "verified": verified,
        "status": "ok" if verified else "property_violation",
    })
    write_json(os.path.join(out_dir, "dynamics.json"), payload)
    svgplot.line_plot(os.path.join(out_dir, "plot.svg"),
                      [("modulus t=0", x, traj.fields[0].modulus()),
                       (f"modulus t={traj.times[-1]:g}", x,
                        traj.fields[-1].modulus())],
                      title="evolution snapshots", xlabel="x",
                      ylabel="modulus")
    return 0 if verified else 4


_SWEEP_COLUMNS = ["index", "lambda", "amplitude", "half_length", "energy",
                  "crossing", "residual_reduced_sup", "amplitude_margin",
                  "monotonicity_margin", "c0_left", "c0_right", "r2_left",
                  "r2_right", "status"]


def _classify(exc: DarksolError) -> str:
    if isinstance(exc, ValidationError):
        return "validation_error"
    if isinstance(exc, (MonotonicityLoss, NoSignChange)):
        return "property_violation"
    return "nonconvergence"


def _sweep_row(payload) -> dict:
    """One sweep row; everything picklable so workers can run it."""
    cfg = payload["cfg"]
    lam = payload["lam"]
    amplitude = payload["amplitude"]
    row = {name: float("nan") for name in _SWEEP_COLUMNS[:-1]}
    row["index"] = payload["index"]
    row["lambda"] = lam
    row["amplitude"] = float("nan") if amplitude is None else amplitude
    try:
        problem = build_problem(cfg, lam=lam, amplitude=amplitude)
        run = run_soliton(problem, half_length=cfg.half_length,
                          periodic_options=cfg.periodic,
                          minimize_options=cfg.minimize,
                          tail_fraction=cfg.tail_fraction)
        rep = run.report
        row.update({
            "half_length": run.half_length,
            "energy": run.minimize.final_energy,
            "crossing": run.crossing,
            "residual_reduced_sup": rep.residual_reduced_sup,
            "amplitude_margin": rep.amplitude_margin,
            "monotonicity_margin": rep.monotonicity_margin,
            "c0_left": rep.decay_rate_fit_left,
            "c0_right": rep.decay_rate_fit_right,
            "r2_left": rep.decay_fit_r2_left,
            "r2_right": rep.decay_fit_r2_right,
        })
        row["status"] = run.status
    except DarksolError as exc:
        row["status"] = _classify(exc)
    return row


def cmd_sweep(cfg: RunConfig, out_dir, seed, workers: int) -> int:
    # An empty lambda list is a legal degenerate sweep: header-only output.
    amplitudes = cfg.sweep_amplitudes if cfg.sweep_amplitudes is not None \
        else (None,)
    payloads = []
    for lam in cfg.sweep_lambdas:
        for amplitude in amplitudes:
            payloads.append({"index": len(payloads), "cfg": cfg,
                             "lam": lam, "amplitude": amplitude})
    if workers > 1 and payloads:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, payloads))
    else:
        rows = [_sweep_row(payload) for payload in payloads]

    columns = []
    for name in _SWEEP_COLUMNS:
        if name == "status":
            columns.append([row[name] for row in rows])
        elif name == "index":
            columns.append([format(int(row[name])) for row in rows])
        else:
            columns.append([row[name] for row in rows])
    write_csv(os.path.join(out_dir, "summary.csv"), _SWEEP_COLUMNS, columns)

    payload = _base_report("sweep", cfg, seed)
    payload.update({
        "n_rows": len(rows),
        "statuses": [row["status"] for row in rows],
    })
    write_json(os.path.join(out_dir, "report.json"), payload)

    ok = [row for row in rows if row["status"] == "ok"]
    if ok:
        lam_axis = np.asarray([row["lambda"] for row in ok])
        c0_axis = np.asarray([row["c0_right"] for row in ok])
        order = np.argsort(lam_axis)
        svgplot.line_plot(os.path.join(out_dir, "plot.svg"),
                          [("fitted decay rate", lam_axis[order],
                            c0_axis[order])],
                          title="decay rate sweep", xlabel="lambda",
                          ylabel="C0")
    return 0


_COMMANDS = {
    "solve-periodic": cmd_solve_periodic,
    "solve-soliton": cmd_solve_soliton,
    "verify": cmd_verify,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="darksol",
        description="Dark-soliton profiles of the defocusing NLS with "
                    "periodic coefficients")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True)
        cmd.add_argument("--out", required=True)
        cmd.add_argument("--workers", type=int, default=1)
        cmd.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, args.seed, max(1, args.workers))
        return _COMMANDS[args.command](cfg, args.out, args.seed)
    except ValidationError as exc:
        print(f"darksol: {exc}", file=sys.stderr)
        return 2
    except (NonConvergence, BracketViolation, LineSearchFailure,
            SingularLinearization, StepDivergence, PhaseUndefined,
            TailUnderflow) as exc:
        print(f"darksol: {exc}", file=sys.stderr)
        return 3
    except (MonotonicityLoss, NoSignChange) as exc:
        print(f"darksol: {exc}", file=sys.stderr)
        return 4


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
