"""Command-line entry point: ``wigner-moments VERB [options]``.

Verbs: ``run``, ``dump-system``, ``eigen-report``, ``asymptotics``.
Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 certification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
import time
from importlib import metadata

import numpy as np

from . import plotting
from .assembly import assemble_1d, assemble_3d
from .asymptotics import g_of_x, predict, steady_classical_state
from .config import ConfigError, parse_file, resolve
from .errors import (DomainError, InvalidArgumentError, NumericalFailureError, SolverFailureError,
                     UnsupportedOrderError)
from .indexing import enumerate_index_set
from .spectral import certify
from .solver import run
from .state import (MomentState1D, MomentState3D, random_admissible_state, unknown_names_1d,
                    unknown_names_3d)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CERTIFY = 0, 2, 3, 4

FLAG_KEYS = ("scenario", "order", "cells", "x-min", "x-max", "cfl", "t-end", "hbar", "tau",
             "output-dir", "seed", "boundary")


def code_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _fmt(value):
    return format(float(value), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])
    return path


def write_json_atomic(path, payload):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".manifest-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


class Manifest:
    """Collects outputs and writes ``manifest.json`` at the end of a verb."""

    def __init__(self, verb, settings, outdir):
        self.outdir = outdir
        self.record = {
            "verb": verb,
            "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in settings.values.items()},
            "version": code_version(),
            "start_time": time.time(),
            "end_time": None,
            "outputs": [],
            "failure": None,
        }

    def path(self, name):
        full = os.path.join(self.outdir, name)
        self.record["outputs"].append(name)
        return full

    def fail(self, exc, **extra):
        self.record["failure"] = {"type": type(exc).__name__, "message": str(exc), **extra}

    def write(self):
        self.record["end_time"] = time.time()
        return write_json_atomic(os.path.join(self.outdir, "manifest.json"), self.record)


# ---------------------------------------------------------------- verbs

def initial_field(settings):
    """Classical steady state of the scenario potential: rho = P = exp(-V), T = 1."""
    M = settings.solver.order
    x = settings.grid.centers
    rho, u, P, _ = steady_classical_state(x, settings.potential)
    w = np.zeros((len(x), M + 1))
    w[:, 0], w[:, 1], w[:, 2] = rho, u, 0.5 * P
    return w


def verb_run(settings, manifest):
    M = settings.solver.order
    names = ["rho", "u", "P"] + [f"f{n}" for n in range(3, M + 1)]
    failure = None
    try:
        traj = run(settings.solver, settings.grid, initial_field(settings))
    except SolverFailureError as exc:
        failure = exc
        traj = exc.trajectory
        manifest.fail(exc, cell=exc.cell, time=exc.time)
    rows = []
    for t, w in zip(traj.times, traj.fields):
        P = 2.0 * w[:, 2]
        for i, xi in enumerate(traj.x):
            rows.append([t, xi, w[i, 0], w[i, 1], P[i], *w[i, 3:]])
    write_csv(manifest.path("trajectory.csv"), ["t", "x"] + names, rows)
    cols = ["mass", "momentum", "energy", "momentum_residual", "energy_residual"]
    diag = [[t] + [traj.diagnostics[c][k] for c in cols] for k, t in enumerate(traj.times)]
    write_csv(manifest.path("diagnostics.csv"), ["t"] + cols, diag)
    if settings["plots"] and traj.times:
        plotting.plot_fields(traj, manifest.path("fields.png"))
        plotting.plot_diagnostics(traj, manifest.path("diagnostics.png"))
    return EXIT_SOLVER if failure else EXIT_OK


def _state_1d(spec, M):
    allowed = {"rho", "u", "P", "x"} | {f"f{n}" for n in range(3, M + 1)}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"unknown state keys for a 1D order-{M} state: {sorted(unknown)}")
    rho, P = spec.get("rho", 1.0), spec.get("P", 1.0)
    coeffs = tuple(spec.get(f"f{n}", 0.0) for n in range(3, M + 1))
    return MomentState1D(M, rho, spec.get("u", 0.0), 0.5 * P, coeffs)


def _state_3d(spec, M):
    fkeys = {"f{}{}{}".format(*a): a for a in enumerate_index_set(M) if a.order >= 3}
    allowed = {"rho", "x", "u1", "u2", "u3"} | {f"p{i}{j}" for i in range(1, 4) for j in range(i, 4)} | set(fkeys)
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"unknown state keys for a 3D order-{M} state: {sorted(unknown)}")
    rho = spec.get("rho", 1.0)
    p = np.eye(3) * rho
    for i in range(3):
        for j in range(i, 3):
            key = f"p{i + 1}{j + 1}"
            if key in spec:
                p[i, j] = p[j, i] = spec[key]
    u = tuple(spec.get(f"u{i}", 0.0) for i in (1, 2, 3))
    coeffs = {a: spec[k] for k, a in fkeys.items() if k in spec}
    return MomentState3D(M, rho, u, p, coeffs)


def verb_dump_system(settings, manifest):
    M = settings.solver.order
    cfg = settings.solver
    x0 = settings.state_spec.get("x", 0.0)
    if settings["dimension"] == 1:
        state = _state_1d(settings.state_spec, M)
        derivs = settings.potential.derivatives_1d(x0, M)
        system = assemble_1d(M, state, derivs, cfg.tau, cfg.hbar, settings["regularized"])
        header = unknown_names_1d(M)
        write_csv(manifest.path("A.csv"), header, system.A)
    else:
        state = _state_3d(settings.state_spec, M)
        system = assemble_3d(M, state, settings.potential, (x0, 0.0, 0.0), cfg.tau, cfg.hbar,
                             settings["regularized"])
        header = unknown_names_3d(M)
        for j in range(3):
            write_csv(manifest.path(f"M{j + 1}.csv"), header, system.Mhat[j])
    write_csv(manifest.path("G.csv"), header, system.G)
    return EXIT_OK


def _unit_vector(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def verb_eigen_report(settings, manifest):
    rng = np.random.default_rng(settings["seed"])
    cfg = settings.solver
    dim = settings["dimension"]
    records = []
    status = EXIT_OK
    with open(manifest.path("eigen_report.jsonl"), "w", encoding="utf-8") as fh:
        for M in settings["report.orders"]:
            for k in range(settings["report.states"]):
                state = random_admissible_state(M, rng, dimension=dim)
                directions = [None]
                if dim == 1:
                    derivs = settings.potential.derivatives_1d(0.0, M)
                    system = assemble_1d(M, state, derivs, cfg.tau, cfg.hbar, settings["regularized"])
                else:
                    system = assemble_3d(M, state, settings.potential, np.zeros(3), cfg.tau, cfg.hbar,
                                         settings["regularized"])
                    directions = [_unit_vector(rng) for _ in range(settings["report.directions"])]
                for n in directions:
                    try:
                        report = certify(system, n)
                    except NumericalFailureError as exc:
                        manifest.fail(exc, order=M, sample=k)
                        return EXIT_CERTIFY
                    extra = {"order": M, "sample": k, "dimension": dim}
                    if n is not None:
                        extra["direction"] = [float(c) for c in n]
                    line = report.to_json(**extra)
                    fh.write(line + "\n")
                    records.append(json.loads(line))
                    if settings["regularized"] and not report.hyperbolic:
                        status = EXIT_CERTIFY
    if status != EXIT_OK:
        manifest.record["failure"] = {"type": "CertificationFailure",
                                      "message": "at least one regularized system was not certified hyperbolic"}
    if settings["plots"] and records:
        plotting.plot_spectra(records, manifest.path("spectra.png"))
    return status


def verb_asymptotics(settings, manifest):
    g = settings.grid
    x = np.linspace(g.x_min, g.x_max, settings["asymptotics.points"])
    hbar = settings.solver.hbar
    gx = g_of_x(x, settings.potential)
    times = settings["asymptotics.times"]
    preds = {t: predict(x, t, hbar, settings.potential, settings.solver.tau) for t in times}
    header = ["x", "g"]
    for t in times:
        header += [f"{name}@{t:g}" for name in ("rho", "u", "P", "f3")]
    rows = []
    for i, xi in enumerate(x):
        row = [xi, gx[i]]
        for t in times:
            p = preds[t]
            row += [p.rho[i], p.u[i], p.P[i], p.f3[i]]
        rows.append(row)
    write_csv(manifest.path("asymptotics.csv"), header, rows)
    if settings["plots"]:
        plotting.plot_asymptotics(x, gx, preds, manifest.path("asymptotics.png"))
    return EXIT_OK


VERBS = {
    "run": verb_run,
    "dump-system": verb_dump_system,
    "eigen-report": verb_eigen_report,
    "asymptotics": verb_asymptotics,
}


# ---------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="wigner-moments", description=__doc__.splitlines()[0])
    parser.add_argument("verb", choices=sorted(VERBS))
    parser.add_argument("--config", help="key=value configuration file")
    for key in FLAG_KEYS:
        parser.add_argument(f"--{key}", dest=key.replace("-", "_"))
    parser.add_argument("--potential", help="potential kind (zero, linear, harmonic, polynomial, bump)")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="any configuration key, e.g. --set state.f3=0.1 (repeatable)")
    return parser


def parse_args(argv):
    args = build_parser().parse_args(argv)
    file_values = parse_file(args.config) if args.config else {}
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    for key in FLAG_KEYS:
        value = getattr(args, key.replace("-", "_"))
        if value is not None:
            overrides[key] = value
    if args.potential is not None:
        overrides["potential.kind"] = args.potential
    return args.verb, resolve(file_values, overrides)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        verb, settings = parse_args(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outdir = settings["output-dir"]
    os.makedirs(outdir, exist_ok=True)
    manifest = Manifest(verb, settings, outdir)
    try:
        status = VERBS[verb](settings, manifest)
    except ConfigError as exc:
        manifest.fail(exc)
        manifest.write()
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidArgumentError, DomainError, UnsupportedOrderError) as exc:
        manifest.fail(exc)
        manifest.write()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest.write()
    if status == EXIT_SOLVER:
        print(f"solver failure: {manifest.record['failure']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
