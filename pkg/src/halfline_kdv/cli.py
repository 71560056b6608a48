"""Command line entry point: ``halfline-kdv {solve, verify, plotdata}``.

A run manifest is a flat ``key = value`` text file, for example::

    scenario = soliton_k1
    c = 1.0
    x0 = -10
    T = 1.0
    n_x = 2048

or, with explicit data::

    k = 1
    s = 0.0
    phi = gaussian: 1.0, 4.0, 1.0
    f = zero

Unknown keys are rejected.  Exit codes: 0 success, 2 invalid input, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .airy import constant_CA
from .diagnostics import energy_identity
from .core import SampledFunction
from .fractional import gamma_function
from .solver import (CompatibilityError, PicardConvergenceError, SolverConfig, solve_nonlinear)
from .special_runs import SCENARIOS, Scenario, get_scenario

__all__ = ["main", "RunManifest", "parse_manifest", "OUTPUT_ENV"]

OUTPUT_ENV = "HALFLINE_KDV_OUT"
EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 2, 3
_FMT = "%.17e"

log = logging.getLogger("halfline_kdv")

_CONFIG_KEYS = {f.name: f.type for f in fields(SolverConfig)}
_SCENARIO_KEYS = {"c", "x0", "amplitude", "center", "width", "omega"}
_OTHER_KEYS = {"scenario", "phi", "f", "output", "snapshots",
               "emit_field", "emit_boundary", "emit_mass", "emit_ledger"}


class ManifestError(ValueError):
    pass


@dataclass
class RunManifest:
    scenario: str | None = None
    scenario_params: dict = field(default_factory=dict)
    phi: str | None = None
    f: str | None = None
    config: dict = field(default_factory=dict)
    output: str | None = None
    snapshots: int = 5
    emit: dict = field(default_factory=lambda: dict(field=True, boundary=True, mass=True, ledger=True))


def _parse_bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ManifestError(f"not a boolean: {v!r}")


def _convert(key: str, raw: str):
    typ = str(_CONFIG_KEYS[key])
    raw = raw.strip()
    if "None" in typ and raw.lower() == "none":
        return None
    if typ.startswith("int"):
        return int(raw)
    if typ.startswith("bool"):
        return _parse_bool(raw)
    return float(raw)


def parse_manifest(text: str) -> RunManifest:
    """Parse and validate a manifest; raises :class:`ManifestError` on any problem."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#",),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string("[manifest]\n" + text)
    except configparser.Error as exc:
        raise ManifestError(f"malformed manifest: {exc}") from None
    m = RunManifest()
    for key, raw in cp["manifest"].items():
        try:
            if key in _CONFIG_KEYS:
                m.config[key] = _convert(key, raw)
            elif key in _SCENARIO_KEYS:
                m.scenario_params[key] = float(raw)
            elif key == "scenario":
                m.scenario = raw.strip()
            elif key in ("phi", "f"):
                setattr(m, key, raw.strip())
            elif key == "output":
                m.output = raw.strip()
            elif key == "snapshots":
                m.snapshots = int(raw)
            elif key.startswith("emit_") and key in _OTHER_KEYS:
                m.emit[key[5:]] = _parse_bool(raw)
            else:
                raise ManifestError(f"unknown manifest key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"bad value for {key!r}: {raw!r}") from None
    if m.scenario is not None:
        if m.scenario not in SCENARIOS:
            raise ManifestError(f"unknown scenario {m.scenario!r}; known: {sorted(SCENARIOS)}")
        if m.phi is not None or m.f is not None:
            raise ManifestError("give either a scenario or explicit phi/f data, not both")
    elif m.phi is None or m.f is None:
        raise ManifestError("manifest needs a scenario or both phi and f")
    if m.snapshots < 1:
        raise ManifestError("snapshots must be >= 1")
    return m


def _data_function(spec: str, kind: str):
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    vals = [float(a) for a in args.split(",") if a.strip()] if args.strip() else []

    def need(n):
        if len(vals) != n:
            raise ManifestError(f"{kind} = {name} expects {n} parameters, got {len(vals)}")

    if name == "zero":
        need(0)
        return np.zeros_like
    if name == "gaussian":
        need(3)
        a, c, w = vals
        return lambda x: a * np.exp(-((x - c) / w) ** 2)
    if name == "sine":
        need(2)
        a, om = vals
        return lambda t: a * np.sin(om * t)
    if name == "constant":
        need(1)
        return lambda t: np.full(np.shape(t), vals[0])
    raise ManifestError(f"unknown {kind} family {name!r} (zero, gaussian, sine, constant)")


def build_scenario(m: RunManifest) -> Scenario:
    try:
        if m.scenario is not None:
            base = get_scenario(m.scenario, **_scenario_kwargs(m))
            cfg = base.config.replace(**m.config)
            base.config = cfg
            base.k, base.s = cfg.k, cfg.s
            return base
        cfg = SolverConfig(**m.config)
        return Scenario(name="explicit", k=cfg.k, s=cfg.s, phi=_data_function(m.phi, "phi"),
                        f=_data_function(m.f, "f"), config=cfg)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(str(exc)) from None


def _scenario_kwargs(m: RunManifest) -> dict:
    allowed = {
        "soliton_k1": {"c", "x0"}, "soliton_k2": {"c", "x0"},
        "gaussian_decay": {"amplitude", "center", "width"},
        "linear_sine": {"omega"}, "zero": set(),
    }[m.scenario]
    extra = set(m.scenario_params) - allowed
    if extra:
        raise ManifestError(f"parameters {sorted(extra)} do not apply to scenario {m.scenario!r}")
    return dict(m.scenario_params)


def _write_columns(path: Path, header: str, cols):
    arr = np.column_stack([np.real(c) for c in cols])
    np.savetxt(path, arr, fmt=_FMT, delimiter=",", header=header, comments="# ")


def _metadata(m: RunManifest, sc: Scenario) -> dict:
    cfg = sc.config
    return {
        "scenario": sc.name,
        "scenario_params": sc.params if sc.name != "compatible_trace" else {},
        "phi": m.phi,
        "f": m.f,
        "config": {f.name: getattr(cfg, f.name) for f in fields(SolverConfig)},
        "constants": {"C_A": constant_CA(), "Gamma(2/3)": gamma_function(2.0 / 3.0)},
        "versions": {"halfline_kdv": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
    }


def cmd_solve(args) -> int:
    try:
        text = Path(args.manifest).read_text()
    except OSError as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        m = parse_manifest(text)
        sc = build_scenario(m)
        problem = sc.problem()
    except (ManifestError, CompatibilityError, ValueError) as exc:
        print(f"error: invalid manifest: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out or m.output or os.environ.get(OUTPUT_ENV) or "halfline_kdv_run")
    out.mkdir(parents=True, exist_ok=True)
    meta = _metadata(m, sc)
    try:
        u, rep = solve_nonlinear(problem)
    except PicardConvergenceError as exc:
        meta.update(converged=False, residual_history=exc.history, message=str(exc))
        (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except CompatibilityError as exc:
        print(f"error: invalid data: {exc}", file=sys.stderr)
        return EXIT_INVALID
    meta.update(
        converged=rep.converged, window_T0=rep.window_T0, picard_iters=rep.picard_iters,
        residual_history=rep.residual_history, nt=int(u.tgrid.n), nx=int(u.xgrid.n),
        max_boundary_error=float(np.max(rep.boundary_error)),
        max_energy_imbalance=float(np.max(rep.energy_residual)),
    )
    (out / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    t = rep.times
    if m.emit.get("field", True):
        idx = np.unique(np.linspace(0, u.tgrid.n - 1, m.snapshots).round().astype(int))
        header = "x," + ",".join(f"u(t={t[i]:.17e})" for i in idx)
        _write_columns(out / "field.csv", header, [u.xgrid.nodes] + [u.values[i] for i in idx])
    if m.emit.get("boundary", True):
        _write_columns(out / "boundary.csv", "t,u(0;t),boundary_error",
                       [t, u.values[:, 0], rep.boundary_error])
    if m.emit.get("mass", True):
        _write_columns(out / "mass.csv", "t,mass", [t, rep.mass])
    if m.emit.get("ledger", True):
        _write_columns(out / "ledger.csv", "t,relative_imbalance", [t, rep.energy_residual])
    print(f"solved {sc.name}: {len(rep.picard_iters)} window(s), Picard iterations "
          f"{rep.picard_iters}, max boundary error {meta['max_boundary_error']:.3e}; "
          f"output in {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import SUITES, run_criterion

    if args.suite not in SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {sorted(SUITES)}", file=sys.stderr)
        return EXIT_INVALID
    names = SUITES[args.suite]
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(run_criterion, names))
    else:
        results = [run_criterion(n) for n in names]
    for r in results:
        print(r.line())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        report = [dict(name=r.name, value=r.value, threshold=r.threshold, passed=r.passed,
                       detail=r.detail) for r in results]
        (out / f"verify_{args.suite}.json").write_text(json.dumps(report, indent=2))
    return EXIT_OK if all(r.passed for r in results) else 1


def _load_csv(path: Path) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    if arr.size == 0:
        raise ValueError(f"{path.name} is empty")
    return arr


def cmd_plotdata(args) -> int:
    run = Path(args.run_dir)
    try:
        meta = json.loads((run / "metadata.json").read_text())
        if not meta.get("converged", False):
            raise ValueError("run did not converge")
        out = Path(args.out) if args.out else run
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if (run / "boundary.csv").exists():
            b = _load_csv(run / "boundary.csv")
            np.savetxt(out / "boundary_slice.dat", b[:, :2], fmt=_FMT, header="t u(0,t)")
            written.append("boundary_slice.dat")
        if (run / "mass.csv").exists():
            ms = _load_csv(run / "mass.csv")
            np.savetxt(out / "mass_slice.dat", ms[:, :2], fmt=_FMT, header="t mass")
            written.append("mass_slice.dat")
        if (run / "field.csv").exists():
            fld = _load_csv(run / "field.csv")
            header = (run / "field.csv").read_text().splitlines()[0]
            times = [float(h.split("=")[1].rstrip(")")) for h in header.split(",")[1:]]
            if fld.shape[1] != len(times) + 1:
                raise ValueError("field.csv header and columns disagree")
            j = len(times) - 1 if args.time is None else int(np.argmin(np.abs(np.array(times) - args.time)))
            np.savetxt(out / "snapshot_slice.dat", fld[:, [0, j + 1]], fmt=_FMT,
                       header=f"x u(x,t={times[j]:.17e})")
            written.append("snapshot_slice.dat")
        if not written:
            raise ValueError("run directory holds no data files")
    except (OSError, ValueError, KeyError, IndexError, json.JSONDecodeError) as exc:
        print(f"error: unusable run directory {run}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print("wrote " + ", ".join(written))
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="halfline-kdv",
                                description="Half-line gKdV solver by boundary forcing.")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve the problem described by a manifest")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./halfline_kdv_run)")
    v = sub.add_parser("verify", help="run acceptance criteria")
    v.add_argument("--suite", default="all")
    v.add_argument("--out")
    v.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    d = sub.add_parser("plotdata", help="extract plot-ready slices from a run directory")
    d.add_argument("run_dir")
    d.add_argument("--out")
    d.add_argument("--time", type=float, default=None, help="snapshot time (default: last)")
    return p


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handler = {"solve": cmd_solve, "verify": cmd_verify, "plotdata": cmd_plotdata}[args.command]
    return handler(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
