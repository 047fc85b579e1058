"""Command-line front end.

    ieit sweep   --config run.json [--format csv|json] [--out FILE] [--set a.b=v ...]
    ieit ieit    ...
    ieit steady  ...
    ieit evolve  ... [--mode rwa|full]
    ieit qswitch ...

Configuration is one JSON document. With ``"units": "kappa"`` every rate is
given in units of the mirror decay rate kappa (kappa itself is 1); with
``"units": "si"`` rates are in rad/s. Probe detunings and sweep bounds are
always in units of kappa and times in units of 1/kappa.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tables
from .model import ProbeDrive, SystemParams, power_from_G
from .response import (
    detuning_grid,
    find_absorption_zeros,
    ieit_conditions,
    output_field,
    probe_response,
)
from .steady_state import fix_operating_point, operating_point, solve_steady_states
from .timedomain import IntegrationError, integrate_full, integrate_rwa, q_switch

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEP_COLUMNS = (
    "x_over_kappa",
    "out_norm_L",
    "out_norm_R",
    "cavity_norm",
    "mech_norm",
    "phi_plus_norm",
    "phi_minus_norm",
)
TRAJECTORY_COLUMNS = ("t_kappa", "re_db", "im_db", "re_dc", "im_dc", "out_L_sq", "out_R_sq")

_NUM = "number"
_OPT_NUM = "number|null"
# key -> (type, required)
SCHEMA: Dict[str, Any] = {
    "units": ("str", True),
    "params": (
        {
            "omega_m": (_NUM, True),
            "gamma_m": (_NUM, True),
            "kappa": (_NUM, False),
            "kappa0": (_NUM, False),
            "g": (_NUM, True),
            "delta0": (_OPT_NUM, False),
            "omega_c": (_OPT_NUM, False),
            "pump": ({"power": (_NUM, False), "eps_c": (_NUM, False), "G": (_NUM, False)}, True),
        },
        True,
    ),
    "drive": ({"eps_L": ("complex", False), "eps_R": ("complex", False), "x": (_NUM, False)}, False),
    "sweep": ({"x_min": (_NUM, False), "x_max": (_NUM, False), "points": ("int", False)}, False),
    "output": ({"format": ("str", False), "path": ("str|null", False)}, False),
    "evolve": ({"mode": ("str", False), "t_max": (_NUM, False), "dt": (_OPT_NUM, False)}, False),
    "qswitch": (
        {"t_switch": (_NUM, False), "kappa_factor": (_NUM, False), "t_after": (_OPT_NUM, False)},
        False,
    ),
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    units: str
    params: SystemParams
    eps_L: complex
    eps_R: complex
    x: float
    x_min: float
    x_max: float
    points: int
    format: str
    path: Optional[str]
    mode: str
    t_max: float
    dt: Optional[float]
    t_switch: float
    kappa_factor: float
    t_after: Optional[float]

    @property
    def kappa(self) -> float:
        return self.params.kappa

    def drive(self, x=None) -> ProbeDrive:
        return ProbeDrive(self.eps_L, self.eps_R, self.x * self.kappa if x is None else x)


def _locate(raw: Optional[str], path: Sequence[str]) -> str:
    """Best-effort ``line N`` for a dotted key path in the raw JSON text."""
    if raw is None or not path:
        return ""
    pos = 0
    for key in path:
        found = raw.find(json.dumps(key), pos)
        if found < 0:
            return ""
        pos = found
    return f" (line {raw.count(chr(10), 0, pos) + 1})"


def _check_type(value, kind: str) -> bool:
    for k in kind.split("|"):
        if k == "null" and value is None:
            return True
        if k == "number" and isinstance(value, (int, float)) and not isinstance(value, bool):
            return math.isfinite(value)
        if k == "int" and isinstance(value, int) and not isinstance(value, bool):
            return True
        if k == "str" and isinstance(value, str):
            return True
        if k == "complex" and isinstance(value, list) and len(value) == 2:
            return all(_check_type(v, "number") for v in value)
    return False


def validate(doc: Any, raw: Optional[str] = None, schema=SCHEMA, prefix=()) -> None:
    """Strict structural check: unknown keys, missing keys and wrong types are errors."""
    where = ".".join(prefix) or "<root>"
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object{_locate(raw, prefix)}")
    for key in doc:
        if key not in schema:
            raise ConfigError(f"{where}: unknown field {key!r}{_locate(raw, (*prefix, key))}")
    for key, (kind, required) in schema.items():
        path = (*prefix, key)
        if key not in doc:
            if required:
                raise ConfigError(f"{'.'.join(path)}: missing required field{_locate(raw, prefix)}")
            continue
        if isinstance(kind, dict):
            validate(doc[key], raw, kind, path)
        elif not _check_type(doc[key], kind):
            raise ConfigError(f"{'.'.join(path)}: expected {kind}{_locate(raw, path)}")


def apply_override(doc: Dict[str, Any], assignment: str) -> None:
    """Apply ``a.b.c=value``; the value is parsed as JSON when possible."""
    if "=" not in assignment:
        raise ConfigError(f"--set {assignment!r}: expected key=value")
    key, text = assignment.split("=", 1)
    parts = key.strip().split(".")
    if not all(parts):
        raise ConfigError(f"--set {assignment!r}: empty path component")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    node = doc
    for p in parts[:-1]:
        child = node.setdefault(p, {})
        if not isinstance(child, dict):
            raise ConfigError(f"--set {key}: {p!r} is not an object")
        node = child
    node[parts[-1]] = value


def build_config(doc: Dict[str, Any], raw: Optional[str] = None) -> RunConfig:
    validate(doc, raw)
    units = doc["units"]
    if units not in ("kappa", "si"):
        raise ConfigError(f"units: must be 'kappa' or 'si', got {units!r}{_locate(raw, ('units',))}")
    p = dict(doc["params"])
    if units == "kappa":
        if p.get("kappa", 1.0) != 1.0:
            raise ConfigError("params.kappa: must be omitted or 1 in kappa units"
                              + _locate(raw, ("params", "kappa")))
        p["kappa"] = 1.0
    elif "kappa" not in p:
        raise ConfigError("params.kappa: required in si units" + _locate(raw, ("params",)))
    pump = p.pop("pump")
    if len(pump) != 1:
        raise ConfigError("params.pump: give exactly one of power, eps_c, G"
                          + _locate(raw, ("params", "pump")))
    p.update(pump)
    try:
        params = SystemParams(**p)
    except ValueError as exc:
        raise ConfigError(f"params: {exc}{_locate(raw, ('params',))}") from None

    drive = doc.get("drive", {})
    eL = complex(*drive.get("eps_L", [1.0, 0.0]))
    eR = complex(*drive.get("eps_R", [1.0, 0.0]))
    sweep = doc.get("sweep", {})
    x_min, x_max = float(sweep.get("x_min", -10.0)), float(sweep.get("x_max", 10.0))
    points = sweep.get("points", 2001)
    if points < 2 or not x_min < x_max:
        raise ConfigError("sweep: need points >= 2 and x_min < x_max" + _locate(raw, ("sweep",)))
    out = doc.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format: must be csv or json, got {fmt!r}"
                          + _locate(raw, ("output", "format")))
    ev = doc.get("evolve", {})
    mode = ev.get("mode", "rwa")
    if mode not in ("rwa", "full"):
        raise ConfigError(f"evolve.mode: must be rwa or full, got {mode!r}"
                          + _locate(raw, ("evolve", "mode")))
    qs = doc.get("qswitch", {})
    return RunConfig(
        units=units,
        params=params,
        eps_L=eL,
        eps_R=eR,
        x=float(drive.get("x", 0.0)),
        x_min=x_min,
        x_max=x_max,
        points=int(points),
        format=fmt,
        path=out.get("path"),
        mode=mode,
        t_max=float(ev.get("t_max", 25.0)),
        dt=ev.get("dt"),
        t_switch=float(qs.get("t_switch", 20.0)),
        kappa_factor=float(qs.get("kappa_factor", 10.0)),
        t_after=qs.get("t_after"),
    )


def load_config(path: Optional[str], overrides: Sequence[str] = (),
                format: Optional[str] = None, out: Optional[str] = None) -> RunConfig:
    raw = None
    doc: Dict[str, Any] = {}
    if path is not None:
        try:
            raw = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: top level must be an object")
    for item in overrides:
        apply_override(doc, item)
    if format is not None:
        doc.setdefault("output", {})["format"] = format
    if out is not None:
        doc.setdefault("output", {})["path"] = out
    return build_config(doc, raw)


# ---------------------------------------------------------------------------
# commands; each returns the text to emit


def cmd_sweep(cfg: RunConfig) -> str:
    op = operating_point(cfg.params)
    xs = detuning_grid(cfg.kappa, cfg.x_min, cfg.x_max, cfg.points)
    r = probe_response(cfg.params, op, cfg.drive(xs))
    cols = [
        xs / cfg.kappa,
        r.out_norm_L,
        r.out_norm_R,
        r.cavity_norm,
        r.mech_norm,
        r.phi_plus_norm,
        r.phi_minus_norm,
    ]
    return tables.render_table(SWEEP_COLUMNS, np.column_stack(cols).tolist(), cfg.format)


def cmd_ieit(cfg: RunConfig) -> str:
    params = cfg.params
    op = operating_point(params)
    pt = ieit_conditions(params, op)
    k = cfg.kappa
    items: List[Tuple[str, object]] = [
        ("units", cfg.units),
        ("G", op.G),
        ("kappa_eff", pt.kappa_eff),
        ("gamma_m_required", pt.gamma_m_required),
        ("exists", pt.exists),
    ]
    if params.omega_c is not None and params.g != 0:
        items.append(("power_W", power_from_G(params, abs(op.G))))
    if not pt.exists:
        items.append(("status", "no IEIT: G<2kappa_eff"))
        return tables.render_report(items, cfg.format)

    tuned = replace(params, gamma_m=pt.gamma_m_required)
    equal = ProbeDrive(cfg.eps_L, cfg.eps_L, 0.0)
    if equal.eps_L == 0:
        equal = ProbeDrive(1.0, 1.0, 0.0)
    resid = [
        abs(output_field(tuned, op, equal, xv, port)) / abs(equal.eps_L)
        for xv in (pt.x_minus, pt.x_plus)
        for port in ("L", "R")
    ]
    span = max(10.0 * k, 1.5 * abs(pt.x_plus) + k)
    zeros = find_absorption_zeros(tuned, op, equal, (-span, span))
    items += [
        ("x_minus", pt.x_minus),
        ("x_plus", pt.x_plus),
        ("x_minus_over_kappa", pt.x_minus / k),
        ("x_plus_over_kappa", pt.x_plus / k),
        ("residual_out", max(resid)),
        ("zeros_found", len(zeros)),
    ]
    items += [(f"zero_{i}_over_kappa", z / k) for i, z in enumerate(zeros)]
    return tables.render_report(items, cfg.format)


def cmd_steady(cfg: RunConfig) -> str:
    params = cfg.params
    if params.delta0 is None:
        states = [fix_operating_point(params)]
    elif params.G is not None:
        states = [operating_point(params)]
    else:
        states = solve_steady_states(params)
    cols = ("index", "u", "Delta", "G", "stable", "re_c_s", "im_c_s", "re_b_s", "im_b_s", "delta0")
    rows = [
        [i, s.u, s.Delta, s.G, s.stable, s.c_s.real, s.c_s.imag, s.b_s.real, s.b_s.imag, s.delta0]
        for i, s in enumerate(states)
    ]
    return tables.render_table(cols, rows, cfg.format)


def _trajectory_rows(traj, kappa):
    return np.column_stack(
        [
            traj.t * kappa,
            traj.db.real,
            traj.db.imag,
            traj.dc.real,
            traj.dc.imag,
            np.abs(traj.out_L) ** 2,
            np.abs(traj.out_R) ** 2,
        ]
    ).tolist()


def cmd_evolve(cfg: RunConfig) -> str:
    op = operating_point(cfg.params)
    k = cfg.kappa
    dt = None if cfg.dt is None else cfg.dt / k
    if cfg.mode == "full":
        traj = integrate_full(cfg.params, op, cfg.drive(), cfg.t_max / k, dt=dt)
    else:
        traj = integrate_rwa(cfg.params, op, cfg.drive(), cfg.t_max / k, dt=dt)
    return tables.render_table(TRAJECTORY_COLUMNS, _trajectory_rows(traj, k), cfg.format)


def cmd_qswitch(cfg: RunConfig) -> Tuple[str, str]:
    """Returns (summary report, trajectory table)."""
    op = operating_point(cfg.params)
    k = cfg.kappa
    res = q_switch(
        cfg.params,
        op,
        cfg.drive(),
        cfg.t_switch / k,
        cfg.kappa_factor,
        t_after=None if cfg.t_after is None else cfg.t_after / k,
        dt=None if cfg.dt is None else cfg.dt / k,
    )
    items = [
        ("t_switch_kappa", res.t_switch * k),
        ("kappa_factor", cfg.kappa_factor),
        ("stored_before", res.stored_before),
        ("emitted_quanta", res.emitted_quanta),
        ("mech_dissipated", res.mech_dissipated),
        ("internal_dissipated", res.internal_dissipated),
        ("remaining", res.remaining),
        ("budget_error", res.budget_error),
    ]
    report = tables.render_report(items, "json" if cfg.format == "json" else "csv")
    table = tables.render_table(TRAJECTORY_COLUMNS, _trajectory_rows(res.trajectory, k), cfg.format)
    return report, table


COMMANDS = ("sweep", "ieit", "steady", "evolve", "qswitch")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config field by dotted path")
    parser = argparse.ArgumentParser(prog="ieit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "evolve":
            sp.add_argument("--mode", choices=("rwa", "full"), help="equation set")
    return parser


def _emit(text: str, path: Optional[str], stdout) -> None:
    if path is None:
        stdout.write(text)
        return
    Path(path).write_text(text)


def _fail(stderr, kind: str, msg: str, code: int) -> int:
    stderr.write(f"error: {kind}: {' '.join(str(msg).split())}\n")
    return code


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0

    overrides = list(args.overrides)
    if getattr(args, "mode", None):
        overrides.append(f"evolve.mode={json.dumps(args.mode)}")
    try:
        cfg = load_config(args.config, overrides, args.format, args.out)
    except ConfigError as exc:
        return _fail(stderr, "config", exc, EXIT_CONFIG)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "qswitch":
                report, table = cmd_qswitch(cfg)
                if cfg.path is not None:
                    _emit(table, cfg.path, stdout)
                stdout.write(report)
            else:
                text = {
                    "sweep": cmd_sweep,
                    "ieit": cmd_ieit,
                    "steady": cmd_steady,
                    "evolve": cmd_evolve,
                }[args.command](cfg)
                _emit(text, cfg.path, stdout)
    except (IntegrationError, ZeroDivisionError, FloatingPointError) as exc:
        return _fail(stderr, "numerical", exc, EXIT_NUMERIC)
    except ValueError as exc:
        msg = str(exc)
        if "non-finite" in msg:
            return _fail(stderr, "numerical", msg, EXIT_NUMERIC)
        return _fail(stderr, "config", msg, EXIT_CONFIG)
    except OSError as exc:
        return _fail(stderr, "io", f"{exc.filename}: {exc.strerror}", EXIT_CONFIG)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
