"""``forge <command> --config run.json [--out dir]``.

Each command reads a flat JSON object whose keys carry their units in the
suffix (``_over_J``, ``_over_omega``, ``_MHz``, ``_T``, ``_G``, ``_us``).
Unknown keys are rejected. Every run writes ``manifest.json`` with the
library version and the fully resolved configuration.

Exit codes: 0 success, 2 configuration error, 3 numerical error. Failures
print one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .chain import (
    ChainSpec,
    RampSpec,
    XYDrive,
    XY_TARGET,
    adiabatic_prepare,
    decoupling_distance,
    stroboscopic_errors,
    xy_digital,
    xy_steps_control,
    _check_decoupling,
)
from .design import (
    DriveProtocol,
    default_robustness_grid,
    default_seeds,
    echo_oracle,
    optimize,
    robustness_scan,
    three_site_hamiltonian,
)
from .errors import ConfigError, ForgeError
from .floquet import CSV_COLUMNS, coefficient_table, effective_hamiltonian
from .platform import (
    NanomagnetParams,
    TABLE_ROW_OMEGA5,
    crosstalk_sweep,
    lab_steps,
    nanomagnet_fields,
    nanomagnet_map,
    superconducting_map,
)
from .prop import SCHEMES, StepControl, matrix_to_json

ROW3 = list(TABLE_ROW_OMEGA5)

# key -> (default, kind); kinds: float, int, bool, str, floats, float?, floats?, seeds?
SCHEMAS: dict[str, dict[str, tuple]] = {
    "optimize": {
        "omega_over_J": (5.0, "float"),
        "c_zxz_over_J": (-0.2, "float"),
        "n_harmonics": (2, "int"),
        "seeds_over_omega": (None, "seeds?"),
        "seed_points": (5, "int"),
        "seed_span_over_omega": (3.0, "float"),
        "xatol": (1e-10, "float"),
        "steps_per_period": (2048, "int"),
    },
    "effham": {
        "omega_over_J": (5.0, "float"),
        "f_over_omega": (ROW3, "floats"),
        "steps_per_period": (256, "int"),
        "tol": (1e-12, "float?"),
        "scheme": ("magnus6", "str"),
    },
    "robustness": {
        "omega_over_J": (5.0, "float"),
        "f_over_omega": (ROW3, "floats"),
        "eps_points": (41, "int"),
        "eps_min": (1e-5, "float"),
        "eps_max": (1e-1, "float"),
        "steps_per_period": (512, "int"),
    },
    "chain-exact": {
        "n_sites": (6, "int"),
        "boundary": ("periodic", "str"),
        "omega_over_J": (5.0, "float"),
        "f_over_omega": (ROW3, "floats"),
        "cycles": (10, "int"),
        "idle_bonds": ("off", "str"),
        "steps_per_period": (256, "int"),
        "tol": (1e-12, "float?"),
    },
    "cluster-prep": {
        "n_sites": (6, "int"),
        "tf_over_T": ([300.0], "floats"),
        "omega_over_J": (10.0, "float"),
        "c_zxz_over_omega": (-0.009, "float"),
        "harmonics_over_omega": ([1.200, 1.224], "floats"),
        "inactive_field": (True, "bool"),
        "steps_per_period": (128, "int"),
        "scheme": ("magnus4", "str"),
    },
    "xy-demo": {
        "omega_over_J": (5.0, "float"),
        "f10_over_omega": (0.05553, "float"),
        "f30_over_omega": (0.05553, "float"),
        "f20_over_omega": (0.88894, "float"),
        "f21_over_omega": (0.75227, "float"),
        "f22_over_omega": (0.61233, "float"),
        "h_over_omega": (100.0, "float"),
        "h_sweep_over_omega": ([2.0, 3.0, 5.0, 10.0, 50.0, 100.0], "floats"),
        "tol": (1e-10, "float?"),
    },
    "crosstalk": {
        "products_T": ([float(x) for x in np.linspace(0.5, 4.0, 8)], "floats"),
        "B_z_T": (1.0, "float"),
        "g_A": ([14.2, 3.2, 0.5], "floats"),
        "g_B": ([9.3, 6.4, 4.0], "floats"),
        "J_par_MHz": (300.0, "float"),
        "J_perp_MHz": (None, "float?"),
        "omega_over_J": (5.0, "float"),
        "f_over_omega": (ROW3, "floats"),
        "tol": (1e-9, "float?"),
    },
    "platform-map": {
        "J_MHz": (10.0, "float"),
        "omega_over_J": (5.0, "float"),
        "f_over_omega": (ROW3, "floats"),
        "tau_c_us": (20.0, "float"),
        "g_A": ([14.2, 3.2, 0.5], "floats"),
        "g_B": ([9.3, 6.4, 4.0], "floats"),
        "B_z_T": (1.0, "float"),
        "J_par_MHz": (300.0, "float"),
        "nanomagnet_omega_over_J": (5.0, "float"),
    },
    "echo": {
        "J": (1.0, "float"),
        "lambda": (0.4, "float"),
        "steps_per_period": (256, "int"),
        "tol": (1e-12, "float?"),
    },
}
COMMANDS = tuple(SCHEMAS)


# ------------------------------------------------------------------ config


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(key: str, value, kind: str):
    optional = kind.endswith("?")
    base = kind.rstrip("?")
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{key} must not be null")
    if base == "float":
        if not _is_number(value) or not math.isfinite(value):
            raise ConfigError(f"{key} must be a finite number")
        return float(value)
    if base == "int":
        if not _is_number(value) or float(value) != int(value):
            raise ConfigError(f"{key} must be an integer")
        return int(value)
    if base == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be true or false")
        return value
    if base == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string")
        return value
    if base == "floats":
        if _is_number(value):
            value = [value]
        if not isinstance(value, list) or not value or not all(_is_number(v) for v in value):
            raise ConfigError(f"{key} must be a non-empty list of numbers")
        return [float(v) for v in value]
    if base == "seeds":
        if not isinstance(value, list) or not value or not all(
                isinstance(s, list) and s and all(_is_number(v) for v in s) for s in value):
            raise ConfigError(f"{key} must be a non-empty list of number lists")
        return [[float(v) for v in s] for s in value]
    raise AssertionError(kind)


def resolve_config(command: str, raw: dict) -> dict:
    """Defaults merged with ``raw``; types checked and unknown keys rejected."""
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw = dict(raw)
    named = raw.pop("command", command)
    if named != command:
        raise ConfigError(f"config is for {named!r}, not {command!r}")
    schema = SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    cfg = {k: _coerce(k, raw.get(k, default), kind) for k, (default, kind) in schema.items()}
    _validate(command, cfg)
    return cfg


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _validate(command: str, cfg: dict):
    for key in ("omega_over_J", "nanomagnet_omega_over_J", "J", "J_MHz", "J_par_MHz", "B_z_T"):
        if key in cfg:
            _require(cfg[key] > 0, f"{key} must be positive")
    if "steps_per_period" in cfg:
        spp = cfg["steps_per_period"]
        _require(spp >= 16 and spp % 2 == 0, "steps_per_period must be even and at least 16")
    if "scheme" in cfg:
        _require(cfg["scheme"] in SCHEMES, f"scheme must be one of {', '.join(SCHEMES)}")
    if cfg.get("tol") is not None:
        _require(cfg["tol"] > 0, "tol must be positive")
    if command == "optimize":
        _require(cfg["n_harmonics"] >= 1, "n_harmonics must be at least 1")
        _require(cfg["seed_points"] >= 1, "seed_points must be at least 1")
        if cfg["seeds_over_omega"] is not None:
            _require(all(len(s) == cfg["n_harmonics"] for s in cfg["seeds_over_omega"]),
                     "every seed needs n_harmonics entries")
    if command == "robustness":
        _require(len(cfg["f_over_omega"]) == 3, "f_over_omega must be [f0, f1, f2]")
        _require(0 < cfg["eps_min"] < cfg["eps_max"], "need 0 < eps_min < eps_max")
        _require(cfg["eps_points"] >= 1, "eps_points must be at least 1")
    if command in ("chain-exact",):
        _require(cfg["boundary"] in ("periodic", "open"), "boundary must be periodic or open")
        _require(cfg["idle_bonds"] in ("off", "on"), "idle_bonds must be off or on")
        _require(cfg["cycles"] >= 1, "cycles must be at least 1")
        _require(cfg["n_sites"] >= 3, "n_sites must be at least 3")
        if cfg["boundary"] == "periodic":
            _require(cfg["n_sites"] % 2 == 0, "periodic chains need an even number of sites")
    if command == "cluster-prep":
        _require(cfg["n_sites"] >= 4 and cfg["n_sites"] % 2 == 0,
                 "n_sites must be even and at least 4")
        for tf in cfg["tf_over_T"]:
            _require(tf > 0 and tf == round(tf) and round(tf) % 2 == 0,
                     f"tf_over_T={tf:g} is not a positive even integer")
    if command == "xy-demo":
        for h in [cfg["h_over_omega"], *cfg["h_sweep_over_omega"]]:
            try:
                _check_decoupling(h, 1.0)
            except ConfigError:
                raise ConfigError(f"h_over_omega={h:g} is not an integer") from None
    if command in ("crosstalk", "platform-map"):
        _require(len(cfg["g_A"]) == 3 and len(cfg["g_B"]) == 3, "g factors need 3 components")
        _require(cfg["g_B"][0] > 0 and cfg["g_B"][1] > 0, "g_B x and y components must be positive")
    if command == "crosstalk":
        _require(all(x > 0 for x in cfg["products_T"]), "products_T must be positive")
    if "f_over_omega" in cfg:
        _require(len(cfg["f_over_omega"]) >= 1, "f_over_omega needs at least f0")


# ------------------------------------------------------------------ output


def fmt(x) -> str:
    """Fixed 17-significant-digit float text."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    path.write_bytes(("\n".join(lines) + "\n").encode())


def _json_text(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, np.integer)):
        return fmt(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if not len(obj):
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_json_text(v) for v in obj) + "]"
        items = [inner + _json_text(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path: Path, obj):
    path.write_bytes((_json_text(obj) + "\n").encode())


# ---------------------------------------------------------------- commands


def _protocol(omega: float, f_over_omega) -> DriveProtocol:
    return DriveProtocol.from_f_over_omega(omega, f_over_omega)


def run_optimize(cfg: dict, out: Path):
    seeds = cfg["seeds_over_omega"] or default_seeds(
        cfg["n_harmonics"], cfg["seed_points"], cfg["seed_span_over_omega"])
    res = optimize(cfg["omega_over_J"], cfg["c_zxz_over_J"], seeds=seeds,
                   n_harmonics=cfg["n_harmonics"], sc=StepControl(cfg["steps_per_period"], None),
                   xatol=cfg["xatol"])
    write_json(out / "optimize.json", res.report())
    return res.report()


def run_effham(cfg: dict, out: Path):
    p = _protocol(cfg["omega_over_J"], cfg["f_over_omega"])
    sc = StepControl(cfg["steps_per_period"], cfg["tol"], scheme=cfg["scheme"])
    e = effective_hamiltonian(three_site_hamiltonian(1.0, p), sc)
    table = coefficient_table(e)
    row = table.csv_row(cfg["omega_over_J"], cfg["f_over_omega"])
    write_csv(out / "coefficients.csv", CSV_COLUMNS, [[row[c] for c in CSV_COLUMNS]])
    report = {"period_over_inv_J": e.period, "residual": e.residual, "h_eff": e.h_eff.to_json()}
    write_json(out / "effham.json", report)
    return row


def run_robustness(cfg: dict, out: Path):
    p = _protocol(cfg["omega_over_J"], cfg["f_over_omega"])
    grid = default_robustness_grid(cfg["eps_points"], cfg["eps_min"], cfg["eps_max"])
    rows = robustness_scan(p, grid, grid, sc=StepControl(cfg["steps_per_period"], None))
    write_csv(out / "robustness.csv", ("eps1", "eps2", "abs_cx", "abs_czz"), rows)
    return {"points": len(rows), "max_abs_cx": max(r[2] for r in rows),
            "max_abs_czz": max(r[3] for r in rows)}


def run_chain_exact(cfg: dict, out: Path):
    spec = ChainSpec(cfg["n_sites"], cfg["boundary"])
    p = _protocol(cfg["omega_over_J"], cfg["f_over_omega"])
    sc = StepControl(cfg["steps_per_period"], cfg["tol"])
    errors = stroboscopic_errors(spec, p, cfg["cycles"], sc, cfg["idle_bonds"])
    write_csv(out / "chain_exact.csv", ("cycle", "max_norm_error"),
              [(k, e) for k, e in enumerate(errors, start=1)])
    report = {"n_sites": spec.n, "boundary": spec.boundary, "J_zxz_over_J": p.c_zxz,
              "errors": errors}
    write_json(out / "chain_exact.json", report)
    return report


def run_cluster_prep(cfg: dict, out: Path):
    omega = cfg["omega_over_J"]
    p = DriveProtocol.for_target(omega, cfg["c_zxz_over_omega"] * omega,
                                 cfg["harmonics_over_omega"])
    sc = StepControl(cfg["steps_per_period"], None, scheme=cfg["scheme"])
    rows = [(tf, adiabatic_prepare(p, RampSpec(tf), cfg["n_sites"], sc, cfg["inactive_field"]))
            for tf in cfg["tf_over_T"]]
    write_csv(out / "fidelity.csv", ("tf_over_T", "fidelity"), rows)
    return {"fidelity": [r[1] for r in rows]}


def _xy_drive(cfg: dict) -> XYDrive:
    return XYDrive(cfg["omega_over_J"], cfg["f10_over_omega"], cfg["f30_over_omega"],
                   cfg["f20_over_omega"], cfg["f21_over_omega"], cfg["f22_over_omega"])


def run_xy_demo(cfg: dict, out: Path):
    d = _xy_drive(cfg)
    spec = ChainSpec(4, "open", "xy")
    h = cfg["h_over_omega"] * d.omega
    res = xy_digital(spec, d, h, xy_steps_control(h, d, cfg["tol"]))
    chart = res.chart()
    write_csv(out / "chart.csv", ("string", "abs_coefficient"), chart)
    curve = []
    for x in cfg["h_sweep_over_omega"]:
        hx = x * d.omega
        curve.append((x, decoupling_distance(spec, d, hx, xy_steps_control(hx, d, cfg["tol"]))))
    write_csv(out / "decoupling.csv", ("h_over_omega", "D"), curve)
    target = min(abs(res.h_eff.coeff(s)) for s in XY_TARGET)
    undesired = max((c for s, c in chart if s not in XY_TARGET), default=0.0)
    report = {"J_eff_over_J": target, "max_undesired_over_J": undesired,
              "ratio": target / undesired if undesired else None,
              "D": res.distance, "residual": res.residual}
    write_json(out / "xy_demo.json", report)
    return report


def _nanomagnet(cfg: dict, omega_key: str) -> NanomagnetParams:
    j_par = 2 * math.pi * cfg["J_par_MHz"] * 1e6
    j_perp = cfg.get("J_perp_MHz")
    return NanomagnetParams(cfg["g_A"], cfg["g_B"], cfg["B_z_T"], j_par,
                            None if j_perp is None else 2 * math.pi * j_perp * 1e6,
                            cfg[omega_key] * j_par / 4)


def run_crosstalk(cfg: dict, out: Path):
    base = _nanomagnet(cfg, "omega_over_J")
    f = (list(cfg["f_over_omega"]) + [0.0, 0.0])[:3]
    fa = nanomagnet_fields(base, *f)
    sc = lab_steps(base, cfg["tol"]) if cfg["tol"] is not None else None
    rows = crosstalk_sweep(cfg["products_T"], fa, base, sc)
    write_csv(out / "crosstalk.csv", ("product_tesla", "D"), rows)
    return {"D": [r[1] for r in rows]}


def run_platform_map(cfg: dict, out: Path):
    p = _protocol(cfg["omega_over_J"], cfg["f_over_omega"])
    sc_map = superconducting_map(cfg["J_MHz"], cfg["omega_over_J"], p, cfg["tau_c_us"])
    f = (list(cfg["f_over_omega"]) + [0.0, 0.0])[:3]
    nm = nanomagnet_map(_nanomagnet(cfg, "nanomagnet_omega_over_J"), f)
    report = {"superconducting": sc_map, "nanomagnet": nm}
    write_json(out / "platform_map.json", report)
    return report


def run_echo(cfg: dict, out: Path):
    res = echo_oracle(cfg["J"], cfg["lambda"], StepControl(cfg["steps_per_period"], cfg["tol"]))
    names = ("U_plus", "U_zero", "U_minus")
    report = {
        "period_over_inv_J": res.period,
        "max_deviation": res.max_deviation,
        "numeric": dict(zip(names, (matrix_to_json(u) for u in res.numeric))),
        "analytic": dict(zip(names, (matrix_to_json(u) for u in res.analytic))),
    }
    write_json(out / "echo.json", report)
    return {"max_deviation": res.max_deviation}


RUNNERS = {
    "optimize": run_optimize,
    "effham": run_effham,
    "robustness": run_robustness,
    "chain-exact": run_chain_exact,
    "cluster-prep": run_cluster_prep,
    "xy-demo": run_xy_demo,
    "crosstalk": run_crosstalk,
    "platform-map": run_platform_map,
    "echo": run_echo,
}


# -------------------------------------------------------------------- main


def _fail(code: int, kind: str, message: str) -> int:
    line = json.dumps({"status": "error", "exit_code": code, "error": kind,
                       "message": " ".join(str(message).split())})
    print(line, file=sys.stderr)
    return code


def run(command: str, raw: dict, out_dir: str | os.PathLike) -> dict:
    """Resolve, execute and write artifacts; raises on failure."""
    cfg = resolve_config(command, raw)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    write_json(out / "manifest.json", {"command": command, "version": __version__, "config": cfg})
    return RUNNERS[command](cfg, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="forge", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with command parameters")
    parser.add_argument("--out", default="out", help="output directory (default: out)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        raw = {}
        if args.config:
            try:
                raw = json.loads(Path(args.config).read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        run(args.command, raw, args.out)
    except ConfigError as exc:
        return _fail(2, type(exc).__name__, exc)
    except (ForgeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(3, type(exc).__name__, exc)
    print(json.dumps({"status": "ok", "command": args.command, "out": str(args.out)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
