"""Command-line interface: run one scenario, sweep a parameter, audit inequalities.

Scenarios are described by a JSON config (see README for the full
schema); outputs are a JSON report plus flat CSV files designed for
external plotting and diffing.  All numeric output is written with 17
significant digits and fixed field order, so identical inputs produce
byte-identical files.

Exit codes: 0 success, 1 malformed input, 2 an audited inequality
failed, 3 a quadrature did not converge.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

import click
import numpy as np

from .functionals import build_report
from .geometry import Scenario, make_branch_pair
from .inequalities import audit_report, f_grid, implication_audit
from .kernels import KernelSpec, coulomb_background
from .quadrature import NumericFailure
from .quantum import distinguishability, rho_A, rho_B_conditional, visibility

REPORT_COLUMNS = [
    "D", "T_A", "T_B", "sigma",
    "gamma_A", "gamma_B", "phi_AB", "phi_BA",
    "V", "D_B", "robertson_residual", "complementarity_residual",
    "spacelike",
]


class ConfigError(ValueError):
    """Malformed scenario configuration; the message names the offending path."""


# ---------------------------------------------------------------------------
# Config parsing.  The schema is walked strictly: unknown keys are
# rejected with their dotted path, so typos fail loudly instead of
# silently falling back to defaults.

_SCHEMA = {
    "particles": {
        "A": {"charge": float, "split": {"L": float, "t0": float, "ramp": float, "hold": float}},
        "B": {"charge": float, "split": {"L": float, "t0": float, "ramp": float, "hold": float}},
    },
    "geometry": {"D": float},
    "kernel": {"sigma": float, "k_max": float, "quad_tol": float},
    "times": {"T": float, "T_A": float, "T_B": float},
    "background": None,  # validated by hand
    "seed": int,
}

_OPTIONAL = {
    "kernel.k_max", "kernel.quad_tol",
    "times.T_A", "times.T_B",
    "background", "seed",
}


def _walk_schema(data, schema, path: str, out: dict) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    for key in data:
        if key not in schema:
            raise ConfigError(f"{path + '.' if path else ''}{key}: unknown key")
    for key, sub in schema.items():
        full = f"{path}.{key}" if path else key
        if key not in data:
            if full in _OPTIONAL or (path and f"{path}" in _OPTIONAL):
                continue
            raise ConfigError(f"{full}: missing required key")
        val = data[key]
        if sub is None:
            out[full] = val
        elif isinstance(sub, dict):
            _walk_schema(val, sub, full, out)
        elif sub is float:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"{full}: expected a number, got {val!r}")
            out[full] = float(val)
        elif sub is int:
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"{full}: expected an integer, got {val!r}")
            out[full] = int(val)
    return


def _validate_background(raw) -> dict | None:
    if raw is None or raw == "none":
        return None
    if not isinstance(raw, dict) or set(raw) != {"coulomb"}:
        raise ConfigError(
            'background: expected "none" or {"coulomb": {"charge": q, "position": [x, y, z]}}'
        )
    c = raw["coulomb"]
    if not isinstance(c, dict) or set(c) - {"charge", "position"}:
        raise ConfigError("background.coulomb: keys must be charge and position")
    if "charge" not in c or "position" not in c:
        raise ConfigError("background.coulomb: charge and position are required")
    charge = c["charge"]
    pos = c["position"]
    if isinstance(charge, bool) or not isinstance(charge, (int, float)):
        raise ConfigError("background.coulomb.charge: expected a number")
    if (not isinstance(pos, list) or len(pos) != 3
            or any(isinstance(p, bool) or not isinstance(p, (int, float)) for p in pos)):
        raise ConfigError("background.coulomb.position: expected [x, y, z]")
    return {"charge": float(charge), "position": [float(p) for p in pos]}


def parse_config(raw: dict) -> dict:
    """Validate a raw config dict into a flat {dotted.path: value} mapping."""
    flat: dict = {}
    _walk_schema(raw, _SCHEMA, "", flat)
    flat["background"] = _validate_background(raw.get("background"))
    flat.setdefault("seed", 0)
    flat.setdefault("kernel.quad_tol", 1e-6)

    env_tol = os.environ.get("QCL_QUAD_TOL")
    if env_tol is not None:
        try:
            flat["kernel.quad_tol"] = float(env_tol)
        except ValueError:
            raise ConfigError(f"QCL_QUAD_TOL: not a number: {env_tol!r}") from None

    for p in ("A", "B"):
        s = {k.split(".")[-1]: flat[f"particles.{p}.split.{k.split('.')[-1]}"]
             for k in ("L", "t0", "ramp", "hold")}
        duration = 2.0 * s["ramp"] + s["hold"]
        declared = flat.get(f"times.T_{p}")
        if declared is not None and abs(declared - duration) > 1e-9:
            raise ConfigError(
                f"times.T_{p}: declared {declared} but the split parameters "
                f"of particle {p} give {duration}"
            )
        flat[f"times.T_{p}"] = duration
        if s["t0"] < 0.0 or s["t0"] + duration > flat["times.T"]:
            raise ConfigError(
                f"particles.{p}.split: excursion [{s['t0']}, {s['t0'] + duration}] "
                f"does not fit in the window [0, {flat['times.T']}]"
            )
    return flat


def scenario_from_config(flat: dict) -> Scenario:
    try:
        spec = KernelSpec(
            sigma=flat["kernel.sigma"],
            k_max=flat.get("kernel.k_max"),
            quad_tol=flat["kernel.quad_tol"],
        )
        window = (0.0, flat["times.T"])
        pair_A = make_branch_pair(
            "A", flat["particles.A.split.L"], flat["particles.A.split.t0"],
            flat["particles.A.split.ramp"], flat["particles.A.split.hold"],
            charge=flat["particles.A.charge"], base=(0.0, 0.0, 0.0), window=window,
        )
        pair_B = make_branch_pair(
            "B", flat["particles.B.split.L"], flat["particles.B.split.t0"],
            flat["particles.B.split.ramp"], flat["particles.B.split.hold"],
            charge=flat["particles.B.charge"], base=(flat["geometry.D"], 0.0, 0.0),
            window=window,
        )
        background = None
        if flat["background"] is not None:
            background = coulomb_background(
                flat["background"]["charge"], flat["background"]["position"], spec
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return Scenario(
        pair_A=pair_A, pair_B=pair_B, kernel=spec,
        D=flat["geometry.D"], T=flat["times.T"],
        T_A=flat["times.T_A"], T_B=flat["times.T_B"],
        background=background,
    )


# ---------------------------------------------------------------------------
# Deterministic serialization: every float is written as %.17g.


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value in output: {x!r}")
        return "%.17g" % x
    raise TypeError(f"not a scalar: {x!r}")


def dump_json(obj, indent: int = 0) -> str:
    """Serialize nested dicts/lists/scalars with fixed float formatting."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {json.dumps(k)}: {dump_json(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ", ".join(dump_json(v, indent + 1) for v in obj)
        return "[" + inner + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _fmt(obj)


def _matrix_blob(m: np.ndarray) -> dict:
    return {
        "re": [[float(v.real) for v in row] for row in m],
        "im": [[float(v.imag) for v in row] for row in m],
    }


def _report_row(flat: dict, report, V: float, D_B: float, audit) -> dict:
    return {
        "D": flat["geometry.D"],
        "T_A": flat["times.T_A"],
        "T_B": flat["times.T_B"],
        "sigma": flat["kernel.sigma"],
        "gamma_A": report.gamma_A,
        "gamma_B": report.gamma_B,
        "phi_AB": report.phi_AB,
        "phi_BA": report.phi_BA,
        "V": V,
        "D_B": D_B,
        "robertson_residual": audit.robertson_residual,
        "complementarity_residual": audit.complementarity_residual,
        "spacelike": report.spacelike,
    }


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="\n")


def _evaluate(flat: dict):
    scenario = scenario_from_config(flat)
    report = build_report(scenario)
    V = visibility(rho_A(report))
    D_B = distinguishability(report)
    audit = audit_report(report, V, D_B)
    return scenario, report, V, D_B, audit


# ---------------------------------------------------------------------------
# Commands.


@click.group()
def main() -> None:
    """Worldline-superposition electrodynamics lab."""


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True,
              help="Directory for report.json and report.csv.")
def run(config: Path, out_dir: Path) -> None:
    """Evaluate one scenario and write report.json plus a one-row report.csv."""
    raw = _load_json(config)
    try:
        flat = parse_config(raw)
        scenario, report, V, D_B, audit = _evaluate(flat)
    except ConfigError as exc:
        click.echo(f"input error: {exc}", err=True)
        raise SystemExit(1)
    except NumericFailure as exc:
        click.echo(f"quadrature failure: {exc}", err=True)
        raise SystemExit(3)

    row = _report_row(flat, report, V, D_B, audit)
    doc = {
        "config": raw,
        "report": report.to_dict(),
        "derived": {
            "V": V,
            "D_B": D_B,
            "robertson_residual": audit.robertson_residual,
            "complementarity_residual": audit.complementarity_residual,
            "f_value": audit.f_value,
            "quad_tol": flat["kernel.quad_tol"],
        },
        "rho_A": _matrix_blob(rho_A(report).matrix),
        "rho_B_given_A_R": _matrix_blob(rho_B_conditional(report, "R").matrix),
        "rho_B_given_A_L": _matrix_blob(rho_B_conditional(report, "L").matrix),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    _write(out_dir / "report.json", dump_json(doc) + "\n")
    _write(out_dir / "report.csv", _csv([REPORT_COLUMNS, [row[c] for c in REPORT_COLUMNS]]))
    click.echo(f"report written to {out_dir / 'report.json'} and {out_dir / 'report.csv'}")
    if not (audit.complementarity_ok and audit.robertson_ok):
        click.echo(
            "audit failure: "
            f"complementarity residual {audit.complementarity_residual:.3e} "
            f"(ok={audit.complementarity_ok}), "
            f"robertson residual {audit.robertson_residual:.3e} "
            f"(ok={audit.robertson_ok})",
            err=True,
        )
        raise SystemExit(2)


def _csv(rows) -> str:
    lines = []
    for i, row in enumerate(rows):
        if i == 0:
            lines.append(",".join(row))
        else:
            lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


def _load_json(path: Path) -> dict:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        click.echo(f"input error: {path}: {exc}", err=True)
        raise SystemExit(1)
    if not isinstance(raw, dict):
        click.echo(f"input error: {path}: top level must be an object", err=True)
        raise SystemExit(1)
    return raw


_SWEEPABLE_TIMES = {"times.T_A": "A", "times.T_B": "B"}


def _apply_vary(raw: dict, key: str, value: float) -> dict:
    """Set a dotted numeric key in a (copied) raw config."""
    import copy

    cfg = copy.deepcopy(raw)
    parts = key.split(".")
    node = cfg
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"--vary {key}: path does not exist in the config")
        node = node[p]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"--vary {key}: path does not exist in the config")
    if isinstance(node[leaf], bool) or not isinstance(node[leaf], (int, float)):
        raise ConfigError(f"--vary {key}: target is not a number")
    node[leaf] = value
    # A split-parameter sweep changes the derived sub-window durations;
    # drop any declared ones so they are recomputed instead of clashing.
    if key.startswith("particles.") and ".split." in key and "times" in cfg:
        cfg["times"].pop("T_A", None)
        cfg["times"].pop("T_B", None)
    return cfg


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--vary", required=True, metavar="KEY=START:STOP:STEPS",
              help="Dotted config key and inclusive linear grid, "
                   "e.g. geometry.D=1:8:15 or kernel.sigma=0.05:0.12:8.")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True, help="Directory for sweep.csv.")
def sweep(config: Path, vary: str, out_dir: Path) -> None:
    """Evaluate a scenario across a one-parameter grid; one CSV row per point."""
    raw = _load_json(config)
    try:
        key, grid = _parse_vary(vary)
    except ConfigError as exc:
        click.echo(f"input error: {exc}", err=True)
        raise SystemExit(1)

    rows = [["vary", "value", *REPORT_COLUMNS, "status"]]
    any_numeric_failure = False
    for value in grid:
        try:
            flat = parse_config(_apply_vary(raw, key, float(value)))
            scenario, report, V, D_B, audit = _evaluate(flat)
        except ConfigError as exc:
            click.echo(f"input error at {key}={value:.17g}: {exc}", err=True)
            raise SystemExit(1)
        except NumericFailure:
            any_numeric_failure = True
            rows.append([key, float(value), *[""] * len(REPORT_COLUMNS), "quadrature_failure"])
            continue
        row = _report_row(flat, report, V, D_B, audit)
        rows.append([key, float(value), *[row[c] for c in REPORT_COLUMNS], "ok"])

    out_dir.mkdir(parents=True, exist_ok=True)
    _write(out_dir / "sweep.csv", _csv(rows))
    click.echo(f"sweep written to {out_dir / 'sweep.csv'}")
    if any_numeric_failure:
        raise SystemExit(3)


def _parse_vary(vary: str) -> tuple[str, np.ndarray]:
    if "=" not in vary:
        raise ConfigError("--vary must look like key=start:stop:steps")
    key, _, rhs = vary.partition("=")
    parts = rhs.split(":")
    if len(parts) != 3:
        raise ConfigError("--vary must look like key=start:stop:steps")
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError:
        raise ConfigError(f"--vary: could not parse grid {rhs!r}") from None
    if steps < 1:
        raise ConfigError("--vary: steps must be at least 1")
    grid = np.linspace(start, stop, steps) if steps > 1 else np.array([start])
    return key.strip(), grid


@main.command()
@click.option("--samples", type=int, default=100000, show_default=True,
              help="Number of random (gamma_A, gamma_B, phi_BA) triples.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--grid-n", type=int, default=1000, show_default=True,
              help="Interior grid resolution per axis for f_grid.csv.")
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True,
              help="Directory for audit.csv and f_grid.csv.")
def audit(samples: int, seed: int, grid_n: int, out_dir: Path) -> None:
    """Scan the implication function and audit random parameter triples.

    Triples are drawn so that most satisfy the Robertson precondition;
    the audit fails (exit 2) if any precondition-satisfying triple
    violates the complementarity bound beyond 1e-12, or if the
    implication function dips below -1e-12 anywhere on the grid.
    """
    if samples < 1 or grid_n < 2:
        click.echo("input error: --samples and --grid-n must be positive", err=True)
        raise SystemExit(1)
    rng = np.random.default_rng(seed)
    ga = 10.0 ** rng.uniform(-3.0, 0.7, size=samples)
    gb = 10.0 ** rng.uniform(-3.0, 0.7, size=samples)
    mix = rng.uniform(size=samples) < 0.8
    phi = np.where(
        mix,
        rng.uniform(-1.0, 1.0, size=samples) * 4.0 * np.sqrt(ga * gb),
        rng.uniform(-2.0 * math.pi, 2.0 * math.pi, size=samples),
    )
    rows = implication_audit(np.column_stack([ga, gb, phi]))

    xs, ys, F = f_grid(grid_n)
    grid_min = float(F.min())

    out_dir.mkdir(parents=True, exist_ok=True)
    _write_audit_csv(out_dir / "audit.csv", rows)
    _write_grid_csv(out_dir / "f_grid.csv", xs, ys, F)

    n_violations = int(np.count_nonzero(~rows["ok"]))
    click.echo(f"audit: {samples} triples, {n_violations} violations; "
               f"grid min f = {grid_min:.3e}")
    if n_violations > 0 or grid_min < -1e-12:
        raise SystemExit(2)


def _write_audit_csv(path: Path, rows: np.ndarray) -> None:
    header = "gamma_A,gamma_B,phi_BA,robertson_residual,bound_residual,pass"
    cols = [rows["gamma_A"], rows["gamma_B"], rows["phi_BA"],
            rows["robertson_residual"], rows["bound_residual"]]
    body = np.column_stack(cols)
    lines = [header]
    ok = rows["ok"]
    for i in range(body.shape[0]):
        nums = ",".join("%.17g" % v for v in body[i])
        lines.append(f"{nums},{'true' if ok[i] else 'false'}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_grid_csv(path: Path, xs: np.ndarray, ys: np.ndarray, F: np.ndarray) -> None:
    # The default grid is a million rows; format each axis once and
    # stream row blocks instead of formatting three floats per line.
    xs_s = ["%.17g" % v for v in xs]
    ys_s = ["%.17g" % v for v in ys]
    blocks = ["X,Y,f"]
    for i, xi in enumerate(xs_s):
        row = F[i]
        blocks.append(
            "\n".join(f"{xi},{ys_s[j]},{'%.17g' % row[j]}" for j in range(len(ys_s)))
        )
    path.write_text("\n".join(blocks) + "\n", encoding="utf-8", newline="\n")


if __name__ == "__main__":
    main()
