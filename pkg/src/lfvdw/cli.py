"""Command-line front end.

Subcommands
-----------
potential
    Run the scan described by a scenario file and write one row per grid
    point as CSV or JSON.
coefficients
    Asymptotic coefficients C4, C3, C1 of a two-layer scenario.
interface
    On-interface potential estimates for the configured interface.

Exit status is 0 on success, 1 for configuration errors and 2 when a row
hit a numerical fault (the output is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .asymptotics import (c1_nonretarded, c3_nonretarded, c4_derivative_signs, c4_from_models,
                          c4_small_contrast, coefficients)
from .config import ConfigError, ScenarioConfig, load_config, preset_names, preset_paths
from .potential import interface_value, ninham_interface_value, ninham_length, run_scan
from .units import StackError, alpha_at

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

COLUMNS = ("value", "u1", "u1_approx", "u2_odd", "u2_even", "u2_corrected", "u2_uncorrected",
           "delta_u2", "total", "force", "u1_error", "u2_error", "force_error", "flags")

FAULT_FLAGS = ("fault:", "nonconverged")


def header_line(cfg: ScenarioConfig) -> str:
    return f"# config_sha256={cfg.sha256} version={__version__}"


def _fmt(value) -> str:
    return f"{value:.12g}"


def _json_number(value):
    return None if isinstance(value, float) and math.isnan(value) else value


def rows_to_csv(cfg: ScenarioConfig, rows) -> str:
    buf = io.StringIO()
    buf.write(header_line(cfg) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in COLUMNS[:-1]] + [";".join(d["flags"])])
    return buf.getvalue()


def rows_to_json(cfg: ScenarioConfig, rows) -> str:
    records = []
    for row in rows:
        d = asdict(row)
        rec = {c: _json_number(d[c]) for c in COLUMNS[:-1]}
        rec["flags"] = list(d["flags"])
        records.append(rec)
    doc = {"config_sha256": cfg.sha256, "version": __version__, "name": cfg.name,
           "axis": cfg.scan.axis, "columns": list(COLUMNS), "rows": records}
    return json.dumps(doc, indent=1) + "\n"


def load_rows(text: str) -> list[dict]:
    """Parse JSON output back into row dicts (null becomes NaN)."""
    doc = json.loads(text)
    out = []
    for rec in doc["rows"]:
        row = {c: (math.nan if rec[c] is None else rec[c]) for c in COLUMNS[:-1]}
        row["flags"] = tuple(rec["flags"])
        out.append(row)
    return out


def _table(cfg: ScenarioConfig, items: list[tuple[str, object]], fmt: str) -> str:
    if fmt == "json":
        doc = {"config_sha256": cfg.sha256, "version": __version__, "name": cfg.name}
        doc.update({k: _json_number(v) for k, v in items})
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(header_line(cfg) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("quantity", "value"))
    for key, value in items:
        writer.writerow((key, _fmt(value) if isinstance(value, float) else value))
    return buf.getvalue()


# -- commands ------------------------------------------------------------------

def cmd_potential(cfg: ScenarioConfig, fmt: str) -> tuple[str, int]:
    rows = run_scan(cfg.scan)
    text = rows_to_json(cfg, rows) if fmt == "json" else rows_to_csv(cfg, rows)
    status = EXIT_OK
    for i, row in enumerate(rows):
        bad = [f for f in row.flags if f.startswith(FAULT_FLAGS)]
        if bad:
            print(f"{cfg.name}: row {i} ({cfg.scan.axis} = {row.value!r}): {'; '.join(bad)}",
                  file=sys.stderr)
            status = EXIT_NUMERIC
    return text, status


def cmd_coefficients(cfg: ScenarioConfig, fmt: str) -> tuple[str, int]:
    if cfg.stack.n != 2:
        raise ConfigError("the coefficients command needs a two-layer scenario")
    m1, m2 = cfg.stack.layer(1).material, cfg.stack.layer(2).material
    atom, spec = cfg.atom, cfg.quadrature
    local_field = cfg.scan.local_field
    alpha0 = float(alpha_at(atom, 0.0))
    e1, u1, e2, u2 = m1.eps0, m1.mu0, m2.eps0, m2.mu0
    c4 = c4_from_models(m1, m2, atom, local_field=local_field, spec=spec)
    c3 = c3_nonretarded(m1, m2, atom, local_field=local_field, spec=spec)
    c1 = c1_nonretarded(m1, m2, atom, local_field=local_field, spec=spec)
    signs = c4_derivative_signs(e1, u1, e2, u2)
    small = c4_small_contrast(e2, u2, e1 - e2, u1 - u2, alpha0)
    if not local_field:
        small /= ((3.0 * e2) / (2.0 * e2 + 1.0)) ** 2
    notes = coefficients(m1, m2, atom, local_field=local_field).notes
    items = [("c4", c4), ("c3", c3), ("c1", c1), ("c4_small_contrast", small),
             ("dc4_deps1_sign", signs["eps1"]), ("dc4_dmu1_sign", signs["mu1"]),
             ("dc4_dmu2_sign", signs["mu2"])]
    items += [(f"note_{i}", note) for i, note in enumerate(notes, start=1)]
    return _table(cfg, items, fmt), EXIT_OK


def cmd_interface(cfg: ScenarioConfig, fmt: str) -> tuple[str, int]:
    stack, atom, spec = cfg.stack, cfg.atom, cfg.quadrature
    k = cfg.interface_index
    local_field = cfg.scan.local_field
    closed = interface_value(stack, atom, k, "closed_form", spec, local_field)
    numeric = interface_value(stack, atom, k, "numeric", spec, local_field)
    s = ninham_length(stack.cavity_radius)
    m1, m2 = stack.layer(k).material, stack.layer(k + 1).material
    ninham = ninham_interface_value(m1, m2, atom, s, spec)
    items = [("interface", k), ("closed_form", closed), ("numeric_average", numeric),
             ("gap", numeric - closed), ("ninham_s", s), ("ninham", ninham)]
    if m1.omega_pm or m2.omega_pm:
        items.append(("note", "ninham value uses the permittivities only"))
    return _table(cfg, items, fmt), EXIT_OK


COMMANDS = {"potential": cmd_potential, "coefficients": cmd_coefficients,
            "interface": cmd_interface}


# -- argument handling -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfvdw", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=COMMANDS[name].__name__.replace("cmd_", ""))
        source = p.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", type=Path, help="scenario TOML file")
        source.add_argument("--preset", help=f"bundled scenario ({', '.join(preset_names())}), "
                                             "optionally NAME/MEMBER")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
        p.add_argument("--out", type=Path,
                       help="output file; a directory when a preset has several members")
        p.add_argument("--no-local-field", action="store_true",
                       help="replace the local-field factor by 1")
        p.add_argument("--rel-tol", type=float, help="relative quadrature tolerance")
        p.add_argument("--override-distance-guard", action="store_true",
                       help="evaluate points inside the cavity-model exclusion zone")
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.no_local_field:
        out["scan", "local_field"] = False
    if args.rel_tol is not None:
        out["quadrature", "rel_tol"] = args.rel_tol
    if args.override_distance_guard:
        out["scan", "override_distance_guard"] = True
    if args.format:
        out["output", "format"] = args.format
    return out


def _destination(cfg: ScenarioConfig, args, many: bool, group: str) -> Path | None:
    suffix = "." + cfg.output_format
    if many:
        folder = args.out or Path(group)
        folder.mkdir(parents=True, exist_ok=True)
        return folder / (cfg.name + suffix)
    if args.out is not None:
        return args.out
    return Path(cfg.output_path) if cfg.output_path else None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = _overrides(args)
    try:
        if args.config is not None:
            paths, group = [args.config], args.config.stem
        else:
            paths, group = preset_paths(args.preset), args.preset.replace("/", "_")
        configs = [load_config(p, overrides) for p in paths]
    except (ConfigError, StackError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    status = EXIT_OK
    for cfg in configs:
        try:
            text, code = COMMANDS[args.command](cfg, cfg.output_format)
        except (ConfigError, StackError) as exc:
            print(f"config error in {cfg.name}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (ArithmeticError, ValueError) as exc:
            print(f"numerical fault in {cfg.name}: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        status = max(status, code)
        dest = _destination(cfg, args, len(configs) > 1, group)
        if dest is None:
            sys.stdout.write(text)
        else:
            dest.write_text(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
