"""Scenario configuration files.

A scenario is a TOML document with the sections

``[atom]``
    ``transitions`` (list of ``[omega_k0, |d_0k|^2]`` pairs) and
    ``cavity_radius``.
``[layer.N]``
    one table per layer, numbered from 1 without gaps; Drude-Lorentz
    parameters ``omega_te, omega_pe, gamma_e, omega_tm, omega_pm, gamma_m``
    and, for inner layers, ``thickness``.
``[scan]``
    ``axis`` (``z``, ``omega_pe``, ``cavity_radius`` or ``thickness``), the
    grid (``start``, ``stop``, ``count``, ``spacing`` or an explicit
    ``values`` list), ``both_sides``, the fixed global atom position ``z`` for
    non-``z`` axes, ``target_layer`` and the toggles ``local_field``,
    ``include_u1``, ``include_force``, ``override_distance_guard``,
    ``workers``.
``[quadrature]``
    ``rel_tol``, ``abs_tol``, ``max_subdivisions``, ``transform``.
``[output]``
    ``format`` (``csv`` or ``json``) and ``path``.
``[interface]``
    ``index`` of the interface used by the ``interface`` command.

All values are in reduced units.  Unknown sections or keys are rejected.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .potential import SCAN_AXES, ScanRequest
from .quadrature import MAPS, QuadratureSpec
from .units import INF, AtomModel, Layer, LayerStack, MaterialModel, StackError, validate_stack

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "parse_config", "preset_names",
           "preset_paths"]

_NUMBER = (int, float)

_MATERIAL_KEYS = ("omega_te", "omega_pe", "gamma_e", "omega_tm", "omega_pm", "gamma_m")

SCHEMA = {
    "atom": {"transitions": list, "cavity_radius": _NUMBER},
    "layer": dict.fromkeys(_MATERIAL_KEYS + ("thickness",), _NUMBER),
    "scan": {
        "axis": str, "start": _NUMBER, "stop": _NUMBER, "count": int, "spacing": str,
        "values": list, "both_sides": bool, "z": _NUMBER, "target_layer": int,
        "local_field": bool, "include_u1": bool, "include_force": bool,
        "override_distance_guard": bool, "workers": int,
    },
    "quadrature": {"rel_tol": _NUMBER, "abs_tol": _NUMBER, "max_subdivisions": int,
                   "transform": str},
    "output": {"format": str, "path": str},
    "interface": {"index": int},
}

DEFAULTS = {
    "atom": {"transitions": [[1.0, 1.0]], "cavity_radius": 0.01},
    "scan": {"axis": "z", "start": 0.01, "stop": 1.0, "count": 10, "spacing": "linear",
             "values": None, "both_sides": False, "z": None, "target_layer": 2,
             "local_field": True, "include_u1": True, "include_force": True,
             "override_distance_guard": False, "workers": 1},
    "quadrature": {"rel_tol": 1e-8, "abs_tol": 1e-14, "max_subdivisions": 200,
                   "transform": "rational_map"},
    "output": {"format": "csv", "path": None},
    "interface": {"index": 1},
}

OUTPUT_FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """The scenario file is malformed or describes an invalid stack."""


def _check_table(name, table, schema):
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    for key, value in table.items():
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} in [{name}]")
        expected = schema[key]
        # bool is an int subclass; keep the two apart.
        if isinstance(value, bool) and expected is not bool:
            raise ConfigError(f"[{name}] {key} must be {_type_name(expected)}, got a boolean")
        if not isinstance(value, expected):
            raise ConfigError(f"[{name}] {key} must be {_type_name(expected)}, "
                              f"got {type(value).__name__}")


def _type_name(expected):
    if expected is _NUMBER:
        return "a number"
    return {str: "a string", int: "an integer", bool: "a boolean", list: "an array"}[expected]


def _normalise(raw: dict) -> dict:
    unknown = set(raw) - set(SCHEMA)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    out = {}
    for section, defaults in DEFAULTS.items():
        table = raw.get(section, {})
        _check_table(section, table, SCHEMA[section])
        merged = dict(defaults)
        merged.update(table)
        out[section] = merged
    layers = raw.get("layer")
    if not isinstance(layers, dict) or not layers:
        raise ConfigError("at least two [layer.N] tables are required")
    try:
        numbers = sorted(int(k) for k in layers)
    except ValueError as exc:
        raise ConfigError(f"layer tables must be numbered: {exc}") from None
    if numbers != list(range(1, len(numbers) + 1)):
        raise ConfigError(f"layers must be numbered 1..N without gaps, got {numbers}")
    if len(numbers) < 2:
        raise ConfigError("at least two [layer.N] tables are required")
    out["layer"] = {}
    for k in numbers:
        table = layers[str(k)]
        _check_table(f"layer.{k}", table, SCHEMA["layer"])
        out["layer"][str(k)] = {key: float(v) for key, v in table.items()}
    for section in ("atom", "scan", "quadrature"):
        for key, value in out[section].items():
            if isinstance(value, int) and not isinstance(value, bool) \
                    and SCHEMA[section][key] is _NUMBER:
                out[section][key] = float(value)
    return out


def _build_layers(layers: dict) -> tuple[Layer, ...]:
    n = len(layers)
    built = []
    for k in range(1, n + 1):
        table = dict(layers[str(k)])
        outer = k in (1, n)
        thickness = table.pop("thickness", INF if outer else None)
        if thickness is None:
            raise ConfigError(f"[layer.{k}] is an inner layer and needs a thickness")
        if outer and thickness != INF:
            raise ConfigError(f"[layer.{k}] is an outer half-space; drop its thickness")
        try:
            material = MaterialModel(**table)
        except ValueError as exc:
            raise ConfigError(f"[layer.{k}]: {exc}") from None
        built.append(Layer(material, thickness))
    return tuple(built)


def _build_atom(atom: dict) -> AtomModel:
    pairs = atom["transitions"]
    if not all(isinstance(p, list) and len(p) == 2 for p in pairs):
        raise ConfigError("[atom] transitions must be a list of [omega, dipole_squared] pairs")
    try:
        return AtomModel(tuple((float(w), float(d)) for w, d in pairs))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[atom]: {exc}") from None


@dataclass(frozen=True)
class ScenarioConfig:
    """A parsed, validated scenario together with its canonical form."""

    name: str
    stack: LayerStack
    atom: AtomModel
    scan: ScanRequest
    quadrature: QuadratureSpec
    output_format: str
    output_path: str | None
    interface_index: int
    canonical: dict

    @property
    def sha256(self) -> str:
        """Hash of the canonical (defaults filled in) configuration."""
        text = json.dumps(self.canonical, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def parse_config(raw: dict, name: str = "scenario", overrides: dict | None = None) -> ScenarioConfig:
    """Validate a decoded TOML document.

    ``overrides`` maps ``(section, key)`` pairs to values applied after the
    defaults, e.g. from command-line flags; they take part in the hash.
    """
    cfg = _normalise(raw)
    for (section, key), value in (overrides or {}).items():
        cfg[section][key] = value
    layers = _build_layers(cfg["layer"])
    atom = _build_atom(cfg["atom"])
    radius = cfg["atom"]["cavity_radius"]
    q = cfg["quadrature"]
    if q["transform"] not in MAPS:
        raise ConfigError(f"[quadrature] transform must be one of {MAPS}")
    try:
        spec = QuadratureSpec(q["rel_tol"], q["abs_tol"], q["max_subdivisions"], q["transform"])
    except ValueError as exc:
        raise ConfigError(f"[quadrature]: {exc}") from None

    n = len(layers)
    stack = LayerStack(layers, atom_layer=n, z_atom=1.0, cavity_radius=radius)
    try:
        validate_stack(stack)
    except StackError as exc:
        raise ConfigError(f"invalid stack: {exc}") from None

    s = cfg["scan"]
    if s["axis"] not in SCAN_AXES:
        raise ConfigError(f"[scan] axis must be one of {SCAN_AXES}, got {s['axis']!r}")
    if s["axis"] != "z" and s["z"] is None:
        raise ConfigError(f"[scan] axis {s['axis']!r} needs the fixed atom position z")
    if not 1 <= s["target_layer"] <= n:
        raise ConfigError(f"[scan] target_layer outside 1..{n}")
    if s["axis"] == "thickness" and s["target_layer"] in (1, n):
        raise ConfigError("[scan] a thickness scan needs an inner target_layer")
    if s["workers"] < 1:
        raise ConfigError("[scan] workers must be at least 1")
    values = s["values"]
    if values is not None:
        if len(values) < 2 or not all(isinstance(v, _NUMBER) and not isinstance(v, bool)
                                      for v in values):
            raise ConfigError("[scan] values must list at least 2 numbers")
        values = tuple(float(v) for v in values)
        s["values"] = list(values)
    try:
        request = ScanRequest(
            stack=stack, atom=atom, axis=s["axis"], start=s["start"], stop=s["stop"],
            count=s["count"], spacing=s["spacing"], both_sides=s["both_sides"], values=values,
            z=s["z"], target_layer=s["target_layer"], local_field=s["local_field"],
            include_u1=s["include_u1"], include_force=s["include_force"],
            override_distance_guard=s["override_distance_guard"], spec=spec,
            workers=s["workers"])
    except ValueError as exc:
        raise ConfigError(f"[scan]: {exc}") from None

    out = cfg["output"]
    if out["format"] not in OUTPUT_FORMATS:
        raise ConfigError(f"[output] format must be one of {OUTPUT_FORMATS}")
    index = cfg["interface"]["index"]
    if not 1 <= index < n:
        raise ConfigError(f"[interface] index outside 1..{n - 1}")
    return ScenarioConfig(name, stack, atom, request, spec, out["format"], out["path"], index,
                          _canonical(cfg))


def _canonical(value):
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_canonical(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def load_config(path, overrides: dict | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(raw, path.stem, overrides)


# -- presets -----------------------------------------------------------------

def _preset_root():
    return resources.files("lfvdw") / "presets"


def preset_names() -> list[str]:
    return sorted(p.name for p in _preset_root().iterdir() if p.is_dir())


def preset_paths(name: str) -> list[Path]:
    """Config files of a preset; ``name`` is ``fig1`` or ``fig1/case2``."""
    root = _preset_root()
    group, _, member = name.partition("/")
    folder = root / group
    if not folder.is_dir():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    paths = sorted(Path(str(p)) for p in folder.iterdir() if p.name.endswith(".toml"))
    if member:
        paths = [p for p in paths if p.stem == member]
        if not paths:
            raise ConfigError(f"preset {group!r} has no member {member!r}")
    return paths
