"""Run configuration: a flat key=value text format with unit suffixes.

Every physical key is written as <name>_<unit>. Angular-frequency
quantities (canonical unit rad/s, suffix _rads) also accept wavelength
spans _nm and _pm, converted at the configured degeneracy wavelength.
Lengths accept _m, _nm, _pm; times _s; inverse lengths _per_m; velocities
_m_per_s. A zero (or omitted) value on most physical keys means "derive it
from the rest of the configuration"; the resolved values are what
print_config shows.

Unknown keys, duplicate keys, and malformed values are refused by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Dict, Optional, Tuple

from .errors import ValidationError
from .spectral import wavelength_to_angular

__all__ = ["ResolvedConfig", "parse_config", "resolve_config", "print_config"]

EXPERIMENTS = (
    "hom",
    "eraser",
    "wigner",
    "cat-decomp",
    "time-resolved",
    "young",
    "phase-gate-scan",
)

_DEFAULT_LAMBDA = 1.55e-6
_DEFAULT_FILTER_WIDTH_LAMBDA = 50e-12
_DEFAULT_SEPARATION_LAMBDA = 0.6e-9
_DEFAULT_GROUP_VELOCITY = 2.1e8
_SHEAR_TARGETS = (0.15, 0.3)

# kind -> canonical suffix plus accepted alternates with their converters.
_LENGTH_SCALES = {"_m": 1.0, "_nm": 1e-9, "_pm": 1e-12}


@dataclass(frozen=True)
class _Field:
    name: str
    kind: str  # angular | length | time | inv_length | velocity | int | str | length_list
    default: object


_FIELDS: Tuple[_Field, ...] = (
    _Field("experiment", "str", ""),
    _Field("lambda_deg", "length", _DEFAULT_LAMBDA),
    _Field("filter_width", "angular", 0.0),
    _Field("filter_separation", "angular", 0.0),
    _Field("filter_center_1", "angular", math.nan),
    _Field("filter_center_2", "angular", math.nan),
    _Field("pm_kind", "str", "flat"),
    _Field("pm_width", "angular", 0.0),
    _Field("pump_mode", "str", "strict_delta"),
    _Field("pump_width", "angular", 0.0),
    _Field("placement", "str", ""),
    _Field("eraser_shift", "angular", math.nan),
    _Field("cat_parity", "str", "even"),
    _Field("axis_points", "int", 0),
    _Field("axis_half_width", "angular", 0.0),
    _Field("tau_points", "int", 801),
    _Field("tau_span", "time", 0.0),
    _Field("taubar_points", "int", 801),
    _Field("taubar_span", "time", 0.0),
    _Field("map_time_points", "int", 0),
    _Field("map_time_span", "time", 0.0),
    _Field("detector_window", "time", 0.0),
    _Field("slit_width", "length", 10e-6),
    _Field("slit_separation", "length", 120e-6),
    _Field("source_width", "length", 0.0),
    _Field("screen_distance", "length", 10.0),
    _Field("pbar_points", "int", 801),
    _Field("pbar_span", "inv_length", 0.0),
    _Field("frac_theta_count", "int", 5),
    _Field("group_velocity", "velocity", _DEFAULT_GROUP_VELOCITY),
    _Field("pump_waist", "length", 0.0),
    _Field("pump_chirps", "length_list", ()),
    _Field("z_points", "int", 0),
)

_FIELD_BY_NAME = {f.name: f for f in _FIELDS}


def _file_keys(field: _Field) -> Dict[str, str]:
    """Accepted file keys for a field, mapped to a converter tag."""
    if field.kind == "angular":
        return {
            field.name + "_rads": "as_is",
            field.name + "_nm": "lambda_nm",
            field.name + "_pm": "lambda_pm",
        }
    if field.kind in ("length", "length_list"):
        return {field.name + suffix: suffix for suffix in _LENGTH_SCALES}
    if field.kind == "time":
        return {field.name + "_s": "as_is"}
    if field.kind == "inv_length":
        return {field.name + "_per_m": "as_is"}
    if field.kind == "velocity":
        return {field.name + "_m_per_s": "as_is"}
    return {field.name: "as_is"}


_KEY_LOOKUP: Dict[str, Tuple[_Field, str]] = {}
for _f in _FIELDS:
    for _key, _tag in _file_keys(_f).items():
        _KEY_LOOKUP[_key] = (_f, _tag)


def _canonical_key(field: _Field) -> str:
    if field.kind == "angular":
        return field.name + "_rads"
    if field.kind in ("length", "length_list"):
        return field.name + "_m"
    if field.kind == "time":
        return field.name + "_s"
    if field.kind == "inv_length":
        return field.name + "_per_m"
    if field.kind == "velocity":
        return field.name + "_m_per_s"
    return field.name


def parse_config(text: str) -> Dict[str, str]:
    """Split config text into raw key -> value strings.

    Lines are key = value; blank lines and # comments are skipped.
    Duplicate and unknown keys are refused here, before any conversion.
    """
    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEY_LOOKUP:
            raise ValidationError(f"line {lineno}: unknown config key {key!r}")
        if key in raw:
            raise ValidationError(f"line {lineno}: duplicate config key {key!r}")
        if not value:
            raise ValidationError(f"line {lineno}: empty value for key {key!r}")
        raw[key] = value
    return raw


def _parse_float(key: str, value: str) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ValidationError(f"invalid number {value!r} for key {key!r}") from None
    if not math.isfinite(out):
        raise ValidationError(f"key {key!r} must be finite")
    return out


def _convert(field: _Field, tag: str, key: str, value: str, lam: float):
    if field.kind == "str":
        return value
    if field.kind == "int":
        try:
            return int(value)
        except ValueError:
            raise ValidationError(
                f"invalid integer {value!r} for key {key!r}"
            ) from None
    if field.kind == "length_list":
        scale = _LENGTH_SCALES[tag]
        return tuple(
            _parse_float(key, part) * scale for part in value.split(",") if part.strip()
        )
    number = _parse_float(key, value)
    if field.kind == "angular":
        if tag == "lambda_nm":
            return wavelength_to_angular(lam, number * 1e-9)
        if tag == "lambda_pm":
            return wavelength_to_angular(lam, number * 1e-12)
        return number
    if field.kind == "length":
        return number * _LENGTH_SCALES[tag]
    return number


def _find_lambda(raw: Dict[str, str]) -> float:
    for suffix, scale in _LENGTH_SCALES.items():
        key = "lambda_deg" + suffix
        if key in raw:
            value = _parse_float(key, raw[key]) * scale
            if value <= 0.0:
                raise ValidationError("lambda_deg must be positive")
            return value
    return _DEFAULT_LAMBDA


@dataclass(frozen=True)
class ResolvedConfig:
    experiment: str
    lambda_deg: float
    filter_width: float
    filter_separation: float
    filter_center_1: float
    filter_center_2: float
    pm_kind: str
    pm_width: float
    pump_mode: str
    pump_width: float
    placement: str
    eraser_shift: float
    cat_parity: str
    axis_points: int
    axis_half_width: float
    tau_points: int
    tau_span: float
    taubar_points: int
    taubar_span: float
    map_time_points: int
    map_time_span: float
    detector_window: float
    slit_width: float
    slit_separation: float
    source_width: float
    screen_distance: float
    pbar_points: int
    pbar_span: float
    frac_theta_count: int
    group_velocity: float
    pump_waist: float
    pump_chirps: Tuple[float, ...]
    z_points: int


_AUTO_PLACEMENT = {
    "hom": "after_splitter",
    "eraser": "before_splitter",
}


def resolve_config(
    raw: Dict[str, str], experiment: Optional[str] = None
) -> ResolvedConfig:
    """Convert raw strings, fill defaults, and derive every auto value."""
    lam = _find_lambda(raw)
    values = {f.name: f.default for f in _FIELDS}
    for key, text in raw.items():
        field, tag = _KEY_LOOKUP[key]
        values[field.name] = _convert(field, tag, key, text, lam)
    values["lambda_deg"] = lam

    if experiment:
        values["experiment"] = experiment
    name = values["experiment"]
    if not name:
        raise ValidationError(
            "no experiment selected; pass one on the command line or set "
            "'experiment' in the config"
        )
    if name not in EXPERIMENTS:
        raise ValidationError(
            f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}"
        )

    if values["filter_width"] == 0.0:
        values["filter_width"] = wavelength_to_angular(
            lam, _DEFAULT_FILTER_WIDTH_LAMBDA
        )
    if values["filter_width"] < 0.0:
        raise ValidationError("filter_width must be positive")
    if values["filter_separation"] == 0.0:
        values["filter_separation"] = wavelength_to_angular(
            lam, _DEFAULT_SEPARATION_LAMBDA
        )
    if math.isnan(values["filter_center_1"]):
        values["filter_center_1"] = 0.5 * values["filter_separation"]
    if math.isnan(values["filter_center_2"]):
        values["filter_center_2"] = -0.5 * values["filter_separation"]
    if math.isnan(values["eraser_shift"]):
        values["eraser_shift"] = (
            values["filter_center_1"] - values["filter_center_2"]
            if name == "eraser"
            else 0.0
        )

    if values["pm_kind"] not in ("flat", "gaussian"):
        raise ValidationError("pm_kind must be 'flat' or 'gaussian'")
    if values["pm_kind"] == "gaussian" and values["pm_width"] <= 0.0:
        raise ValidationError("gaussian pm_kind needs a positive pm_width")
    if values["pump_mode"] not in ("strict_delta", "gaussian"):
        raise ValidationError("pump_mode must be 'strict_delta' or 'gaussian'")
    if values["pump_mode"] == "gaussian" and values["pump_width"] <= 0.0:
        raise ValidationError("gaussian pump_mode needs a positive pump_width")
    if values["cat_parity"] not in ("even", "odd"):
        raise ValidationError("cat_parity must be 'even' or 'odd'")

    if not values["placement"]:
        values["placement"] = _AUTO_PLACEMENT.get(name, "none")
    if values["placement"] not in ("after_splitter", "before_splitter", "none"):
        raise ValidationError(
            "placement must be 'after_splitter', 'before_splitter', or 'none'"
        )

    sigma = values["filter_width"]
    sep_reach = (
        abs(values["filter_center_1"] - values["filter_center_2"])
        + abs(values["eraser_shift"])
        + 3.0 * sigma
    )
    if values["pump_waist"] == 0.0:
        values["pump_waist"] = values["group_velocity"] / sigma
    base_width = values["group_velocity"] / values["pump_waist"]
    if values["axis_points"] == 0:
        values["axis_points"] = 2049 if name == "phase-gate-scan" else 1025
    if values["axis_half_width"] == 0.0:
        if name == "phase-gate-scan":
            values["axis_half_width"] = 8.0 * base_width
        else:
            values["axis_half_width"] = 5.0 * sep_reach
    if values["tau_span"] == 0.0:
        values["tau_span"] = 5.0 / sigma
    if values["taubar_span"] == 0.0:
        values["taubar_span"] = 5.0 / sigma
    if values["map_time_span"] == 0.0:
        values["map_time_span"] = (
            3.2 / base_width if name == "phase-gate-scan" else 5.0 / sigma
        )
    if values["map_time_points"] == 0:
        values["map_time_points"] = 161 if name == "phase-gate-scan" else 801
    if values["source_width"] == 0.0:
        values["source_width"] = 1e5 * values["slit_width"]
    if values["pbar_span"] == 0.0:
        values["pbar_span"] = 5.0 / values["slit_width"]
    if not values["pump_chirps"]:
        v_g = values["group_velocity"]
        chirps = [0.0]
        for target in _SHEAR_TARGETS:
            chirps.append(v_g * math.sqrt(2.0 / (target * base_width**2)))
        values["pump_chirps"] = tuple(chirps)

    for int_name in (
        "axis_points",
        "tau_points",
        "taubar_points",
        "map_time_points",
        "pbar_points",
        "frac_theta_count",
    ):
        if values[int_name] < 3:
            raise ValidationError(f"{int_name} must be at least 3")

    return ResolvedConfig(**values)


def print_config(config: ResolvedConfig) -> str:
    """Canonical dump: one resolved '<key> = <value>' line per field."""
    lines = []
    for field in _FIELDS:
        value = getattr(config, field.name)
        key = _canonical_key(field)
        if field.kind in ("str",):
            lines.append(f"{key} = {value}")
        elif field.kind == "int":
            lines.append(f"{key} = {value:d}")
        elif field.kind == "length_list":
            joined = ",".join(repr(v) for v in value)
            lines.append(f"{key} = {joined}")
        else:
            lines.append(f"{key} = {value!r}")
    return "\n".join(sorted(lines)) + "\n"
