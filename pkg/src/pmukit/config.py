"""Synthesis configuration: a strict JSON document.

Unknown keys are rejected and every error names the offending key path,
so a misspelled option can never silently fall back to a default.

Schema (all per-channel keys optional unless noted):

    {
      "seed": 1234,
      "channels": [
        {
          "pmu_id": "PMU1",            # required
          "kind": "vm" | "va" | "freq",  # required
          "duration_s": 60.0,            # required
          "rate_fps": 30.0,
          "nominal_hz": 60.0,
          "start_time": 0.0,
          "nominal_value": 1.0,
          "trend": [[0.0, 0.0], [60.0, 0.01]],
          "dynamics_variability": 1e-4,
          "seed": 7,                   # overrides the derived per-channel seed
          "inject": {
            "noise_snr_db": 43.1,
            "outlier": {"rate": 0.01, "magnitude_sigmas": 10.0},
            "missing": {"dropout_rate": 0.01, "max_gap_samples": 90,
                        "filler": "nan"},   # or a number such as 9999
            "skew_s_per_s": 0.001,
            "modes": [{"frequency_hz": 0.3, "amplitude": 0.01,
                       "damping_factor": 0.0, "start_s": 0.0,
                       "duration_s": null}]
          }
        }
      ]
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidSpec, SchemaError
from .signal_model import ChannelKind, SamplingSpec
from .synthesis import (
    BaselineSpec,
    InjectionSpec,
    MissingInjection,
    ModeInjection,
    OutlierInjection,
    derive_channel_seed,
)

_KIND_BY_NAME = {"vm": ChannelKind.VOLTAGE_MAGNITUDE_PU, "va": ChannelKind.VOLTAGE_ANGLE_DEG, "freq": ChannelKind.FREQUENCY_HZ}


@dataclass(frozen=True)
class ChannelPlan:
    pmu_id: str
    baseline: BaselineSpec
    injection: InjectionSpec


def _require_mapping(obj, path: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: expected an object")
    return obj

def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"{path}: unknown key '{sorted(unknown)[0]}'")


def _number(obj: dict, key: str, path: str, default=None, required=False, lo=None, hi=None):
    if key not in obj or obj[key] is None:
        if required:
            raise SchemaError(f"{path}.{key}: required")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}: expected a number")
    v = float(v)
    if not math.isfinite(v):
        raise SchemaError(f"{path}.{key}: must be finite")
    if lo is not None and v < lo:
        raise SchemaError(f"{path}.{key}: must be >= {lo}")
    if hi is not None and v > hi:
        raise SchemaError(f"{path}.{key}: must be <= {hi}")
    return v


def _parse_mode(obj, path: str) -> ModeInjection:
    obj = _require_mapping(obj, path)
    _check_keys(obj, {"frequency_hz", "amplitude", "damping_factor", "start_s", "duration_s"}, path)
    return ModeInjection(
        frequency_hz=_number(obj, "frequency_hz", path, required=True, lo=0.0),
        amplitude=_number(obj, "amplitude", path, required=True),
        damping_factor=_number(obj, "damping_factor", path, default=0.0, lo=-1.0, hi=1.0),
        start_s=_number(obj, "start_s", path, default=0.0, lo=0.0),
        duration_s=_number(obj, "duration_s", path, default=None, lo=0.0),
    )


def _parse_inject(obj, path: str, seed: int) -> InjectionSpec:
    obj = _require_mapping(obj, path)
    _check_keys(obj, {"noise_snr_db", "outlier", "missing", "skew_s_per_s", "modes"}, path)
    outlier = None
    if obj.get("outlier") is not None:
        o = _require_mapping(obj["outlier"], f"{path}.outlier")
        _check_keys(o, {"rate", "magnitude_sigmas"}, f"{path}.outlier")
        outlier = OutlierInjection(
            rate=_number(o, "rate", f"{path}.outlier", required=True, lo=0.0, hi=1.0),
            magnitude_sigmas=_number(o, "magnitude_sigmas", f"{path}.outlier", default=10.0, lo=3.0),
        )
    missing = None
    if obj.get("missing") is not None:
        m = _require_mapping(obj["missing"], f"{path}.missing")
        _check_keys(m, {"dropout_rate", "max_gap_samples", "filler"}, f"{path}.missing")
        filler = m.get("filler", "nan")
        if isinstance(filler, str):
            if filler.lower() != "nan":
                raise SchemaError(f"{path}.missing.filler: expected 'nan' or a number")
            filler_value = None
        elif isinstance(filler, (int, float)) and not isinstance(filler, bool):
            filler_value = float(filler)
        else:
            raise SchemaError(f"{path}.missing.filler: expected 'nan' or a number")
        gap = m.get("max_gap_samples", 1)
        if isinstance(gap, bool) or not isinstance(gap, int) or gap < 1:
            raise SchemaError(f"{path}.missing.max_gap_samples: expected a positive integer")
        missing = MissingInjection(
            dropout_rate=_number(m, "dropout_rate", f"{path}.missing", required=True, lo=0.0, hi=1.0),
            max_gap_samples=gap,
            filler_value=filler_value,
        )
    modes = tuple(
        _parse_mode(mo, f"{path}.modes[{i}]") for i, mo in enumerate(obj.get("modes") or [])
    )
    return InjectionSpec(
        seed=seed,
        noise_snr_db=_number(obj, "noise_snr_db", path),
        outlier=outlier,
        missing=missing,
        skew_s_per_s=_number(obj, "skew_s_per_s", path, lo=-0.5, hi=0.5),
        modes=modes,
    )


def _parse_channel(obj, path: str, fleet_seed: int) -> ChannelPlan:
    obj = _require_mapping(obj, path)
    allowed = {
        "pmu_id", "kind", "duration_s", "rate_fps", "nominal_hz", "start_time",
        "nominal_value", "trend", "dynamics_variability", "seed", "inject",
    }
    _check_keys(obj, allowed, path)
    pmu_id = obj.get("pmu_id")
    if not isinstance(pmu_id, str) or not pmu_id:
        raise SchemaError(f"{path}.pmu_id: required nonempty string")
    kind_name = obj.get("kind")
    if kind_name not in _KIND_BY_NAME:
        raise SchemaError(f"{path}.kind: expected one of {sorted(_KIND_BY_NAME)}")
    kind = _KIND_BY_NAME[kind_name]
    trend = ()
    if obj.get("trend") is not None:
        if not isinstance(obj["trend"], list):
            raise SchemaError(f"{path}.trend: expected a list of [time_s, value] pairs")
        pairs = []
        for i, p in enumerate(obj["trend"]):
            if not (isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
                raise SchemaError(f"{path}.trend[{i}]: expected a [time_s, value] pair")
            pairs.append((float(p[0]), float(p[1])))
        trend = tuple(pairs)
    default_value = {ChannelKind.VOLTAGE_MAGNITUDE_PU: 1.0, ChannelKind.VOLTAGE_ANGLE_DEG: 0.0, ChannelKind.FREQUENCY_HZ: 60.0}[kind]
    try:
        spec = SamplingSpec(
            rate_fps=_number(obj, "rate_fps", path, default=30.0, lo=1e-9),
            nominal_hz=_number(obj, "nominal_hz", path, default=60.0, lo=1e-9),
            start_time=_number(obj, "start_time", path, default=0.0),
        )
        baseline = BaselineSpec(
            kind=kind,
            duration_s=_number(obj, "duration_s", path, required=True, lo=1e-9),
            spec=spec,
            nominal_value=_number(obj, "nominal_value", path, default=default_value),
            trend=trend,
            dynamics_variability=_number(obj, "dynamics_variability", path, default=0.0, lo=0.0),
        )
    except InvalidSpec as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    seed_override = obj.get("seed")
    if seed_override is not None and (isinstance(seed_override, bool) or not isinstance(seed_override, int)):
        raise SchemaError(f"{path}.seed: expected an integer")
    seed = seed_override if seed_override is not None else derive_channel_seed(fleet_seed, pmu_id)
    if obj.get("inject") is not None:
        injection = _parse_inject(obj["inject"], f"{path}.inject", seed)
    else:
        injection = InjectionSpec(seed=seed)
    return ChannelPlan(pmu_id=pmu_id, baseline=baseline, injection=injection)


def parse_config(path, seed_override: int | None = None) -> list[ChannelPlan]:
    """Load and validate a synthesis config file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    doc = _require_mapping(doc, "$")
    _check_keys(doc, {"seed", "channels"}, "$")
    fleet_seed = doc.get("seed", 0)
    if isinstance(fleet_seed, bool) or not isinstance(fleet_seed, int):
        raise SchemaError("$.seed: expected an integer")
    if seed_override is not None:
        fleet_seed = seed_override
    channels = doc.get("channels")
    if not isinstance(channels, list) or not channels:
        raise SchemaError("$.channels: expected a nonempty list")
    plans = [_parse_channel(c, f"$.channels[{i}]", fleet_seed) for i, c in enumerate(channels)]
    ids = [(p.pmu_id, p.baseline.kind.value) for p in plans]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        pmu_id, kind = sorted(dupes)[0]
        raise SchemaError(f"$.channels: duplicate channel '{pmu_id}' of kind '{kind}'")
    return plans
