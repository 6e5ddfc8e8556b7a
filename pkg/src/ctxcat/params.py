"""Run parameters and the plain-text ``key = value`` parameter file."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, Optional

from .energy import MAX_SWEEPS, EnergyParams
from .spatial import FuzzyParams


class ParamsError(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    alpha: float = 1.4
    beta: float = 0.3
    delta: float = 0.8
    alpha1: float = 20.0
    beta1: float = 0.25
    alpha2: float = 10.0
    beta2: float = 0.6
    top_n: int = 5
    max_sweeps: int = MAX_SWEEPS

    @property
    def energy(self) -> EnergyParams:
        return EnergyParams(self.alpha, self.beta, self.delta)

    @property
    def fuzzy(self) -> FuzzyParams:
        return FuzzyParams(self.alpha1, self.beta1, self.alpha2, self.beta2)

    def validate(self) -> "Params":
        self.energy, self.fuzzy  # constructors validate ranges
        if self.top_n < 1:
            raise ParamsError("top_n must be at least 1")
        if self.max_sweeps < 1:
            raise ParamsError("max_sweeps must be at least 1")
        return self


def parse_key_values(text: str) -> dict[str, str]:
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ParamsError(f"line {lineno}: expected 'key = value', got {raw!r}")
        out[key.strip()] = value.strip()
    return out


def _convert(name: str, kind, value):
    try:
        if kind is int or kind == "int":
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise ParamsError(f"{name}: cannot read {value!r} as a number") from None


def params_from_mapping(values: Mapping[str, object], base: Optional[Params] = None) -> Params:
    """Overlay ``values`` on ``base`` (Table defaults when omitted); unknown keys are rejected."""
    base = base or Params()
    fields = {f.name: f.type for f in dataclasses.fields(Params)}
    unknown = sorted(set(values) - set(fields))
    if unknown:
        raise ParamsError(f"unknown parameter(s): {', '.join(unknown)}")
    updates = {k: _convert(k, fields[k], v) for k, v in values.items() if v is not None}
    try:
        return dataclasses.replace(base, **updates).validate()
    except ValueError as exc:
        raise ParamsError(str(exc)) from None


def load_params(text: str, base: Optional[Params] = None) -> Params:
    return params_from_mapping(parse_key_values(text), base)


def dump_params(params: Params) -> str:
    return "".join(f"{f.name} = {getattr(params, f.name)}\n" for f in dataclasses.fields(Params))
