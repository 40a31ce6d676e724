"""JSON run configuration with ``--set key=value`` overrides.

Layout::

    {
      "scheme": "joint", "out_dir": "out", "rounds": 10, "draws": 100,
      "scenario": {...Scenario fields...},
      "solver": {...SolverOptions fields...},
      "learning": {...LearningConfig fields...}
    }

A bare field name (``bandwidth_hz``) is accepted anywhere a dotted path
(``scenario.bandwidth_hz``) is, as long as it names exactly one field.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .bcd import LOSSES, REGULARIZERS
from .errors import InvalidArgumentError
from .simulator import Scenario, scenario_dict
from .solvers import SCHEMES, SolverOptions


class ConfigError(InvalidArgumentError):
    """Schema violation; ``path`` is the dotted name of the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class LearningConfig:
    """Optional learning task driven by the per-round allocations.

    With ``dataset_path`` unset a synthetic sparse task of ``n_samples`` rows
    and ``total_params`` columns is generated.
    """

    enabled: bool = False
    total_params: int = 2000
    n_samples: int = 500
    density: float = 0.05
    loss: str = "logistic"
    reg: str = "l1"
    reg_weight: float = 1e-3
    step_size: float | None = None
    dataset_path: str | None = None
    test_path: str | None = None
    data_seed: int = 0

    def __post_init__(self):
        if self.total_params < 1 or self.n_samples < 1:
            raise InvalidArgumentError("total_params and n_samples must be >= 1")
        if not 0 < self.density <= 1:
            raise InvalidArgumentError("density must lie in (0, 1]")
        if self.loss not in LOSSES:
            raise InvalidArgumentError(f"loss must be one of {LOSSES}")
        if self.reg not in REGULARIZERS:
            raise InvalidArgumentError(f"reg must be one of {REGULARIZERS}")
        if self.reg_weight < 0:
            raise InvalidArgumentError("reg_weight must be >= 0")
        if self.step_size is not None and not (isinstance(self.step_size, (int, float)) and self.step_size > 0):
            raise InvalidArgumentError("step_size must be a number > 0")


@dataclass(frozen=True)
class RunConfig:
    scheme: str = "joint"
    out_dir: str = "out"
    rounds: int = 10
    draws: int = 100
    processes: int = 1
    scenario: Scenario = field(default_factory=Scenario)
    solver: SolverOptions = field(default_factory=SolverOptions)
    learning: LearningConfig = field(default_factory=LearningConfig)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"unknown scheme {self.scheme!r}; choose from {sorted(SCHEMES)}")
        for name in ("rounds", "draws", "processes"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scenario"] = scenario_dict(self.scenario)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


_SECTIONS = {"scenario": Scenario, "solver": SolverOptions, "learning": LearningConfig}
_TOP = [f.name for f in fields(RunConfig) if f.name not in _SECTIONS]


def _field_types(cls) -> dict:
    out = {}
    for f in fields(cls):
        default = f.default_factory() if callable(f.default_factory) else f.default
        out[f.name] = default
    return out


def _coerce(path: str, value, default):
    """Check ``value`` against the type of the field's default."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise ConfigError(path, f"expected a list of numbers, got {value!r}")
        return tuple(float(v) for v in value)
    # optional fields default to None: number or string
    if value is None or (isinstance(value, (int, float, str)) and not isinstance(value, bool)):
        return value
    raise ConfigError(path, f"unsupported value {value!r}")


def _resolve(key: str) -> tuple[str | None, str]:
    """Map a bare or dotted key to ``(section, field)``."""
    if "." in key:
        section, name = key.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(key, "unknown section")
        if name not in _field_types(_SECTIONS[section]):
            raise ConfigError(key, "unknown key")
        return section, name
    if key in _TOP:
        return None, key
    hits = [s for s, cls in _SECTIONS.items() if key in _field_types(cls)]
    if not hits:
        raise ConfigError(key, "unknown key")
    if len(hits) > 1:
        raise ConfigError(key, f"ambiguous; use one of {[h + '.' + key for h in hits]}")
    return hits[0], key


def _flatten(raw: dict) -> list[tuple[str, object]]:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    out = []
    for key, value in raw.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(key, "expected an object")
            out.extend((f"{key}.{k}", v) for k, v in value.items())
        else:
            out.append((key, value))
    return out


def parse_override(text: str) -> tuple[str, object]:
    """``key=value``; the value is read as JSON, falling back to a plain string."""
    if "=" not in text:
        raise ConfigError(text, "override must look like key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def build_config(items) -> RunConfig:
    """Apply ``(key, value)`` pairs in order over the defaults; later pairs win."""
    top: dict = {}
    sections: dict = {s: {} for s in _SECTIONS}
    for key, value in items:
        section, name = _resolve(key)
        if section is None:
            top[name] = _coerce(name, value, _field_types(RunConfig)[name])
        else:
            path = f"{section}.{name}"
            sections[section][name] = _coerce(path, value, _field_types(_SECTIONS[section])[name])
    built = {}
    for section, cls in _SECTIONS.items():
        try:
            built[section] = cls(**sections[section])
        except InvalidArgumentError as exc:
            raise ConfigError(_blame(section, sections[section], str(exc)), str(exc)) from None
    return RunConfig(**top, **built)


def _blame(section: str, given: dict, message: str) -> str:
    """Best guess at the field a validation message refers to."""
    for name in sorted(given, key=len, reverse=True):
        if name in message:
            return f"{section}.{name}"
    return section


def parse_config(path=None, overrides=(), seed: int | None = None) -> RunConfig:
    """Defaults, then the JSON file at ``path``, then ``overrides``, then ``seed``."""
    items = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
        if text.strip():
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(str(path), f"invalid JSON: {exc}") from None
            items.extend(_flatten(raw))
    items.extend(parse_override(o) if isinstance(o, str) else o for o in overrides)
    if seed is not None:
        items.append(("scenario.seed", seed))
    return build_config(items)


__all__ = ["RunConfig", "LearningConfig", "ConfigError", "parse_config", "parse_override", "build_config"]
