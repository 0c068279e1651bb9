"""
Configuration management for the alphaeta lab.

Experiments are configured by sectioned ``key = value`` text files (read with
configparser) or JSON files, optionally followed by ``section.key=value``
overrides. See docs/CONFIG.md for the full key reference.
"""

import configparser
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union, get_args, get_origin, get_type_hints

from .constellation import SystemParams
from .errors import ConfigError, check_guard
from .keystream import PRIMITIVE_TAPS, LfsrExpander, LfsrSpec, SeedKey, make_expander

SUBCOMMANDS = (
    "constellation-dump",
    "keystream",
    "encrypt",
    "bob-ber",
    "gamma",
    "eve-co",
    "eve-bruteforce",
    "eve-correlation",
    "dsr-sweep",
    "joint-srm",
)

# Subcommands that draw keystream symbols from the key expander.
_EXPANDER_COMMANDS = {"keystream", "encrypt", "eve-bruteforce", "eve-correlation", "joint-srm"}


class _Section:
    """Dict and JSON helpers shared by every config section."""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], section: Optional[str] = None):
        """
        Create from dictionary.

        Raises:
            ConfigError: On unknown keys or values of the wrong type
        """
        section = section or cls.SECTION
        hints = get_type_hints(cls)
        values = {}
        for key, value in data.items():
            if key not in hints:
                known = ", ".join(section_keys(cls.SECTION))
                raise ConfigError(f"Unknown key '{section}.{key}'. Known keys: {known}")
            values[key] = _check_type(value, hints[key], f"{section}.{key}")
        return cls(**values)

    def set_value(self, key: str, raw: str) -> None:
        """Set one field from its text form (config file or override)."""
        hints = get_type_hints(type(self))
        if key not in hints:
            known = ", ".join(section_keys(self.SECTION))
            raise ConfigError(f"Unknown key '{self.SECTION}.{key}'. Known keys: {known}")
        setattr(self, key, parse_value(raw, hints[key], f"{self.SECTION}.{key}"))


@dataclass
class SystemConfig(_Section):
    """Constellation half-size and signal energy."""

    SECTION = "system"

    M: int = 2048
    S: float = 40000.0

    def to_params(self) -> SystemParams:
        return SystemParams(self.M, self.S)


@dataclass
class ExpanderConfig(_Section):
    """Key expander: register length, taps and the optional nonlinear filter."""

    SECTION = "expander"

    key_bits: int = 16
    taps: Optional[List[int]] = None  # None selects the tabulated primitive taps
    nonlinear_filter: bool = False
    filter_window: int = 3
    warmup: Optional[int] = None
    seed_bits: Optional[str] = None  # fixed key, s_0 first; None draws one per run

    def to_spec(self) -> LfsrSpec:
        if self.taps is None:
            return LfsrSpec.primitive(self.key_bits)
        return LfsrSpec(self.key_bits, tuple(self.taps))

    def to_expander(self) -> LfsrExpander:
        return make_expander(self.to_spec(), self.nonlinear_filter, self.filter_window, self.warmup)

    def fixed_seed(self) -> Optional[SeedKey]:
        return None if self.seed_bits is None else SeedKey.from_string(self.seed_bits)


@dataclass
class AttackConfig(_Section):
    """Eve's attack parameters and the desk-scale guards."""

    SECTION = "attack"

    wedge_policy: str = "paper_default"
    confidence: float = 0.9999
    n_values: List[int] = field(default_factory=lambda: [16, 32, 64])
    n_slots: int = 256
    msb_count: int = 1
    runs: int = 50
    eve_rule: str = "nearest_index"
    gamma_trials: int = 10000
    bruteforce_guard: int = 28
    correlation_guard: int = 24
    allow_override: bool = False


@dataclass
class DsrConfig(_Section):
    """Deliberate signal randomisation."""

    SECTION = "dsr"

    delta: Optional[float] = None  # fixed width; None couples delta = coupling / sqrt(S)
    coupling: float = 2.0
    gamma_target: float = 3.0
    S_list: List[float] = field(default_factory=lambda: [100.0, 1000.0, 10000.0])


@dataclass
class JointConfig(_Section):
    """Joint attack (square-root measurement) settings."""

    SECTION = "joint"

    n_values: List[int] = field(default_factory=lambda: [0, 1, 2, 4, 8, 16, 32, 64, 128, 256])
    plaintext_policy: str = "all_zeros"
    guard: int = 12
    dump_gram: bool = False


@dataclass
class RunConfig(_Section):
    """Trial budget, master seed and result output."""

    SECTION = "run"

    trials: int = 100000
    master_seed: int = 0
    output_dir: str = "results"
    output_format: str = "csv"
    workers: int = 1
    plaintext: str = "0110100110010110"
    keystream_slots: int = 16


_SECTIONS = {
    "system": SystemConfig,
    "expander": ExpanderConfig,
    "attack": AttackConfig,
    "dsr": DsrConfig,
    "joint": JointConfig,
    "run": RunConfig,
}


@dataclass
class ExperimentConfig:
    """Complete experiment configuration."""

    system: SystemConfig = field(default_factory=SystemConfig)
    expander: ExpanderConfig = field(default_factory=ExpanderConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    dsr: DsrConfig = field(default_factory=DsrConfig)
    joint: JointConfig = field(default_factory=JointConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {name: getattr(self, name).to_dict() for name in _SECTIONS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Create from dictionary; missing sections keep their defaults."""
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(
                f"Unknown section(s) {sorted(unknown)}. Known sections: {', '.join(section_names())}"
            )
        parts = {}
        for name, section in data.items():
            if not isinstance(section, dict):
                raise ConfigError(f"Section '{name}' must be a mapping")
            parts[name] = _SECTIONS[name].from_dict(section, name)
        return cls(**parts)

    @classmethod
    def from_json_file(cls, path: Path) -> "ExperimentConfig":
        """Load from JSON file."""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: line {e.lineno}: {e.msg}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be an object of sections")
        return cls.from_dict(data)

    def to_json_file(self, path: Path) -> None:
        """Save to JSON file."""
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    @classmethod
    def from_ini_string(cls, text: str, source: str = "<string>") -> "ExperimentConfig":
        """Parse the sectioned key = value format."""
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.MissingSectionHeaderError as e:
            raise ConfigError(f"{source}: line {e.lineno}: key outside of any [section]") from e
        except configparser.ParsingError as e:
            lineno, line = e.errors[0]
            raise ConfigError(f"{source}: line {lineno}: cannot parse {line!r}") from e
        except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as e:
            raise ConfigError(f"{source}: line {e.lineno}: {e.message}") from e

        config = cls()
        for name in parser.sections():
            if name not in _SECTIONS:
                raise ConfigError(
                    f"{source}: unknown section [{name}]. Known sections: {', '.join(section_names())}"
                )
            section = getattr(config, name)
            for key, raw in parser.items(name):
                section.set_value(key, raw)
        return config

    @classmethod
    def from_ini_file(cls, path: Path) -> "ExperimentConfig":
        """Load from a sectioned text file."""
        path = Path(path)
        return cls.from_ini_string(path.read_text(encoding="utf-8"), source=str(path))

    def to_ini_string(self) -> str:
        lines = []
        for name in _SECTIONS:
            lines.append(f"[{name}]")
            for key, value in getattr(self, name).to_dict().items():
                lines.append(f"{key} = {format_value(value)}")
            lines.append("")
        return "\n".join(lines)

    def to_ini_file(self, path: Path) -> None:
        """Save as a sectioned text file."""
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_ini_string())

    def apply_overrides(self, overrides: Iterable[str]) -> "ExperimentConfig":
        """
        Apply ``section.key=value`` overrides in order.

        Raises:
            ConfigError: On malformed overrides, unknown keys or bad values
        """
        for item in overrides:
            if "=" not in item or "." not in item.split("=", 1)[0]:
                raise ConfigError(f"Override {item!r} must have the form section.key=value")
            target, raw = item.split("=", 1)
            name, key = target.strip().split(".", 1)
            if name not in _SECTIONS:
                raise ConfigError(
                    f"Override {item!r}: unknown section '{name}'. Known sections: {', '.join(section_names())}"
                )
            getattr(self, name).set_value(key.strip(), raw)
        return self

    def validate(self, subcommand: Optional[str] = None) -> None:
        """
        Check every value and the guards relevant to ``subcommand``.

        Raises:
            ConfigError: On invalid values
            GuardViolation: If a desk-scale guard is exceeded without override
        """
        try:
            params = self.system.to_params()
        except ValueError as e:
            raise ConfigError(f"[system] {e}") from e

        exp = self.expander
        if exp.taps is None and exp.key_bits not in PRIMITIVE_TAPS:
            known = ", ".join(str(k) for k in sorted(PRIMITIVE_TAPS))
            raise ConfigError(
                f"expander.key_bits = {exp.key_bits} has no tabulated primitive taps; "
                f"set expander.taps or use one of {known}"
            )
        try:
            spec = exp.to_spec()
            if exp.nonlinear_filter:
                exp.to_expander()
            seed = exp.fixed_seed()
        except ValueError as e:
            raise ConfigError(f"[expander] {e}") from e
        if seed is not None and seed.length != exp.key_bits:
            raise ConfigError(
                f"expander.seed_bits has {seed.length} bits but expander.key_bits = {exp.key_bits}"
            )

        att = self.attack
        _require(att.wedge_policy in ("paper_default", "confidence", "exact"), "attack.wedge_policy",
                 "must be 'paper_default', 'confidence' or 'exact'")
        _require(0.0 < att.confidence < 1.0, "attack.confidence", "must lie in (0, 1)")
        _require(att.eve_rule in ("nearest_index", "full_ml"), "attack.eve_rule",
                 "must be 'nearest_index' or 'full_ml'")
        _require(all(n >= 0 for n in att.n_values), "attack.n_values", "must be >= 0")
        _require(att.n_slots >= 1, "attack.n_slots", "must be >= 1")
        _require(att.runs >= 1, "attack.runs", "must be >= 1")
        _require(att.gamma_trials >= 1, "attack.gamma_trials", "must be >= 1")
        if params.is_power_of_two:
            _require(1 <= att.msb_count <= params.m, "attack.msb_count",
                     f"must lie in [1, {params.m}] for M = {params.M}")

        dsr = self.dsr
        if dsr.delta is not None:
            _require(0.0 <= dsr.delta < math.pi, "dsr.delta", "must lie in [0, pi)")
        _require(dsr.coupling >= 0, "dsr.coupling", "must be >= 0")
        _require(dsr.gamma_target > 0, "dsr.gamma_target", "must be > 0")
        _require(len(dsr.S_list) > 0 and all(s > 0 for s in dsr.S_list), "dsr.S_list",
                 "must be a nonempty list of positive values")

        joint = self.joint
        _require(joint.plaintext_policy in ("all_zeros", "fixed_random"), "joint.plaintext_policy",
                 "must be 'all_zeros' or 'fixed_random'")
        _require(len(joint.n_values) > 0 and all(n >= 0 for n in joint.n_values), "joint.n_values",
                 "must be a nonempty list of values >= 0")

        run = self.run
        _require(run.trials >= 1, "run.trials", "must be >= 1")
        _require(0 <= run.master_seed < 2**64, "run.master_seed", "must be an unsigned 64-bit integer")
        _require(run.output_format in ("csv", "json"), "run.output_format", "must be 'csv' or 'json'")
        _require(run.workers >= 1, "run.workers", "must be >= 1")
        _require(run.keystream_slots >= 0, "run.keystream_slots", "must be >= 0")
        _require(all(ch in "01" for ch in run.plaintext), "run.plaintext", "must be a 0/1 string")

        if subcommand is None:
            return
        if subcommand not in SUBCOMMANDS:
            raise ConfigError(f"Unknown subcommand '{subcommand}'. Available: {', '.join(SUBCOMMANDS)}")
        if subcommand in _EXPANDER_COMMANDS and not params.is_power_of_two:
            raise ConfigError(
                f"{subcommand} draws keystream symbols from the expander and needs "
                f"system.M to be a power of two, got {params.M}"
            )
        if subcommand in ("gamma", "eve-bruteforce", "eve-correlation"):
            _require(params.S > 0, "system.S", f"must be > 0 for {subcommand}")
        if subcommand == "eve-bruteforce":
            check_guard("expander.key_bits", spec.length, att.bruteforce_guard, att.allow_override)
        elif subcommand == "eve-correlation":
            check_guard("expander.key_bits", spec.length, att.correlation_guard, att.allow_override)
        elif subcommand == "joint-srm":
            check_guard("expander.key_bits", spec.length, joint.guard, att.allow_override)


def _require(condition: bool, key: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{key} {message}")


def _check_type(value: Any, hint: Any, where: str) -> Any:
    """Validate a JSON value against a field annotation."""
    if isinstance(value, str) and hint is not str and _strip_optional(hint) is not str:
        return parse_value(value, hint, where)
    origin = get_origin(hint)
    if origin is Union:
        if value is None:
            return None
        return _check_type(value, _strip_optional(hint), where)
    if origin in (list, List):
        if not isinstance(value, list):
            raise ConfigError(f"{where} must be a list, got {value!r}")
        item = get_args(hint)[0]
        return [_check_type(v, item, where) for v in value]
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be true or false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {value!r}")
        return float(value)
    if hint is str and not isinstance(value, str):
        raise ConfigError(f"{where} must be a string, got {value!r}")
    return value


def _strip_optional(hint: Any) -> Any:
    if get_origin(hint) is Union:
        args = [a for a in get_args(hint) if a is not type(None)]
        return args[0]
    return hint


def parse_value(raw: str, hint: Any, where: str) -> Any:
    """
    Convert the text form of a value to the annotated type.

    Lists are comma or whitespace separated; ``none`` clears optional values.

    Raises:
        ConfigError: If the text does not parse as the expected type
    """
    text = raw.strip()
    if get_origin(hint) is Union:
        if text.lower() in ("", "none", "null"):
            return None
        hint = _strip_optional(hint)
    if get_origin(hint) in (list, List):
        item = get_args(hint)[0]
        parts = [p for p in text.replace(",", " ").split() if p]
        return [parse_value(p, item, where) for p in parts]
    try:
        if hint is bool:
            lowered = text.lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        if hint is int:
            return int(float(text)) if _is_integral_float(text) else int(text)
        if hint is float:
            return float(text)
    except ValueError:
        expected = {bool: "true/false", int: "an integer", float: "a number"}[hint]
        raise ConfigError(f"{where} must be {expected}, got {raw!r}") from None
    return text


def _is_integral_float(text: str) -> bool:
    # accepts "1e5" style trial counts
    try:
        value = float(text)
    except ValueError:
        return False
    return "e" in text.lower() and value.is_integer()


def format_value(value: Any) -> str:
    """Text form of a value, inverse of ``parse_value``."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load a config file, choosing the format by suffix (``.json`` or text).

    Raises:
        ConfigError: If the file is missing or invalid
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    if path.suffix.lower() == ".json":
        return ExperimentConfig.from_json_file(path)
    return ExperimentConfig.from_ini_file(path)


def section_names() -> List[str]:
    return list(_SECTIONS)


def section_keys(name: str) -> List[str]:
    return [f.name for f in fields(_SECTIONS[name])]
