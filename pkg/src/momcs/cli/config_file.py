"""
YAML experiment configuration with command-line overrides.

A config file is a mapping with one section per configuration model. Every field of a section can be
overridden on the command line with `--<section>-<field>`; override values are parsed as YAML scalars so
numbers, lists and tags all work.
"""
import argparse
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Type, Union

import yaml
from pydantic import BaseModel, ValidationError

from momcs.core.errors import MomcsError

_OVERRIDE_PREFIX = "override__"


class ConfigError(MomcsError):
    """Raised for unreadable configuration; the message names the offending key."""

    pass


def _yaml_value(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as error:
        raise argparse.ArgumentTypeError(f"not a YAML value: {text!r} ({error})")


def add_override_flags(parser: argparse.ArgumentParser, section: str, model: Type[BaseModel]) -> None:
    """
    Add a `--<section>-<field>` flag for every field of the model.
    """
    group = parser.add_argument_group(f"{section} overrides")
    for name, field in model.__fields__.items():
        group.add_argument(
            f"--{section}-{name.replace('_', '-')}",
            dest=f"{_OVERRIDE_PREFIX}{section}__{name}",
            type=_yaml_value,
            default=None,
            metavar="VALUE",
            help=f"override {section}.{name} (default: {field.default!r})" if not field.required else f"set {section}.{name}",
        )


def collect_overrides(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    """The override flags that were given, grouped by section."""
    overrides: Dict[str, Dict[str, Any]] = {}
    for dest, value in vars(args).items():
        if not dest.startswith(_OVERRIDE_PREFIX) or value is None:
            continue
        section, name = dest[len(_OVERRIDE_PREFIX) :].split("__", 1)
        overrides.setdefault(section, {})[name] = value
    return overrides


def _merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(path: Optional[Union[str, Path]]) -> Dict[str, Any]:
    if path is None:
        return {}
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as error:
        raise ConfigError(f"Cannot read config file {path}: {error}")
    except yaml.YAMLError as error:
        raise ConfigError(f"{path} is not valid YAML: {error}")
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must hold a mapping of sections, got {type(raw).__name__}")
    return raw


def load_sections(
    path: Optional[Union[str, Path]],
    sections: Mapping[str, Type[BaseModel]],
    overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
) -> Dict[str, BaseModel]:
    """
    Build the configuration models of a command from a file and overrides.
    Args:
        path: YAML config file, None for defaults only
        sections: model class per section name
        overrides: field values per section, applied over the file

    Returns:
        A validated model per section.

    Raises:
        ConfigError: on unreadable files, unknown sections or invalid values
    """
    raw = read_config_file(path)
    unknown = sorted(set(raw) - set(sections))
    if unknown:
        raise ConfigError(f"Unknown config section(s) {unknown}; expected {sorted(sections)}")
    overrides = overrides or {}
    models = {}
    for section, model in sections.items():
        data = raw.get(section) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"Section '{section}' must be a mapping")
        try:
            models[section] = model.parse_obj(_merge(data, overrides.get(section, {})))
        except ValidationError as error:
            problems = "; ".join(
                f"{'.'.join(str(part) for part in (section, *issue['loc']))}: {issue['msg']}" for issue in error.errors()
            )
            raise ConfigError(f"Invalid configuration: {problems}") from error
    return models
