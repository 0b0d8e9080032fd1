import json
import os

from ..errors import ConfigError


def load_config(filepath):
    if not os.path.exists(filepath):
        raise FileNotFoundError(f"File not found: {filepath}")

    try:
        with open(filepath, encoding="utf-8") as f:
            cfg = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {filepath} (line {e.lineno}): {e.msg}") from e
    if not isinstance(cfg, dict):
        raise ConfigError(f"{filepath} must hold a JSON object")
    return cfg


def parse_value(text):
    """JSON when it parses (numbers, booleans, lists, objects), the raw string otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg, overrides):
    """Apply ``key.sub=value`` assignments to a nested config dict (in place)."""
    for item in overrides or []:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        parts = key.split(".")
        node = cfg
        for depth, part in enumerate(parts[:-1]):
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigError("cannot set a sub-field of a non-object", ".".join(parts[:depth + 1]))
            node = child
        node[parts[-1]] = parse_value(raw.strip())
    return cfg
