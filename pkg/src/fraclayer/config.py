"""Flat `key = value` configuration files with dotted namespaces.

Chosen for diff-ability in golden tests: one assignment per line, `#`
comments, values parsed as int, float, bool, or string.
"""

from __future__ import annotations

from typing import Any


class ConfigError(ValueError):
    """Parse or validation failure, carrying the offending line."""


def _coerce(raw: str) -> Any:
    s = raw.strip()
    if s.lower() in ("true", "false"):
        return s.lower() == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        pass
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    return s


def parse_config(text: str) -> dict:
    """Parse to a nested dict; dotted keys open namespaces."""
    out: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = body.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        parts = key.split(".")
        node = out
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"line {lineno}: {p!r} already a value")
        node[parts[-1]] = _coerce(raw)
    return out


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config(fh.read())


def require(cfg: dict, *keys: str) -> Any:
    """Fetch a dotted key, raising ConfigError with the key name if absent."""
    node: Any = cfg
    for k in keys:
        if not isinstance(node, dict) or k not in node:
            raise ConfigError(f"missing config key {'.'.join(keys)!r}")
        node = node[k]
    return node


def get(cfg: dict, default: Any, *keys: str) -> Any:
    node: Any = cfg
    for k in keys:
        if not isinstance(node, dict) or k not in node:
            return default
        node = node[k]
    return node
