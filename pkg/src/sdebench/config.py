"""Experiment configuration: a small flat INI-like format.

Grammar, line by line:

    # comment            (ignored, as are blank lines)
    [section]            (section header; required before any key)
    key = value          (value is everything after the first '=', stripped)

Keys are unique within a section.  parse_config(serialize_config(cfg))
returns an equal dict for any config produced by this module, and
serialize_config(parse_config(text)) is stable under a second round
trip, so configs can be echoed into CSV metadata canonically.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError

__all__ = ["ConfigError", "apply_override", "parse_config",
           "parse_config_file", "serialize_config"]

DEFAULT_SECTION = "params"


def parse_config(text: str) -> dict:
    """Parse config text into an ordered dict of ordered dicts."""
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            if name in sections:
                raise ConfigError(f"line {lineno}: duplicate section "
                                  f"[{name}]")
            sections[name] = {}
            current = name
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {line!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in sections[current]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in "
                              f"[{current}]")
        sections[current][key] = value
    return sections


def parse_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def serialize_config(sections: dict) -> str:
    """Canonical text form; inverse of parse_config at the data level."""
    lines = []
    for name, body in sections.items():
        _check_token(name, "section name")
        lines.append(f"[{name}]")
        for key, value in body.items():
            _check_token(key, "key")
            value = str(value)
            if "\n" in value or value != value.strip():
                raise ConfigError(f"value for {key!r} does not survive a "
                                  f"round trip: {value!r}")
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def _check_token(token: str, what: str) -> None:
    if (not token or "=" in token or "[" in token or "]" in token
            or "\n" in token or token != token.strip()
            or token.startswith("#")):
        raise ConfigError(f"{what} {token!r} is not serializable")


def apply_override(sections: dict, spec: str) -> None:
    """Apply one --set override, in place.

    'key=value' targets [params]; 'section.key=value' targets that
    section.  The last override for a key wins.
    """
    if "=" not in spec:
        raise ConfigError(f"override {spec!r} must look like key=value")
    target, _, value = spec.partition("=")
    target = target.strip()
    value = value.strip()
    if "." in target:
        section, _, key = target.partition(".")
    else:
        section, key = DEFAULT_SECTION, target
    section = section.strip()
    key = key.strip()
    if not section or not key:
        raise ConfigError(f"override {spec!r} has an empty section or key")
    sections.setdefault(section, {})[key] = value
