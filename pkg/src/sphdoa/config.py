"""Plain-text config files for the CLI.

One `key = value` pair per line, `#` starts a comment, blank lines
are ignored.  Keys mirror the TrialConfig field names; values are
coerced to the field's type, so `snr_db = inf` and
`room_dims = 5, 6, 4` both do what they look like.
"""

from dataclasses import fields

from .pipeline import TrialConfig

__all__ = ["parse_config_text", "load_config", "make_trial_config"]


def parse_config_text(text):
    """Parse config text into a {key: raw string} mapping."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ValueError(f"config line {lineno}: missing key")
        if key in out:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read config from {path}: {exc}") from exc
    return parse_config_text(text)


def _floats(raw, n, key):
    parts = [p for p in raw.replace(",", " ").split() if p]
    if len(parts) != n:
        raise ValueError(f"config key {key!r}: expected {n} numbers, got {raw!r}")
    return tuple(float(p) for p in parts)


def _bool(raw, key):
    lowered = raw.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"config key {key!r}: expected a boolean, got {raw!r}")


def _optional(raw):
    return raw.lower() in ("none", "null", "")


def _coerce(key, raw):
    """Raw string from a config file to the TrialConfig field's type."""
    if key in ("room_dims",):
        return _floats(raw, 3, key)
    if key == "band":
        return _floats(raw, 2, key)
    if key == "array_center":
        return None if _optional(raw) else _floats(raw, 3, key)
    if key == "rotation_deg":
        return None if _optional(raw) else float(raw)
    if key == "rigid":
        return _bool(raw, key)
    if key in ("reflection_formula", "scheme"):
        return raw
    if key in ("n_sources", "seed", "fft_size", "order", "restarts"):
        return int(raw)
    return float(raw)


_FIELD_NAMES = tuple(f.name for f in fields(TrialConfig))


def make_trial_config(mapping=None, **overrides):
    """Build a TrialConfig from raw-string config values plus overrides.

    `mapping` holds strings as read from a file; `overrides` hold
    already-typed values (CLI flags) and win over the file.  Unknown
    keys are rejected rather than silently ignored.
    """
    mapping = dict(mapping or {})
    unknown = sorted(set(mapping) - set(_FIELD_NAMES))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {key: _coerce(key, raw) for key, raw in mapping.items()}
    for key, value in overrides.items():
        if key not in _FIELD_NAMES:
            raise ValueError(f"unknown config key {key!r}")
        if value is not None:
            kwargs[key] = value
    return TrialConfig(**kwargs)
