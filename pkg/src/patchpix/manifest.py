"""Plain-text key=value manifests.

Run records are kept diffable and replayable: one `key=value` per line,
`#` starts a comment, order preserved on write. Values are stored as
strings; callers parse types at the point of use.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from .errors import InputError


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_manifest(path: str | Path, entries: Mapping[str, object]) -> None:
    lines = []
    for key, value in entries.items():
        if "=" in key or "\n" in key or not key:
            raise InputError(f"bad manifest key {key!r}")
        text = format_value(value)
        if "\n" in text:
            raise InputError(f"manifest value for {key!r} contains a newline")
        lines.append(f"{key}={text}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise InputError(f"{path}:{lineno}: empty key")
        entries[key] = value.strip()
    return entries


def parse_bool(text: str, key: str = "") -> bool:
    if text in ("true", "1", "yes"):
        return True
    if text in ("false", "0", "no"):
        return False
    raise InputError(f"bad boolean {text!r}" + (f" for {key}" if key else ""))
