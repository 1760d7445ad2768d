import json
import sys

from .errors import ParseError


def read_json(source):
    """Parse JSON from a path, ``"-"`` for stdin, or a readable stream."""
    try:
        if hasattr(source, "read"):
            return json.load(source)
        if str(source) == "-":
            return json.load(sys.stdin)
        with open(source, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc}") from exc


def write_text(target, text: str) -> None:
    """Write to a path, or stdout for ``None``/``"-"``."""
    if target is None or str(target) == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(target, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
