"""Parsing of sequence-spec files, gauge-spec strings and CLI config files.

A sequence spec is line oriented::

    # comment
    family = power_law
    param.s = 0.5

``family = explicit`` takes ``terms_file = <path>`` (one decimal per line);
``halved_of`` takes ``param.inner = <path to another spec>``.  Relative
paths resolve against the spec file's directory.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SpecFormatError
from .gauges import DimensionFunction, associated_function, make_function
from .sequences import GapSequence, make_sequence

_GAUGE = re.compile(r"^\s*([A-Za-z_]+)\s*\((.*)\)\s*$")
_INT_PARAMS = {"count"}
_TEXT_PARAMS = {"gauge", "head", "inner"}


def parse_assignments(text: str, source: str = "<text>") -> list[tuple[str, str, int]]:
    """``key = value`` lines (blank lines and ``#`` comments skipped)."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFormatError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise SpecFormatError(f"{source}:{lineno}: empty key or value in {raw!r}")
        out.append((key, value, lineno))
    return out


def read_terms_file(path: Path) -> np.ndarray:
    """One decimal per line; blank lines and ``#`` comments are ignored."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise SpecFormatError(f"cannot read terms file {path}: {exc}") from None
    values = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise SpecFormatError(f"{path}:{lineno}: not a number: {raw!r}") from None
    if not values:
        raise SpecFormatError(f"terms file {path} is empty")
    return np.array(values)


@dataclass(frozen=True)
class SequenceSpec:
    """A parsed sequence spec together with its verbatim text."""

    text: str
    path: str
    family: str
    params: dict
    sequence: GapSequence


def parse_sequence_spec(text: str, base_dir: Path | str = ".",
                        source: str = "<text>") -> SequenceSpec:
    base = Path(base_dir)
    family = None
    params: dict = {}
    terms_file = None
    for key, value, lineno in parse_assignments(text, source):
        if key == "family":
            family = value
        elif key == "terms_file":
            terms_file = value
        elif key.startswith("param."):
            name = key[len("param."):]
            if not name:
                raise SpecFormatError(f"{source}:{lineno}: empty parameter name")
            params[name] = value
        else:
            raise SpecFormatError(f"{source}:{lineno}: unknown key {key!r}")
    if family is None:
        raise SpecFormatError(f"{source}: missing 'family = ...'")
    kwargs: dict = {}
    for name, value in params.items():
        if name == "inner":
            kwargs[name] = load_sequence_spec(base / value).sequence
        elif name in _TEXT_PARAMS:
            kwargs[name] = parse_gauge(value, base) if name == "gauge" else value
        elif name in _INT_PARAMS:
            try:
                kwargs[name] = int(value)
            except ValueError:
                raise SpecFormatError(f"{source}: param.{name} must be an integer") from None
        else:
            try:
                kwargs[name] = float(value)
            except ValueError:
                raise SpecFormatError(f"{source}: param.{name} must be a number") from None
    if family == "explicit":
        if terms_file is None:
            raise SpecFormatError(f"{source}: explicit family needs terms_file")
        kwargs["terms"] = read_terms_file(base / terms_file)
    elif terms_file is not None:
        raise SpecFormatError(f"{source}: terms_file only applies to the explicit family")
    seq = make_sequence(family, **kwargs)
    return SequenceSpec(text, source, family, params, seq)


def load_sequence_spec(path: Path | str) -> SequenceSpec:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise SpecFormatError(f"cannot read spec file {path}: {exc}") from None
    return parse_sequence_spec(raw.decode("utf-8"), path.parent, str(path))


def parse_gauge(text: str, base_dir: Path | str = ".") -> DimensionFunction:
    """Gauge from ``power(s[,scale])``, ``logrec(c,p)``, ``powerlog(s,t)`` or
    ``associated(<spec path>, count)``.

    >>> parse_gauge("logrec(1,1)").spec()
    'logrec(1,1)'
    """
    m = _GAUGE.match(text)
    if not m:
        raise SpecFormatError(f"malformed gauge spec {text!r}")
    kind, args = m.group(1).lower(), [a.strip() for a in m.group(2).split(",")]
    if kind == "associated":
        if len(args) != 2:
            raise SpecFormatError("associated(<spec path>, count) takes two arguments")
        spec = load_sequence_spec(Path(base_dir) / args[0])
        try:
            max_n = int(args[1])
        except ValueError:
            raise SpecFormatError(f"associated: count must be an integer, got {args[1]!r}") from None
        gauge = associated_function(spec.sequence, max_n)
        gauge.label = f"associated({args[0]},{max_n})"
        return gauge
    try:
        nums = [float(a) for a in args]
    except ValueError:
        raise SpecFormatError(f"non-numeric argument in gauge spec {text!r}") from None
    names = {"power": ("exponent", "scale"), "logrec": ("scale", "order"),
             "powerlog": ("exponent", "log_exponent", "scale")}
    if kind not in names:
        raise SpecFormatError(f"unknown gauge kind {kind!r}")
    if not 1 <= len(nums) <= len(names[kind]):
        raise SpecFormatError(f"{kind} takes 1 to {len(names[kind])} arguments")
    return make_function(kind, **dict(zip(names[kind], nums)))


def split_gauges(items) -> list[str]:
    """Flatten gauge lists given as separate items or ``;``-separated strings."""
    out = []
    for item in items:
        out.extend(part.strip() for part in item.split(";") if part.strip())
    return out


def load_config(path: Path | str) -> dict:
    """CLI defaults from ``key = value`` lines (``h`` is an alias of ``gauge``)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecFormatError(f"cannot read config file {path}: {exc}") from None
    out = {}
    for key, value, _ in parse_assignments(text, str(path)):
        key = key.replace("-", "_")
        out["gauge" if key == "h" else key] = value
    return out
