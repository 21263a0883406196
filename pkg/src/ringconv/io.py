"""Line-oriented ASCII file formats.

System file::

    # scalar system over Z/4
    p = 2
    r = 2
    delta = 1
    k = 1
    n = 2
    A = 1
    B = 1
    C = 1
    D = 1
    T = 4        # optional decoder defaults
    theta = 1

Matrices are written row-major with ``;`` between rows.  A matrix with no
rows or columns is written as an empty value.  Sequence files hold one
symbol per line (outputs first), message files one input vector per line,
pattern files one ``t component value`` triple per line.  Blank lines and
``#`` comments are ignored everywhere.

Polynomial matrix files hold one matrix row per line with entries separated
by ``|``; each entry is its ascending coefficient list, e.g. ``1 1 | 1``
is the row ``(1 + z, 1)``.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .poly import PolyEncoder
from .ring import RingParams
from .system import IsoSystem

SYSTEM_KEYS = ("p", "r", "delta", "k", "n", "A", "B", "C", "D")
OPTIONAL_KEYS = ("T", "theta", "name")
BUNDLED_SYSTEMS = ("scalar_z4", "delta2_z4", "delta3_z4")


class ParseError(ValueError):
    """A text file does not follow its format."""


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def _ints(text: str, where: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(f"{where}: expected integers, got {text!r}") from None


def parse_matrix(value: str, shape: tuple[int, int], where: str) -> np.ndarray:
    rows, cols = shape
    if rows == 0 or cols == 0:
        if value.strip():
            raise ParseError(f"{where}: expected an empty {rows}x{cols} matrix")
        return np.zeros(shape, dtype=np.int64)
    parsed = [_ints(row, where) for row in value.split(";")]
    if len(parsed) != rows or any(len(row) != cols for row in parsed):
        raise ParseError(f"{where}: expected {rows}x{cols} entries, got {[len(r) for r in parsed]}")
    return np.array(parsed, dtype=np.int64)


def format_matrix(m) -> str:
    return "; ".join(" ".join(str(int(v)) for v in row) for row in np.asarray(m))


def parse_key_values(text: str, source: str = "<text>") -> dict[str, str]:
    out = {}
    for number, line in _lines(text):
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParseError(f"{source}:{number}: expected 'key = value'")
        if key in out:
            raise ParseError(f"{source}:{number}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def parse_system(text: str, source: str = "<system>") -> tuple[IsoSystem, dict]:
    """Parse a system file; returns the system and the optional decoder defaults."""
    kv = parse_key_values(text, source)
    unknown = set(kv) - set(SYSTEM_KEYS) - set(OPTIONAL_KEYS)
    if unknown:
        raise ParseError(f"{source}: unknown keys {sorted(unknown)}")
    missing = [key for key in SYSTEM_KEYS if key not in kv]
    if missing:
        raise ParseError(f"{source}: missing keys {missing}")
    dims = {}
    for key in ("p", "r", "delta", "k", "n", "T", "theta"):
        if key in kv:
            values = _ints(kv[key], f"{source}: {key}")
            if len(values) != 1:
                raise ParseError(f"{source}: {key} must be a single integer")
            dims[key] = values[0]
    delta, k, n = dims["delta"], dims["k"], dims["n"]
    if min(delta, k, n - k) < 0:
        raise ParseError(f"{source}: need delta >= 0 and 0 <= k <= n")
    try:
        ring = RingParams(dims["p"], dims["r"])
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from None
    shapes = {"A": (delta, delta), "B": (delta, k), "C": (n - k, delta), "D": (n - k, k)}
    mats = {key: parse_matrix(kv[key], shapes[key], f"{source}: {key}") % ring.modulus
            for key in shapes}
    defaults = {key: dims[key] for key in ("T", "theta") if key in dims}
    if "name" in kv:
        defaults["name"] = kv["name"]
    return IsoSystem(mats["A"], mats["B"], mats["C"], mats["D"], ring), defaults


def format_system(s: IsoSystem, **defaults) -> str:
    lines = [f"p = {s.ring.p}", f"r = {s.ring.r}", f"delta = {s.delta}",
             f"k = {s.k}", f"n = {s.n}"]
    lines += [f"{key} = {format_matrix(getattr(s, key))}".rstrip() for key in "ABCD"]
    lines += [f"{key} = {value}" for key, value in defaults.items()]
    return "\n".join(lines) + "\n"


def read_system(path) -> tuple[IsoSystem, dict]:
    with open(path, encoding="ascii") as handle:
        return parse_system(handle.read(), str(path))


def bundled_system(name: str) -> tuple[IsoSystem, dict]:
    """One of :data:`BUNDLED_SYSTEMS` with its recommended ``T`` and ``theta``."""
    if name not in BUNDLED_SYSTEMS:
        raise KeyError(f"unknown bundled system {name!r}")
    text = resources.files("ringconv").joinpath("data", f"{name}.txt").read_text("ascii")
    return parse_system(text, name)


def parse_rows(text: str, width: int, source: str = "<rows>", modulus=None) -> np.ndarray:
    """Integer rows of a fixed width; values must lie in ``[0, modulus)`` when given."""
    rows = []
    for number, line in _lines(text):
        values = _ints(line, f"{source}:{number}")
        if len(values) != width:
            raise ParseError(f"{source}:{number}: expected {width} integers, got {len(values)}")
        if modulus is not None and any(not 0 <= v < modulus for v in values):
            raise ParseError(f"{source}:{number}: values must lie in [0, {modulus})")
        rows.append(values)
    return np.array(rows, dtype=np.int64).reshape(len(rows), width)


def format_rows(rows) -> str:
    return "".join(" ".join(str(int(v)) for v in row) + "\n" for row in np.asarray(rows))


def read_rows(path, width: int, modulus=None) -> np.ndarray:
    with open(path, encoding="ascii") as handle:
        return parse_rows(handle.read(), width, str(path), modulus)


def write_text(path, text: str):
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        handle.write(text)


def parse_pattern(text: str, source: str = "<pattern>") -> tuple:
    entries = []
    for number, line in _lines(text):
        values = _ints(line, f"{source}:{number}")
        if len(values) != 3:
            raise ParseError(f"{source}:{number}: expected 't component value'")
        entries.append(tuple(values))
    return tuple(entries)


def format_pattern(entries) -> str:
    return "".join(f"{t} {c} {v}\n" for t, c, v in entries)


def parse_poly_matrix(text: str, ring: RingParams, source: str = "<poly>") -> PolyEncoder:
    rows = []
    for number, line in _lines(text):
        rows.append([_ints(entry, f"{source}:{number}") or [0] for entry in line.split("|")])
    if not rows or len({len(row) for row in rows}) != 1:
        raise ParseError(f"{source}: rows must have the same number of entries")
    n, k = len(rows), len(rows[0])
    return PolyEncoder.from_columns([[rows[i][j] for i in range(n)] for j in range(k)], ring)


def format_poly_matrix(g: PolyEncoder) -> str:
    """Write ``g`` in its sorted column order."""
    lines = []
    for i in range(g.n):
        entries = []
        for j in range(g.k):
            coeffs = list(g.coeffs[:, i, j])
            while len(coeffs) > 1 and coeffs[-1] == 0:
                coeffs.pop()
            entries.append(" ".join(str(int(c)) for c in coeffs))
        lines.append(" | ".join(entries))
    return "\n".join(lines) + "\n"
