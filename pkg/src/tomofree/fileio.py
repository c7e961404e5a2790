"""Text formats read and written by the command-line tool.

All numeric values are written at full double precision (``repr``).
Self-describing files start with ``# key: value`` header lines, the first
of which is ``# format: <name> v<version>``.
"""
from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path

import numpy as np

from .errors import ParseError
from .states import BASIS, FAMILIES, StateFamily, check_state, make_family
from .swap import MODES, PROJECTOR_ORDER, SETTINGS, CoincidenceTable, MeasuredR

FORMAT_VERSION = 1
_FAMILY_RE = re.compile(r"^\s*(werner|horodecki|pure)\s*:\s*p\s*=\s*(\S+)\s*$", re.IGNORECASE)


def fmt(x) -> str:
    """Full-precision text for files."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def fmt6(x) -> str:
    """Six significant digits for terminal output."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.6g}"


def _header(kind: str, extra: dict | None = None) -> list[str]:
    lines = [f"# format: tomofree.{kind} v{FORMAT_VERSION}"]
    for k, v in (extra or {}).items():
        lines.append(f"# {k}: {v}")
    return lines


def _split_header(text: str, path) -> tuple[dict, list[tuple[int, str]]]:
    header, body = {}, []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                header[key.strip()] = value.strip()
            continue
        body.append((lineno, stripped))
    return header, body


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _float(value: str, where: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: expected a number, got {value!r}") from None
    if not np.isfinite(out):
        raise ParseError(f"{where}: value must be finite, got {value!r}")
    return out


def _int(value: str, where: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: expected an integer, got {value!r}") from None


# --- states -----------------------------------------------------------------

def parse_family(text: str) -> StateFamily | None:
    m = _FAMILY_RE.match(text)
    if not m:
        return None
    return StateFamily(m.group(1).lower(), _float(m.group(2), f"family literal {text!r}"))


def load_state(spec: str) -> np.ndarray:
    """Density matrix from a family literal (``werner:p=0.5``) or a state file."""
    fam = parse_family(spec)
    if fam is not None:
        return make_family(fam)
    if any(spec.lower().startswith(f + ":") for f in FAMILIES):
        raise ParseError(f"malformed family literal {spec!r}; expected <family>:p=<float>")
    return read_state_file(spec)


def read_state_file(path) -> np.ndarray:
    text = _read_text(path)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object with fields basis, re, im")
    basis = obj.get("basis")
    if basis is None:
        raise ParseError(f"{path}: missing field 'basis'")
    if [b.strip() for b in str(basis).split(",")] != list(BASIS):
        raise ParseError(f"{path}: field 'basis' must be {','.join(BASIS)!r}, got {basis!r}")
    parts = []
    for name in ("re", "im"):
        if name not in obj:
            raise ParseError(f"{path}: missing field {name!r}")
        rows = obj[name]
        if not isinstance(rows, list) or len(rows) != 4 or any(not isinstance(r, list) or len(r) != 4 for r in rows):
            raise ParseError(f"{path}: field {name!r} must be a 4x4 array")
        parts.append(np.array([[_float(v, f"{path}: field {name!r}[{i}][{j}]") for j, v in enumerate(row)]
                               for i, row in enumerate(rows)]))
    return check_state(parts[0] + 1j * parts[1], name=str(path))


def write_state_file(path, rho) -> None:
    rho = np.asarray(rho, dtype=complex)
    obj = {"basis": ",".join(BASIS), "re": rho.real.tolist(), "im": rho.imag.tolist()}
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


# --- flat key-value / csv records -------------------------------------------

def format_record(record: dict, kind: str, style: str = "kv", precise: bool = True, header: dict | None = None) -> str:
    f = fmt if precise else fmt6
    lines = _header(kind, header) if precise else []
    if style == "csv":
        lines.append(",".join(record))
        lines.append(",".join(f(v) if not isinstance(v, str) else v for v in record.values()))
    else:
        lines.extend(f"{k}={f(v) if not isinstance(v, str) else v}" for k, v in record.items())
    return "\n".join(lines) + "\n"


def parse_record(text: str) -> dict:
    """Inverse of :func:`format_record` for either style; values stay strings."""
    _, body = _split_header(text, None)
    if body and "=" in body[0][1]:
        out = {}
        for lineno, line in body:
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError(f"line {lineno}: expected key=value, got {line!r}")
            out[key.strip()] = value.strip()
        return out
    if len(body) != 2:
        raise ParseError("csv record must have exactly one header row and one value row")
    keys = body[0][1].split(",")
    values = body[1][1].split(",")
    if len(keys) != len(values):
        raise ParseError(f"line {body[1][0]}: {len(values)} values for {len(keys)} keys")
    return dict(zip(keys, values))


# --- coincidence tables -----------------------------------------------------

_COINC_COLUMNS = ["i", "j", "mode", "b", "count", "shots"]


def write_coincidences(path, table: CoincidenceTable) -> None:
    buf = io.StringIO()
    buf.write("\n".join(_header("coincidences", {
        "r": fmt(table.r),
        "seed": "" if table.seed is None else table.seed,
        "projector_order": PROJECTOR_ORDER,
    })) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_COINC_COLUMNS)
    for k, s in enumerate(SETTINGS):
        for m, mode in enumerate(MODES):
            for b in range(4):
                w.writerow([s.i, s.j, mode, b + 1, int(table.counts[k, m, b]), int(table.shots[k, m])])
    Path(path).write_text(buf.getvalue())


def read_coincidences(path) -> CoincidenceTable:
    header, body = _split_header(_read_text(path), path)
    if header.get("projector_order", PROJECTOR_ORDER) != PROJECTOR_ORDER:
        raise ParseError(f"{path}: unsupported projector order {header['projector_order']!r}")
    if not body or body[0][1].split(",") != _COINC_COLUMNS:
        raise ParseError(f"{path}: expected column header {','.join(_COINC_COLUMNS)}")
    counts = np.full((len(SETTINGS), 2, 4), -1, dtype=np.int64)
    shots = np.zeros((len(SETTINGS), 2), dtype=np.int64)
    index = {s: k for k, s in enumerate(SETTINGS)}
    for rec, (lineno, line) in enumerate(body[1:], start=1):
        where = f"{path}: record {rec} (line {lineno})"
        f = line.split(",")
        if len(f) != 6:
            raise ParseError(f"{where}: expected 6 fields, got {len(f)}")
        s = (_int(f[0], where), _int(f[1], where))
        if s not in index:
            raise ParseError(f"{where}: invalid setting {s}")
        if f[2] not in MODES:
            raise ParseError(f"{where}: invalid mode {f[2]!r}")
        b = _int(f[3], where)
        if b not in (1, 2, 3, 4):
            raise ParseError(f"{where}: outcome index must be 1..4, got {b}")
        k, m = index[s], MODES.index(f[2])
        counts[k, m, b - 1] = _int(f[4], where)
        shots[k, m] = _int(f[5], where)
    if np.any(counts < 0):
        raise ParseError(f"{path}: table is missing records or has negative counts")
    r = _float(header.get("r", "nan"), f"{path}: header r")
    seed = header.get("seed") or None
    return CoincidenceTable(counts, shots, r, None if seed is None else _int(seed, f"{path}: header seed"))


# --- six-record R files -----------------------------------------------------

def write_six_records(path, R, sigma=None, kind: str = "measured-r", extra: dict | None = None) -> None:
    R = np.asarray(R, dtype=float)
    buf = io.StringIO()
    buf.write("\n".join(_header(kind, extra)) + "\n")
    buf.write("i,j,value,sigma\n" if sigma is not None else "i,j,value\n")
    for s in SETTINGS:
        row = [str(s.i), str(s.j), fmt(R[s.i - 1, s.j - 1])]
        if sigma is not None:
            row.append(fmt(np.asarray(sigma)[s.i - 1, s.j - 1]))
        buf.write(",".join(row) + "\n")
    Path(path).write_text(buf.getvalue())


def read_six_records(path, require_sigma: bool = True):
    """Returns ``(R, sigma or None, header)`` from a six-record file."""
    header, body = _split_header(_read_text(path), path)
    if not body:
        raise ParseError(f"{path}: no records")
    cols = body[0][1].split(",")
    if cols not in (["i", "j", "value", "sigma"], ["i", "j", "value"]):
        raise ParseError(f"{path}: expected column header i,j,value[,sigma], got {body[0][1]!r}")
    has_sigma = len(cols) == 4
    if require_sigma and not has_sigma:
        raise ParseError(f"{path}: records need a sigma column")
    R = np.full((3, 3), np.nan)
    sig = np.full((3, 3), np.nan)
    for rec, (lineno, line) in enumerate(body[1:], start=1):
        where = f"{path}: record {rec} (line {lineno})"
        f = line.split(",")
        if len(f) != len(cols):
            raise ParseError(f"{where}: expected {len(cols)} fields, got {len(f)}")
        i, j = _int(f[0], where), _int(f[1], where)
        if (i, j) not in SETTINGS:
            raise ParseError(f"{where}: indices must satisfy 1 <= j <= i <= 3, got ({i}, {j})")
        R[i - 1, j - 1] = R[j - 1, i - 1] = _float(f[2], where)
        if has_sigma:
            v = _float(f[3], where)
            if v <= 0:
                raise ParseError(f"{where}: sigma must be positive, got {v}")
            sig[i - 1, j - 1] = sig[j - 1, i - 1] = v
    if len(body) - 1 != len(SETTINGS) or np.isnan(R).any():
        raise ParseError(f"{path}: expected exactly six records (i >= j), got {len(body) - 1}")
    return R, (sig if has_sigma else None), header


def write_measured(path, m: MeasuredR, extra: dict | None = None) -> None:
    write_six_records(path, m.R, m.dR, "measured-r", extra)


def read_measured(path) -> MeasuredR:
    R, sig, _ = read_six_records(path, require_sigma=True)
    return MeasuredR(R, sig)


def write_ml_result(path, result, dR) -> None:
    extra = {
        "eigs": " ".join(fmt(v) for v in result.eigs),
        "logL": fmt(result.logL),
        "iterations": result.iterations,
        "shift_fraction": fmt(result.shift_fraction),
    }
    write_six_records(path, result.R_phys, dR, "ml-result", extra)


def read_ml_result(path) -> dict:
    R, sig, header = read_six_records(path, require_sigma=False)
    out = {"R_phys": R, "dR": sig}
    try:
        out["eigs"] = tuple(float(v) for v in header["eigs"].split())
        out["logL"] = float(header["logL"])
        out["iterations"] = int(header["iterations"])
        out["shift_fraction"] = float(header["shift_fraction"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: missing or malformed ML result field {exc}") from None
    return out


# --- scatter and curves -----------------------------------------------------

def write_table(path, columns: dict, kind: str, extra: dict | None = None) -> None:
    buf = io.StringIO()
    buf.write("\n".join(_header(kind, extra)) + "\n")
    names = list(columns)
    buf.write(",".join(names) + "\n")
    cols = [np.asarray(columns[n]) for n in names]
    for row in zip(*cols):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    Path(path).write_text(buf.getvalue())


def read_table(path) -> dict:
    header, body = _split_header(_read_text(path), path)
    if not body:
        raise ParseError(f"{path}: empty table")
    names = body[0][1].split(",")
    data = {n: [] for n in names}
    for rec, (lineno, line) in enumerate(body[1:], start=1):
        f = line.split(",")
        if len(f) != len(names):
            raise ParseError(f"{path}: record {rec} (line {lineno}): expected {len(names)} fields")
        for n, v in zip(names, f):
            data[n].append(_float(v, f"{path}: record {rec} field {n}"))
    return {n: np.array(v) for n, v in data.items()}
