"""CSV formats for step functions, spectra, atom manifests and reports.

Step functions and spectra share one layout::

    # walsh-lab stepfn dim=2 bits_x=3 bits_y=2
    v00,v01,v02,v03
    ...

1D files hold one value per line.  Numbers are written with 17
significant digits so they read back bit for bit.  All writers go through
a temporary file and an atomic rename, so a failure never leaves a
partial artifact behind.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from walsh_lab.dyadic import DyadicPoint, StepFn1, StepFn2
from walsh_lab.hardy import Atom, AtomicDecomposition
from walsh_lab.walsh import Spectrum1, Spectrum2

PathLike = Union[str, os.PathLike]
GridObject = Union[StepFn1, StepFn2, Spectrum1, Spectrum2]

MANIFEST_COLUMNS = ("mu", "p", "cube_level", "path")


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def _write_atomic(path: PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=".walsh-lab-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_grid(obj: GridObject) -> str:
    kind = "spectrum" if isinstance(obj, (Spectrum1, Spectrum2)) else "stepfn"
    data = obj.coeffs if kind == "spectrum" else obj.values
    if data.ndim == 1:
        header = f"# walsh-lab {kind} dim=1 bits_x={obj.bits}"
        lines = [fmt(v) for v in data]
    else:
        header = f"# walsh-lab {kind} dim=2 bits_x={obj.bits_x} bits_y={obj.bits_y}"
        lines = [",".join(fmt(v) for v in row) for row in data]
    return "\n".join([header, *lines]) + "\n"


def write_grid(obj: GridObject, path: PathLike) -> None:
    _write_atomic(path, render_grid(obj))


def _parse_header(line: str) -> tuple[str, dict[str, int]]:
    parts = line.strip().split()
    if len(parts) < 4 or parts[0] != "#" or parts[1] != "walsh-lab" or parts[2] not in ("stepfn", "spectrum"):
        raise ValueError(f"not a walsh-lab grid header: {line.strip()!r}")
    fields = {}
    for token in parts[3:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise ValueError(f"malformed header token {token!r}")
        fields[key] = int(value)
    return parts[2], fields


def parse_grid(text: str) -> GridObject:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty grid file")
    kind, fields = _parse_header(lines[0])
    dim = fields.get("dim")
    rows = [[float(tok) for tok in ln.split(",")] for ln in lines[1:]]
    if dim == 1:
        bits = fields["bits_x"]
        data = np.array([r[0] for r in rows]) if all(len(r) == 1 for r in rows) else None
        if data is None:
            raise ValueError("1D grid rows must hold one value each")
        return Spectrum1(bits, data) if kind == "spectrum" else StepFn1(bits, data)
    if dim == 2:
        bx, by = fields["bits_x"], fields["bits_y"]
        if any(len(r) != 1 << by for r in rows):
            raise ValueError(f"2D grid rows must hold {1 << by} values each")
        data = np.array(rows)
        return Spectrum2(bx, by, data) if kind == "spectrum" else StepFn2(bx, by, data)
    raise ValueError(f"unsupported dimension {dim!r}")


def read_grid(path: PathLike) -> GridObject:
    return parse_grid(Path(path).read_text())


def render_csv(rows: Iterable[Sequence], schema: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema)
    for row in rows:
        row = list(row)
        if len(row) != len(schema):
            raise ValueError(f"row has {len(row)} fields, schema has {len(schema)}")
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(rows: Iterable[Sequence], schema: Sequence[str], path: PathLike) -> None:
    """Header plus rows, 17 significant digits, byte-identical on re-run."""
    _write_atomic(path, render_csv(rows, schema))


def _support_corner(fn: StepFn2, level: int) -> tuple[DyadicPoint, DyadicPoint]:
    nz = np.argwhere(fn.values != 0)
    if len(nz) == 0:
        return DyadicPoint.zero(level), DyadicPoint.zero(level)
    i, j = nz[0]
    cx = DyadicPoint.from_cell(int(i) >> (fn.bits_x - level), level) if level else DyadicPoint(())
    cy = DyadicPoint.from_cell(int(j) >> (fn.bits_y - level), level) if level else DyadicPoint(())
    return cx, cy


def write_manifest(d: AtomicDecomposition, path: PathLike, atom_dir: PathLike | None = None) -> None:
    """One row per atom (mu, p, cube_level, path); atom grids go next to the manifest."""
    path = Path(path)
    atom_dir = Path(atom_dir) if atom_dir is not None else path.parent
    rows = []
    for idx, (mu, atom) in enumerate(d.entries):
        atom_path = atom_dir / f"{path.stem}_atom{idx}.csv"
        write_grid(atom.fn, atom_path)
        rel = os.path.relpath(atom_path, path.parent)
        rows.append((mu, atom.p, atom.cube_level, rel))
    emit_csv(rows, MANIFEST_COLUMNS, path)


def read_manifest(path: PathLike) -> AtomicDecomposition:
    """Inverse of :func:`write_manifest`; the cube corner is read off the support."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != MANIFEST_COLUMNS:
            raise ValueError(f"manifest header must be {','.join(MANIFEST_COLUMNS)}")
        entries = []
        for row in reader:
            if not row:
                continue
            mu, p, level, rel = row
            fn = read_grid(path.parent / rel)
            if not isinstance(fn, StepFn2):
                raise ValueError(f"atom {rel} is not a 2D step function")
            level = int(level)
            entries.append((float(mu), Atom(fn, level, _support_corner(fn, level), float(p))))
    return AtomicDecomposition(tuple(entries))


def is_manifest(path: PathLike) -> bool:
    with Path(path).open() as fh:
        return fh.readline().strip() == ",".join(MANIFEST_COLUMNS)
