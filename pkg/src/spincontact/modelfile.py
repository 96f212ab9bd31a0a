"""Line-oriented model and boundary-condition file format.

Grammar (one statement per line, '#' starts a comment, blank lines ignored):

    key = value            scalar assignment
    matrix NAME            opens a matrix block; each following line is one
    <row>                  row of whitespace-separated complex entries
    ...                    written as  re,im  with no interior whitespace
    end                    closes the block

Recognized keys for a model file: n, N, statistics (boson|fermion), a, c,
seed, coupling (spin_half_params|explicit), and for the spin-half form the
parameter keys a_d, b_d, f_d, g_d (real) and c_x, e1, e2 (complex, written
re,im).  Matrix blocks: coupling (n^2 rows of n^2 entries, required when
coupling = explicit) and separated_G (optional).  A boundary-condition file
carries n plus the four blocks A, B, C, D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .errors import ModelFileError, ValidationError
from .models import (
    BlockBC,
    CouplingMatrix,
    SeparatedModel,
    SpinHalfParams,
    spin_half_coupling,
)
from .tensor_algebra import SpinConfig, Statistics

_REAL_KEYS = {"a", "c", "a_d", "b_d", "f_d", "g_d"}
_COMPLEX_KEYS = {"c_x", "e1", "e2"}
_INT_KEYS = {"n", "N", "seed"}
_STR_KEYS = {"statistics", "coupling"}


def _parse_complex(token: str, line_no: int, column: int) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise ModelFileError(
            f"complex entry {token!r} must be re,im", line=line_no, column=column
        )
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise ModelFileError(
            f"bad complex entry {token!r}", line=line_no, column=column
        ) from None


@dataclass
class RawDocument:
    """Scalars and matrix blocks of one parsed file, before interpretation."""

    scalars: Dict[str, str] = field(default_factory=dict)
    scalar_lines: Dict[str, int] = field(default_factory=dict)
    matrices: Dict[str, np.ndarray] = field(default_factory=dict)


def parse_document(text: str) -> RawDocument:
    doc = RawDocument()
    block_name: Optional[str] = None
    block_rows: List[List[complex]] = []
    block_start = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if block_name is not None:
            if line == "end":
                if not block_rows:
                    raise ModelFileError(
                        f"matrix {block_name!r} is empty", line=line_no
                    )
                width = len(block_rows[0])
                for off, row in enumerate(block_rows):
                    if len(row) != width:
                        raise ModelFileError(
                            f"matrix {block_name!r} has ragged rows",
                            line=block_start + 1 + off,
                        )
                doc.matrices[block_name] = np.array(block_rows, dtype=complex)
                block_name = None
                block_rows = []
                continue
            row = []
            col = 1
            for token in line.split():
                row.append(_parse_complex(token, line_no, col))
                col += len(token) + 1
            block_rows.append(row)
            continue
        if line.startswith("matrix"):
            parts = line.split()
            if len(parts) != 2:
                raise ModelFileError("matrix block needs exactly one name", line=line_no)
            block_name = parts[1]
            if block_name in doc.matrices:
                raise ModelFileError(
                    f"duplicate matrix block {block_name!r}", line=line_no
                )
            block_rows = []
            block_start = line_no
            continue
        if "=" not in line:
            raise ModelFileError(f"expected key = value, got {line!r}", line=line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ModelFileError(f"malformed assignment {line!r}", line=line_no)
        if key in doc.scalars:
            raise ModelFileError(f"duplicate key {key!r}", line=line_no)
        doc.scalars[key] = value
        doc.scalar_lines[key] = line_no
    if block_name is not None:
        raise ModelFileError(f"matrix {block_name!r} is missing its 'end'",
                             line=block_start)
    return doc


@dataclass(frozen=True)
class ModelFile:
    """Interpreted model description ready to build domain objects from."""

    n: int
    N: int
    statistics: Statistics
    coupling: CouplingMatrix
    spin_half_params: Optional[SpinHalfParams]
    separated: Optional[SeparatedModel]
    a: float
    c: float
    seed: int

    def spin_config(self, dim_cap: int = 4096) -> SpinConfig:
        return SpinConfig(N=self.N, n=self.n, statistics=self.statistics,
                          dim_cap=dim_cap)


def _get_scalar(doc: RawDocument, key: str, kind: str, default=None):
    if key not in doc.scalars:
        if default is None:
            raise ModelFileError(f"missing required key {key!r}")
        return default
    raw = doc.scalars[key]
    line = doc.scalar_lines[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "real":
            return float(raw)
        if kind == "complex":
            return _parse_complex(raw, line, 1)
        return raw
    except ValueError:
        raise ModelFileError(f"bad {kind} value {raw!r} for {key!r}", line=line) from None


def parse_model(text: str) -> ModelFile:
    doc = parse_document(text)
    for key in doc.scalars:
        if key not in _REAL_KEYS | _COMPLEX_KEYS | _INT_KEYS | _STR_KEYS:
            raise ModelFileError(f"unknown key {key!r}", line=doc.scalar_lines[key])
    n = _get_scalar(doc, "n", "int")
    N = _get_scalar(doc, "N", "int")
    statistics = Statistics.from_string(doc.scalars.get("statistics", "boson"))
    a = _get_scalar(doc, "a", "real", default=1.0)
    c = _get_scalar(doc, "c", "real", default=0.0)
    seed = _get_scalar(doc, "seed", "int", default=0)
    kind = doc.scalars.get("coupling", "explicit")
    params = None
    try:
        if kind == "spin_half_params":
            if n != 2:
                raise ModelFileError(
                    "coupling = spin_half_params requires n = 2",
                    line=doc.scalar_lines.get("coupling"),
                )
            params = SpinHalfParams(
                a_d=_get_scalar(doc, "a_d", "real", default=0.0),
                b_d=_get_scalar(doc, "b_d", "real", default=0.0),
                f_d=_get_scalar(doc, "f_d", "real", default=0.0),
                g_d=_get_scalar(doc, "g_d", "real", default=0.0),
                c_x=_get_scalar(doc, "c_x", "complex", default=0j),
                e1=_get_scalar(doc, "e1", "complex", default=0j),
                e2=_get_scalar(doc, "e2", "complex", default=0j),
            )
            coupling = spin_half_coupling(params)
        elif kind == "explicit":
            if "coupling" not in doc.matrices:
                raise ModelFileError(
                    "coupling = explicit requires a 'matrix coupling' block"
                )
            coupling = CouplingMatrix(n=n, entries=doc.matrices["coupling"])
        else:
            raise ModelFileError(
                f"unknown coupling kind {kind!r}",
                line=doc.scalar_lines.get("coupling"),
            )
        separated = None
        if "separated_G" in doc.matrices:
            separated = SeparatedModel.uniform(doc.matrices["separated_G"])
            if separated.dim != n * n:
                raise ModelFileError(
                    f"separated_G must be {n * n} x {n * n}"
                )
    except ValidationError as exc:
        raise ModelFileError(str(exc)) from exc
    return ModelFile(n=n, N=N, statistics=statistics, coupling=coupling,
                     spin_half_params=params, separated=separated,
                     a=a, c=c, seed=seed)


def parse_block_bc(text: str) -> BlockBC:
    """Read a boundary-condition file with blocks A, B, C, D."""
    doc = parse_document(text)
    missing = [name for name in "ABCD" if name not in doc.matrices]
    if missing:
        raise ModelFileError(f"missing matrix blocks: {', '.join(missing)}")
    try:
        return BlockBC(A=doc.matrices["A"], B=doc.matrices["B"],
                       C=doc.matrices["C"], D=doc.matrices["D"])
    except ValidationError as exc:
        raise ModelFileError(str(exc)) from exc


def format_complex(z: complex) -> str:
    return f"{z.real:.17g},{z.imag:.17g}"


def format_matrix_block(name: str, matrix: np.ndarray) -> str:
    lines = [f"matrix {name}"]
    for row in np.asarray(matrix, dtype=complex):
        lines.append(" ".join(format_complex(z) for z in row))
    lines.append("end")
    return "\n".join(lines)


def write_model(model: ModelFile) -> str:
    """Serialize a model back to the file format (explicit coupling block)."""
    lines = [
        f"n = {model.n}",
        f"N = {model.N}",
        f"statistics = {model.statistics.value}",
        f"a = {model.a:.17g}",
        f"c = {model.c:.17g}",
        f"seed = {model.seed}",
        "coupling = explicit",
        format_matrix_block("coupling", model.coupling.entries),
    ]
    if model.separated is not None:
        lines.append(format_matrix_block("separated_G", model.separated.G_plus))
    return "\n".join(lines) + "\n"
