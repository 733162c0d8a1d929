"""Knot files, report files and profile CSV.

Knot and report files are JSON. Floats are written with ``repr`` so every number
round-trips exactly and identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, KnotFileError, UnsupportedFeatureError
from .knot import CurveProfile, PolyKnot, check_vertices

KNOT_FORMAT_VERSION = 1
REPORT_TOLERANCE = 1e-12


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _loads(text):
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise KnotFileError(f"not UTF-8: {exc.reason}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise KnotFileError(exc.msg, exc.lineno, exc.colno) from None


# -- knot files -------------------------------------------------------------------


def serialize_knot(K: PolyKnot) -> bytes:
    doc = {
        "version": KNOT_FORMAT_VERSION,
        "closed": True,
        "vertices": [[float(c) for c in v] for v in K.vertices],
    }
    if K.metadata:
        doc["metadata"] = K.metadata
    return _dumps(doc).encode("utf-8")


def parse_knot_file(data) -> PolyKnot:
    """Parse and validate a knot file.

    Raises :class:`KnotFileError` for syntax errors (with line and column) and
    invariant violations, and :class:`UnsupportedFeatureError` for open curves.
    """
    doc = _loads(data)
    if not isinstance(doc, dict):
        raise KnotFileError("top level must be an object")
    missing = [k for k in ("version", "closed", "vertices") if k not in doc]
    if missing:
        raise KnotFileError(f"missing field(s): {', '.join(missing)}")
    if doc["version"] != KNOT_FORMAT_VERSION or isinstance(doc["version"], bool):
        raise KnotFileError(f"unsupported version {doc['version']!r}; expected {KNOT_FORMAT_VERSION}")
    if doc["closed"] is not True:
        if doc["closed"] is False:
            raise UnsupportedFeatureError("open curves (closed=false) are not supported")
        raise KnotFileError("field 'closed' must be a boolean")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise KnotFileError("field 'metadata' must be an object")
    verts = doc["vertices"]
    if not isinstance(verts, list):
        raise KnotFileError("field 'vertices' must be an array")
    for i, v in enumerate(verts):
        if (not isinstance(v, list) or len(v) != 3
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
            raise KnotFileError(f"vertex {i} must be an array of 3 numbers")
    return _validated(np.array(verts, dtype=float).reshape(-1, 3), metadata)


def _validated(X, metadata) -> PolyKnot:
    try:
        check_vertices(X)
        return PolyKnot(X, metadata)
    except DomainError as exc:
        raise KnotFileError(f"invalid knot: {exc}") from None


def parse_xyz(data) -> PolyKnot:
    """Read bare ``x y z`` lines; blank lines and ``#`` comments are skipped."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        fields = body.replace(",", " ").split()
        if len(fields) != 3:
            raise KnotFileError(f"expected 3 coordinates, found {len(fields)}", lineno, 1)
        row = []
        for tok in fields:
            try:
                row.append(float(tok))
            except ValueError:
                raise KnotFileError(f"not a number: {tok!r}", lineno, body.index(tok) + 1) from None
        rows.append(row)
    return _validated(np.array(rows, dtype=float).reshape(-1, 3), {})


def read_knot(path) -> PolyKnot:
    """Read a knot file, falling back to the ``x y z`` format for non-JSON text."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data.lstrip()[:1] == b"{":
        return parse_knot_file(data)
    return parse_xyz(data)


# -- report files -----------------------------------------------------------------


def _key(p: float) -> str:
    return str(int(p)) if float(p).is_integer() else repr(float(p))


@dataclass
class EnergyReport:
    """Length, thickness, ropelength and per-exponent energies of one curve."""

    length: float
    thickness: float
    ropelength: float
    energies: dict = field(default_factory=dict)
    gradient_norm: dict = field(default_factory=dict)
    trajectory: list | None = None

    def validate(self):
        expected = self.length / self.thickness
        if not math.isclose(self.ropelength, expected, rel_tol=REPORT_TOLERANCE):
            raise DomainError(f"ropelength {self.ropelength!r} differs from length/thickness {expected!r}")
        for p, e in self.energies.items():
            if e > self.ropelength:
                raise DomainError(f"energy at p={p} exceeds the ropelength ({e!r} > {self.ropelength!r})")
        return self

    def to_dict(self) -> dict:
        doc = {
            "length": self.length,
            "thickness": self.thickness,
            "ropelength": self.ropelength,
            "energies": {_key(p): v for p, v in self.energies.items()},
            "gradient_norm": {_key(p): v for p, v in self.gradient_norm.items()},
        }
        if self.trajectory is not None:
            doc["trajectory"] = self.trajectory
        return doc


def serialize_report(report: EnergyReport) -> bytes:
    return _dumps(report.validate().to_dict()).encode("utf-8")


def parse_report(data) -> EnergyReport:
    doc = _loads(data)
    try:
        rep = EnergyReport(
            length=float(doc["length"]),
            thickness=float(doc["thickness"]),
            ropelength=float(doc["ropelength"]),
            energies={float(k): float(v) for k, v in doc["energies"].items()},
            gradient_norm={float(k): (None if v is None else float(v)) for k, v in doc["gradient_norm"].items()},
            trajectory=doc.get("trajectory"),
        )
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise KnotFileError(f"malformed report: {exc}") from None
    return rep.validate()


# -- profile CSV ------------------------------------------------------------------


def emit_profile_csv(profile: CurveProfile) -> bytes:
    """``s,kappa,torsion`` rows with 17 significant digits and LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "kappa", "torsion"])
    for row in zip(profile.s, profile.kappa, profile.torsion):
        w.writerow([f"{float(v):.16e}" for v in row])
    return buf.getvalue().encode("utf-8")


def parse_profile_csv(data) -> CurveProfile:
    """Inverse of :func:`emit_profile_csv`; the total length is not stored and is set to ``nan``."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    rows = list(csv.reader(io.StringIO(data)))
    if not rows or rows[0] != ["s", "kappa", "torsion"]:
        raise KnotFileError("profile CSV must start with the header s,kappa,torsion", 1, 1)
    try:
        A = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, 3)
    except ValueError as exc:
        raise KnotFileError(f"bad profile row: {exc}") from None
    return CurveProfile(A[:, 0], A[:, 1], A[:, 2], math.nan)
