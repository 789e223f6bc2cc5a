"""JSON frame-spec documents (schema version 1).

Layout::

    {
      "schema_version": 1,
      "field_tag": "complex",          # or "real"
      "ambient_dim": 2,
      "members": [
        {"weight": 2.0,
         "subspace_basis": [[[1.0, 0.0]], [[0.0, 0.0]]],
         "operator": [[[1.0, 0.0], [0.0, 0.0]]]}
      ],
      "operators": {"K": [...], "V": [...]},   # optional named matrices with n rows
      "member_maps": [[...], ...]              # optional, one m_j x m_j per member
    }

Matrices are row-major lists of rows; each entry is an ``[re, im]`` pair (a bare
number is accepted when ``field_tag`` is ``"real"``).  Floats are written with
Python's shortest round-trip repr, so dump/parse is exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from gfusion.errors import InvalidFamily, NotOrthonormal, ParseError, ValidationError
from gfusion.frames import FrameMember, GFusionFamily
from gfusion.linalg import check_orthonormal

SCHEMA_VERSION = 1

__all__ = ["FrameSpecDocument", "parse_spec", "dump_spec", "load_spec", "SCHEMA_VERSION"]


@dataclass(frozen=True, eq=False)
class FrameSpecDocument:
    schema_version: int
    field_tag: str
    family: GFusionFamily
    operators: dict = field(default_factory=dict)
    member_maps: list | None = None

    @property
    def ambient_dim(self) -> int:
        return self.family.ambient_dim

    def operator(self, key) -> np.ndarray:
        try:
            return self.operators[key]
        except KeyError:
            raise KeyError(f"spec has no operator named {key!r}") from None


def _number(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValidationError(path, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise ValidationError(path, "non-finite number")
    return float(x)


def _entry(x, path, real):
    if isinstance(x, list):
        if len(x) != 2:
            raise ValidationError(path, "complex entry must be an [re, im] pair")
        re, im = _number(x[0], path + "[0]"), _number(x[1], path + "[1]")
        if real and im != 0.0:
            raise ValidationError(path, "nonzero imaginary part in a real document")
        return complex(re, im)
    if real:
        return complex(_number(x, path))
    raise ValidationError(path, "complex documents need [re, im] entries")


def _matrix(obj, path, real, rows=None, cols=None):
    if not isinstance(obj, list):
        raise ValidationError(path, "matrix must be a list of rows")
    if rows is not None and len(obj) != rows:
        raise ValidationError(path, f"row count {len(obj)}, expected {rows}")
    width = None
    out = []
    for i, row in enumerate(obj):
        rpath = f"{path}[{i}]"
        if not isinstance(row, list):
            raise ValidationError(rpath, "row must be a list")
        if width is None:
            width = len(row)
        if len(row) != width or (cols is not None and len(row) != cols):
            expected = cols if cols is not None else width
            raise ValidationError(path, f"row {i} length {len(row)}, expected {expected}")
        out.append([_entry(x, f"{rpath}[{k}]", real) for k, x in enumerate(row)])
    if not out:
        raise ValidationError(path, "matrix has no rows")
    return np.array(out, dtype=np.complex128).reshape(len(out), width or 0)


def parse_spec(text) -> FrameSpecDocument:
    """Parse and validate a spec document; errors name the first bad path."""
    if hasattr(text, "read"):
        text = text.read()
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    field_tag = doc.get("field_tag", "complex")
    if field_tag not in ("complex", "real"):
        raise ValidationError("field_tag", f"must be 'complex' or 'real', got {field_tag!r}")
    real = field_tag == "real"
    n = doc.get("ambient_dim")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValidationError("ambient_dim", f"must be a positive integer, got {n!r}")
    raw_members = doc.get("members")
    if not isinstance(raw_members, list) or not raw_members:
        raise ValidationError("members", "must be a nonempty list")

    members = []
    for j, raw in enumerate(raw_members):
        base = f"members[{j}]"
        if not isinstance(raw, dict):
            raise ValidationError(base, "member must be an object")
        for key in ("weight", "subspace_basis", "operator"):
            if key not in raw:
                raise ValidationError(f"{base}.{key}", "missing")
        weight = _number(raw["weight"], f"{base}.weight")
        if weight <= 0:
            raise ValidationError(f"{base}.weight", f"must be positive, got {weight!r}")
        basis = _matrix(raw["subspace_basis"], f"{base}.subspace_basis", real, rows=n)
        try:
            check_orthonormal(basis)
        except NotOrthonormal as exc:
            raise ValidationError(f"{base}.subspace_basis", f"columns not orthonormal ({exc})") from None
        op = _matrix(raw["operator"], f"{base}.operator", real, cols=n)
        try:
            members.append(FrameMember(basis, op, weight))
        except InvalidFamily as exc:
            raise ValidationError(base, str(exc)) from None
    family = GFusionFamily(tuple(members), n)

    operators = {}
    raw_ops = doc.get("operators", {})
    if not isinstance(raw_ops, dict):
        raise ValidationError("operators", "must be an object")
    for key, mat in raw_ops.items():
        operators[key] = _matrix(mat, f"operators.{key}", real, rows=n)

    member_maps = None
    if "member_maps" in doc:
        raw_maps = doc["member_maps"]
        if not isinstance(raw_maps, list) or len(raw_maps) != len(members):
            raise ValidationError("member_maps", f"expected {len(members)} matrices")
        member_maps = [
            _matrix(mat, f"member_maps[{j}]", real, rows=m.codomain_dim, cols=m.codomain_dim)
            for j, (mat, m) in enumerate(zip(raw_maps, members))
        ]
    return FrameSpecDocument(version, field_tag, family, operators, member_maps)


def load_spec(path) -> FrameSpecDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def _encode(M):
    M = np.asarray(M, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def dump_spec(family: GFusionFamily, operators=None, member_maps=None, field_tag=None) -> str:
    arrays = [m.subspace_basis for m in family] + [m.operator for m in family]
    arrays += list((operators or {}).values()) + list(member_maps or [])
    if field_tag is None:
        field_tag = "real" if all(not np.any(np.asarray(a).imag) for a in arrays) else "complex"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "field_tag": field_tag,
        "ambient_dim": family.ambient_dim,
        "members": [
            {
                "weight": m.weight,
                "subspace_basis": _encode(m.subspace_basis),
                "operator": _encode(m.operator),
            }
            for m in family
        ],
    }
    if operators:
        doc["operators"] = {k: _encode(v) for k, v in operators.items()}
    if member_maps is not None:
        doc["member_maps"] = [_encode(T) for T in member_maps]
    return json.dumps(doc, indent=1) + "\n"
