"""JSON problem descriptions and reports.

Complex numbers are ``[re, im]`` pairs (plain numbers are accepted on
input); matrices are row-major nested lists.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .ccpgen import CcpGenerator, LindbladForm, assemble_lindblad
from .cpmap import CpMap, NotCompletelyPositive
from .densemat import DEFAULT_TOL, PreconditionError, Tolerance
from .subalg import (
    CommutativeSubalgebra,
    StarAlgebra,
    block_algebra,
    diagonal_masa,
    from_generators,
    full_algebra,
    masa_from_hermitian,
    masa_in_basis,
    span_closure,
)


class SpecError(ValueError):
    """Malformed problem description; the message names the offending field."""


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def encode_matrix(a) -> list:
    a = np.asarray(a)
    if a.ndim == 0:
        return encode_complex(a)
    return [encode_matrix(row) for row in a]


def encode_real(a) -> list:
    return np.round(np.real(np.asarray(a)).astype(float), 15).tolist()


def _decode_scalar(x, where: str) -> complex:
    if isinstance(x, bool):
        raise SpecError(f"{where}: expected a number, got a boolean")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise SpecError(f"{where}: expected a number or an [re, im] pair, got {json.dumps(x)}")


def decode_matrix(x, where: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise SpecError(f"{where}: expected a matrix as a list of rows")
    rows = [[_decode_scalar(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(x)]
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise SpecError(f"{where}: rows have different lengths {sorted(widths)}")
    a = np.array(rows, dtype=complex)
    if shape is not None and a.shape != shape:
        raise SpecError(f"{where}: shape mismatch, expected {shape[0]}x{shape[1]} for dim, got {a.shape[0]}x{a.shape[1]}")
    return a


def _matrix_list(x, where: str, n: int) -> list[np.ndarray]:
    if not isinstance(x, list):
        raise SpecError(f"{where}: expected a list of matrices")
    return [decode_matrix(m, f"{where}[{k}]", (n, n)) for k, m in enumerate(x)]


@dataclass(eq=False)
class ProblemSpec:
    dim: int
    kind: str
    obj: CpMap | CcpGenerator
    subalgebra: CommutativeSubalgebra
    ambient: StarAlgebra
    raw: dict = field(repr=False, default_factory=dict)


def _parse_ambient(x, n: int, tol: Tolerance) -> StarAlgebra:
    if x is None or x == "full" or x == {"kind": "full"}:
        return full_algebra(n)
    if isinstance(x, dict) and "blocks" in x:
        sizes = x["blocks"]
        if not isinstance(sizes, list) or not all(isinstance(s, int) and s > 0 for s in sizes):
            raise SpecError("ambient.blocks: expected a list of positive integers")
        if sum(sizes) != n:
            raise SpecError(f"ambient.blocks: block sizes sum to {sum(sizes)}, dim is {n}")
        return block_algebra(sizes)
    if isinstance(x, dict) and "generators" in x:
        return span_closure(_matrix_list(x["generators"], "ambient.generators", n), n, tol)
    raise SpecError("ambient: expected 'full', {'blocks': [...]} or {'generators': [...]}")


def _parse_subalgebra(x, n: int, tol: Tolerance, seed: int) -> CommutativeSubalgebra:
    if x == "diagonal" or x == {"kind": "diagonal"}:
        return diagonal_masa(n)
    if not isinstance(x, dict):
        raise SpecError("subalgebra: expected 'diagonal' or an object")
    try:
        if "diagonal_in_basis" in x:
            return masa_in_basis(decode_matrix(x["diagonal_in_basis"], "subalgebra.diagonal_in_basis", (n, n)))
        if "hermitian_generator" in x:
            return masa_from_hermitian(decode_matrix(x["hermitian_generator"], "subalgebra.hermitian_generator", (n, n)), tol)
        if "generators" in x:
            return from_generators(_matrix_list(x["generators"], "subalgebra.generators", n), n, tol, seed)
    except PreconditionError as err:
        raise SpecError(f"subalgebra: {err}") from err
    raise SpecError("subalgebra: expected one of diagonal, diagonal_in_basis, hermitian_generator, generators")


def _parse_object(x, n: int, tol: Tolerance):
    if not isinstance(x, dict):
        raise SpecError("object: expected an object")
    kind = x.get("kind")
    if kind not in ("cp_map", "generator"):
        raise SpecError(f"object.kind: expected 'cp_map' or 'generator', got {json.dumps(kind)}")
    given = [k for k in ("kraus", "superop", "lindblad") if k in x]
    if len(given) != 1:
        raise SpecError("object: exactly one of kraus, superop, lindblad is required")
    if "kraus" in x:
        t = CpMap.from_kraus(_matrix_list(x["kraus"], "object.kraus", n), n)
        return kind, t if kind == "cp_map" else CcpGenerator.from_cp(t)
    if "superop" in x:
        s = decode_matrix(x["superop"], "object.superop", (n * n, n * n))
        if kind == "cp_map":
            try:
                return kind, CpMap.from_superop(s, tol)
            except (NotCompletelyPositive, PreconditionError) as err:
                raise SpecError(f"object.superop: {err}") from err
        try:
            return kind, CcpGenerator.from_superop(s, tol)
        except PreconditionError as err:
            raise SpecError(f"object.superop: {err}") from err
    if kind == "cp_map":
        raise SpecError("object.lindblad: a cp_map cannot be given in Lindblad form")
    lb = x["lindblad"]
    if not isinstance(lb, dict):
        raise SpecError("object.lindblad: expected {'h': matrix, 'kraus': [...]}")
    h = decode_matrix(lb["h"], "object.lindblad.h", (n, n)) if "h" in lb else np.zeros((n, n), dtype=complex)
    if np.linalg.norm(h - h.conj().T) > tol.threshold(np.linalg.norm(h)):
        raise SpecError("object.lindblad.h: hamiltonian must be Hermitian")
    kraus = _matrix_list(lb.get("kraus", []), "object.lindblad.kraus", n)
    form = LindbladForm(h=h, kraus=np.array(kraus, dtype=complex).reshape(-1, n, n))
    return kind, assemble_lindblad(form)


def parse_spec(data: dict, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> ProblemSpec:
    if not isinstance(data, dict):
        raise SpecError("top level: expected a JSON object")
    n = data.get("dim")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SpecError(f"dim: expected a positive integer, got {json.dumps(n)}")
    if "object" not in data:
        raise SpecError("object: missing")
    kind, obj = _parse_object(data["object"], n, tol)
    ambient = _parse_ambient(data.get("ambient"), n, tol)
    sub = _parse_subalgebra(data.get("subalgebra", "diagonal"), n, tol, seed)
    return ProblemSpec(dim=n, kind=kind, obj=obj, subalgebra=sub, ambient=ambient, raw=data)


def load_spec(path, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> ProblemSpec:
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SpecError(f"line {err.lineno}, column {err.colno}: {err.msg}") from err
    return parse_spec(data, tol, seed)


@dataclass
class Report:
    """Outcome of a CLI command; every verdict is paired with residuals."""

    command: str
    verdicts: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    decompositions: dict = field(default_factory=dict)
    classical: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for section in ("verdicts", "residuals", "classical", "decompositions", "certificates"):
            body = getattr(self, section)
            if not body:
                continue
            lines.append(f"[{section}]")
            for key in sorted(body):
                lines.append(f"  {key}: {_fmt(body[key])}")
        lines.append(f"tolerance: abs={self.tolerance.get('abs_eps')} rel={self.tolerance.get('rel_eps')}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        lines.append(f"exit: {self.exit_code}")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    return json.dumps(v)
