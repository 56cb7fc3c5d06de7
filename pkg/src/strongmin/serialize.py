"""JSON problem and result files.

Complex matrices are nested lists of ``[re, im]`` pairs.  Floats are written
with Python's shortest round-trip repr, so parsing a written file gives back
the identical doubles.
"""
import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .linearize import LinearSystemMatrix
from .polyrat import LaurentTail, PolyMatrix, RationalMatrix, StateSpaceTriple, as_structure

FORMAT_VERSION = 1
_BLOCKS = ("A0", "A1", "B0", "B1", "C0", "C1", "D0", "D1")


class ProblemFormatError(InputError):
    """Malformed problem or result file; the message names the field."""


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def matrix_from_json(data, shape=None, where="matrix"):
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{where}: entries must be [re, im] number pairs ({exc})") from None
    if arr.size == 0 and shape is not None and 0 in tuple(shape):
        return np.zeros(shape, dtype=complex)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ProblemFormatError(f"{where}: expected a matrix of [re, im] pairs, got array shape {arr.shape}")
    M = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and M.shape != tuple(shape):
        raise ProblemFormatError(f"{where}: shape {M.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(M)):
        raise ProblemFormatError(f"{where}: non-finite entries")
    return M


@dataclass
class ProblemFile:
    kind: str
    rows: int
    cols: int
    structure: str = "none"
    poly_coeffs: list = field(default_factory=list)
    laurent_tail: Optional[list] = None
    state_space: Optional[dict] = None
    options: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "kind": self.kind,
            "rows": self.rows,
            "cols": self.cols,
            "structure": self.structure,
            "poly_coeffs": [matrix_to_json(M) for M in self.poly_coeffs],
        }
        if self.laurent_tail is not None:
            d["laurent_tail"] = [matrix_to_json(M) for M in self.laurent_tail]
        if self.state_space is not None:
            d["state_space"] = {k: matrix_to_json(self.state_space[k]) for k in "AEBC"}
        d["options"] = dict(self.options)
        return d

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ProblemFormatError("top level: expected an object")
        for key in ("kind", "rows", "cols", "poly_coeffs"):
            if key not in d:
                raise ProblemFormatError(f"missing field {key!r}")
        kind = d["kind"]
        if kind not in ("polynomial", "rational"):
            raise ProblemFormatError(f"kind: expected 'polynomial' or 'rational', got {kind!r}")
        try:
            rows, cols = int(d["rows"]), int(d["cols"])
        except (TypeError, ValueError):
            raise ProblemFormatError("rows/cols: expected integers") from None
        structure = d.get("structure", "none") or "none"
        try:
            as_structure(structure)
        except InputError as exc:
            raise ProblemFormatError(f"structure: {exc}") from None
        if not isinstance(d["poly_coeffs"], list):
            raise ProblemFormatError("poly_coeffs: expected a list of matrices")
        coeffs = [matrix_from_json(M, (rows, cols), f"poly_coeffs[{i}]") for i, M in enumerate(d["poly_coeffs"])]
        tail = d.get("laurent_tail")
        ss = d.get("state_space")
        if kind == "polynomial" and (tail is not None or ss is not None):
            raise ProblemFormatError("a polynomial problem cannot carry laurent_tail or state_space")
        if tail is not None and ss is not None:
            raise ProblemFormatError("give at most one of laurent_tail and state_space")
        if tail is not None:
            tail = [matrix_from_json(M, (rows, cols), f"laurent_tail[{i}]") for i, M in enumerate(tail)]
        if ss is not None:
            if not isinstance(ss, dict) or any(k not in ss for k in "AEBC"):
                raise ProblemFormatError("state_space: expected an object with A, E, B, C")
            ss = {k: matrix_from_json(ss[k], None, f"state_space.{k}") for k in "AEBC"}
        options = d.get("options") or {}
        if not isinstance(options, dict):
            raise ProblemFormatError("options: expected an object")
        return cls(kind, rows, cols, structure, coeffs, tail, ss, options)

    def rational(self):
        """The RationalMatrix this file describes."""
        P = PolyMatrix(self.poly_coeffs, rows=self.rows, cols=self.cols)
        sp = None
        try:
            if self.laurent_tail is not None:
                sp = LaurentTail(self.laurent_tail)
            elif self.state_space is not None:
                sp = StateSpaceTriple(**self.state_space)
            return RationalMatrix(P, sp)
        except InputError as exc:
            raise ProblemFormatError(str(exc)) from None


def canonical_json(d):
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def digest(d):
    return hashlib.sha256(canonical_json(d).encode()).hexdigest()


def load_json(path):
    """Parse a JSON file; decoding errors become ProblemFormatError with line and column."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_problem(path):
    return ProblemFile.from_dict(load_json(path))


def write_json(path, d):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d, fh, indent=1, allow_nan=False)
        fh.write("\n")


def pencil_to_json(L):
    return {"state_dim": L.p, "rows": L.m, "cols": L.n,
            "blocks": {k: matrix_to_json(getattr(L, k)) for k in _BLOCKS}}


def pencil_from_json(d):
    try:
        p, m, n = int(d["state_dim"]), int(d["rows"]), int(d["cols"])
        raw = d["blocks"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemFormatError(f"result: missing or bad pencil field ({exc})") from None
    shapes = {"A0": (p, p), "A1": (p, p), "B0": (p, n), "B1": (p, n),
              "C0": (m, p), "C1": (m, p), "D0": (m, n), "D1": (m, n)}
    blocks = {}
    for k in _BLOCKS:
        if k not in raw:
            raise ProblemFormatError(f"blocks.{k} missing")
        blocks[k] = matrix_from_json(raw[k], shapes[k], f"blocks.{k}")
    return LinearSystemMatrix(**blocks)
