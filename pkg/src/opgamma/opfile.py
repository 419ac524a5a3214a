"""JSON operator files.

Matrix::

    {"name": "...", "kind": "matrix", "rows": 2, "cols": 2,
     "data": [[[re, im], [re, im]], [[re, im], [re, im]]]}

Lazy operator::

    {"name": "...", "kind": "diagonal" | "forward_shift" | "backward_shift",
     "prefix": [[re, im], ...],
     "tail": {"type": "zero"}
           | {"type": "constant", "value": [re, im]}
           | {"type": "formula", "num": [c0, c1, ...], "den": [d0, ...],
              "limit": number | "inf" | "-inf",
              "direction": "decreasing" | "increasing",
              "maps": [["bounded"], ["reciprocal"], ["affine", a, b]]}}

``maps`` is optional and only written for tails produced by transforms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import ValidationError
from .lazy_ops import ConstantTail, FormulaTail, Kind, LazyOperator, SequenceSpec, ZeroTail
from .matrix_ops import as_matrix

Operator = Union[np.ndarray, LazyOperator]


class ParseError(ValueError):
    """The file is not valid JSON or does not follow the operator schema."""


@dataclass(frozen=True)
class OperatorFile:
    operator: Operator
    name: str = ""
    description: str = ""

    @property
    def is_matrix(self) -> bool:
        return isinstance(self.operator, np.ndarray)


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _parse_cx(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise ParseError(f"expected [re, im], got {v!r}")


def _num(x):
    if isinstance(x, str):
        if x in ("inf", "+inf"):
            return math.inf
        if x == "-inf":
            return -math.inf
        raise ParseError(f"bad number {x!r}")
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"bad number {x!r}")
    return float(x)


def _limit_json(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def matrix_to_json(A) -> list:
    return [[_cx(z) for z in row] for row in np.asarray(A)]


def tail_to_dict(t) -> dict:
    if isinstance(t, ZeroTail):
        return {"type": "zero"}
    if isinstance(t, ConstantTail):
        return {"type": "constant", "value": _cx(t.value)}
    d = {
        "type": "formula",
        "num": list(t.num),
        "den": list(t.den),
        "limit": _limit_json(t.limit),
        "direction": t.direction,
    }
    if t.maps:
        d["maps"] = [list(m) for m in t.maps]
    return d


def operator_to_dict(op: Operator, name: str = "", description: str = "") -> dict:
    if isinstance(op, LazyOperator):
        d = {
            "name": name,
            "kind": op.kind.value,
            "prefix": [_cx(w) for w in op.weights.prefix],
            "tail": tail_to_dict(op.weights.tail),
        }
    else:
        A = as_matrix(op)
        d = {"name": name, "kind": "matrix", "rows": A.shape[0], "cols": A.shape[1], "data": matrix_to_json(A)}
    if description:
        d["description"] = description
    return d


def _parse_tail(d) -> object:
    if not isinstance(d, dict) or "type" not in d:
        raise ParseError("tail must be an object with a 'type'")
    kind = d["type"]
    if kind == "zero":
        return ZeroTail()
    if kind == "constant":
        return ConstantTail(_parse_cx(d["value"]))
    if kind == "formula":
        try:
            maps = tuple(
                (m[0],) + tuple(_num(x) for x in m[1:]) for m in d.get("maps", [])
            )
            return FormulaTail(
                tuple(_num(c) for c in d["num"]),
                tuple(_num(c) for c in d["den"]),
                _num(d["limit"]),
                d["direction"],
                maps,
            )
        except KeyError as exc:
            raise ParseError(f"formula tail is missing {exc}") from exc
    raise ParseError(f"unknown tail type {kind!r}")


def operator_from_dict(d: dict) -> OperatorFile:
    """Build an :class:`OperatorFile`; raises :class:`ParseError` on schema problems.

    Mathematical consistency (monotone tails, finite entries) is left to
    :class:`~opgamma.core.ValidationError` raised by the operations.
    """
    if not isinstance(d, dict):
        raise ParseError("operator file must contain a JSON object")
    kind = d.get("kind")
    name = d.get("name", "")
    desc = d.get("description", "")
    try:
        if kind == "matrix":
            rows, cols, data = d["rows"], d["cols"], d["data"]
            if not isinstance(data, list) or len(data) != rows or any(
                not isinstance(r, list) or len(r) != cols for r in data
            ):
                raise ParseError(f"data does not match rows={rows}, cols={cols}")
            A = np.array([[_parse_cx(v) for v in r] for r in data], dtype=complex)
            return OperatorFile(as_matrix(A), name, desc)
        if kind in {k.value for k in Kind}:
            prefix = tuple(_parse_cx(v) for v in d.get("prefix", []))
            spec = SequenceSpec(prefix, _parse_tail(d.get("tail", {"type": "zero"})))
            return OperatorFile(LazyOperator(Kind(kind), spec), name, desc)
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from exc
    except ValidationError:
        raise
    except (TypeError, IndexError) as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown operator kind {kind!r}")


def loads(text: str) -> OperatorFile:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return operator_from_dict(d)


def dumps(op: Operator, name: str = "", description: str = "") -> str:
    return json.dumps(operator_to_dict(op, name, description), indent=2)


def load(path) -> OperatorFile:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(path, op: Operator, name: str = "", description: str = "") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(op, name, description))
        fh.write("\n")
