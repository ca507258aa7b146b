"""Deterministic JSON encoding (17-significant-digit floats) and the wire
formats for groups, measures, representations, functions, and channels.

Floats are emitted with %.17g so a serialise/parse round trip is bit exact
for every double; complex numbers are [re, im] pairs.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ValidationError
from .groups import FiniteGroup, ProbabilityMeasure, make_group
from .reps import PositiveDefiniteFunction, UnitaryRep
from .channels import QuantumChannel


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValidationError("cannot serialise non-finite floats")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _emit(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{format_float(obj.real)},{format_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_emit(x) for x in obj) + "]"
    if isinstance(obj, dict):
        parts = (f"{json.dumps(str(key))}:{_emit(value)}" for key, value in obj.items())
        return "{" + ",".join(parts) + "}"
    raise ValidationError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return _emit(obj)


def complex_matrix_to_obj(matrix: np.ndarray):
    matrix = np.asarray(matrix, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def complex_matrix_from_obj(obj) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in obj])


def complex_vector_to_obj(vector: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in np.asarray(vector, dtype=complex)]


def complex_vector_from_obj(obj) -> np.ndarray:
    return np.array([complex(re, im) for re, im in obj])


def group_to_obj(group: FiniteGroup) -> dict:
    return {"order": group.order,
            "table": group.table.tolist(),
            "labels": group.labels,
            "name": group.name}


def group_from_obj(obj) -> FiniteGroup:
    if isinstance(obj, str):
        return make_group(obj)
    return FiniteGroup(obj["table"], labels=obj.get("labels"),
                       name=obj.get("name"), validate=True)


def measure_to_obj(mu: ProbabilityMeasure) -> dict:
    return {"group": group_to_obj(mu.group), "weights": mu.weights.tolist()}


def measure_from_obj(obj) -> ProbabilityMeasure:
    return ProbabilityMeasure(group_from_obj(obj["group"]), obj["weights"])


def rep_to_obj(rep: UnitaryRep) -> dict:
    return {"group": group_to_obj(rep.group), "dim": rep.dim,
            "matrices": [complex_matrix_to_obj(m) for m in rep.matrices]}


def rep_from_obj(obj) -> UnitaryRep:
    group = group_from_obj(obj["group"])
    mats = np.stack([complex_matrix_from_obj(m) for m in obj["matrices"]])
    return UnitaryRep(group, mats, validate=True)


def pdf_to_obj(pdf: PositiveDefiniteFunction) -> dict:
    return {"group": group_to_obj(pdf.group),
            "values": complex_vector_to_obj(pdf.values)}


def pdf_from_obj(obj) -> PositiveDefiniteFunction:
    return PositiveDefiniteFunction(group_from_obj(obj["group"]),
                                    complex_vector_from_obj(obj["values"]))


def channel_to_obj(channel: QuantumChannel) -> dict:
    return {"dim_in": channel.dim_in, "dim_out": channel.dim_out,
            "kraus": [complex_matrix_to_obj(a) for a in channel.kraus]}


def channel_from_obj(obj) -> QuantumChannel:
    kraus = np.stack([complex_matrix_from_obj(a) for a in obj["kraus"]])
    channel = QuantumChannel(kraus)
    if channel.dim_in != obj["dim_in"] or channel.dim_out != obj["dim_out"]:
        raise ValidationError("declared channel dimensions do not match the Kraus shapes")
    return channel
