"""JSON instance files.

Rationals are {"num": p, "den": q} with q > 0 and gcd 1; matrices are
row-major integer arrays.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from floerkit.cobord import CobordismData, Topology
from floerkit.deltacx import DeltaComplex
from floerkit.exactalg import QQ, ZZ, Coefficients, frac
from floerkit.oracle import CWComplexData, MorseModel

FORMAT = "floerkit-instance/1"


class ParseError(ValueError):
    pass


def rat(x) -> dict:
    x = frac(x)
    return {"num": x.numerator, "den": x.denominator}


def unrat(obj) -> Fraction:
    if isinstance(obj, dict):
        num, den = obj["num"], obj["den"]
        if den <= 0:
            raise ParseError("denominator must be positive")
        f = Fraction(num, den)
        if f.denominator != den:
            raise ParseError(f"{num}/{den} is not in lowest terms")
        return f
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Fraction(obj)
    raise ParseError(f"expected a rational, got {obj!r}")


def coeff_to_json(K: Coefficients) -> dict:
    return {"kind": "Fp", "p": K.p} if K.kind == "Fp" else {"kind": K.kind}


def coeff_from_json(obj) -> Coefficients:
    kind = obj.get("kind", "Q")
    if kind == "Fp":
        return Coefficients.prime_field(int(obj["p"]))
    if kind == "Z":
        return ZZ
    if kind == "Q":
        return QQ
    raise ParseError(f"unknown coefficient kind {kind!r}")


def _matrix(M) -> list:
    return [[int(x) for x in row] for row in np.asarray(M, dtype=object).tolist()]


def _vector(x) -> list:
    return [int(t) for t in np.asarray(x, dtype=object).tolist()]


def _square(rows, n, what):
    if n == 0:
        return ZZ.zeros(0, 0)
    A = np.array(rows, dtype=object)
    if A.shape != (n, n):
        raise ParseError(f"{what} must be {n} x {n}, got shape {A.shape}")
    return ZZ.asarray(A)


def _rect(rows, r, c, what):
    if r == 0 or c == 0:
        return ZZ.zeros(r, c)
    A = np.array(rows, dtype=object)
    if A.shape != (r, c):
        raise ParseError(f"{what} must be {r} x {c}, got shape {A.shape}")
    return ZZ.asarray(A)


def _vec(x, n, what):
    if x is None:
        return ZZ.zeros(n)
    A = np.array(x, dtype=object).reshape(-1) if n else ZZ.zeros(0)
    if A.shape != (n,):
        raise ParseError(f"{what} must have length {n}")
    return ZZ.asarray(A) if n else A


def complex_to_json(C: DeltaComplex) -> dict:
    return {
        "chamber": rat(C.chamber),
        "generators": [{"label": l, "degree": rat(q)} for l, q in zip(C.labels, C.degrees)],
        "d": _matrix(C.d),
        "v": _matrix(C.v),
        "delta": _vector(C.delta),
        "delta_prime": _vector(C.delta_prime),
    }


def complex_from_json(obj, coeff: Coefficients = QQ) -> DeltaComplex:
    gens = obj.get("generators", [])
    n = len(gens)
    try:
        return DeltaComplex(
            unrat(obj["chamber"]),
            tuple(g["label"] for g in gens),
            tuple(unrat(g["degree"]) for g in gens),
            _square(obj.get("d", []), n, "d"),
            _square(obj.get("v", []), n, "v"),
            _vec(obj.get("delta"), n, "delta"),
            _vec(obj.get("delta_prime"), n, "delta_prime"),
            coeff,
        )
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed complex: {e}") from e


def cobordism_to_json(W: CobordismData) -> dict:
    out = {
        "topology": {**W.topology.to_json(), "c1sq": rat(W.topology.c1sq)},
        "Wsharp": _matrix(W.Wsharp),
        "deltaW": _vector(W.deltaW),
        "deltaW_prime": _vector(W.deltaW_prime),
        "phi": _matrix(W.phi),
        "name": W.name,
    }
    # the source is always the instance's own complex
    out["source"] = "self"
    out["target"] = "self" if W.target is W.source else complex_to_json(W.target)
    return out


def cobordism_from_json(obj, C: DeltaComplex) -> CobordismData:
    coeff = C.coeff
    src = C if obj.get("source", "self") == "self" else complex_from_json(obj["source"], coeff)
    tgt = src if obj.get("target", "self") == "self" else complex_from_json(obj["target"], coeff)
    t = obj.get("topology", {})
    top = Topology(int(t.get("b1", 0)), int(t.get("bplus", 0)), int(t.get("b2", 0)), int(t.get("sigma", 0)), unrat(t.get("c1sq", 0)))
    return CobordismData(
        src,
        tgt,
        _rect(obj.get("Wsharp", []), tgt.n, src.n, "Wsharp"),
        top,
        _vec(obj.get("deltaW"), src.n, "deltaW"),
        _vec(obj.get("deltaW_prime"), tgt.n, "deltaW_prime"),
        _rect(obj.get("phi", []), tgt.n, src.n, "phi") if obj.get("phi") is not None else None,
        obj.get("name", ""),
    )


def cw_to_json(X: CWComplexData) -> dict:
    return {"cells": list(X.cells), "boundary": [_matrix(B) for B in X.boundary], "name": X.name}


def cw_from_json(obj) -> CWComplexData:
    cells = tuple(int(c) for c in obj["cells"])
    bd = []
    for k, rows in enumerate(obj.get("boundary", [])):
        if k == 0:
            bd.append(ZZ.zeros(0, cells[0]))
            continue
        bd.append(_rect(rows, cells[k - 1], cells[k], f"boundary[{k}]"))
    return CWComplexData(cells, tuple(bd), obj.get("name", ""))


def morse_to_json(M: MorseModel) -> dict:
    return {
        "n": M.n,
        "points": [[l, i] for l, i in M.points],
        "differential": [[t, s, int(x)] for (t, s), x in M.differential.items()],
        "flows_to_p": {l: int(x) for l, x in M.flows_to_p.items()},
        "v": [[t, s, int(x)] for (t, s), x in (M.v or {}).items()],
        "cw": None if M.cw is None else cw_to_json(M.cw),
        "name": M.name,
    }


def morse_from_json(obj) -> MorseModel:
    return MorseModel(
        int(obj["n"]),
        tuple((p[0], int(p[1])) for p in obj["points"]),
        {(t, s): int(x) for t, s, x in obj.get("differential", [])},
        {l: int(x) for l, x in obj.get("flows_to_p", {}).items()},
        {(t, s): int(x) for t, s, x in obj.get("v", [])} or None,
        None if obj.get("cw") is None else cw_from_json(obj["cw"]),
        obj.get("name", ""),
    )


@dataclass
class Instance:
    name: str
    complex: DeltaComplex
    coeff: Coefficients = QQ
    provenance: str = ""
    description: str = ""
    cobordism: CobordismData | None = None
    morse: MorseModel | None = None
    expected: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def instance_to_json(I: Instance) -> dict:
    out = {
        "format": FORMAT,
        "name": I.name,
        "provenance": I.provenance,
        "description": I.description,
        "coefficients": coeff_to_json(I.coeff),
        "complex": complex_to_json(I.complex),
    }
    if I.cobordism is not None:
        out["cobordism"] = cobordism_to_json(I.cobordism)
    if I.morse is not None:
        out["morse"] = morse_to_json(I.morse)
    if I.expected:
        out["expected"] = I.expected
    out.update(I.extra)
    return out


_SCHEMA = None


def schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = json.loads(resources.files("floerkit").joinpath("schema/instance.json").read_text())
    return _SCHEMA


def instance_from_json(obj, check_schema: bool = True) -> Instance:
    if check_schema:
        try:
            jsonschema.validate(obj, schema())
        except jsonschema.ValidationError as e:
            raise ParseError(f"schema: {e.message}") from e
    if obj.get("format") != FORMAT:
        raise ParseError(f"unsupported format {obj.get('format')!r}")
    K = coeff_from_json(obj.get("coefficients", {"kind": "Q"}))
    C = complex_from_json(obj["complex"], K)
    known = {"format", "name", "provenance", "description", "coefficients", "complex", "cobordism", "morse", "expected"}
    return Instance(
        obj.get("name", ""),
        C,
        K,
        obj.get("provenance", ""),
        obj.get("description", ""),
        cobordism_from_json(obj["cobordism"], C) if "cobordism" in obj else None,
        morse_from_json(obj["morse"]) if "morse" in obj else None,
        obj.get("expected", {}),
        {k: v for k, v in obj.items() if k not in known},
    )


def dumps(I: Instance) -> str:
    return json.dumps(instance_to_json(I), indent=1, sort_keys=False) + "\n"


def corpus_dir() -> Path:
    env = os.environ.get("FLOERKIT_CORPUS")
    if env:
        return Path(env)
    return Path(str(resources.files("floerkit").joinpath("corpus")))


def resolve(path: str) -> Path:
    """A file path, or a corpus entry named by its basename (with or without .json)."""
    p = Path(path)
    for cand in (p, p.with_name(p.name + ".json")):
        if cand.is_file():
            return cand
    base = p.name if p.suffix == ".json" else p.name + ".json"
    cand = corpus_dir() / base
    if cand.is_file():
        return cand
    raise FileNotFoundError(f"no instance file {path!r} (also looked in {corpus_dir()})")


def load(path: str, check_schema: bool = True) -> Instance:
    p = resolve(path)
    try:
        obj = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{p}: {e}") from e
    return instance_from_json(obj, check_schema)


def save(I: Instance, path) -> None:
    Path(path).write_text(dumps(I))


def same_complex(A: DeltaComplex, B: DeltaComplex) -> bool:
    """Degreewise equality of all data."""
    if A.chamber != B.chamber or A.labels != B.labels or A.degrees != B.degrees:
        return False
    return all(np.array_equal(x, y) for x, y in ((A.d, B.d), (A.v, B.v), (A.delta, B.delta), (A.delta_prime, B.delta_prime)))
