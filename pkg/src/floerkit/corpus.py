"""Bundled instances and the script that regenerates the JSON corpus."""

from __future__ import annotations

import argparse
import json
from fractions import Fraction
from pathlib import Path

from floerkit.chambers import ChamberFamily
from floerkit.cobord import identity_cobordism, raise_cylinder, summand_projection, direct_sum
from floerkit.deltacx import DeltaComplex, make_complex
from floerkit.exactalg import QQ, ZZ
from floerkit.hinv import lens_h
from floerkit.io import Instance, corpus_dir, dumps
from floerkit.oracle import CWComplexData, MorseModel

RANDOM_MANIFEST = {
    "generator": "floerkit.oracle.generate_random_delta",
    "fields": [{"kind": "Fp", "p": 2}, {"kind": "Fp", "p": 3}, {"kind": "Q"}],
    "seeds": list(range(200)),
    "size": 24,
    "window": [-12, 12],
}


def s3(m) -> DeltaComplex:
    """S^3 in chamber m, derived from the empty complex in chamber 0."""
    return ChamberFamily(DeltaComplex.empty(0)).model(Fraction(m))


def poincare() -> DeltaComplex:
    # one generator at -2 carrying delta: zeta = 1, h = -1, reduced group 0
    return make_complex(0, [("a", -2)], delta={"a": 1})


def sigma237() -> DeltaComplex:
    # reduced group F in degree 0 (even), no tower interaction: h = 0
    return make_complex(0, [("x", 0)])


def lens(q: int, j: int) -> DeltaComplex:
    """Structure-theorem model: the empty complex in chamber h(L(q,1), s_j)."""
    return DeltaComplex.empty(lens_h(q, j))


def torsion_example(p: int = 2) -> DeltaComplex:
    # d a = p c, delta(a) = 1: HF^{-1}(Z) = Z/p in chamber 0
    return make_complex(0, [("a", -2), ("c", -1)], d={("c", "a"): p}, delta={"a": 1}, coeff=ZZ)


def reducible_summand_example() -> DeltaComplex:
    """S^3 (chamber 1) plus a two-generator reduced summand with nontrivial u."""
    A = s3(1)
    R = make_complex(1, [("y0", 0), ("y2", 2)], v={("y2", "y0"): 1})
    C, _ = direct_sum(A, R)
    return C


MORSE_MODELS = {
    "morse_n1": MorseModel(
        1,
        (("a", 0),),
        {},
        {"a": 1},
        None,
        CWComplexData((1,), (), "point"),
        "n = 1, one minimum flowing to the fixed point",
    ),
    "morse_n2": MorseModel(
        2,
        (("a", 0), ("b", 1), ("c", 2)),
        {("b", "a"): 1},
        {"c": 1},
        None,
        CWComplexData((1, 2, 2), (None, [[1, 1]], [[1, 1], [-1, -1]]), "relative cells"),
        "n = 2, a cancelling pair and one index-2 point",
    ),
    "morse_n2_free": MorseModel(
        2,
        (("c", 2),),
        {},
        {},
        None,
        CWComplexData((0, 0, 1), (), "one 2-cell"),
        "n = 2, index-2 point with no flow to the fixed point",
    ),
    "morse_n3": MorseModel(
        3,
        (("a", 0), ("b", 1), ("f", 2), ("c", 3), ("e", 4)),
        {("b", "a"): 1},
        {"e": 1},
        {("e", "f"): 1},
        CWComplexData((1, 1, 1, 1, 1), (None, [[1]], [[0]], [[0]], [[0]]), "relative cells"),
        "n = 3, u links the index-2 and index-4 points",
    ),
}


def build() -> dict[str, Instance]:
    out: dict[str, Instance] = {}
    for m in range(-2, 4):
        name = f"s3_m{m}" if m >= 0 else f"s3_mneg{-m}"
        out[name] = Instance(name, s3(m), QQ, "TRIVIAL", f"S^3 in chamber {m} (derived from the empty complex)", expected={"h": 0, "zeta": m})
    out["poincare"] = Instance(
        "poincare", poincare(), QQ, "PAPER", "Poincare sphere, oriented as the boundary of negative definite E8", expected={"h": -1}
    )
    out["sigma237"] = Instance(
        "sigma237", sigma237(), QQ, "DERIVED", "Sigma(2,3,7)-style model: reduced group F in degree 0", expected={"h": 0, "chi_hat": 1}
    )
    for q in (2, 3, 4):
        for j in range(q):
            name = f"lens_q{q}_s{j}"
            out[name] = Instance(
                name, lens(q, j), QQ, "PAPER", f"L({q},1), spin^c structure s_{j}", expected={"h": str(lens_h(q, j))}
            )
    S3 = s3(1)
    out["s1xs3"] = Instance(
        "s1xs3", S3, QQ, "PAPER", "S^1 x S^3 as the identity self-cobordism of S^3", identity_cobordism(S3), expected={"sw": 0}
    )
    S = sigma237()
    out["s1xsigma237"] = Instance(
        "s1xsigma237", S, QQ, "PAPER", "S^1 x Sigma(2,3,7) as the identity self-cobordism", identity_cobordism(S), expected={"sw": 1}
    )
    out["blowup"] = Instance(
        "blowup", S3, QQ, "DERIVED", "blow-up-type cobordism S^3 chamber 1 -> 2 (b+ = b1 = 0, k = 1)", raise_cylinder(S3)
    )
    R = reducible_summand_example()
    ridx = [i for i, lab in enumerate(R.labels) if lab.startswith("r.")]
    out["bplus_projection"] = Instance(
        "bplus_projection", R, QQ, "DERIVED", "b+ = 1 self-cobordism projecting onto a reduced summand", summand_projection(R, ridx)
    )
    out["torsion_z2"] = Instance(
        "torsion_z2", torsion_example(2), ZZ, "DERIVED", "integral model with 2-torsion in degree -1", expected={"h0": 0}
    )
    for name, M in MORSE_MODELS.items():
        from floerkit.oracle import morse_to_delta

        out[name] = Instance(name, morse_to_delta(M), QQ, "DERIVED", M.name, morse=M)
    return out


def write(target: Path | None = None) -> list[Path]:
    target = Path(target) if target else corpus_dir()
    target.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, inst in build().items():
        p = target / f"{name}.json"
        p.write_text(dumps(inst))
        paths.append(p)
    p = target / "random_manifest.json"
    p.write_text(json.dumps(RANDOM_MANIFEST, indent=1) + "\n")
    paths.append(p)
    return paths


def main(argv=None):
    ap = argparse.ArgumentParser(description="regenerate the bundled corpus")
    ap.add_argument("--dir", default=None)
    args = ap.parse_args(argv)
    for p in write(args.dir):
        print(p)


if __name__ == "__main__":
    main()
