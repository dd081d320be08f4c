"""Command line front end.

Exit codes: 0 success, 1 validation failure, 2 I/O or parse error,
3 unsupported case.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction

import numpy as np

from floerkit import io
from floerkit.chambers import (
    ChamberError,
    derive_chamber,
    equivariant_groups,
    fundamental_sequence,
    h_invariant,
)
from floerkit.cobord import (
    CobordismError,
    Mod2GradedEndo,
    UnsupportedCase,
    hat_endo,
    induced_maps,
    lefschetz,
    sw_trace,
    validate_cobordism,
)
from floerkit.deltacx import (
    InconsistencyError,
    ValidationError,
    cohomology,
    dualize,
    euler_characteristics,
    validate,
    zeta,
)
from floerkit.exactalg import QQ, Coefficients, MalformedComplexError, fmt, frac
from floerkit.hinv import (
    BoundarySpec,
    DiagonalLattice,
    LatticeError,
    char_vector_max,
    froyshov_check,
    lens_h_table,
    negative_definite_e8,
)
from floerkit.oracle import (
    OracleError,
    generate_random_delta,
    morse_agreement,
    mv_splice,
    random_family,
    spectral_flow,
)

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_UNSUPPORTED = 0, 1, 2, 3


class Failure(Exception):
    """Computation ran but a checked property failed (exit 1)."""


def _coeff(char) -> Coefficients | None:
    if char is None:
        return None
    return Coefficients.from_characteristic(int(char))


def _table(rows, headers) -> str:
    rows = [[str(x) for x in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    for r in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(out)


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, dict):
        return {str(_jsonable(k)) if not isinstance(k, str) else k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _package(inst: io.Instance, char=None):
    K = _coeff(char)
    if K is None:
        K = inst.coeff if inst.coeff.is_field else QQ
    return cohomology(inst.complex, K)


# -- subcommands -----------------------------------------------------------------------------


def cmd_validate(args):
    inst = io.load(args.file)
    rep = validate(inst.complex)
    rows = [[c.name, "OK" if c.ok else "FAIL", "" if c.ok else str(c.offending[:3])] for c in rep.checks]
    text = f"{inst.name}: {inst.complex!r}\n" + _table(rows, ["relation", "status", "offending"])
    report = {"command": "validate", "name": inst.name, **rep.to_json()}
    if inst.cobordism is not None:
        crep = validate_cobordism(inst.cobordism)
        text += "\n\ncobordism\n" + _table([[c.name, c.ok, c.detail] for c in crep.checks], ["check", "ok", "detail"])
        report["cobordism"] = crep.to_json()
        if not crep.ok:
            return text, report, EXIT_INVALID
    return text, report, EXIT_OK if rep.ok else EXIT_INVALID


def cmd_cohom(args):
    inst = io.load(args.file)
    K = _coeff(args.char)
    if K is None:
        K = inst.coeff
    P = cohomology(inst.complex, K)
    rows = []
    data = {}
    for q in inst.complex.degree_set():
        s = P.summary(q)
        if s is None:
            continue
        label = str(s) if not isinstance(s, int) else f"{K}^{s}" if s else "0"
        if isinstance(s, int) and s == 1:
            label = str(K)
        rows.append([fmt(q), P.parity(q), label])
        data[fmt(q)] = label
    text = f"HF^*({inst.name}, m = {fmt(P.chamber)}; {K})\n" + _table(rows, ["degree", "ind2", "group"])
    report = {"command": "cohom", "name": inst.name, "chamber": fmt(P.chamber), "coefficients": str(K), "groups": data}
    if K.is_field:
        ed = euler_characteristics(P)
        z = zeta(P)
        text += f"\nzeta = {z}, h = {fmt(P.chamber - z)}, chi = {ed.chi}, chi_hat = {ed.chi_hat}, lambda~ = {fmt(ed.lambda_tilde)}"
        report.update({"zeta": z, "h": fmt(P.chamber - z), **ed.to_json()})
    return text, report, EXIT_OK


def cmd_chambers(args):
    inst = io.load(args.file)
    P = _package(inst, args.char)
    m0 = P.chamber
    target = frac(args.to)
    lo, hi = (target, m0) if target < m0 else (m0, target)
    rows, data = [], {}
    m = lo
    while m <= hi:
        Q = derive_chamber(P, m)
        groups = {fmt(q): Q.dim(q) for q in Q.degrees() if Q.dim(q)}
        z = zeta(Q)
        ed = euler_characteristics(Q)
        rows.append([fmt(m), ", ".join(f"{k}:{v}" for k, v in groups.items()) or "0", z, fmt(ed.lambda_tilde)])
        data[fmt(m)] = {"groups": groups, "zeta": z, "lambda_tilde": fmt(ed.lambda_tilde)}
        m += 1
    text = _table(rows, ["chamber", "HF (degree:dim)", "zeta", "lambda~"])
    return text, {"command": "chambers", "name": inst.name, "chambers": data}, EXIT_OK


def cmd_equivariant(args):
    inst = io.load(args.file)
    P = _package(inst, args.char)
    lo, hi = (args.window or [-12, 12])
    E = equivariant_groups(P, frac(lo), frac(hi))
    text = "\n".join(
        [
            f"HF-under : {E.under.describe(frac(lo), frac(hi))}",
            f"HF-bar   : {E.over.describe(frac(lo), frac(hi))}",
            f"reduced  : {', '.join(f'{fmt(q)}:{E.reduced.dim(q)}' for q in E.reduced.degrees()) or '0'}",
            f"h        : {fmt(E.h)}",
        ]
    )
    report = {
        "command": "equivariant",
        "name": inst.name,
        "under": E.under.to_json(frac(lo), frac(hi)),
        "over": E.over.to_json(frac(lo), frac(hi)),
        "reduced": {fmt(q): E.reduced.dim(q) for q in E.reduced.degrees()},
        "h": fmt(E.h),
    }
    return text, report, EXIT_OK


def cmd_fundseq(args):
    inst = io.load(args.file)
    P = _package(inst, args.char)
    lo, hi = args.window or [-12, 12]
    F = fundamental_sequence(P, (frac(lo), frac(hi)))
    bad = [r for r in F.exactness if not r.ok]
    rows = [[fmt(r.degree), r.term, r.ker_dim, r.im_dim, "OK" if r.ok else "FAIL"] for r in F.exactness if r.ker_dim or r.im_dim or not r.ok]
    text = _table(rows, ["degree", "term", "dim ker", "dim im", "status"])
    text += f"\nexact: {F.exact}; u-equivariant: {F.u_commutes}; lowest D degree: {fmt(F.lowest_D_degree)}; 2h = {fmt(2 * F.h)}"
    text += f"\noutside window: {F.note}"
    report = {
        "command": "fundseq",
        "name": inst.name,
        "window": [fmt(frac(lo)), fmt(frac(hi))],
        "exact": F.exact,
        "u_commutes": F.u_commutes,
        "lowest_D_degree": fmt(F.lowest_D_degree),
        "h": fmt(F.h),
        "failures": [{"degree": fmt(r.degree), "term": r.term} for r in bad],
    }
    return text, report, EXIT_OK if F.ok else EXIT_INVALID


def cmd_hinv(args):
    inst = io.load(args.file)
    char = 0 if args.char is None else args.char
    P = _package(inst, char)
    h = h_invariant(P)
    z = zeta(P)
    text = f"h_{char}({inst.name}) = {fmt(h)}   (chamber {fmt(P.chamber)}, zeta = {z})"
    return text, {"command": "hinv", "name": inst.name, "char": char, "h": fmt(h), "zeta": z}, EXIT_OK


def cmd_dual(args):
    inst = io.load(args.file)
    D = dualize(inst.complex)
    P, Pd = _package(inst, args.char), cohomology(D, _coeff(args.char) or (inst.coeff if inst.coeff.is_field else QQ))
    z, zd = zeta(P), zeta(Pd)
    h, hd = P.chamber - z, Pd.chamber - zd
    ok = zd == -z and hd == -h
    text = f"dual of {inst.name}: chamber {fmt(D.chamber)}, zeta {z} -> {zd}, h {fmt(h)} -> {fmt(hd)}; h(C) + h(dual) = {fmt(h + hd)}"
    dual_inst = io.Instance(inst.name + "_dual", D, inst.coeff, "DERIVED", "dual complex")
    report = {"command": "dual", "name": inst.name, "zeta": z, "zeta_dual": zd, "h": fmt(h), "h_dual": fmt(hd), "ok": ok, "instance": io.instance_to_json(dual_inst)}
    return text, report, EXIT_OK if ok else EXIT_INVALID


def _require_cobordism(inst):
    if inst.cobordism is None:
        raise io.ParseError(f"{inst.name} carries no cobordism data")
    return inst.cobordism


def cmd_cobord_validate(args):
    inst = io.load(args.file)
    W = _require_cobordism(inst)
    rep = validate_cobordism(W)
    rows = [[c.name, {True: "OK", False: "FAIL", None: "n/a"}[c.ok], c.detail] for c in rep.checks]
    text = _table(rows, ["check", "status", "detail"]) + f"\nd = {fmt(rep.d)}, k = {fmt(rep.k)}, homotopy sign: {rep.homotopy_sign}"
    return text, {"command": "cobord-validate", "name": inst.name, **rep.to_json()}, EXIT_OK if rep.ok else EXIT_INVALID


def cmd_lefschetz(args):
    if args.even is not None or args.odd is not None:
        f = Mod2GradedEndo(np.array(json.loads(args.even or "[]"), dtype=object), np.array(json.loads(args.odd or "[]"), dtype=object))
        L = lefschetz(f)
        return f"L = {fmt(L)}", {"command": "lefschetz", "L": fmt(L)}, EXIT_OK
    if args.file is None:
        raise io.ParseError("give an instance file or --even/--odd blocks")
    inst = io.load(args.file)
    W = _require_cobordism(inst)
    maps = induced_maps(W)
    L = lefschetz(hat_endo(maps, 0))
    return f"L(psi-hat({inst.name})) = {fmt(L)}", {"command": "lefschetz", "name": inst.name, "L": fmt(L)}, EXIT_OK


def cmd_sw(args):
    inst = io.load(args.file)
    W = _require_cobordism(inst)
    L = sw_trace(W, args.n)
    return f"SW = L(u^{args.n} psi-hat) = {fmt(L)}", {"command": "sw", "name": inst.name, "n": args.n, "sw": fmt(L)}, EXIT_OK


def cmd_froyshov(args):
    comps = [(f"Y{i + 1}", frac(h)) for i, h in enumerate(args.h or [])]
    if args.file:
        inst = io.load(args.file)
        P = _package(inst, 0)
        comps.append((inst.name, h_invariant(P)))
    if not comps:
        raise io.ParseError("give at least one boundary h-value (--h) or an instance file")
    sigma = -args.b2 if args.sigma is None else args.sigma
    B = BoundarySpec(tuple(comps), args.b2, sigma, frac(args.c1sq))
    r = froyshov_check(B)
    rel = "=" if r.equality else (">" if r.satisfied else "<")
    text = f"-sum h = {fmt(r.lhs)} {rel} {fmt(r.rhs)} = (b2 + c1^2)/8 : {'satisfied' if r.satisfied else 'violated'}"
    if not r.negative_definite:
        text += " (form not negative definite: no constraint)"
    ok = r.satisfied or not r.negative_definite
    return text, {"command": "froyshov", **r.to_json()}, EXIT_OK if ok else EXIT_INVALID


def cmd_lens(args):
    if args.q < 2:
        raise io.ParseError("--q must be at least 2")
    t = lens_h_table(args.q)
    rows = [[j, fmt(h)] for j, h in enumerate(t)]
    text = f"h(L({args.q},1), s_j)\n" + _table(rows, ["j", "h"])
    return text, {"command": "lens", "q": args.q, "h": [fmt(h) for h in t]}, EXIT_OK


def cmd_obstruct(args):
    spec = args.lattice
    if spec.startswith("diag:"):
        L = DiagonalLattice(int(spec.split(":", 1)[1]))
        n = L.n
    elif spec == "e8":
        L = negative_definite_e8()
        n = 8
    else:
        try:
            with open(spec) as fh:
                L = np.array(json.load(fh), dtype=np.int64)
        except (OSError, ValueError) as e:
            raise io.ParseError(f"cannot read Gram matrix {spec!r}: {e}") from e
        n = L.shape[0]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = char_vector_max(L, args.bound)
    text = f"max (n + c.c)/8 over characteristic c = {fmt(r.value)} (rank {n}, c = {list(r.vector)})"
    if r.value > 0:
        text += "\npositive: no integral homology sphere with h = 0 bounds this form"
    for w in caught:
        text += f"\nwarning: {w.message}"
    report = {"command": "obstruct", "value": fmt(r.value), "vector": list(r.vector), "exhaustive": r.exhaustive, "bound": r.bound}
    return text, report, EXIT_OK


def cmd_oracle_mv(args):
    if args.file:
        inst = io.load(args.file)
        if inst.morse is None:
            raise io.ParseError(f"{inst.name} has no Morse payload")
        a = morse_agreement(inst.morse)
        rows = [[q, a.floer[q], a.splice[q], "OK" if a.floer[q] == a.splice[q] else "FAIL"] for q in sorted(a.floer)]
        text = _table(rows, ["degree", "HF-bar", "H_T", "status"]) + f"\nisomorphism ranges: {a.ranges_ok}"
        report = {"command": "oracle-mv", "name": inst.name, "agrees": a.agrees, "floer": a.floer, "splice": a.splice}
        return text, report, EXIT_OK if a.agrees else EXIT_INVALID
    n = args.n
    hb = {}
    for item in (args.hb or "").split(","):
        if item.strip():
            q, d = item.split(":")
            hb[int(q)] = int(d)
    r = mv_splice(n, hb, (0, 2 * n + 6))
    rows = [[q, r.dims[q], r.first_iso[q], r.second_iso[q]] for q in sorted(r.dims)]
    text = _table(rows, ["degree", "dim H_T", "iso to H(B*,B0)", "iso to H(CP^inf)"]) + f"\nranges hold: {r.ranges_ok}"
    return text, {"command": "oracle-mv", **r.to_json(), "ranges_ok": r.ranges_ok}, EXIT_OK if r.ranges_ok else EXIT_INVALID


def cmd_oracle_specflow(args):
    rows, data, bad = [], [], 0
    for s in range(args.seed, args.seed + args.count):
        fam, barrier, split = random_family(s)
        sf = spectral_flow(fam, barrier)
        additive = None
        if split is not None:
            a, b = fam.interval
            additive = spectral_flow(fam.restrict(a, split)).value + spectral_flow(fam.restrict(split, b)).value == sf.value
        ok = sf.barrier_ok and additive is not False
        bad += not ok
        rows.append([s, sf.value, sf.n_a, sf.n_b, sf.barrier_ok, additive])
        data.append({"seed": s, "sf": sf.value, "n_a": sf.n_a, "n_b": sf.n_b, "barrier_ok": sf.barrier_ok, "additive": additive})
    text = _table(rows, ["seed", "SF", "n_a", "n_b", "SF = n_b - n_a", "additive"])
    return text, {"command": "oracle-specflow", "families": data, "ok": bad == 0}, EXIT_OK if bad == 0 else EXIT_INVALID


def cmd_gen(args):
    K = _coeff(args.char) or QQ
    C = generate_random_delta(args.seed, size=args.size, coeff=K)
    inst = io.Instance(f"random_{args.seed}", C, K, "DERIVED", f"generate_random_delta(seed={args.seed}, size={args.size})")
    doc = io.instance_to_json(inst)
    return json.dumps(doc, indent=1), {"command": "gen", "instance": doc}, EXIT_OK


# -- parser ----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="floerkit", description="exact computations with delta-complexes")
    ap.add_argument("--out", help="write the machine-readable report (JSON) to this file")
    ap.add_argument("--json", action="store_true", help="print the machine-readable report instead of the table")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, file=True, char=False, optional_file=False):
        p = sub.add_parser(name)
        if file:
            p.add_argument("file", nargs="?" if optional_file else None)
        if char:
            p.add_argument("--char", type=int, default=None, help="0 for Q, a prime p for F_p")
        p.set_defaults(fn=fn)
        return p

    add("validate", cmd_validate)
    add("cohom", cmd_cohom, char=True)
    add("chambers", cmd_chambers, char=True).add_argument("--to", required=True)
    add("equivariant", cmd_equivariant, char=True).add_argument("--window", nargs=2, type=int)
    add("fundseq", cmd_fundseq, char=True).add_argument("--window", nargs=2, type=int)
    add("hinv", cmd_hinv, char=True)
    add("dual", cmd_dual, char=True)
    add("cobord-validate", cmd_cobord_validate)
    p = add("lefschetz", cmd_lefschetz, optional_file=True)
    p.add_argument("--even", help="even block as a JSON matrix")
    p.add_argument("--odd", help="odd block as a JSON matrix")
    add("sw", cmd_sw).add_argument("--n", type=int, default=0)
    p = add("froyshov", cmd_froyshov, optional_file=True)
    p.add_argument("--h", action="append", help="h of a boundary component (repeatable)")
    p.add_argument("--b2", type=int, required=True)
    p.add_argument("--sigma", type=int, default=None, help="defaults to -b2")
    p.add_argument("--c1sq", default="0")
    add("lens", cmd_lens, file=False).add_argument("--q", type=int, required=True)
    p = add("obstruct", cmd_obstruct, file=False)
    p.add_argument("--lattice", required=True, help="diag:N, e8, or a JSON Gram matrix file")
    p.add_argument("--bound", type=int, default=None)
    p = add("oracle-mv", cmd_oracle_mv, optional_file=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--hb", help="dimensions of H(B*,B0) as q:dim,q:dim")
    p = add("oracle-specflow", cmd_oracle_specflow, file=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p = add("gen", cmd_gen, file=False)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--size", type=int, default=16)
    p.add_argument("--char", type=int, default=0)
    return ap


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_IO if e.code else EXIT_OK
    try:
        text, report, code = args.fn(args)
    except (FileNotFoundError, io.ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (UnsupportedCase, TypeError) as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValidationError, InconsistencyError, MalformedComplexError, CobordismError, ChamberError, LatticeError, OracleError, Failure) as e:
        print(f"invalid: {e}", file=sys.stderr)
        return EXIT_INVALID
    report = _jsonable({**report, "exit_code": code})
    if args.json:
        print(json.dumps(report, indent=1), file=stdout)
    else:
        print(text, file=stdout)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                json.dump(report, fh, indent=1)
                fh.write("\n")
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
