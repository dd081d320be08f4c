import json
import shutil

import pytest

from floerkit import io
from floerkit.cobord import CobordismData, Topology
from floerkit.deltacx import make_complex
from floerkit.exactalg import GF, ZZ
from floerkit.oracle import generate_random_delta


def bundled():
    return sorted(p.stem for p in io.corpus_dir().glob("*.json") if p.stem != "random_manifest")


@pytest.mark.parametrize("name", bundled())
def test_round_trip_bundled(name):
    inst = io.load(name)
    again = io.instance_from_json(json.loads(io.dumps(inst)))
    assert io.same_complex(inst.complex, again.complex)
    assert inst.provenance in ("PAPER", "DERIVED", "TRIVIAL", "INVENTED")
    assert io.dumps(again) == io.dumps(inst)


@pytest.mark.parametrize("K", [ZZ, GF(3)])
def test_round_trip_random(K, tmp_path):
    C = generate_random_delta(9, size=14, coeff=K)
    path = tmp_path / "r.json"
    io.save(io.Instance("r", C, K), path)
    back = io.load(str(path))
    assert back.coeff == K and io.same_complex(back.complex, C)


def test_round_trip_cobordism(tmp_path):
    C = make_complex(0, [("x", 0)])
    W = CobordismData(C, C, ZZ.eye(1), Topology(b2=1, sigma=-1, c1sq=-1))
    path = tmp_path / "w.json"
    io.save(io.Instance("w", C, cobordism=W), path)
    back = io.load(str(path)).cobordism
    assert back.topology == W.topology and back.Wsharp.tolist() == [[1]]


def test_rationals():
    from fractions import Fraction

    for x in (Fraction(3, 4), Fraction(-7, 12), Fraction(0), Fraction(5)):
        assert io.unrat(io.rat(x)) == x
    assert io.rat(Fraction(-2, 4)) == {"num": -1, "den": 2}
    assert io.unrat(5) == 5
    with pytest.raises(io.ParseError):
        io.unrat({"num": 2, "den": 4})
    with pytest.raises(io.ParseError):
        io.unrat({"num": 1, "den": 0})
    with pytest.raises(io.ParseError):
        io.unrat(0.5)


def test_schema_errors():
    obj = json.loads(io.dumps(io.load("s3_m1")))
    bad = dict(obj)
    del bad["complex"]
    with pytest.raises(io.ParseError, match="schema"):
        io.instance_from_json(bad)
    bad = dict(obj, format="other/2")
    with pytest.raises(io.ParseError):
        io.instance_from_json(bad)
    bad = json.loads(json.dumps(obj))
    bad["complex"]["d"] = [[1, 2]]
    with pytest.raises(io.ParseError):
        io.instance_from_json(bad)


def test_malformed_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(io.ParseError):
        io.load(str(p))


def test_resolve(tmp_path, monkeypatch):
    assert io.resolve("s3_m1").name == "s3_m1.json"
    assert io.resolve("some/dir/s3_m1.json").name == "s3_m1.json"
    with pytest.raises(FileNotFoundError):
        io.resolve("no_such_instance")
    shutil.copy(io.resolve("poincare"), tmp_path / "only.json")
    monkeypatch.setenv("FLOERKIT_CORPUS", str(tmp_path))
    assert io.corpus_dir() == tmp_path
    assert io.load("only").name == "poincare"
    with pytest.raises(FileNotFoundError):
        io.resolve("s3_m1")
