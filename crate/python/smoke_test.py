"""Smoke test for the mulbasis_py extension.

Build first:  pip install --no-build-isolation -e crates/py
Then run:     python python/smoke_test.py
"""

import json
import pathlib
import sys

import mulbasis_py as mb

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORE = ROOT / "crates" / "core"


def read(rel):
    return (CORE / rel).read_text()


def main():
    p = mb.Presentation(read("corpus/two_step.json"))
    assert p.is_valid()
    assert p.objects == [("a", 2), ("b", 2)]
    print(repr(p))

    a = p.analyze()
    assert a["exit_code"] == 0, a
    assert [s["name"] for s in a["stages"]][-1] == "gamma"

    n = p.normalize()
    assert n["exit_code"] == 0
    assert n["final"]["rank"] == 2
    print("normalize:", n["final"]["kind"], "rank", n["final"]["rank"])

    sym = p.normalize(mode="symbolic")
    double = next(m for m in sym["final"]["morphisms"] if m["kind"] == "double")
    assert "λ" in double["parameter"]

    v = mb.verify(json.dumps(n))
    assert v["accepted"]

    obstructed = mb.Presentation(read("fixtures/obstructed.json"))
    c = obstructed.certify()
    assert c["exit_code"] == 2
    print("certify residual:", c["final"]["obstructions"][0]["residual"])

    w = mb.witness("lemma2", ["0", "1", "2"])
    assert w["separates"]
    print("witness lemma2:", len(w["results"]), "pairs")

    basis = read("fixtures/two_chains_basis.json")
    assert mb.verify(basis, field="F2")["accepted"]
    assert not mb.verify(basis, field="F5")["accepted"]

    try:
        mb.Presentation("{not json")
    except ValueError as e:
        print("rejected:", e)
    else:
        sys.exit("malformed input accepted")

    print("ok")


if __name__ == "__main__":
    main()
