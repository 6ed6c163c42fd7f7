"""Smoke test for the Python bindings.

Build the module and put it on the path first, e.g.

    cargo build --release -p mupir-py --features extension-module
    cp target/release/libmupir.so python/mupir.so
    python3 python/smoke_test.py
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import mupir  # noqa: E402


def main() -> None:
    s = mupir.Scheme("cia1", n=2)
    assert json.loads(s.params()) == {"K": 2, "Ku": 2, "N": 2, "L": 4, "M": "1/4"}
    assert s.randomness_size() == 16

    t = json.loads(s.simulate("1,2", seed=3))
    assert t["load"] == "3/2"
    assert t["download_bits"] == 6

    report = json.loads(mupir.Scheme("cia2", n=3).audit(2))
    assert report["verdict"] == "pass"
    assert json.loads(mupir.Scheme("strawman").audit(1))["verdict"] == "fail"

    shared = mupir.Scheme("share", share_a="cia1", share_b="cia2", lam="1/2")
    assert json.loads(shared.params())["M"] == "11/24"
    assert json.loads(shared.simulate("2,1", seed=1))["load"] == "5/4"

    try:
        mupir.Scheme("dd1").simulate("1,1")
    except ValueError:
        pass
    else:
        raise AssertionError("equal demands must be rejected by dd1")

    assert mupir.cia_load("1/4", 2) == "3/2"
    assert mupir.pd_load(2, 2, 2, "1") == "3/4"
    assert Fraction(mupir.gap_ratio(6, 2, 2, "0")) == Fraction(63, 8)

    csv = mupir.curve("fig2a", points=5)
    assert csv.splitlines()[0] == "M,R,label"
    assert "0.25,1.5,cia" in csv

    v = json.loads(mupir.verify_all(seed=1, only=[7, 8, 10]))
    assert [c["passed"] for c in v["criteria"]] == [True, True, True]

    print("python smoke test passed")


if __name__ == "__main__":
    main()
