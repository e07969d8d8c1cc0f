"""Smoke test for the pyskewnet extension module."""

import json
import sys

import pyskewnet


def main() -> int:
    fixture = pyskewnet.generate(1)
    net = json.loads(fixture)
    assert (net["n"], net["two_m"]) == (5, 6)
    assert pyskewnet.generate(1) == fixture
    fp = pyskewnet.fingerprint(fixture)
    assert len(fp) == 64

    # Pf of the standard symplectic form e12 + e34 + e56 is 1
    j = [[0] * 6 for _ in range(6)]
    for i in (0, 2, 4):
        j[i][i + 1], j[i + 1][i] = 1, -1
    assert pyskewnet.pfaffian_of(j) == "1"
    assert pyskewnet.pfaffian_of(j, 7) == "1"

    assert pyskewnet.hypersurface_row(3, 5, 1) == [5, 0, 0, 0]
    assert pyskewnet.theta_row(fixture, 0) == [6, 0, 0, 0, 0]
    assert pyskewnet.theta_row(fixture, -4) == [0, 0, 0, 6, 0]

    stage = json.loads(pyskewnet.verify(fixture, "charge2-table"))
    assert stage["status"] == "pass", stage["witness"]

    report = json.loads(pyskewnet.pipeline(fixture, samples=200, seed=3))
    failed = [s["name"] for s in report["stages"] if s["status"] != "pass"]
    assert report["status"] == "pass", failed
    assert report["fingerprint"] == fp

    try:
        pyskewnet.verify(fixture, "no-such-check")
    except ValueError as e:
        assert "no-such-check" in str(e)
    else:
        raise AssertionError("unknown check accepted")

    print(f"ok: {len(report['stages'])} stages pass for {fp[:12]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
