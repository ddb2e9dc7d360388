"""Smoke test for the compiled extension. Run after installing crates/python."""

import json
import math

import hankel_pns as hp


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert close(hp.eta(1.0, 2.0), 0.354249, 1e-6)

    v = hp.assemble([1.0, 1.0, 0.0, 0.0, 0.0], 2.0)
    assert len(v) == 13
    assert close(hp.evaluate(v, [1.0, 0.0, 0.0, 0.0]), 2.0, 1e-12)

    report = hp.check(v)
    assert "conditions" in report

    n, w = hp.n0([4.0, 0.0, 0.0, 0.0, 0.0], n_starts=50)
    assert close(n, 441.0, 2.2)
    assert close(w[0] ** 4 + w[3] ** 4, 1.0, 1e-9)
    assert close(hp.m0([2.0, 1.0, 0.0, 0.0, 0.0]), 8.0, 0.04)

    assert hp.is_sos(hp.assemble([1.0, 1.0, 0.0, 0.0, 0.0], 1.5))
    assert not hp.is_sos(hp.assemble([1.0, 1.0, 0.0, 0.0, 0.0], 0.5), max_iter=2000)

    cert = hp.cone_certificate(1.0, 0.0)
    assert close(json.loads(cert)["M"], 8.0, 1e-12)
    assert hp.verify_certificate(cert)["passed"]
    assert hp.verify_certificate(hp.segment_certificate(0.5), 1e-9)["passed"]

    assert close(hp.point_a_critical_value(), 1421.92, 0.01)
    assert close(hp.ray_critical_value(0.0), 1823.3, 0.1)

    rows = hp.scan(["v2=0:1:2", "v6=1"], n_starts=30)
    assert len(rows) == 2 and all(r["status"] == "ok" for r in rows)
    assert all(math.isfinite(r["m0"]) for r in rows)

    try:
        hp.n0([0.0, 0.0, 0.0, 0.0, 2.0])
    except ValueError:
        pass
    else:
        raise AssertionError("point outside the domain accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
