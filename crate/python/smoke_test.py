"""Smoke test for the chermite extension module.

Build and run from the repository root:

    cargo build -p chermite-py --release --features extension-module
    cp target/release/libchermite.so python/chermite.so
    python3 python/smoke_test.py
"""

import cmath
import json

import chermite


def check_polynomials():
    h = chermite.hermite_poly(2, 2)
    assert h.arity == 3
    assert h.coeff([0, 0, 2]) == "2"
    assert h.coeff([1, 1, 1]) == "4"
    assert h.eval([1, 1, 1]) == 7
    assert chermite.hermite_eval(2, 2, 1, 1, 1) == 7

    x, y, z = (chermite.Poly.var(3, i) for i in range(3))
    assert h.diff(2) == h.diff(0).diff(1)
    assert chermite.hermite_poly(1, 1) == x * y + z
    assert chermite.heat_operator_apply(x**2 * y**2) == h

    combo = chermite.monomial_in_hermite(2, 2)
    total = chermite.Poly(3)
    for coeff, (m, n) in combo:
        total = total + coeff * chermite.hermite_poly(m, n)
    assert total == x**2 * y**2

    p = chermite.Poly.from_json(3, h.to_json())
    assert p == h
    assert chermite.classical_hermite(3) == [0, -12, 0, 8]


def check_scaling():
    x, y, z = 0.3 + 0.2j, -0.7 + 0.1j, 0.5 - 1.1j
    direct = chermite.hermite_eval(4, 3, x, y, z)
    scaled = chermite.scaling_map(4, 3, x, y, z)
    assert abs(direct - scaled) <= 1e-10 * max(1.0, abs(direct))
    try:
        chermite.scaling_map(1, 1, 1, 1, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("z = 0 should be rejected")


def check_verifiers():
    reports = chermite.verify("pde", max_degree=6)
    assert len(reports) == 49
    assert all(r["status"] == "pass" for r in reports)
    reports = chermite.verify("addition", max_degree=2, k=2, samples=2, seed=5)
    assert all(r["status"] == "pass" for r in reports)


def check_kernels():
    params = {"x1": 0.5, "y1": 0.5, "z1": 0.5, "x2": 0.5, "y2": 0.5, "z2": 0.5, "s": 0.4, "t": 0.4}
    res = chermite.kernel("mehler", params)
    assert res["converged"] and res["within_tol"]
    res = chermite.kernel("weisner", json.dumps({"k": 2, "u": "0.3+0.1i", "v": 0.2, "t": 0.1}))
    assert res["within_tol"]
    params["z1"] = params["z2"] = 4.0
    params["s"] = params["t"] = 1.0
    try:
        chermite.kernel("mehler", params)
    except chermite.DomainError:
        pass
    else:
        raise AssertionError("expected DomainError")


def check_expansion():
    tensor = {"max_degree": 4, "entries": [
        {"m": 1, "n": 1, "p": 0, "coeff": "1"},
        {"m": 0, "n": 0, "p": 1, "coeff": "1"},
    ]}
    assert chermite.pde_check(tensor)["status"] == "pass"
    assert chermite.expand(tensor)["coeffs"] == [{"m": 1, "n": 1, "coeff": "1"}]
    bad = {"max_degree": 2, "entries": [{"m": 0, "n": 0, "p": 1, "coeff": "1"}]}
    assert chermite.pde_check(bad)["status"] == "fail"
    try:
        chermite.expand(bad)
    except chermite.NotExpandableError:
        pass
    else:
        raise AssertionError("expected NotExpandableError")


if __name__ == "__main__":
    check_polynomials()
    check_scaling()
    check_verifiers()
    check_kernels()
    check_expansion()
    print("python smoke test: ok")
