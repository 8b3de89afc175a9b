from __future__ import annotations

import json
from math import comb

import pytest

from clusterpainleve.errors import UsageError
from clusterpainleve.verification import (
    CheckReport,
    FibonacciTable,
    check_coprime_x,
    check_coprime_y,
    check_involution_commutation,
    check_laurent,
    check_mutation_period,
    check_y_equation_consistency,
    coprime_threshold,
    irreducibility_probe,
)


def _sub(report, name):
    return next(w for w in report.witnesses if w.get("sub") == name)


def test_report_requires_witness_on_fail():
    with pytest.raises(UsageError):
        CheckReport("x", {}, "fail")
    with pytest.raises(UsageError):
        CheckReport("x", {}, "maybe")


def test_report_json_shape():
    r = check_mutation_period(4)
    data = json.loads(r.dumps())
    assert set(data) == {"check", "params", "verdict", "cases", "witnesses"}
    assert data["verdict"] == "pass"


def test_fibonacci():
    v = FibonacciTable()
    assert [v[i] for i in range(10)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]


@pytest.mark.parametrize("k", [4, 5])
def test_laurent_check(k):
    r = check_laurent(k, 10)
    assert r.verdict == "pass" and r.cases == 10


@pytest.mark.parametrize("k", [4, 5, 6, 7])
def test_laurent_negative_control(k):
    r = check_laurent(k, 10, corrupt=True)
    assert r.verdict == "fail"
    assert r.witnesses[0]["error"] == "NotDivisible"


def test_coprime_x_k4():
    r = check_coprime_x(4, 5, 12)
    assert r.verdict == "pass"
    assert r.cases == 28 == len(r.witnesses)
    assert all(w["gcd"] == "1" for w in r.witnesses)


def test_coprime_x_k5():
    r = check_coprime_x(5, 6, 12)
    assert r.verdict == "pass" and r.cases == comb(7, 2)


def test_coprime_x_range_validation():
    with pytest.raises(UsageError):
        check_coprime_x(4, 8, 5)


def test_coprime_x_flags_monomial_ratios():
    # x1, x2 have unit gcd, but x1/x2 is a Laurent monomial, which the check rejects
    r = check_coprime_x(4, 1, 6)
    assert r.verdict == "fail"
    w = next(w for w in r.witnesses if w["pair"] == [1, 2])
    assert w["gcd"] == "1" and w["coprime"] is False
    assert next(w for w in r.witnesses if w["pair"] == [1, 5])["coprime"]


def test_thresholds():
    assert [coprime_threshold(k) for k in (4, 5, 6, 7, 8)] == [2, 3, 4, 5, 6]


def test_coprime_y_k4():
    r = check_coprime_y(4, 6)
    assert r.verdict == "pass"
    pairs = [w for w in r.witnesses if w["kind"] == "pair"]
    assert len(pairs) == r.cases == sum(1 for n in range(7) for m in range(n + 3, 7))
    # nearby pairs do share factors (informational)
    assert any(w["kind"] == "within-threshold" for w in r.witnesses)


def test_coprime_y_k5():
    r = check_coprime_y(5, 7)
    assert r.verdict == "pass"
    assert r.cases == sum(1 for n in range(8) for m in range(n + 4, 8))


def test_coprime_y_k6_is_evidence():
    r = check_coprime_y(6, 6)
    assert r.verdict == "evidence"
    assert r.cases == 3


def test_irreducibility_k4():
    r = irreducibility_probe(4)
    assert r.verdict == "pass"
    assert _sub(r, "b")["u"] == "t^2 + t + 1"
    assert _sub(r, "d")["values"] == {"x_k+2": 3, "x_k+3": 7}


def test_irreducibility_k5_u_sequence():
    r = irreducibility_probe(5)
    a = _sub(r, "a")
    assert a["ok"] and a["u"]["7"] == "2*t + 1"
    assert _sub(r, "b")["u"] == "t^2 + 3*t + 1"
    assert _sub(r, "b")["ok"]
    assert _sub(r, "c")["ok"]


def test_irreducibility_growth_claim_fails_beyond_k4():
    # the all-ones orbit for k >= 5 starts 2, 3, 5, ..., so the claimed
    # x_{k+3} = 7 and the doubling bound do not hold; the probe must say so
    for k in (5, 6, 7, 8):
        r = irreducibility_probe(k)
        assert r.verdict == "fail"
        d = _sub(r, "d")
        assert d["values"]["x_k+3"] == 5 and not d["ok"]


def test_irreducibility_k6_quadratic_has_t_plus_1():
    b = _sub(irreducibility_probe(6), "b")
    assert b["u"] == "2*t^2 + 4*t + 2"
    assert b["divisible_by_t_plus_1"] and b["gcd_with_t_plus_1"] == "t + 1"


@pytest.mark.parametrize("k,steps", [(4, 6), (5, 6), (6, 5)])
def test_y_equation_examples(k, steps):
    r = check_y_equation_consistency(k, steps)
    assert r.verdict == "pass" and r.cases > 0


@pytest.mark.parametrize("k", [4, 5])
def test_involution(k):
    r = check_involution_commutation(k, trials=5)
    assert r.verdict == "pass"
    control = r.witnesses[-1]
    assert control["informational"] and control["commutes"] is False


def test_involution_deterministic():
    a = check_involution_commutation(4, trials=4, seed=7).dumps()
    b = check_involution_commutation(4, trials=4, seed=7).dumps()
    assert a == b

