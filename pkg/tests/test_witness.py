import json
import random
from fractions import Fraction

import pytest

from planes.candidates import enumerate_candidates
from planes.designs import affine_to_code, prime_plane
from planes.search import seed_b0
from planes.witness import (Certificate, CertificateFormatError, WitnessFunction, build_lp, check_cover,
                            check_witness, eval_h, make_certificate, pairs, solve_feasibility,
                            verify_witness)


def random_zero_sum(n, rng):
    tables = {}
    for p in pairs(n):
        vals = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n * n - 1)]
        vals.append(-sum(vals))
        rng.shuffle(vals)
        tables[p] = tuple(tuple(vals[a * n:(a + 1) * n]) for a in range(n))
    return WitnessFunction(n, tables)


@pytest.fixture(scope="module")
def roots6(catalogue5):
    out = {}
    for label, sq in catalogue5.items():
        b0 = seed_b0(6, sq).vectors
        out[label] = (b0, enumerate_candidates(b0, 6))
    return out


def test_eval_h_examples():
    n = 4
    z = WitnessFunction.zero(n)
    assert all(eval_h(z, v) == 0 for v in [(0, 1, 2, 3), (3, 3, 3, 3)])
    t = tuple(tuple(Fraction(1) if (a, b) == (0, 0) else Fraction(-1, n * n - 1) for b in range(n))
              for a in range(n))
    tables = dict(z.tables)
    tables[(1, 2)] = t
    h = WitnessFunction(n, tables)
    assert not h.zero_sum_violations()
    assert eval_h(h, (0, 0, 1, 2)) == 1
    assert eval_h(h, (0, 1, 1, 2)) == Fraction(-1, 15)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_zero_sum_over_full_codes(p):
    code = affine_to_code(prime_plane(p)).vectors
    for i, j in pairs(p):
        seen = sorted((v[i - 1], v[j - 1]) for v in code)
        assert seen == [(a, b) for a in range(p) for b in range(p)]
    rng = random.Random(p)
    for _ in range(5):
        h = random_zero_sum(p, rng)
        assert sum(eval_h(h, v) for v in code) == 0


def test_lp_dimensions(roots6, catalogue6):
    lp = build_lp(*roots6[2])
    assert len(lp.d) == 75
    assert (lp.n_variables, lp.n_equalities, lp.n_inequalities) == (540, 16, 75)
    b0 = seed_b0(7, catalogue6[1]).vectors
    lp7 = build_lp(b0, enumerate_candidates(b0, 7))
    assert (lp7.n_variables, lp7.n_equalities, lp7.n_inequalities) == (1029, 22, 288)
    rows = lp.equality_rows()
    assert len(rows) == 16 and rows[-1][1] == 1
    assert sum(rows[-1][0].values()) == len(lp.b0) * 15
    assert all(len(r) == 15 for r in lp.inequality_rows())


def test_build_lp_validation(roots6):
    b0, d = roots6[1]
    with pytest.raises(ValueError):
        build_lp([], d)
    with pytest.raises(ValueError):
        build_lp(b0, d + [b0[0]])
    with pytest.raises(ValueError):
        build_lp(b0, [(0, 0, 1, 2, 3, 4)])
    with pytest.raises(ValueError):
        build_lp(b0 + ((0, 0, 1, 2, 3, 4),), d)


def test_empty_candidate_set_is_feasible(roots6):
    b0, _ = roots6[1]
    res = solve_feasibility(build_lp(b0, []))
    assert res.feasible and check_witness(build_lp(b0, []), res.witness) == ""


def test_order_six_roots(roots6):
    outcome = {}
    for label, (b0, d) in roots6.items():
        lp = build_lp(b0, d)
        res = solve_feasibility(lp)
        outcome[label] = (len(d), res.feasible)
        if res.feasible:
            assert check_witness(lp, res.witness) == ""
        else:
            assert check_cover(lp, res.cover) == ""
    assert sorted(outcome.values()) == [(75, False), (79, True)]


def test_independent_resolve_agrees(roots6):
    for b0, d in roots6.values():
        lp = build_lp(b0, d)
        warm = solve_feasibility(lp)
        cold = solve_feasibility(lp, hint=False, rule="dantzig")
        assert warm.feasible == cold.feasible


def test_certificate_round_trip_and_verify(roots6):
    b0, d = roots6[1]
    lp = build_lp(b0, d)
    h = solve_feasibility(lp).witness
    cert = make_certificate(lp, h, label=1)
    text = cert.dumps()
    assert Certificate.loads(text) == cert
    assert text.endswith("\n")
    assert verify_witness(cert)
    obj = json.loads(text)
    assert all("/" in x for rows in obj["tables"].values() for row in rows for x in row)


def test_verify_witness_mutations(roots6):
    b0, d = roots6[1]
    lp = build_lp(b0, d)
    cert = make_certificate(lp, solve_feasibility(lp).witness, label=1)
    obj = cert.to_json()
    t = obj["tables"]["2,5"]
    q = Fraction(t[1][3]) + 1
    t[1][3] = f"{q.numerator}/{q.denominator}"
    assert not verify_witness(Certificate.from_json(obj))

    other, _ = roots6[2]
    obj = cert.to_json()
    obj["b0"] = [list(v) for v in other]
    rep = verify_witness(Certificate.from_json(obj))
    assert not rep and "digest" in rep.message

    obj = cert.to_json()
    obj["seed"]["extension"] = [[1, 0, 2, 3, 4, 5]]
    assert not verify_witness(Certificate.from_json(obj))


def test_certificate_format_errors(roots6):
    b0, d = roots6[1]
    lp = build_lp(b0, d)
    good = make_certificate(lp, solve_feasibility(lp).witness, label=1).to_json()
    for mutate in (
        lambda o: o.pop("tables"),
        lambda o: o.update(version=99),
        lambda o: o["tables"].pop("1,2"),
        lambda o: o["tables"]["1,2"][0].__setitem__(0, "2/4"),
        lambda o: o["tables"]["1,2"][0].__setitem__(0, "x"),
        lambda o: o["tables"]["1,2"].pop(),
        lambda o: o.update(b0=[[9, 9, 9, 9, 9, 9]]),
    ):
        obj = json.loads(json.dumps(good))
        mutate(obj)
        with pytest.raises(CertificateFormatError):
            Certificate.from_json(obj)
    with pytest.raises(CertificateFormatError):
        Certificate.loads("{not json")
