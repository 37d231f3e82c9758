import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wdirichlet.errors import DomainError, SpecParseError
from wdirichlet.lattice import make_box
from wdirichlet.weights import (AxisPower, Constant, MinWeight, MultiplicativeFromPrimes, PolyLog, TableWeight, TwoAdic,
                                beurling_domar_partial, check_submultiplicative, growth_profile, is_admissible,
                                is_almost_monotone, mfp, min_weight, parse_weight, scan_monotone_constant, weight_eval)

FAMILIES = [Constant(1), Constant(5), TwoAdic(), AxisPower(1, 0), AxisPower(Fraction(1, 2), 2),
            mfp({1: 3}, {2: Fraction(3, 2)}), PolyLog(1, 1), PolyLog(2, 0.5)]

prime_values = st.dictionaries(st.integers(1, 6), st.fractions(min_value=1, max_value=5, max_denominator=8), max_size=3)


def test_weight_eval_examples():
    assert weight_eval(Constant(1), 5, 7) == 1
    assert weight_eval(TwoAdic(), 8, 1) == 16
    assert weight_eval(mfp({1: 3}), 4, 9) == 9
    assert weight_eval(TableWeight({(2, 2): 4}), 3, 3) == 1
    with pytest.raises(DomainError):
        weight_eval(Constant(1), 0, 1)


def test_twoadic_reduces_to_one_variable_weight():
    for k in range(12):
        for odd in (1, 3, 5, 15):
            assert TwoAdic()(2**k * odd, 1) == 2 ** (k + 1)


@pytest.mark.parametrize("w", FAMILIES, ids=lambda w: w.spec())
def test_families_submultiplicative_and_at_least_one(w):
    rep = check_submultiplicative(w, M=32)
    assert rep.ok, rep
    assert np.all(w.grid(40, 40) >= 1)


@pytest.mark.parametrize("w", FAMILIES, ids=lambda w: w.spec())
def test_grid_matches_pointwise(w):
    g = w.grid(12, 9)
    for m in range(1, 13):
        for n in range(1, 10):
            assert g[m - 1, n - 1] == pytest.approx(float(w(m, n)), rel=1e-12)
            assert w.log(m, n) == pytest.approx(math.log(w(m, n)), abs=1e-12)


def test_table_weight_submultiplicativity_checked_on_box_only():
    bad = TableWeight({(2, 1): 1, (4, 1): 3})
    rep = check_submultiplicative(bad)
    assert not rep.ok and rep.box_only
    assert rep.witness == ((2, 1), (2, 1))
    with pytest.raises(DomainError):
        TableWeight({(2, 1): 0.5})


def test_growth_profile_examples():
    g = growth_profile(Constant(1), 3)
    assert set(g.estimates) == {1.0} and g.rho == 1.0
    g = growth_profile(AxisPower(1, 0), 1)
    assert set(g.estimates) == {2.0} and g.inf_estimate == 2.0 and g.rho == 2.0
    g = growth_profile(TwoAdic(), 1, axis=1, N=40)
    assert g.estimates == tuple(2.0 ** ((n + 1) / n) for n in range(1, 41))
    assert g.inf_estimate == pytest.approx(2 ** (41 / 40))
    assert g.rho == 2.0


@given(prime_values, prime_values, st.integers(1, 6), st.sampled_from([1, 2]), st.integers(1, 60))
def test_mfp_growth_is_exactly_the_prime_value(R, S, i, axis, N):
    w = mfp(R, S)
    g = growth_profile(w, i, axis, N)
    expect = float((R if axis == 1 else S).get(i, 1))
    assert g.inf_estimate == pytest.approx(expect, rel=1e-14)
    assert g.rho == pytest.approx(expect, rel=1e-14)


@given(st.sampled_from(FAMILIES), st.integers(1, 5), st.sampled_from([1, 2]), st.integers(1, 80))
def test_running_inf_nonincreasing(w, i, axis, N):
    g = growth_profile(w, i, axis, N)
    run = g.running_inf
    assert all(x >= y for x, y in zip(run, run[1:]))
    assert g.inf_estimate == min(g.estimates) == run[-1]
    assert all(e >= 1 - 1e-12 for e in g.estimates)


@given(prime_values, prime_values)
def test_admissibility_consistent_with_profiles(R, S):
    w = mfp(R, S)
    rep = is_admissible(w, prime_count=6)
    assert rep.admissible == all(g.rho <= 1 + rep.tol for g in rep.profiles)
    assert rep.admissible == all(v == 1 for v in list(R.values()) + list(S.values()))
    assert rep.max_rho == max(g.rho for g in rep.profiles)


def test_admissibility_examples():
    for c in (1, 5):
        assert is_admissible(Constant(c)).admissible
    assert is_admissible(Constant(5), depth=60, tol=1e-3).admissible
    rep = is_admissible(AxisPower(1, 0))
    assert not rep.admissible and rep.profiles[0].rho == 2.0
    rep = is_admissible(mfp({1: Fraction(7, 4)}))
    assert not rep.admissible and rep.witness == (1, 1, 1.75)
    assert is_admissible(PolyLog(1, 1)).admissible
    assert not is_admissible(TwoAdic()).admissible


def brute_monotone_K(w, M):
    pts = [(m, n) for m in range(1, M + 1) for n in range(1, M + 1)]
    best = 0.0
    for x in pts:
        for y in pts:
            if y[0] % x[0] == 0 or y[1] % x[1] == 0:
                best = max(best, float(w(*x)) / float(w(*y)))
    return best


@pytest.mark.parametrize("w", [TwoAdic(), mfp({1: 2}), AxisPower(0, 1)], ids=lambda w: w.spec())
def test_almost_monotone_scan_matches_brute_force(w):
    rep = is_almost_monotone(w, make_box(10))
    assert rep.verdict == "monotone-with-constant"
    assert rep.K == pytest.approx(brute_monotone_K(w, 10))
    (m1, n1), (m2, n2) = rep.witness
    assert m2 % m1 == 0 or n2 % n1 == 0
    assert float(w(m1, n1)) / float(w(m2, n2)) == pytest.approx(rep.K)


def test_almost_monotone_verdicts():
    assert is_almost_monotone(Constant(1), make_box(16)).verdict == "admissible"
    rep = is_almost_monotone(TwoAdic(), make_box(16))
    assert rep.verdict == "monotone-with-constant" and rep.K >= 1
    rep = is_almost_monotone(TwoAdic(), make_box(16), K=2)
    assert rep.verdict == "violated" and rep.witness is not None
    K, _ = scan_monotone_constant(TwoAdic(), make_box(16))
    assert K == rep.K


def test_beurling_domar_examples():
    rep = beurling_domar_partial(Constant(1), 3, 5)
    assert rep.partial == 0 and rep.verdict == "convergent-evidence"
    rep = beurling_domar_partial(AxisPower(1, 0), 2, 1, N=10_000)
    assert rep.verdict == "divergent-evidence"
    harmonic = sum(n * math.log(2) / (1 + n * n) for n in range(1, 10_001))
    assert rep.partial == pytest.approx(harmonic, rel=1e-12)
    w = PolyLog(1, 1)
    r4 = beurling_domar_partial(w, 2, 3, N=10_000)
    r5 = beurling_domar_partial(w, 2, 3, N=100_000)
    assert r4.verdict == r5.verdict == "convergent-evidence"
    assert abs(r5.partial - r4.partial) < 1e-2
    assert r4.partial + r4.tail_estimate == pytest.approx(r5.partial + r5.tail_estimate, abs=2e-3)


def test_min_weight_examples():
    assert min_weight([Constant(3), Constant(2)]) == Constant(2)
    assert min_weight([mfp({1: 1.5}), mfp({1: 1.2})]) == mfp({1: 1.2})
    assert min_weight([TwoAdic(), Constant(1)]) == Constant(1)
    with pytest.raises(DomainError):
        min_weight([])


@given(st.lists(st.one_of(st.sampled_from(FAMILIES), prime_values.map(mfp)), min_size=1, max_size=4))
def test_min_weight_pointwise_bounds(ws):
    mw = min_weight(ws)
    G = mw.grid(16, 16)
    assert np.all(G >= 1 - 1e-12)
    for w in ws:
        assert np.all(G <= w.grid(16, 16) * (1 + 1e-12))


def test_min_weight_of_mixed_inputs_is_pointwise():
    mw = min_weight([TwoAdic(), mfp({1: 3})])
    assert isinstance(mw, MinWeight)
    assert mw(8, 1) == 16 and mw(1, 1) == 1


@pytest.mark.parametrize("text,expect", [
    ("const:1", Constant(1)),
    ("const: 5/2", Constant(Fraction(5, 2))),
    ("twoadic", TwoAdic()),
    ("axispow:1,0", AxisPower(1, 0)),
    ("polylog:1,1", PolyLog(1.0, 1.0)),
    ("mfpi:R1=3;S2=3/2", MultiplicativeFromPrimes(R=((1, 3),), S=((2, Fraction(3, 2)),))),
    ("min(const:3, const:2)", Constant(2)),
])
def test_parse_weight(text, expect):
    w = parse_weight(text)
    assert w == expect
    assert parse_weight(w.spec()) == w


def test_parse_weight_mfp_file(tmp_path):
    (tmp_path / "w.txt").write_text("# R1 = 3\n1 1 3\n2 2 3/2\n")
    w = parse_weight("mfp:w.txt", tmp_path)
    assert w == mfp({1: 3}, {2: Fraction(3, 2)})
    (tmp_path / "bad.txt").write_text("1 1 3\n\n  3 1 2\n")
    with pytest.raises(SpecParseError) as exc:
        parse_weight("mfp:bad.txt", tmp_path)
    assert (exc.value.line, exc.value.col) == (3, 3)


@pytest.mark.parametrize("text,col", [("cnst:1", 1), ("const:x", 7), ("axispow:1", 10), ("min(twoadic,", 13),
                                      ("twoadic extra", 9), ("const:0.5", 1)])
def test_parse_weight_errors_cite_column(text, col):
    with pytest.raises(SpecParseError) as exc:
        parse_weight(text)
    assert exc.value.col == col
    assert f":1:{col}:" in str(exc.value)
