import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exact_tables, float_tables, max_entry_diff
from wdirichlet.errors import DomainError, NotAUnitError, PreconditionError, SpecParseError
from wdirichlet.exact import GaussianRational
from wdirichlet.lattice import divisors2, make_box
from wdirichlet.series import (CoeffTable, axis_box, basis, box_identity_residual, convolve, evaluate, evaluate_many,
                               format_series, invert_formal, neumann_inverse, parse_series, power, read_series,
                               weighted_p_norm, write_series)
from wdirichlet.weights import Constant, PolyLog, TwoAdic, mfp

F = Fraction
h2 = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False).map(
    lambda z: complex(abs(z.real), z.imag))


def brute_convolve(a, b):
    out = {}
    for (m1, n1), x in a.items():
        for (m2, n2), y in b.items():
            k = (m1 * m2, n1 * n2)
            out[k] = out.get(k, 0) + x * y
    return CoeffTable(out, a.mode)


def test_basis_examples():
    assert basis(1, 1).items() == [((1, 1), 1)]
    assert basis(2, 3, "exact").to_dict() == {(2, 3): 1}
    assert convolve(basis(2, 1, "exact"), basis(1, 3, "exact")) == basis(2, 3, "exact")


def test_convolve_examples():
    a = CoeffTable({(2, 1): F(1), (1, 3): F(1)}, "exact")
    assert convolve(a, basis(2, 1, "exact")).to_dict() == {(4, 1): 1, (2, 3): 1}
    x = CoeffTable({(1, 1): F(2), (2, 1): F(1)}, "exact")
    y = CoeffTable({(1, 1): F(1, 2), (2, 1): F(-1, 4), (4, 1): F(1, 8)}, "exact")
    assert convolve(x, y).to_dict() == {(1, 1): 1, (8, 1): F(1, 8)}
    with pytest.raises(DomainError):
        convolve(x, x.to_float())


@given(exact_tables(), exact_tables(), exact_tables())
def test_ring_axioms(a, b, c):
    assert convolve(a, b) == convolve(b, a)
    assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))
    assert convolve(a, b + c) == convolve(a, b) + convolve(a, c)
    assert convolve(a, basis(1, 1, "exact")) == a
    assert convolve(a, b) == brute_convolve(a, b)


@given(float_tables(), float_tables())
def test_dense_and_sparse_convolution_agree(a, b):
    box = make_box(32)
    dense = convolve(a, b, box)
    sparse = brute_convolve(a, b).restrict(box)
    assert max_entry_diff(dense, sparse) <= 1e-12


def test_no_stored_zeros():
    a = CoeffTable({(1, 1): F(1), (2, 1): F(0)}, "exact")
    assert a.support == [(1, 1)]
    t = basis(2, 1, "exact") - basis(2, 1, "exact")
    assert len(t) == 0
    assert len(CoeffTable({(3, 3): 1e-301}, "float")) == 0


def test_power_matches_repeated_convolution(two_plus):
    box = make_box(64)
    p3 = power(two_plus, 3, box)
    assert p3 == convolve(convolve(two_plus, two_plus, box), two_plus, box)
    assert power(two_plus, 0, box) == basis(1, 1, "exact")


def test_invert_examples(two_plus):
    box = make_box(2**12)
    assert invert_formal(basis(1, 1, "exact"), box) == basis(1, 1, "exact")
    b = invert_formal(two_plus, box)
    assert b.to_dict() == {(2**n, 1): F((-1) ** n, 2 ** (n + 1)) for n in range(13)}
    b = invert_formal(CoeffTable({(1, 1): F(2), (2, 1): F(-1)}, "exact"), box)
    assert b.to_dict() == {(2**n, 1): F(1, 2 ** (n + 1)) for n in range(13)}
    with pytest.raises(NotAUnitError, match="not a unit"):
        invert_formal(basis(2, 1, "exact"), box)


@given(exact_tables(max_size=12, unit=True))
def test_inverse_is_exact_on_box(a):
    box = make_box(64)
    b = invert_formal(a, box)
    assert convolve(a, b, box) == basis(1, 1, "exact")
    assert box_identity_residual(a, b, box) == 0


def test_inverse_obeys_recursion_definition():
    a = CoeffTable({(1, 1): F(3), (2, 1): F(1), (1, 2): F(-2), (3, 2): F(5, 7)}, "exact")
    box = make_box(12)
    b = invert_formal(a, box)
    for m, n in box:
        if (m, n) == (1, 1):
            assert b[(1, 1)] == F(1, 3)
            continue
        s = sum((a[(u, v)] * b[(m // u, n // v)] for u, v in divisors2(m, n) if (u, v) != (1, 1)), F(0))
        assert b[(m, n)] == -s / 3


@given(float_tables(max_size=8, max_index=12, unit=True))
def test_float_inverse_dense_matches_sparse(a):
    box = make_box(24)
    dense = invert_formal(a, box)
    sparse = invert_formal(a, make_box(members=list(box)))
    scale = max(1.0, max((abs(complex(c)) for _, c in sparse.items()), default=1))
    assert max_entry_diff(dense, sparse) <= 1e-9 * scale


def test_neumann_examples(two_plus):
    r = neumann_inverse(basis(1, 1), make_box(8))
    assert r.table == basis(1, 1) and r.terms == 1
    box = axis_box(10)
    r = neumann_inverse(two_plus, box, tol=1e-12)
    assert max_entry_diff(r.table, invert_formal(two_plus, box)) <= 1e-10
    a = CoeffTable({(1, 1): 1, (2, 1): 0.4, (1, 2): 0.4}, "float")
    box = make_box(64)
    r = neumann_inverse(a, box, tol=1e-12)
    assert max_entry_diff(r.table, invert_formal(a, box)) <= 1e-10
    with pytest.raises(PreconditionError, match="measured"):
        neumann_inverse(CoeffTable({(1, 1): 1, (2, 1): 2}, "float"), box)


def test_weighted_norm_examples(two_plus):
    for p in (1, 0.5, F(1, 3)):
        assert weighted_p_norm(basis(1, 1), Constant(1), p) == 1
        assert weighted_p_norm(basis(1, 1), mfp({1: 3}), p) == 1
    assert weighted_p_norm(CoeffTable({(1, 1): 2.0}, "float"), p=0.5) == pytest.approx(math.sqrt(2), rel=1e-15)
    for N in (1, 5, 20, 40):
        b = invert_formal(two_plus, make_box(2**N))
        assert weighted_p_norm(b, TwoAdic()) == N + 1
    with pytest.raises(DomainError):
        weighted_p_norm(two_plus, p=1.5)


@given(float_tables(), float_tables(), st.sampled_from([1, 0.5]),
       st.sampled_from([Constant(1), TwoAdic(), mfp({1: 2}, {2: 3}), PolyLog(1, 1)]))
def test_norm_submultiplicative(a, b, p, w):
    lhs = weighted_p_norm(convolve(a, b), w, p)
    assert lhs <= weighted_p_norm(a, w, p) * weighted_p_norm(b, w, p) * (1 + 1e-12) + 1e-300


def test_evaluate_examples(two_plus):
    assert evaluate(basis(1, 1), 3 + 4j, 0.5) == 1
    assert evaluate(two_plus, 0, 0) == 3
    assert abs(evaluate(two_plus, 1j * math.pi / math.log(2))) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        evaluate(two_plus, -0.1, 0)


@given(float_tables(), h2, h2)
def test_evaluate_bounded_by_l1(a, s1, s2):
    assert abs(evaluate(a, s1, s2)) <= weighted_p_norm(a) * (1 + 1e-12) + 1e-12


@given(float_tables(max_size=8), float_tables(max_size=8), h2, h2)
def test_evaluate_is_homomorphism(a, b, s1, s2):
    lhs = evaluate(convolve(a, b), s1, s2)
    rhs = evaluate(a, s1, s2) * evaluate(b, s1, s2)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, weighted_p_norm(a) * weighted_p_norm(b))


def test_evaluate_many_matches_scalar():
    a = CoeffTable({(1, 1): 1 + 1j, (6, 5): -2, (9, 1): 0.25j}, "float")
    s1 = np.array([0, 1j, 0.3 + 2j, 2])
    s2 = np.array([0, 0.5, 1j, 3 - 1j])
    many = evaluate_many(a, s1, s2)
    for k in range(4):
        direct = sum(c * cmath.exp(-s1[k] * math.log(m) - s2[k] * math.log(n)) for (m, n), c in a.items())
        assert abs(many[k] - direct) <= 1e-12


@given(exact_tables())
def test_series_text_round_trip_exact(a):
    text = format_series(a, p=1, weight=TwoAdic())
    b, meta = parse_series(text)
    assert b == a and meta["mode"] == "exact" and meta["weight"] == TwoAdic()
    assert format_series(b, p=1, weight=TwoAdic()) == text


def test_series_file_round_trip(tmp_path, two_plus):
    path = tmp_path / "a.txt"
    write_series(path, two_plus, p=F(1, 2), weight="const:1")
    b, meta = read_series(path)
    assert b == two_plus and meta["p"] == F(1, 2) and meta["weight"] == Constant(1)


def test_series_file_gaussian_and_float():
    g = CoeffTable({(1, 1): GaussianRational(1, F(-2, 3)), (2, 2): F(5)}, "exact")
    b, _ = parse_series(format_series(g))
    assert b == g
    f = CoeffTable({(1, 1): 0.1 + 0.2j, (3, 1): 1e-17}, "float")
    b, _ = parse_series(format_series(f))
    assert b == f


@pytest.mark.parametrize("text,line,col", [
    ("# mode exact\n1 1 1/2\n0 1 3\n", 3, 1),
    ("# mode exact\n1 1 x\n", 2, 5),
    ("1 1 1\n1 1 2\n", 2, 1),
    ("# mode quantum\n", 1, 8),
    ("1 1\n", 1, 1),
])
def test_series_parse_errors(text, line, col):
    with pytest.raises(SpecParseError) as exc:
        parse_series(text, "in.txt")
    assert (exc.value.line, exc.value.col) == (line, col)
