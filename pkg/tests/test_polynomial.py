import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dioph_adiabatic.errors import PolynomialSyntaxError, PrecisionGuardError
from dioph_adiabatic.polynomial import (
    DiophantinePolynomial,
    evaluate,
    format_polynomial,
    has_solution_under_cutoff,
    parse,
    square_as_float,
)
from oracles import brute_force_root, naive_eval


@pytest.mark.parametrize(
    "text, k, terms",
    [
        ("x1 - 2", 1, {(1,): 1, (0,): -2}),
        ("(x1 + x2 - 3)", 2, {(1, 0): 1, (0, 1): 1, (0, 0): -3}),
        ("x1^2 - x1 + x1", 1, {(2,): 1}),
        ("-(x1 - 1)^2", 1, {(2,): -1, (1,): 2, (0,): -1}),
        ("2*x3", 3, {(0, 0, 1): 2}),
        ("x1 - x1", 1, {}),
        ("7", 1, {(0,): 7}),
    ],
)
def test_parse_examples(text, k, terms):
    p = parse(text)
    assert p.num_vars == k
    assert p.as_dict() == terms


def test_declared_num_vars():
    p = parse("x1 + 1", num_vars=3)
    assert p.num_vars == 3
    assert p.as_dict() == {(1, 0, 0): 1, (0, 0, 0): 1}
    with pytest.raises(ValueError):
        parse("x4", num_vars=2)


@pytest.mark.parametrize(
    "text, pos",
    [
        ("x0 + 1", 0),
        ("x1 ^ -1", 5),
        ("x1 ^ x2", 5),
        ("x1 +", 4),
        ("(x1 + 1", 7),
        ("x1 $ 2", 3),
        ("", 0),
        ("x1 2", 3),
    ],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(PolynomialSyntaxError) as info:
        parse(text)
    assert info.value.position == pos


def test_canonical_invariants_enforced():
    with pytest.raises(ValueError):
        DiophantinePolynomial(1, ((0, (1,)),))
    with pytest.raises(ValueError):
        DiophantinePolynomial(1, ((1, (1,)), (2, (1,))))
    with pytest.raises(ValueError):
        DiophantinePolynomial(2, ((1, (1,)),))


@pytest.mark.parametrize(
    "text, point, value",
    [
        ("x1 - 2", (2,), 0),
        ("x1 - 2", (5,), 3),
        ("(x1+1)*(x2+1) - 6", (1, 2), 0),
    ],
)
def test_evaluate_examples(text, point, value):
    assert evaluate(parse(text), point) == value


def test_evaluate_arity():
    with pytest.raises(ValueError):
        evaluate(parse("x1 + x2"), (1,))


def test_evaluate_is_exact_at_large_magnitudes():
    p = parse("x1^40 - 3*x1^39")
    assert evaluate(p, (10**6,)) == 10**240 - 3 * 10**234


def test_has_solution_examples():
    assert has_solution_under_cutoff(parse("x1 - 2"), 10) == (2,)
    assert has_solution_under_cutoff(parse("3*x1 - 1"), 10) is None
    p = parse("(x1+1)*(x2+1) - 6")
    expected = brute_force_root(lambda a, b: (a + 1) * (b + 1) - 6, (5, 5))
    # (0, 5) precedes (1, 2) lexicographically: 1 * 6 - 6 = 0
    assert expected == (0, 5)
    assert has_solution_under_cutoff(p, (5, 5)) == expected
    assert evaluate(p, (1, 2)) == 0


def test_precision_guard():
    assert square_as_float(2**26) == float(2**52)
    with pytest.raises(PrecisionGuardError):
        square_as_float(2**27)


small_terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.integers(-20, 20),
    max_size=6,
)


def _to_text(terms):
    parts = []
    for (e1, e2), c in terms.items():
        parts.append(f"({c})*x1^{e1}*x2^{e2}")
    return " + ".join(parts) if parts else "0"


@given(small_terms, st.integers(0, 50), st.integers(0, 50))
def test_evaluate_matches_naive_oracle(terms, x, y):
    p = parse(_to_text(terms), num_vars=2)
    assert evaluate(p, (x, y)) == naive_eval(terms, (x, y))


@given(small_terms)
def test_format_round_trip(terms):
    p = parse(_to_text(terms), num_vars=2)
    assert parse(format_polynomial(p), num_vars=2) == p


@settings(max_examples=30)
@given(small_terms, st.integers(0, 4), st.integers(0, 4))
def test_has_solution_matches_exhaustive_scan(terms, c1, c2):
    p = parse(_to_text(terms), num_vars=2)
    expected = brute_force_root(lambda a, b: naive_eval(terms, (a, b)), (c1, c2))
    assert has_solution_under_cutoff(p, (c1, c2)) == expected
