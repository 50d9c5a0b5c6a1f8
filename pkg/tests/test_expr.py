import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnewton import expr
from gnewton.errors import ArityError, ParseError, UnknownIdentifier
from gnewton.expr import (Bin, Call, Neg, Num, Var, differentiate, evaluate,
                          parse_equations, pretty)


def parse_one(text, n=2):
    return expr._Parser(text, n, 1, 0).parse()


def test_number_forms():
    for text, val in [("2", 2.0), ("2.5", 2.5), (".5", 0.5), ("1e3", 1000.0),
                      ("2.5e-2", 0.025), ("3E+2", 300.0)]:
        assert evaluate(parse_one(text), (0.0, 0.0)) == val


def test_precedence_and_unary_minus():
    # unary minus binds below ^: -x1^2 is -(x1^2)
    assert evaluate(parse_one("-x1^2"), (3.0, 0.0)) == -9.0
    assert evaluate(parse_one("2^-2"), (0.0, 0.0)) == 0.25
    assert evaluate(parse_one("2*x1^3"), (2.0, 0.0)) == 16.0
    assert evaluate(parse_one("1 - 2 - 3"), (0.0, 0.0)) == -4.0
    assert evaluate(parse_one("12 / 2 / 3"), (0.0, 0.0)) == 2.0


def test_power_right_associative():
    assert evaluate(parse_one("2^3^2"), (0.0, 0.0)) == 512.0


def test_functions():
    x = (0.7, -0.2)
    assert abs(evaluate(parse_one("exp(x1)"), x) - math.exp(0.7)) < 1e-15
    assert abs(evaluate(parse_one("sinh(x2)"), x) - math.sinh(-0.2)) < 1e-15
    assert abs(evaluate(parse_one("cosh(x1)"), x) - math.cosh(0.7)) < 1e-15
    assert abs(evaluate(parse_one("tan(x2)"), x) - math.tan(-0.2)) < 1e-15
    assert abs(evaluate(parse_one("ln(x1)"), x) - math.log(0.7)) < 1e-15


def test_domain_errors_become_non_finite():
    assert math.isnan(evaluate(parse_one("ln(-1)"), (0.0, 0.0)))
    assert math.isinf(evaluate(parse_one("1/0"), (0.0, 0.0)))
    assert math.isnan(evaluate(parse_one("(-2)^0.5"), (0.0, 0.0)))


def test_parse_error_examples():
    with pytest.raises(ParseError):
        parse_equations("f1 = x1 +", 1)
    with pytest.raises(ParseError) as exc:
        parse_equations("f1 = x1 + )", 1)
    assert exc.value.line == 1
    with pytest.raises(ParseError):
        parse_equations("g1 = x1", 1)
    with pytest.raises(ParseError):
        parse_equations("f1 = x1\nf1 = x1", 1)
    with pytest.raises(ParseError):
        parse_equations("f1 = x1", 2)  # missing f2
    with pytest.raises(ParseError):
        parse_equations("f2 = x1", 1)  # index out of range


def test_unknown_identifiers():
    with pytest.raises(UnknownIdentifier):
        parse_equations("f1 = y1", 1)
    with pytest.raises(UnknownIdentifier):
        parse_equations("f1 = sin(x1)", 1)
    with pytest.raises(UnknownIdentifier):
        parse_equations("f1 = x3", 2)


def test_arity_error():
    with pytest.raises(ArityError):
        parse_equations("f1 = exp(x1, x1)", 1)


def test_comments_and_blank_lines():
    trees = parse_equations("# a comment\n\nf2 = x1  # trailing\nf1 = x2\n", 2)
    assert evaluate(trees[0], (5.0, 7.0)) == 7.0
    assert evaluate(trees[1], (5.0, 7.0)) == 5.0


def _random_tree(rng, depth, n):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Num(round(rng.uniform(-3, 3), 3))
        return Var(rng.randint(1, n))
    kind = rng.random()
    if kind < 0.15:
        return Neg(_random_tree(rng, depth - 1, n))
    if kind < 0.3:
        fn = rng.choice(["exp", "sinh", "cosh", "tan", "ln"])
        return Call(fn, _random_tree(rng, depth - 1, n))
    op = rng.choice(["+", "-", "*", "/"])
    return Bin(op, _random_tree(rng, depth - 1, n), _random_tree(rng, depth - 1, n))


def test_pretty_round_trip_on_random_trees():
    rng = random.Random(2024)
    pts = [tuple(rng.uniform(-2, 2) for _ in range(2)) for _ in range(10)]
    for _ in range(100):
        tree = _random_tree(rng, 4, 2)
        text = pretty(tree)
        back = parse_one(text)
        for x in pts:
            a = evaluate(tree, x)
            b = evaluate(back, x)
            if isinstance(a, float) and math.isnan(a):
                assert isinstance(b, float) and math.isnan(b)
            else:
                assert a == b


def test_differentiate_matches_finite_differences():
    rng = random.Random(5)
    samples = [
        "x1^3*x2 - 1",
        "exp(x1) + exp(2*x1)",
        "sinh(x1)*cosh(x2)",
        "tan(x1/3) + ln(x2 + 4)",
        "x1^x2",
        "(x1 + x2)/(x1*x2 + 5)",
    ]
    for text in samples:
        tree = parse_one(text)
        for wrt in (1, 2):
            dtree = differentiate(tree, wrt)
            for _ in range(10):
                x = (rng.uniform(0.3, 1.4), rng.uniform(0.3, 1.4))
                h = 1e-6
                xp = list(x)
                xm = list(x)
                xp[wrt - 1] += h
                xm[wrt - 1] -= h
                fd = (evaluate(tree, xp) - evaluate(tree, xm)) / (2 * h)
                sym = evaluate(dtree, x)
                assert abs(sym - fd) <= 1e-5 * (1.0 + abs(sym))


@given(st.integers(min_value=-50, max_value=50), st.integers(min_value=1, max_value=4))
@settings(max_examples=50)
def test_integer_powers_stay_real(base, power):
    tree = parse_one(f"({base})^{power}", n=1)
    assert evaluate(tree, (0.0,)) == float(base) ** power
