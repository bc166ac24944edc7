import random
from fractions import Fraction

import pytest
from sympy import QQ

from services.errors import NOT_LINEAR, DivisionByZero, ValidationError
from services.grassmann import IndexSet
from services.ratfunc import RatFunc, Universe, evaluate, extract_linear, format_ratfunc, substitute

D = IndexSet.of


@pytest.fixture
def pq():
    return Universe(("p", "q"))


def test_cancellation_to_constant(pq):
    p = pq.param("p")
    assert p + (1 - p) == 1
    assert (p + (1 - p)).is_constant


def test_product_of_params(pq):
    p, q = pq.param("p"), pq.param("q")
    assert str(p * q) == "p*q"
    assert (p / q) * (q / p) == 1


def test_square_of_symbol():
    u = Universe((), [D(2, 4)])
    d = u.delta(D(2, 4))
    assert (d * d).numerator.degree(D(2, 4)) == 2
    assert str(d * d) == "D{2,4}^2"


@pytest.mark.parametrize("text", [
    "-(2*p**2*q - q*p)/(q*p*(-1 + 2*p))",
    "-(-q + 2*q*p)/(q*(-1 + 2*p))",
])
def test_displayed_entries_canonicalize_to_minus_one(pq, text):
    f = pq.parse(text)
    assert f.is_constant
    assert f.constant() == -1
    assert str(f) == "-1"


def test_equality_is_cross_multiplication(pq):
    p, q = pq.param("p"), pq.param("q")
    assert p / q == (2 * p) / (2 * q)
    assert p / q != q / p


def test_canonical_form_is_idempotent(pq):
    f = pq.parse("(p**2 - q**2)/(3*p + 3*q)")
    again = RatFunc(pq, f.num, f.den)
    assert again.num == f.num and again.den == f.den
    assert f == pq.parse("(p - q)/3")


def test_denominator_leading_coefficient_is_positive(pq):
    f = pq.one / (1 - pq.param("p"))
    assert f.den.LC > 0
    assert format_ratfunc(f) == "-1/(p - 1)"


def test_substitute_pinned_symbol():
    u = Universe(("p",), [D(1, 4, 7, 8)])
    f = u.delta(D(1, 4, 7, 8)) * u.param("p")
    assert substitute(f, {D(1, 4, 7, 8): 1}) == u.param("p")


def test_substitute_solved_expression_at_point():
    a5, b, d = D(3, 4, 5, 7), D(1, 4, 7, 8), D(2, 4, 7, 8)
    u = Universe(("p", "q"), [a5, b, d])
    p, q = u.param("p"), u.param("q")
    A5, B, Dd = u.delta(a5), u.delta(b), u.delta(d)
    f = -(1 / q) * (A5 - A5 * q - B * p - Dd + p * Dd)
    assert evaluate(f, {a5: 1, b: 1, d: 1, "p": 1, "q": 1}) == 1


def test_substitute_pole_raises(pq):
    f = pq.one / (1 - pq.param("p"))
    with pytest.raises(DivisionByZero):
        substitute(f, {"p": 1})


def test_division_by_zero_value(pq):
    with pytest.raises(DivisionByZero):
        pq.param("p") / pq.zero


def test_extract_linear():
    x1, x2 = IndexSet((1,)), IndexSet((2,))
    u = Universe(("a", "b"), [x1, x2])
    a, b = u.param("a"), u.param("b")
    f = (a * u.delta(x1) * u.delta(x2) + b * u.delta(x2)).numerator
    coeff, rest = extract_linear(f, x1)
    assert coeff == (a * u.delta(x2)).numerator
    assert rest == (b * u.delta(x2)).numerator


def test_extract_linear_not_linear():
    x1 = IndexSet((1,))
    u = Universe((), [x1])
    assert extract_linear((u.delta(x1) ** 2).numerator, x1) is NOT_LINEAR


def test_extract_linear_absent_symbol():
    x1, x2 = IndexSet((1,)), IndexSet((2,))
    u = Universe((), [x1, x2])
    coeff, rest = extract_linear(u.delta(x2).numerator, x1)
    assert coeff.is_zero
    assert rest == u.delta(x2).numerator


def test_evaluate_needs_every_value(pq):
    with pytest.raises(ValidationError):
        evaluate(pq.param("p") + pq.param("q"), {"p": 1})
    assert evaluate(pq.param("p") + pq.param("q"), {"p": 1}, default=Fraction(1, 2)) == Fraction(3, 2)


def test_parse_rejects_undeclared_names(pq):
    with pytest.raises(ValidationError):
        pq.parse("p + z")


def test_latex_fraction(pq):
    f = pq.param("p") / pq.param("q")
    assert f.latex() == r"\frac{p}{q}"


def _dense(u, terms):
    return u.ring.from_dict({m: QQ(c.numerator, c.denominator) for m, c in terms.items()})


def _dense_mul(a, b):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def test_ring_axioms_against_dense_oracle():
    rng = random.Random(7)
    u = Universe(("a", "b", "c"))

    def rand_terms():
        terms = {}
        for _ in range(rng.randint(1, 4)):
            m = tuple(rng.randint(0, 2) for _ in range(3))
            terms[m] = terms.get(m, 0) + Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        return {m: c for m, c in terms.items() if c}

    for _ in range(25):
        ta, tb, tc = rand_terms(), rand_terms(), rand_terms()
        a, b, c = (RatFunc(u, _dense(u, t)) for t in (ta, tb, tc))
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert a * b == RatFunc(u, _dense(u, _dense_mul(ta, tb)))
