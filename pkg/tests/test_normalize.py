"""
Tests for term normalization, evaluation and the residue lemma
"""

import random
from fractions import Fraction
import pytest
from models.cooper import floor_residue
from models.evaluate import divides, evaluate
from models.formula import AffineForm, Const, Eq, Floor, FloorKey, Scale, Sum, Var, term_value
from models.normalize import (
    collapse_floors, collapse_form, collapse_formula, linear_normalize, normal_form, raw_form
)
from models.parser import parse_formula, parse_term
from utils.helpers import EvaluationError
from tests.corpus import floor_axioms

COEFFICIENTS = [Fraction(n, d) for n in range(-3, 4) for d in (1, 2, 3) if n]


def random_term(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.6:
            return Var(rng.choice("xy"))
        return Const(rng.choice(COEFFICIENTS))
    kind = rng.randrange(3)
    if kind == 0:
        return Scale(rng.choice(COEFFICIENTS), random_term(rng, depth - 1))
    if kind == 1:
        return Sum(random_term(rng, depth - 1), random_term(rng, depth - 1))
    return Floor(random_term(rng, depth - 1))


def random_assignment(rng: random.Random):
    return {name: Fraction(rng.randint(-40, 40), rng.choice((1, 2, 3, 5, 7))) for name in "xy"}


class TestNormalForm:

    def test_linear_terms_collect(self):
        form = linear_normalize(parse_term("2 * x + 3 - x + 1/2"))
        assert form.coeff("x") == 1
        assert form.constant == Fraction(7, 2)

    def test_integer_parts_leave_floors(self):
        form = normal_form(parse_term("floor(x + 3/2)"))
        assert form.constant == 1
        (key, coeff), = form.terms
        assert isinstance(key, FloorKey) and coeff == 1
        assert key.arg.constant == Fraction(1, 2)

    def test_nested_floor_collapses(self):
        form = normal_form(parse_term("floor(floor(x) + 1/2)"))
        (key, coeff), = form.terms
        assert key.arg.terms == (("x", Fraction(1)),)

    def test_floor_of_integer_constant(self):
        assert collapse_floors(Floor(Const(Fraction(5)))) == Const(Fraction(5))

    def test_raw_form_keeps_floors_as_written(self):
        form = raw_form(parse_term("floor(floor(x) + 1/2) + floor(2)"))
        keys = form.floor_keys()
        assert len(keys) == 2
        assert form.constant == 0
        assert collapse_form(form) == normal_form(parse_term("floor(floor(x) + 1/2) + floor(2)"))
        assert collapse_form(form).constant == 2

    def test_collapse_formula_merges_nested_floors(self):
        f = parse_formula("floor(floor(x) + y) = floor(x) + floor(y)")
        assert collapse_formula(f) == Eq(AffineForm.const(0))
        g = parse_formula("cong(floor(x + 3), 2, 1)")
        assert collapse_formula(g) == parse_formula("cong(floor(x), 2, 0)")

    def test_normalization_preserves_value(self):
        rng = random.Random(20240531)
        for _ in range(1000):
            term = random_term(rng, 3)
            point = random_assignment(rng)
            expected = term_value(term, point)
            assert term_value(collapse_floors(term), point) == expected
            assert normal_form(term).value(point) == expected


class TestResidue:

    def test_unique_residue(self):
        for m in range(1, 13):
            for b in range(-50, 51):
                i = floor_residue(b, m)
                assert 0 <= i < m
                assert (b + i) % m == 0
                assert [j for j in range(m) if (b + j) % m == 0] == [i]

    def test_examples(self):
        assert floor_residue(7, 3) == 2
        assert floor_residue(-7, 3) == 1
        assert floor_residue(12345, 1) == 0

    def test_modulus_must_be_positive(self):
        with pytest.raises(ValueError):
            floor_residue(3, 0)


class TestEvaluate:

    def test_floor_axioms_hold_pointwise(self):
        rng = random.Random(7)
        axioms = [parse_formula("floor(x) <= x"), parse_formula("x < floor(x) + 1"),
                  parse_formula("Z(floor(x))")]
        for _ in range(200):
            point = random_assignment(rng)
            assert all(evaluate(a, point) for a in axioms)

    def test_constructed_floor_axioms_hold_pointwise(self):
        rng = random.Random(11)
        points = [random_assignment(rng) for _ in range(200)]
        points += [{"x": Fraction(k, 7), "y": Fraction(-k, 3)} for k in range(7)]
        for _, body in floor_axioms():
            collapsed = collapse_formula(body)
            for point in points:
                assert evaluate(body, point)
                assert evaluate(collapsed, point)

    def test_congruence_semantics(self):
        f = parse_formula("cong(x, 3, 1)")
        assert evaluate(f, {"x": Fraction(7)})
        assert not evaluate(f, {"x": Fraction(8)})
        assert not evaluate(f, {"x": Fraction(1, 2)})

    def test_divisibility_on_naturals(self):
        assert divides(Fraction(3), Fraction(12))
        assert not divides(Fraction(5), Fraction(12))
        assert divides(Fraction(0), Fraction(0))
        with pytest.raises(EvaluationError):
            divides(Fraction(-2), Fraction(4))
        with pytest.raises(EvaluationError):
            divides(Fraction(1, 2), Fraction(4))

    def test_quantified_formula_is_rejected(self):
        with pytest.raises(EvaluationError):
            evaluate(parse_formula("E x. x < 1"), {})

    def test_unassigned_variable(self):
        with pytest.raises(EvaluationError):
            evaluate(parse_formula("x < y"), {"x": Fraction(0)})
