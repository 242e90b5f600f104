"""
Tests for floor separation, real and integer variable elimination, and sentence decision
"""

import re
from fractions import Fraction
import pytest
from models.cooper import eliminate_int_var
from models.evaluate import evaluate
from models.formula import AffineForm, free_vars, is_quantifier_free, print_formula
from models.parser import parse_formula
from models.qe import decide_sentence, qe
from models.separation import case_split_floors, split_int_frac, value_range
from models.virtual_substitution import eliminate_real_var
from utils.helpers import EvaluationError, NonAffineError, UndecidableFragmentError
from utils.logger import attach_trace_file, detach_trace_file
from tests.corpus import FormulaGenerator, closure, floor_axioms, oracle_truth

HALVES = [Fraction(k, 2) for k in range(-12, 13)]
EIGHTHS_IN_BOX = [Fraction(k, 8) for k in range(8)]


def agrees(f, g, name, values):
    return all(evaluate(f, {name: v}) == evaluate(g, {name: v}) for v in values)


class TestSeparation:

    def test_floor_in_box_becomes_linear(self):
        f = parse_formula("floor(2 * u) = 1")
        g = case_split_floors(f, ["u"])
        for v in EIGHTHS_IN_BOX:
            assert evaluate(g, {"u": v}) == evaluate(f, {"u": v})

    def test_integrality_in_box(self):
        f = parse_formula("Z(3 * u)")
        g = case_split_floors(f, ["u"])
        for v in [Fraction(k, 12) for k in range(12)]:
            assert evaluate(g, {"u": v}) == evaluate(f, {"u": v})

    def test_mixed_integer_and_fractional_parts(self):
        f = parse_formula("floor(1/2 * k + u) <= 1")
        g = case_split_floors(f, ["u"], ["k"])
        for k in range(-4, 5):
            for u in EIGHTHS_IN_BOX:
                point = {"k": Fraction(k), "u": u}
                assert evaluate(g, point) == evaluate(f, point)

    def test_split_int_frac(self):
        f, split = split_int_frac(parse_formula("x < 1"), "x", "k", "u")
        assert split.original == "x"
        assert free_vars(f) == {"k", "u"}
        assert evaluate(split.equation(), {"x": Fraction(5, 2), "k": Fraction(2), "u": Fraction(1, 2)})

    def test_value_range_of_box_form(self):
        w = AffineForm.var("u", Fraction(3, 2))
        assert [i for i, _ in value_range(w)] == [0, 1]
        assert value_range(AffineForm.const(Fraction(7, 3)))[0][0] == 2


class TestRealElimination:

    def test_interval(self):
        result = eliminate_real_var(parse_formula("x < y & y < 1"), "y")
        assert agrees(result, parse_formula("x < 1"), "x", HALVES)

    def test_equation_substitutes(self):
        result = eliminate_real_var(parse_formula("y = 2 * x & y < 1"), "y")
        assert agrees(result, parse_formula("2 * x < 1"), "x", HALVES)

    def test_weak_and_strict_bounds(self):
        result = eliminate_real_var(parse_formula("x <= y & y <= 0 & 0 < y | y = x + 1 & y < 0"), "y")
        expected = parse_formula("x < -1")
        assert agrees(result, expected, "x", HALVES)

    def test_floor_of_variable_is_rejected(self):
        with pytest.raises(NonAffineError):
            eliminate_real_var(parse_formula("floor(y) < x"), "y")


class TestIntegerElimination:

    def test_even_integers(self):
        result = eliminate_int_var(parse_formula("2 * k = x & 0 <= x"), "k", ["x"])
        for x in range(-6, 7):
            assert evaluate(result, {"x": Fraction(x)}) == (x >= 0 and x % 2 == 0)

    def test_real_parameter(self):
        result = eliminate_int_var(parse_formula("3 * k < x & x < 3 * k + 3"), "k")
        for x in HALVES:
            expected = not (x.denominator == 1 and x.numerator % 3 == 0)
            assert evaluate(result, {"x": x}) == expected

    def test_congruence_on_k(self):
        result = eliminate_int_var(parse_formula("cong(k, 4, 1) & x <= k & k <= x + 2"), "k", ["x"])
        for x in range(-8, 9):
            expected = any((k - 1) % 4 == 0 for k in range(x, x + 3))
            assert evaluate(result, {"x": Fraction(x)}) == expected

    def test_div_is_refused(self):
        with pytest.raises(UndecidableFragmentError):
            eliminate_int_var(parse_formula("div(k, 4) & 0 < k"), "k")


class TestQuantifierElimination:

    def test_result_is_quantifier_free(self):
        result = qe(parse_formula("E y. (x < y & y < 1)"))
        assert is_quantifier_free(result)
        assert free_vars(result) <= {"x"}
        assert agrees(result, parse_formula("x < 1"), "x", HALVES)

    def test_integer_strictly_between(self):
        result = qe(parse_formula("E y. (Z(y) & x < y & y < x + 1)"))
        for x in HALVES:
            assert evaluate(result, {"x": x}) == (x.denominator != 1)

    def test_floor_constraint(self):
        result = qe(parse_formula("E y. (floor(y) = x & y < 1/2)"))
        for x in HALVES:
            assert evaluate(result, {"x": x}) == (x.denominator == 1 and x <= 0)

    def test_universal(self):
        result = qe(parse_formula("A y. (x <= y -> floor(x) <= floor(y))"))
        for x in HALVES:
            assert evaluate(result, {"x": x})

    def test_integer_in_half_open_unit_interval(self):
        result = qe(parse_formula("E x. (Z(x) & y < x & x <= y + 1)"))
        for y in HALVES:
            assert evaluate(result, {"y": y})

    def test_elimination_is_idempotent(self):
        generator = FormulaGenerator(5150)
        for f in generator.sample(30):
            once = qe(f)
            twice = qe(once)
            for _ in range(10):
                point = generator.assignment(free_vars(f))
                assert evaluate(once, point) == evaluate(twice, point), print_formula(f)

    def test_div_under_quantifier(self):
        with pytest.raises(UndecidableFragmentError):
            qe(parse_formula("E x. div(x, 4)"))

    def test_ground_div_is_fine(self):
        assert decide_sentence(parse_formula("div(3, 12) & E x. x = 1"))

    def test_step_trace_lines(self, tmp_path):
        path = tmp_path / "trace.log"
        handler = attach_trace_file(str(path))
        try:
            qe(parse_formula("E y. (floor(y) = x & y < 1/2)"))
        finally:
            detach_trace_file(handler)
        lines = path.read_text().splitlines()
        assert lines
        pattern = re.compile(r"^\S+ (virtual-substitution|case-split-floors|eliminate-fraction"
                             r"|eliminate-integer|restore) atoms=\d+$")
        assert all(pattern.match(line) for line in lines)


SENTENCES = [
    ("A x. floor(x) <= x", True),
    ("A x. x < floor(x) + 1", True),
    ("A x. Z(floor(x))", True),
    ("A x. (Z(x) -> floor(x) = x)", True),
    ("E x. (Z(x) & 0 < x & x < 1)", False),
    ("E x. (x + x = 1)", True),
    ("E x. 2 * floor(x) = 3", False),
    ("E x. 2 * x = 3", True),
    ("A x. floor(x) = x", False),
    ("E x. (floor(x) = 2 & x = 5/2)", True),
    ("E x. (floor(2 * x) = 1 & floor(x) = 1)", False),
    ("A x. (Z(x) -> (Z(1/2 * x) | Z(1/2 * x + 1/2)))", True),
    ("A x. E y. (Z(y) & y <= x & x < y + 1)", True),
    ("E x. (0 < x & x < 1 & Z(3 * x))", True),
    ("A x. (0 < x & x < 1 -> ~Z(x))", True),
    ("E x. E y. (Z(x) & Z(y) & 2 * x + 4 * y = 3)", False),
    ("E x. E y. (Z(x) & Z(y) & 2 * x + 3 * y = 1)", True),
    ("A x. A y. floor(x) + floor(y) <= floor(x + y)", True),
    ("A x. A y. floor(x + y) <= floor(x) + floor(y) + 1", True),
    ("cong(7, 3, 1) & ~div(5, 12)", True),
]

FLOOR_AXIOM_TEXTS = [
    "A x. A y. floor(floor(x) + y) = floor(x) + floor(y)",
    "A x. (0 <= x & x < 1 -> floor(x) = 0)",
    "floor(1) = 1",
    "A x. (floor(x) <= x & x < floor(x) + 1)",
]


class TestDecide:

    @pytest.mark.parametrize("text, expected", SENTENCES)
    def test_curated_sentences(self, text, expected):
        assert decide_sentence(parse_formula(text)) is expected

    @pytest.mark.parametrize("names, body", floor_axioms())
    def test_floor_axioms(self, names, body):
        assert decide_sentence(closure(names, body))

    @pytest.mark.parametrize("text", FLOOR_AXIOM_TEXTS)
    def test_floor_axioms_as_written(self, text):
        assert decide_sentence(parse_formula(text))

    def test_parsed_axioms_match_constructed_ones(self):
        for text, (names, body) in zip(FLOOR_AXIOM_TEXTS, floor_axioms()):
            assert parse_formula(text) == closure(names, body)

    def test_successor_keeps_integrality(self):
        assert decide_sentence(parse_formula("A x. E y. (y = x + 1 & (Z(x) -> Z(y)))"))

    def test_no_integer_and_half_integer(self):
        assert not decide_sentence(parse_formula("E x. (Z(x) & Z(x + 1/2))"))

    def test_free_variables_are_rejected(self):
        with pytest.raises(EvaluationError):
            decide_sentence(parse_formula("x < 1"))


# ==================== Random corpus against an exact oracle ====================

def check_corpus(count: int, assignments: int, seed: int) -> None:
    generator = FormulaGenerator(seed)
    for _ in range(count):
        f = generator.formula()
        result = qe(f)
        text = print_formula(f)
        assert is_quantifier_free(result), text
        assert free_vars(result) <= free_vars(f), text
        for _ in range(assignments):
            point = generator.assignment(free_vars(f))
            assert evaluate(result, point) == oracle_truth(f, point), (text, point)


def test_random_corpus_matches_exact_oracle():
    check_corpus(40, 20, seed=1234)


@pytest.mark.slow
def test_large_random_corpus():
    check_corpus(500, 100, seed=98765)
