"""
Exact evaluation of quantifier-free formulas at rational assignments
"""

from fractions import Fraction
from typing import Mapping
from models.formula import (
    And, Cong, Div, Eq, Exists, FalseFormula, Forall, Formula, Implies, IsInt,
    Le, Lt, Not, Or, TrueFormula, term_value
)
from utils.helpers import EvaluationError

Assignment = Mapping[str, Fraction]


def divides(left: Fraction, right: Fraction) -> bool:
    """Divisibility on ℕ"""
    if left.denominator != 1 or right.denominator != 1:
        raise EvaluationError(f"div needs integer arguments, got {left} and {right}")
    if left < 0 or right < 0:
        raise EvaluationError(f"div is defined on natural numbers, got {left} and {right}")
    if left == 0:
        return right == 0
    return right.numerator % left.numerator == 0


def evaluate(f: Formula, assignment: Assignment) -> bool:
    """Truth value of a quantifier-free formula"""
    if isinstance(f, TrueFormula):
        return True
    if isinstance(f, FalseFormula):
        return False
    if isinstance(f, Eq):
        return f.form.value(assignment) == 0
    if isinstance(f, Lt):
        return f.form.value(assignment) < 0
    if isinstance(f, Le):
        return f.form.value(assignment) <= 0
    if isinstance(f, IsInt):
        return term_value(f.term, assignment).denominator == 1
    if isinstance(f, Cong):
        return ((f.form.value(assignment) - f.residue) / f.modulus).denominator == 1
    if isinstance(f, Div):
        return divides(term_value(f.left, assignment), term_value(f.right, assignment))
    if isinstance(f, Not):
        return not evaluate(f.arg, assignment)
    if isinstance(f, And):
        return all(evaluate(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, assignment) for a in f.args)
    if isinstance(f, Implies):
        return (not evaluate(f.left, assignment)) or evaluate(f.right, assignment)
    if isinstance(f, (Exists, Forall)):
        raise EvaluationError("Cannot evaluate a quantified formula; eliminate quantifiers first")
    raise TypeError(f"Not a formula: {f!r}")
