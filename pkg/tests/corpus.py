"""
Random guarded formulas and an exact truth oracle for them, shared by the elimination and printer tests
"""

import math
import random
from fractions import Fraction
from typing import Dict, Iterable, List, Set, Tuple
from models.evaluate import evaluate
from models.formula import (
    AffineForm, And, Cong, Const, Eq, Exists, Floor, FloorKey, Forall, Formula, Implies, IsInt, Le,
    Lt, Not, Or, Sum, Var, form_to_term, is_quantifier_free, make_cong
)
from models.normalize import raw_form
from utils.helpers import RationalHelper

BOUND = Fraction(1)
DENOMINATORS = (1, 2, 3, 7)
BOUND_COEFFICIENTS = [Fraction(c) for c in ("1", "-1", "2", "-2", "1/2", "-1/2", "1/3", "2/7")]
FREE_COEFFICIENTS = [Fraction(c) for c in (-1, 0, 1, 2)]
CONSTANTS = [Fraction(n, d) for d in DENOMINATORS for n in range(-3, 4)]

Assignment = Dict[str, Fraction]


class FormulaGenerator:
    """Formulas with one or two bounded quantifiers over at most three variables.

    Every quantifier is guarded to [-1, 1]: `E v. (-1 <= v & v <= 1 & body)` or
    `A v. (-1 <= v & v <= 1 -> body)`. Counting a guarded quantifier as one level, the
    nesting depth stays at four or less.

    Under a single quantifier the bound variable takes rational coefficients and the
    constants have denominators 1, 2, 3 and 7. Under two nested quantifiers both bound
    variables get coefficients in {-1, 0, 1} and every other number is an integer, so the
    vertices of the arrangement in the bound plane sit on (1/2q)Z, q being the
    denominator of the free value.
    """

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def sample(self, count: int) -> List[Formula]:
        return [self.formula() for _ in range(count)]

    def formula(self) -> Formula:
        return self.nested() if self.rng.random() < 0.3 else self.single()

    def single(self) -> Formula:
        free = ["x", "w"] if self.rng.random() < 0.3 else ["x"]
        depth = self.rng.choice((1, 1, 2, 2, 3))
        return self.guarded("y", self.body(["y"] + free, depth, unit=False))

    def nested(self) -> Formula:
        inner = self.guarded("z", self.body(["z", "y", "x"], self.rng.randint(0, 1), unit=True))
        if self.rng.random() < 0.5:
            return self.guarded("y", inner)
        other = self.literal(["y", "x"], unit=True)
        combine = And if self.rng.random() < 0.5 else Or
        return self.guarded("y", combine((inner, other)))

    def guarded(self, var: str, body: Formula) -> Formula:
        v = AffineForm.var(var)
        guard = (Le(-v - AffineForm.const(BOUND)), Le(v - AffineForm.const(BOUND)))
        if self.rng.random() < 0.5:
            return Exists(var, And(guard + (body,)))
        return Forall(var, Implies(And(guard), body))

    def body(self, names: List[str], depth: int, unit: bool) -> Formula:
        if depth == 0:
            return self.atom(names, unit)
        if self.rng.random() < 0.3:
            return self.literal(names, unit)
        left = self.body(names, depth - 1, unit)
        right = self.body(names, depth - 1, unit)
        kind = self.rng.randrange(3)
        if kind == 0:
            return Implies(left, right)
        return (And if kind == 1 else Or)((left, right))

    def literal(self, names: List[str], unit: bool) -> Formula:
        atom = self.atom(names, unit)
        return Not(atom) if self.rng.random() < 0.2 else atom

    def atom(self, names: List[str], unit: bool) -> Formula:
        form = self.affine(names, unit, floors=2)
        kind = self.rng.random()
        if kind < 0.15:
            return IsInt(form_to_term(form))
        if kind < 0.25:
            modulus = self.rng.randint(2, 3)
            return make_cong(form, modulus, self.rng.randrange(modulus))
        return self.rng.choice((Eq, Lt, Le))(form)

    def affine(self, names: List[str], unit: bool, floors: int) -> AffineForm:
        """Affine form over names; the first name is the innermost bound variable"""
        coeffs: Dict = {}
        for i, name in enumerate(names):
            bound = name in ("y", "z")
            if unit and bound:
                c = Fraction(self.rng.choice((-1, 0, 1)))
            elif bound:
                c = self.rng.choice(BOUND_COEFFICIENTS)
            else:
                c = self.rng.choice(FREE_COEFFICIENTS)
            if i == 0 and c == 0:
                c = Fraction(1)
            coeffs[name] = c
        if floors and self.rng.random() < 0.4:
            key = FloorKey(self.affine(names, unit, floors - 1))
            coeffs[key] = Fraction(self.rng.choice((-1, 1, 2)))
        if unit:
            constant = Fraction(self.rng.randint(-2, 2))
        else:
            constant = self.rng.choice(CONSTANTS)
        return AffineForm.build(coeffs, constant)

    def assignment(self, names: Iterable[str]) -> Assignment:
        values = {}
        for name in sorted(names):
            d = self.rng.choice(DENOMINATORS)
            values[name] = Fraction(self.rng.randint(-3 * d, 3 * d), d)
        return values


# ==================== Exact oracle ====================

def _crossings(form: AffineForm, var: str, assignment: Assignment, lo: Fraction, hi: Fraction,
               integral: bool) -> Set[Fraction]:
    """Points of [lo, hi] where form meets Z (integral) or 0, plus the jumps of its floors"""
    found = {lo, hi}
    for key in form.floor_keys():
        found |= _crossings(key.arg, var, assignment, lo, hi, True)
    slope = form.coeff(var)
    if slope == 0:
        return found
    cuts = sorted(found)
    for a, b in zip(cuts, cuts[1:]):
        middle = (a + b) / 2
        base = form.value({**assignment, var: middle})
        ends = sorted((base + slope * (a - middle), base + slope * (b - middle)))
        if integral:
            targets = range(math.ceil(ends[0]), math.floor(ends[1]) + 1)
        else:
            targets = [0] if ends[0] <= 0 <= ends[1] else []
        found.update(middle + (n - base) / slope for n in targets)
    return found


def breakpoints(f: Formula, var: str, assignment: Assignment, lo: Fraction = -BOUND,
                hi: Fraction = BOUND) -> Set[Fraction]:
    """Points of [lo, hi] outside of which a quantifier-free f is locally constant in var"""
    if isinstance(f, (Eq, Lt, Le)):
        return _crossings(f.form, var, assignment, lo, hi, False)
    if isinstance(f, IsInt):
        return _crossings(raw_form(f.term), var, assignment, lo, hi, True)
    if isinstance(f, Cong):
        scaled = f.form.shift(-Fraction(f.residue)).scale(Fraction(1, f.modulus))
        return _crossings(scaled, var, assignment, lo, hi, True)
    if isinstance(f, Not):
        return breakpoints(f.arg, var, assignment, lo, hi)
    if isinstance(f, (And, Or)):
        return set().union(*(breakpoints(a, var, assignment, lo, hi) for a in f.args))
    if isinstance(f, Implies):
        return (breakpoints(f.left, var, assignment, lo, hi)
                | breakpoints(f.right, var, assignment, lo, hi))
    return {lo, hi}


def search_points(body: Formula, var: str, assignment: Assignment) -> List[Fraction]:
    """Every breakpoint in the guard interval and one point between each pair of them"""
    if is_quantifier_free(body):
        cuts = sorted(breakpoints(body, var, assignment))
    else:
        q = RationalHelper.lcm_all(v.denominator for v in assignment.values())
        step = Fraction(1, 2 * q)
        cuts = [-BOUND + k * step for k in range(int(2 * BOUND / step) + 1)]
    return cuts + [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]


def oracle_truth(f: Formula, assignment: Assignment) -> bool:
    """Truth of a generated formula, with every bound variable searched inside its guard"""
    if isinstance(f, (Exists, Forall)):
        values = (oracle_truth(f.body, {**assignment, f.var: p})
                  for p in search_points(f.body, f.var, assignment))
        return any(values) if isinstance(f, Exists) else all(values)
    if isinstance(f, Not):
        return not oracle_truth(f.arg, assignment)
    if isinstance(f, And):
        return all(oracle_truth(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(oracle_truth(a, assignment) for a in f.args)
    if isinstance(f, Implies):
        return not oracle_truth(f.left, assignment) or oracle_truth(f.right, assignment)
    return evaluate(f, assignment)


# ==================== Floor axioms ====================

def floor_axioms() -> List[Tuple[Tuple[str, ...], Formula]]:
    """The four floor axioms as (universally bound names, quantifier-free body)"""
    x, y = Var("x"), Var("y")
    fx = raw_form(Floor(x))
    one = AffineForm.const(1)
    nested = Eq(raw_form(Floor(Sum(Floor(x), y))) - raw_form(Sum(Floor(x), Floor(y))))
    unit_box = Implies(And((Le(-raw_form(x)), Lt(raw_form(x) - one))), Eq(fx))
    floor_one = Eq(raw_form(Floor(Const(Fraction(1)))) - one)
    bracket = And((Le(fx - raw_form(x)), Lt(raw_form(x) - fx - one)))
    return [(("x", "y"), nested), (("x",), unit_box), ((), floor_one), (("x",), bracket)]


def closure(names: Tuple[str, ...], body: Formula) -> Formula:
    for name in reversed(names):
        body = Forall(name, body)
    return body

