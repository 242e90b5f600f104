"""
Quantifier elimination and sentence decision for the floor-augmented linear language
"""

import itertools
from typing import Iterator, List, Set, Tuple
from models.cooper import eliminate_int_var
from models.evaluate import evaluate
from models.formula import (
    AffineForm, And, Div, Exists, FalseFormula, Forall, Formula, Implies,
    Le, Lt, Not, Or, TrueFormula, atom_count, atom_vars, atoms_of, conjunction,
    disjunction, floor_form, free_vars, rename_bound, simplify, substitute, to_nnf
)
from models.normalize import collapse_formula
from models.separation import IntFracSplit, case_split_floors, split_atoms_with
from models.virtual_substitution import eliminate_real_var, occurs_affinely
from config.settings import settings
from utils.helpers import EliminationError, EvaluationError, UndecidableFragmentError
from utils.logger import get_logger, get_trace_logger

logger = get_logger(__name__)


def _contains_div(f: Formula) -> bool:
    return any(isinstance(a, Div) for a in atoms_of(f))


def check_decidable(f: Formula) -> None:
    """Reject div atoms in the scope of a quantifier"""
    if isinstance(f, (Exists, Forall)):
        if _contains_div(f.body):
            raise UndecidableFragmentError(
                f"div occurs under the quantifier on '{f.var}'; the fragment is undecidable")
        return
    if isinstance(f, Not):
        check_decidable(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            check_decidable(a)
    elif isinstance(f, Implies):
        check_decidable(f.left)
        check_decidable(f.right)


class Eliminator:
    """One quantifier elimination run: owns the fresh-name supply and the step trace"""

    def __init__(self, reserved: Set[str]):
        self.reserved = set(reserved)
        self._counter: Iterator[int] = itertools.count(1)
        self.trace = get_trace_logger()

    def fresh_pair(self, name: str) -> Tuple[str, str]:
        """Unused integer-part and fractional-part names for a variable"""
        while True:
            index = next(self._counter)
            k = f"{settings.FRESH_PREFIX}k{index}"
            u = f"{settings.FRESH_PREFIX}u{index}"
            if k not in self.reserved and u not in self.reserved:
                self.reserved.update((k, u))
                return k, u

    def step(self, var: str, pass_name: str, f: Formula) -> None:
        self.trace.info(f"{var} {pass_name} atoms={atom_count(f)}")

    def run(self, f: Formula) -> Formula:
        if isinstance(f, Exists):
            return self.exists(f.var, self.run(f.body))
        if isinstance(f, Forall):
            body = to_nnf(Not(self.run(f.body)))
            return simplify(to_nnf(Not(self.exists(f.var, body))))
        if isinstance(f, Not):
            return simplify(Not(self.run(f.arg)))
        if isinstance(f, And):
            return simplify(conjunction(self.run(a) for a in f.args))
        if isinstance(f, Or):
            return simplify(disjunction(self.run(a) for a in f.args))
        if isinstance(f, Implies):
            return simplify(Or((Not(self.run(f.left)), self.run(f.right))))
        return simplify(f)

    def exists(self, x: str, body: Formula) -> Formula:
        """∃x body for a quantifier-free body"""
        body = simplify(to_nnf(body))
        if x not in free_vars(body):
            return body
        if isinstance(body, Or):
            return simplify(disjunction(self.exists(x, d) for d in body.args))

        if occurs_affinely(body, x):
            result = eliminate_real_var(body, x)
            self.step(x, "virtual-substitution", result)
            return result

        separated, splits = split_atoms_with(body, x, self.fresh_pair)
        split_x = next(s for s in splits if s.original == x)
        int_vars = [s.int_part for s in splits]
        frac_vars = [s.frac_part for s in splits]
        separated = conjunction([case_split_floors(separated, frac_vars, int_vars),
                                 self._box(split_x)])
        self.step(x, "case-split-floors", separated)

        separated = eliminate_real_var(separated, split_x.frac_part)
        self.step(x, "eliminate-fraction", separated)
        separated = eliminate_int_var(separated, split_x.int_part, int_vars)
        self.step(x, "eliminate-integer", separated)

        result = self._restore(separated, [s for s in splits if s.original != x])
        self.step(x, "restore", result)
        return result

    @staticmethod
    def _box(split: IntFracSplit) -> Formula:
        u = AffineForm.var(split.frac_part)
        return And((Le(-u), Lt(u - AffineForm.const(1))))

    def _restore(self, f: Formula, splits: List[IntFracSplit]) -> Formula:
        """k_y := ⌊y⌋ and u_y := y − ⌊y⌋ for the free variables that were split"""
        for s in splits:
            whole = floor_form(AffineForm.var(s.original))
            f = substitute(f, s.int_part, whole)
            f = substitute(f, s.frac_part, AffineForm.var(s.original) - whole)
        leftover = free_vars(f) & {name for s in splits for name in (s.int_part, s.frac_part)}
        if leftover:
            raise EliminationError(f"Split variables survived elimination: {sorted(leftover)}")
        return simplify(f)


def qe(f: Formula) -> Formula:
    """Quantifier-free formula equivalent to f over the reals"""
    check_decidable(f)
    f = collapse_formula(rename_bound(f))
    eliminator = Eliminator(free_vars(f) | {a for atom in atoms_of(f) for a in atom_vars(atom)}
                            | _bound_names(f))
    result = eliminator.run(f)
    logger.info(f"Eliminated quantifiers: {atom_count(f)} atoms in, {atom_count(result)} atoms out")
    return result


def _bound_names(f: Formula) -> Set[str]:
    if isinstance(f, (Exists, Forall)):
        return {f.var} | _bound_names(f.body)
    if isinstance(f, Not):
        return _bound_names(f.arg)
    if isinstance(f, (And, Or)):
        return set().union(*(_bound_names(a) for a in f.args))
    if isinstance(f, Implies):
        return _bound_names(f.left) | _bound_names(f.right)
    return set()


def decide_sentence(f: Formula) -> bool:
    """Truth value of a sentence in the standard model"""
    names = free_vars(f)
    if names:
        raise EvaluationError(f"Not a sentence; free variables {sorted(names)}")
    result = qe(f)
    if isinstance(result, TrueFormula):
        return True
    if isinstance(result, FalseFormula):
        return False
    return evaluate(result, {})
