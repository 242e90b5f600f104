"""
Integer variable elimination by congruence case analysis and boundary test points
"""

from fractions import Fraction
from typing import FrozenSet, Iterable, List
from models.formula import (
    AffineForm, Atom, Cong, Div, Eq, FALSE, Formula, IsInt, Le, Lt, Not, TRUE,
    atom_vars, conjunction, disjunction, floor_form, make_cong, map_atoms, simplify,
    substitute_atom, to_nnf
)
from models.normalize import normal_form
from config.settings import settings
from utils.helpers import (
    EliminationError, NonAffineError, RationalHelper, UndecidableFragmentError
)
from utils.logger import get_logger

logger = get_logger(__name__)


def floor_residue(b: int, m: int) -> int:
    """The unique i in {0, ..., m-1} with m | (b + i)"""
    if m <= 0:
        raise ValueError(f"Modulus must be positive, got {m}")
    return (-b) % m


def _expand_negations(f: Formula, k: str) -> Formula:
    """Negated congruences on k become disjunctions over the other residues"""
    def visit(g: Formula) -> Formula:
        if isinstance(g, Not) and isinstance(g.arg, Cong) and k in atom_vars(g.arg):
            c = g.arg
            return disjunction(Cong(c.form, c.modulus, r) for r in range(c.modulus) if r != c.residue)
        if isinstance(g, Not) and isinstance(g.arg, IsInt) and k in atom_vars(g.arg):
            return _expand_negations(Not(_as_congruence(g.arg)), k)
        if isinstance(g, IsInt) and k in atom_vars(g):
            return _as_congruence(g)
        if isinstance(g, Div) and k in atom_vars(g):
            raise UndecidableFragmentError("div cannot be eliminated under a quantifier")
        if hasattr(g, "args"):
            return type(g)(tuple(visit(a) for a in g.args))
        return g
    return visit(f)


def _as_congruence(atom: IsInt) -> Cong:
    return make_cong(normal_form(atom.term), 1, 0)


def _check_linear(f: Formula, k: str) -> None:
    def visit(atom: Atom) -> Atom:
        if k not in atom_vars(atom):
            return atom
        if isinstance(atom, (Eq, Lt, Le, Cong)):
            if any(key.arg.mentions(k) for key in atom.form.floor_keys()):
                raise NonAffineError(f"'{k}' occurs inside a floor in {atom}")
            return atom
        raise NonAffineError(f"'{k}' occurs in a non-linear position in {atom}")
    map_atoms(f, visit)


def _integral_atom(atom: Atom, k: str) -> Atom:
    """Rescale so the coefficient of k is an integer.

    Order atoms are cleared of every denominator, congruences only of the one on k.
    """
    if isinstance(atom, Cong):
        d = atom.form.coeff(k).denominator
        if d == 1:
            return atom
        return make_cong(atom.form.scale(d), atom.modulus * d, atom.residue * d)
    if isinstance(atom, (Eq, Lt, Le)):
        content = RationalHelper.lcm_all(
            [c.denominator for _, c in atom.form.terms] + [atom.form.constant.denominator])
        return type(atom)(atom.form.scale(content))
    return atom


def _unit_coefficients(f: Formula, k: str):
    """Scale every atom so k has coefficient ±L, then read L·k as a new k.

    Returns the rewritten formula and L.
    """
    f = map_atoms(f, lambda a: _integral_atom(a, k) if k in atom_vars(a) else a)
    common = Fraction(RationalHelper.lcm_all(
        int(abs(a.form.coeff(k))) for a in _linear_atoms(f, k)))

    def rescale(atom: Atom) -> Atom:
        if k not in atom_vars(atom) or not isinstance(atom, (Eq, Lt, Le, Cong)):
            return atom
        a = atom.form.coeff(k)
        factor = common / abs(a)
        sign = 1 if a > 0 else -1
        if isinstance(atom, Cong):
            if factor.denominator != 1:
                raise EliminationError(f"Non-integral congruence rescaling {factor}")
            scaled = atom.form.scale(factor).drop(k) + AffineForm.var(k, sign)
            return make_cong(scaled, atom.modulus * int(factor), atom.residue * int(factor))
        scaled = atom.form.scale(factor).drop(k) + AffineForm.var(k, sign)
        return type(atom)(scaled)

    return map_atoms(f, rescale), common


def _linear_atoms(f: Formula, k: str) -> List[Atom]:
    found: List[Atom] = []

    def visit(atom: Atom) -> Atom:
        if isinstance(atom, (Eq, Lt, Le, Cong)) and atom.form.coeff(k) != 0:
            found.append(atom)
        return atom
    map_atoms(f, visit)
    return found


def _ceiling(form: AffineForm, int_vars: FrozenSet[str]) -> AffineForm:
    return -floor_form(-form, int_vars)


def _lower_bounds(f: Formula, k: str, int_vars: FrozenSet[str]) -> List[AffineForm]:
    """Least integer values of k allowed by each lower bound (k has coefficient ±1)"""
    bounds: List[AffineForm] = []
    for atom in _linear_atoms(f, k):
        a = atom.form.coeff(k)
        rest = atom.form.drop(k)
        if isinstance(atom, Eq):
            bound = _ceiling(rest.scale(-a), int_vars)
        elif isinstance(atom, Lt) and a < 0:
            bound = floor_form(rest, int_vars) + AffineForm.const(1)
        elif isinstance(atom, Le) and a < 0:
            bound = _ceiling(rest, int_vars)
        else:
            continue
        if bound not in bounds:
            bounds.append(bound)
    return bounds


def _at_minus_infinity(f: Formula, k: str) -> Formula:
    def visit(atom: Atom) -> Formula:
        if not isinstance(atom, (Eq, Lt, Le)) or atom.form.coeff(k) == 0:
            return atom
        if isinstance(atom, Eq):
            return FALSE
        return TRUE if atom.form.coeff(k) > 0 else FALSE
    return simplify(map_atoms(f, visit))


def _period(f: Formula, k: str) -> int:
    moduli = [a.modulus for a in _linear_atoms(f, k) if isinstance(a, Cong)]
    return RationalHelper.lcm_all(moduli)


def eliminate_int_var(f: Formula, k: str, int_vars: Iterable[str] = ()) -> Formula:
    """Quantifier-free equivalent of ∃k (Z(k) ∧ f).

    Parameters listed in int_vars are known to be integers, which keeps the
    test points floor-free when their coefficients are integral.
    """
    int_vars = frozenset(int_vars) | {k}
    f = simplify(to_nnf(f))
    f = simplify(_expand_negations(f, k))
    _check_linear(f, k)
    if not _linear_atoms(f, k):
        return f

    f, scale = _unit_coefficients(f, k)
    if scale != 1:
        f = conjunction([f, Cong(AffineForm.var(k), int(scale), 0)])
    delta = _period(f, k)
    if delta > settings.MAX_COOPER_DELTA:
        raise EliminationError(f"Congruence period {delta} exceeds the configured limit")

    branches: List[Formula] = []
    at_infinity = _at_minus_infinity(f, k)
    for j in range(delta):
        branches.append(_substitute(at_infinity, k, AffineForm.const(j)))
    for bound in _lower_bounds(f, k, int_vars):
        for j in range(delta):
            branches.append(_substitute(f, k, bound + AffineForm.const(j)))
    result = simplify(disjunction(branches))
    logger.debug(f"Eliminated integer variable {k}: period {delta}, {len(branches)} branches")
    return result


def _substitute(f: Formula, k: str, value: AffineForm) -> Formula:
    return simplify(map_atoms(f, lambda a: substitute_atom(a, k, value)
                              if k in atom_vars(a) else a))
