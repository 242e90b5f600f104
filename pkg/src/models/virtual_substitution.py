"""
Elimination of a real variable from a linear formula by test points
"""

from typing import List, Optional, Tuple
from models.formula import (
    AffineForm, And, Atom, Eq, FALSE, Formula, Le, Lt, TRUE, atom_vars, disjunction,
    map_atoms, simplify, substitute_atom, to_nnf
)
from utils.helpers import NonAffineError
from utils.logger import get_logger

logger = get_logger(__name__)

EXACT = "exact"
EPSILON = "epsilon"
MINUS_INFINITY = "-inf"


def _check_affine(f: Formula, u: str) -> None:
    """u may only occur linearly in order atoms, never under a floor"""
    def visit(atom: Atom) -> Atom:
        if u not in atom_vars(atom):
            return atom
        if isinstance(atom, (Eq, Lt, Le)):
            if any(k.arg.mentions(u) for k in atom.form.floor_keys()):
                raise NonAffineError(f"'{u}' occurs inside a floor in {atom}")
            return atom
        raise NonAffineError(f"'{u}' occurs in a non-order atom {type(atom).__name__}")
    map_atoms(f, visit)


def occurs_affinely(f: Formula, u: str) -> bool:
    try:
        _check_affine(f, u)
    except NonAffineError:
        return False
    return True


def _gauss_equation(f: Formula, u: str) -> Optional[Eq]:
    parts = f.args if isinstance(f, And) else (f,)
    for part in parts:
        if isinstance(part, Eq) and part.form.coeff(u) != 0:
            return part
    return None


def _test_points(f: Formula, u: str) -> List[Tuple[AffineForm, str]]:
    """Lower-bound test points: exact for equations and weak bounds, +ε for strict bounds"""
    points: List[Tuple[AffineForm, str]] = []
    seen = set()
    for atom in _order_atoms(f):
        a = atom.form.coeff(u)
        if a == 0:
            continue
        point = atom.form.drop(u).scale(-1 / a)
        if isinstance(atom, Eq) or (isinstance(atom, Le) and a < 0):
            entry = (point, EXACT)
        elif isinstance(atom, Lt) and a < 0:
            entry = (point, EPSILON)
        else:
            continue
        if entry not in seen:
            seen.add(entry)
            points.append(entry)
    return points


def _order_atoms(f: Formula) -> List[Atom]:
    found: List[Atom] = []

    def visit(atom: Atom) -> Atom:
        if isinstance(atom, (Eq, Lt, Le)):
            found.append(atom)
        return atom
    map_atoms(f, visit)
    return found


def _at_epsilon(atom: Atom, u: str, point: AffineForm) -> Formula:
    a = atom.form.coeff(u)
    if a == 0:
        return atom
    at_point = atom.form.substitute(u, point)
    if isinstance(atom, Eq):
        return FALSE
    return Lt(at_point) if a > 0 else Le(at_point)


def _at_minus_infinity(atom: Atom, u: str) -> Formula:
    a = atom.form.coeff(u)
    if a == 0:
        return atom
    if isinstance(atom, Eq):
        return FALSE
    return TRUE if a > 0 else FALSE


def _substitute_point(f: Formula, u: str, point: AffineForm, kind: str) -> Formula:
    def visit(atom: Atom) -> Formula:
        if not isinstance(atom, (Eq, Lt, Le)) or atom.form.coeff(u) == 0:
            return atom
        if kind == EXACT:
            return substitute_atom(atom, u, point)
        if kind == EPSILON:
            return _at_epsilon(atom, u, point)
        return _at_minus_infinity(atom, u)
    return simplify(map_atoms(f, visit))


def eliminate_real_var(f: Formula, u: str) -> Formula:
    """Quantifier-free equivalent of ∃u f over the reals"""
    f = simplify(to_nnf(f))
    _check_affine(f, u)
    if u not in {v for atom in _order_atoms(f) for v in atom.form.variables()}:
        return f

    equation = _gauss_equation(f, u)
    if equation is not None:
        a = equation.form.coeff(u)
        point = equation.form.drop(u).scale(-1 / a)
        return _substitute_point(f, u, point, EXACT)

    branches = [_substitute_point(f, u, AffineForm(), MINUS_INFINITY)]
    for point, kind in _test_points(f, u):
        branches.append(_substitute_point(f, u, point, kind))
    result = simplify(disjunction(branches))
    logger.debug(f"Eliminated real variable {u} using {len(branches)} test points")
    return result
