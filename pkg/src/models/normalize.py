"""
Floor collapse and affine normal form for terms
"""

from fractions import Fraction
from models.formula import (
    AffineForm, Atom, Cong, Const, Eq, Floor, FloorKey, Formula, Le, Lt, Scale, Sum, Term, Var,
    floor_form, form_to_term, make_cong, map_atoms
)


def collapse_floors(term: Term) -> Term:
    """Rewrite every floor so no floor of an integer combination remains.

    ⌊⌊t⌋ + s⌋ becomes ⌊t⌋ + ⌊s⌋ and ⌊n⌋ becomes n for integer constants n.
    Non-floor structure is kept as written.
    """
    if isinstance(term, (Const, Var)):
        return term
    if isinstance(term, Scale):
        return Scale(term.coeff, collapse_floors(term.arg))
    if isinstance(term, Sum):
        return Sum(collapse_floors(term.left), collapse_floors(term.right))
    if isinstance(term, Floor):
        inner = linear_normalize(collapse_floors(term.arg))
        return form_to_term(floor_form(inner))
    raise TypeError(f"Not a term: {term!r}")


def linear_normalize(term: Term) -> AffineForm:
    """Affine normal form Σ qᵢ·gᵢ + q₀ with floors as opaque generators"""
    if isinstance(term, Const):
        return AffineForm.const(term.value)
    if isinstance(term, Var):
        return AffineForm.var(term.name)
    if isinstance(term, Scale):
        return linear_normalize(term.arg).scale(term.coeff)
    if isinstance(term, Sum):
        return linear_normalize(term.left) + linear_normalize(term.right)
    if isinstance(term, Floor):
        return floor_form(linear_normalize(term.arg))
    raise TypeError(f"Not a term: {term!r}")


def normal_form(term: Term) -> AffineForm:
    """collapse_floors followed by linear_normalize"""
    return linear_normalize(collapse_floors(term))


def raw_form(term: Term) -> AffineForm:
    """Affine form of a term as written.

    Sums and scalars are multiplied out, but every floor stays one generator over its
    argument, so ⌊⌊x⌋ + y⌋ and ⌊1⌋ survive for printing.
    """
    if isinstance(term, Const):
        return AffineForm.const(term.value)
    if isinstance(term, Var):
        return AffineForm.var(term.name)
    if isinstance(term, Scale):
        return raw_form(term.arg).scale(term.coeff)
    if isinstance(term, Sum):
        return raw_form(term.left) + raw_form(term.right)
    if isinstance(term, Floor):
        return AffineForm(((FloorKey(raw_form(term.arg)), Fraction(1)),))
    raise TypeError(f"Not a term: {term!r}")


def collapse_form(form: AffineForm) -> AffineForm:
    """Collapse every floor generator of a form, innermost first"""
    if not form.has_floors():
        return form
    result = AffineForm.const(form.constant)
    for key, c in form.terms:
        if isinstance(key, FloorKey):
            result = result + floor_form(collapse_form(key.arg)).scale(c)
        else:
            result = result + AffineForm.var(key, c)
    return result


def _collapse_atom(atom: Atom) -> Atom:
    if isinstance(atom, (Eq, Lt, Le)):
        return type(atom)(collapse_form(atom.form))
    if isinstance(atom, Cong):
        return make_cong(collapse_form(atom.form), atom.modulus, atom.residue)
    return atom


def collapse_formula(f: Formula) -> Formula:
    """f with the floors of every linear and congruence atom collapsed"""
    return map_atoms(f, _collapse_atom)
