"""
Integer/fractional splitting and floor case analysis.

Every variable v is written k_v + u_v with k_v integer and 0 <= u_v < 1. Inside
that box each floor takes finitely many integer values under linear guards on
the u's and residue conditions on the k's, so every atom rewrites into a
boolean combination of pure integer atoms (over k's, integer coefficients) and
pure fractional atoms (over u's, floor-free).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Tuple
from models.formula import (
    AffineForm, And, Atom, Cong, Div, Eq, FALSE, FloorKey, Formula, IsInt, Le, Lt,
    Not, Or, TRUE, Var, atom_vars, atoms_of, conjunction, disjunction, make_cong,
    map_atoms, simplify, substitute, substitute_atom, to_nnf
)
from models.normalize import normal_form
from utils.helpers import EliminationError, RationalHelper, UndecidableFragmentError

# (guard, integer part over int vars with zero constant, fractional part with constant)
Piece = Tuple[Formula, AffineForm, AffineForm]


@dataclass(frozen=True)
class IntFracSplit:
    """original = int_part + frac_part"""
    original: str
    int_part: str
    frac_part: str

    def equation(self) -> Eq:
        return Eq(AffineForm.var(self.original)
                  - AffineForm.var(self.int_part) - AffineForm.var(self.frac_part))

    def box(self) -> Formula:
        u = AffineForm.var(self.frac_part)
        return And((IsInt(Var(self.int_part)), Le(-u), Lt(u - AffineForm.const(1))))


@dataclass(frozen=True)
class FloorCaseSplit:
    """One value of a floor on one guarded piece of the box"""
    floor_subterm: FloorKey
    index: int
    value: AffineForm
    guard: Formula


def split_int_frac(f: Formula, x: str, int_name: str, frac_name: str) -> Tuple[Formula, IntFracSplit]:
    """Replace x by int_name + frac_name and conjoin the box constraints"""
    split = IntFracSplit(x, int_name, frac_name)
    replaced = substitute(f, x, AffineForm.var(int_name) + AffineForm.var(frac_name))
    return conjunction([replaced, split.box()]), split


def _content(form: AffineForm) -> int:
    """Least positive integer making every coefficient and the constant integral"""
    return RationalHelper.lcm_all(
        [c.denominator for _, c in form.terms] + [form.constant.denominator])


def integral_atom(kind, form: AffineForm) -> Formula:
    """Order atom over integer variables scaled to integer coefficients"""
    scaled = form.scale(_content(form))
    if scaled.is_constant():
        return simplify(kind(scaled))
    return kind(scaled)


def _without_constant(form: AffineForm) -> Tuple[AffineForm, Fraction]:
    return AffineForm(form.terms), form.constant


def _residues(k_part: AffineForm) -> List[Tuple[Fraction, Formula, AffineForm]]:
    """Write k_part = M + r/q with M integer valued, one entry per residue r of q*k_part"""
    q = RationalHelper.lcm_all(c.denominator for _, c in k_part.terms)
    if q == 1:
        return [(Fraction(0), TRUE, k_part)]
    scaled = k_part.scale(q)
    return [(Fraction(r, q), make_cong(scaled, q, r), k_part.shift(-Fraction(r, q)))
            for r in range(q)]


def value_range(w: AffineForm) -> List[Tuple[int, Formula]]:
    """Integer values i of ⌊w⌋ for w over box variables, with guards i <= w < i+1"""
    if w.is_constant():
        return [(RationalHelper.floor(w.constant), TRUE)]
    coeffs = [c for _, c in w.terms]
    lo = w.constant + sum(min(c, 0) for c in coeffs)
    hi = w.constant + sum(max(c, 0) for c in coeffs)
    top = -RationalHelper.floor(-hi) - 1 if any(c > 0 for c in coeffs) else RationalHelper.floor(hi)
    bottom = RationalHelper.floor(lo)
    if bottom == top:
        return [(bottom, TRUE)]
    one = AffineForm.const(1)
    return [(i, And((Le(AffineForm.const(i) - w), Lt(w - AffineForm.const(i) - one))))
            for i in range(bottom, top + 1)]


class FloorSeparator:
    """Rewrites atoms over split variables into pure integer and pure fractional atoms"""

    def __init__(self, frac_vars: Iterable[str], int_vars: Iterable[str]):
        self.frac_vars: FrozenSet[str] = frozenset(frac_vars)
        self.int_vars: FrozenSet[str] = frozenset(int_vars)

    def handles(self, atom: Atom) -> bool:
        names = atom_vars(atom)
        return bool(names) and names <= (self.frac_vars | self.int_vars)

    def pieces(self, form: AffineForm) -> List[Piece]:
        acc: List[Piece] = [(TRUE, AffineForm(), AffineForm.const(form.constant))]
        for key, c in form.terms:
            if isinstance(key, str):
                unit = AffineForm.var(key, c)
                if key in self.int_vars:
                    acc = [(g, k + unit, u) for g, k, u in acc]
                elif key in self.frac_vars:
                    acc = [(g, k, u + unit) for g, k, u in acc]
                else:
                    raise EliminationError(f"Variable '{key}' was not split before case analysis")
                continue
            grown: List[Piece] = []
            for case in self.floor_cases(key):
                k_part, const = _without_constant(case.value.scale(c))
                for g, k, u in acc:
                    guard = simplify(conjunction([g, case.guard]))
                    if guard != FALSE:
                        grown.append((guard, k + k_part, u.shift(const)))
            acc = grown
        return acc

    def floor_cases(self, key: FloorKey) -> List[FloorCaseSplit]:
        """Finitely many guarded integer values of ⌊arg⌋"""
        cases: List[FloorCaseSplit] = []
        for g, k, u in self.pieces(key.arg):
            for rq, residue_guard, whole in _residues(k):
                for i, range_guard in value_range(u.shift(rq)):
                    guard = simplify(conjunction([g, residue_guard, range_guard]))
                    if guard != FALSE:
                        cases.append(FloorCaseSplit(key, i, whole.shift(Fraction(i)), guard))
        return cases

    def order_atom(self, atom: Atom) -> Formula:
        form = atom.form
        if not form.has_floors() and not any(k in self.int_vars for k in form.keys()):
            return atom
        kind = type(atom)
        branches: List[Formula] = []
        for g, k, u in self.pieces(form):
            for rq, residue_guard, whole in _residues(k):
                w = u.shift(rq)
                if w.is_constant():
                    i = RationalHelper.floor(w.constant)
                    exact = w.constant == i
                    shifted = whole.shift(Fraction(i))
                    if kind is Lt or (kind is Le and not exact):
                        rel = integral_atom(Lt, shifted)
                    elif kind is Le:
                        rel = integral_atom(Le, shifted)
                    else:
                        rel = integral_atom(Eq, shifted) if exact else FALSE
                    branches.append(conjunction([g, residue_guard, rel]))
                    continue
                for i, range_guard in value_range(w):
                    shifted = whole.shift(Fraction(i))
                    on_value = Eq(w - AffineForm.const(i))
                    if kind is Lt:
                        rel = integral_atom(Lt, shifted)
                    elif kind is Le:
                        rel = disjunction([integral_atom(Lt, shifted),
                                           conjunction([integral_atom(Eq, shifted), on_value])])
                    else:
                        rel = conjunction([integral_atom(Eq, shifted), on_value])
                    branches.append(conjunction([g, residue_guard, range_guard, rel]))
        return simplify(disjunction(branches))

    def integrality(self, form: AffineForm) -> Formula:
        """form is an integer, as a combination of pure atoms"""
        branches: List[Formula] = []
        for g, k, u in self.pieces(form):
            if u.is_constant():
                if k.is_constant():
                    rel = TRUE if u.constant.denominator == 1 else FALSE
                else:
                    whole = k.shift(u.constant)
                    q = _content(whole)
                    rel = TRUE if q == 1 else make_cong(whole.scale(q), q, 0)
                branches.append(conjunction([g, rel]))
                continue
            for rq, residue_guard, _ in _residues(k):
                w = u.shift(rq)
                on_values = disjunction(Eq(w - AffineForm.const(i)) for i, _ in value_range(w))
                branches.append(conjunction([g, residue_guard, on_values]))
        return simplify(disjunction(branches))

    def atom(self, atom: Atom) -> Formula:
        if isinstance(atom, (Eq, Lt, Le)):
            return self.order_atom(atom)
        if isinstance(atom, IsInt):
            if isinstance(atom.term, Var) and atom.term.name in self.int_vars:
                return TRUE
            return self.integrality(normal_form(atom.term))
        if isinstance(atom, Cong):
            shifted = atom.form.shift(-Fraction(atom.residue)).scale(Fraction(1, atom.modulus))
            return self.integrality(shifted)
        if isinstance(atom, Div):
            raise UndecidableFragmentError("div cannot be eliminated under a quantifier")
        raise EliminationError(f"Unexpected atom {atom!r}")


def case_split_floors(f: Formula, frac_vars: Iterable[str],
                      int_vars: Iterable[str] = ()) -> Formula:
    """Remove floors over box-bounded fractional variables.

    Atoms whose variables are all split (fractional or integer) are rewritten;
    any other atom is left untouched.
    """
    separator = FloorSeparator(frac_vars, int_vars)

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return separator.atom(g) if separator.handles(g) else g
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, And):
            return And(tuple(walk(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(walk(a) for a in g.args))
        return g

    return simplify(to_nnf(walk(to_nnf(f))))


def split_atoms_with(f: Formula, x: str, fresh) -> Tuple[Formula, List[IntFracSplit]]:
    """Split every variable of every atom mentioning x; other atoms stay as written.

    fresh is a callable returning an unused (int_name, frac_name) pair.
    """
    names = sorted({v for a in atoms_of(f) if x in atom_vars(a) for v in atom_vars(a)})
    splits = {name: IntFracSplit(name, *fresh(name)) for name in names}

    def rewrite(atom: Atom) -> Atom:
        if x not in atom_vars(atom):
            return atom
        for s in splits.values():
            atom = substitute_atom(
                atom, s.original, AffineForm.var(s.int_part) + AffineForm.var(s.frac_part))
        return atom

    return map_atoms(f, rewrite), list(splits.values())
