"""
Terms, affine forms, atoms and formulas of the floor-augmented linear language
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union
from utils.helpers import EvaluationError, RationalHelper

ZERO = Fraction(0)
ONE = Fraction(1)


# ==================== Terms ====================

class Term:
    """Base class of term nodes"""
    pass


@dataclass(frozen=True)
class Const(Term):
    value: Fraction


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Scale(Term):
    coeff: Fraction
    arg: Term


@dataclass(frozen=True)
class Sum(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Floor(Term):
    arg: Term


def term_vars(term: Term) -> Set[str]:
    """Variables occurring in a term"""
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, Const):
        return set()
    if isinstance(term, Scale) or isinstance(term, Floor):
        return term_vars(term.arg)
    if isinstance(term, Sum):
        return term_vars(term.left) | term_vars(term.right)
    raise TypeError(f"Not a term: {term!r}")


def substitute_term(term: Term, name: str, replacement: Term) -> Term:
    """Replace every occurrence of a variable in a term tree"""
    if isinstance(term, Var):
        return replacement if term.name == name else term
    if isinstance(term, Const):
        return term
    if isinstance(term, Scale):
        return Scale(term.coeff, substitute_term(term.arg, name, replacement))
    if isinstance(term, Sum):
        return Sum(substitute_term(term.left, name, replacement),
                   substitute_term(term.right, name, replacement))
    if isinstance(term, Floor):
        return Floor(substitute_term(term.arg, name, replacement))
    raise TypeError(f"Not a term: {term!r}")


def term_value(term: Term, assignment: Mapping[str, Fraction]) -> Fraction:
    """Exact value of a term under an assignment"""
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        if term.name not in assignment:
            raise EvaluationError(f"Unassigned variable '{term.name}'")
        return Fraction(assignment[term.name])
    if isinstance(term, Scale):
        return term.coeff * term_value(term.arg, assignment)
    if isinstance(term, Sum):
        return term_value(term.left, assignment) + term_value(term.right, assignment)
    if isinstance(term, Floor):
        return Fraction(RationalHelper.floor(term_value(term.arg, assignment)))
    raise TypeError(f"Not a term: {term!r}")


# ==================== Affine forms ====================

@dataclass(frozen=True)
class FloorKey:
    """An opaque floor generator ⌊arg⌋ inside an affine form"""
    arg: 'AffineForm'


Key = Union[str, FloorKey]


def key_text(key: Key) -> str:
    """Printed form of a generator: the variable name or floor(...)"""
    if isinstance(key, str):
        return key
    return f"floor({key.arg.text()})"


def _key_order(key: Key) -> Tuple[int, str]:
    return (0, key) if isinstance(key, str) else (1, key_text(key))


@dataclass(frozen=True)
class AffineForm:
    """Σ cᵢ·keyᵢ + constant with rational coefficients, canonically ordered"""
    terms: Tuple[Tuple[Key, Fraction], ...] = ()
    constant: Fraction = ZERO

    @classmethod
    def build(cls, coeffs: Mapping[Key, Fraction], constant: Fraction = ZERO) -> 'AffineForm':
        """Canonical form from a coefficient mapping; zero coefficients are dropped"""
        items = [(k, Fraction(c)) for k, c in coeffs.items() if c != 0]
        items.sort(key=lambda item: _key_order(item[0]))
        return cls(tuple(items), Fraction(constant))

    @classmethod
    def var(cls, name: str, coeff: Fraction = ONE) -> 'AffineForm':
        """The form coeff * name"""
        return cls.build({name: Fraction(coeff)})

    @classmethod
    def const(cls, value: Fraction) -> 'AffineForm':
        """The constant form"""
        return cls((), Fraction(value))

    def as_dict(self) -> Dict[Key, Fraction]:
        """Coefficients keyed by generator"""
        return dict(self.terms)

    def coeff(self, key: Key) -> Fraction:
        """Coefficient of a generator, zero when absent"""
        for k, c in self.terms:
            if k == key:
                return c
        return ZERO

    def keys(self) -> List[Key]:
        """Generators with a nonzero coefficient, in canonical order"""
        return [k for k, _ in self.terms]

    def drop(self, key: Key) -> 'AffineForm':
        """The form without the summand of key"""
        return AffineForm(tuple(item for item in self.terms if item[0] != key), self.constant)

    def is_constant(self) -> bool:
        """True when no generator is left"""
        return not self.terms

    def __add__(self, other: 'AffineForm') -> 'AffineForm':
        coeffs = self.as_dict()
        for k, c in other.terms:
            coeffs[k] = coeffs.get(k, ZERO) + c
        return AffineForm.build(coeffs, self.constant + other.constant)

    def __neg__(self) -> 'AffineForm':
        return self.scale(-ONE)

    def __sub__(self, other: 'AffineForm') -> 'AffineForm':
        return self + (-other)

    def scale(self, factor: Fraction) -> 'AffineForm':
        """Multiply every coefficient and the constant by factor"""
        factor = Fraction(factor)
        if factor == 0:
            return AffineForm()
        return AffineForm(tuple((k, c * factor) for k, c in self.terms), self.constant * factor)

    def shift(self, amount: Fraction) -> 'AffineForm':
        """Add amount to the constant"""
        return AffineForm(self.terms, self.constant + amount)

    def variables(self) -> Set[str]:
        """All variable names, including those inside floor generators"""
        names: Set[str] = set()
        for k, _ in self.terms:
            if isinstance(k, str):
                names.add(k)
            else:
                names |= k.arg.variables()
        return names

    def floor_keys(self) -> List[FloorKey]:
        """Floor generators at the top level of the form"""
        return [k for k, _ in self.terms if isinstance(k, FloorKey)]

    def has_floors(self) -> bool:
        """True when some generator is a floor"""
        return any(isinstance(k, FloorKey) for k, _ in self.terms)

    def mentions(self, name: str) -> bool:
        """True when name occurs, also inside a floor"""
        return name in self.variables()

    def substitute(self, name: str, replacement: 'AffineForm') -> 'AffineForm':
        """Replace variable name by replacement everywhere, renormalizing floors"""
        if not self.mentions(name):
            return self
        result = AffineForm.const(self.constant)
        for k, c in self.terms:
            if k == name:
                result = result + replacement.scale(c)
            elif isinstance(k, FloorKey) and k.arg.mentions(name):
                result = result + floor_form(k.arg.substitute(name, replacement)).scale(c)
            else:
                result = result + AffineForm(((k, c),))
        return result

    def value(self, assignment: Mapping[str, Fraction]) -> Fraction:
        """Exact value under an assignment of every variable"""
        total = self.constant
        for k, c in self.terms:
            if isinstance(k, str):
                if k not in assignment:
                    raise EvaluationError(f"Unassigned variable '{k}'")
                total += c * Fraction(assignment[k])
            else:
                total += c * RationalHelper.floor(k.arg.value(assignment))
        return total

    def text(self) -> str:
        """Canonical printed form"""
        return print_term(form_to_term(self))

    def __str__(self) -> str:
        return self.text()


def floor_form(form: AffineForm, integer_keys: FrozenSet[str] = frozenset()) -> AffineForm:
    """⌊form⌋ with integer summands pushed out: ⌊n + s⌋ = n + ⌊s⌋.

    Floor generators with integer coefficients are integer valued, as are
    variables listed in integer_keys.
    """
    whole = AffineForm.const(Fraction(RationalHelper.floor(form.constant)))
    rest: Dict[Key, Fraction] = {}
    for k, c in form.terms:
        integral_key = isinstance(k, FloorKey) or k in integer_keys
        if integral_key and c.denominator == 1:
            whole = whole + AffineForm(((k, c),))
        else:
            rest[k] = c
    if not rest:
        return whole
    remainder = AffineForm.build(rest, form.constant - RationalHelper.floor(form.constant))
    return whole + AffineForm(((FloorKey(remainder), ONE),))


def form_to_term(form: AffineForm) -> Term:
    """Render an affine form back into a term tree"""
    parts: List[Term] = []
    for k, c in form.terms:
        base: Term = Var(k) if isinstance(k, str) else Floor(form_to_term(k.arg))
        parts.append(base if c == 1 else Scale(c, base))
    if form.constant != 0 or not parts:
        parts.append(Const(form.constant))
    term = parts[0]
    for part in parts[1:]:
        term = Sum(term, part)
    return term


# ==================== Formulas ====================

class Formula:
    """Base class of formula nodes"""
    pass


class Atom(Formula):
    pass


@dataclass(frozen=True)
class Eq(Atom):
    form: AffineForm


@dataclass(frozen=True)
class Lt(Atom):
    form: AffineForm


@dataclass(frozen=True)
class Le(Atom):
    form: AffineForm


@dataclass(frozen=True)
class IsInt(Atom):
    term: Term


@dataclass(frozen=True)
class Cong(Atom):
    """(form - residue) / modulus is an integer"""
    form: AffineForm
    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"Congruence modulus must be positive, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"Residue {self.residue} outside [0, {self.modulus})")


@dataclass(frozen=True)
class Div(Atom):
    """Divisibility on ℕ, evaluable only on ground arguments"""
    left: Term
    right: Term


@dataclass(frozen=True)
class TrueFormula(Formula):
    pass


@dataclass(frozen=True)
class FalseFormula(Formula):
    pass


TRUE = TrueFormula()
FALSE = FalseFormula()


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


FORM_ATOMS = (Eq, Lt, Le)


def make_cong(form: AffineForm, modulus: int, residue: int) -> Cong:
    """Congruence with the integer part of the constant folded into the residue"""
    shift = RationalHelper.floor(form.constant)
    form = form.shift(-shift)
    return Cong(form, modulus, (residue - shift) % modulus)


def is_quantifier_free(f: Formula) -> bool:
    """True when f has no E or A"""
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Implies):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


def atom_vars(atom: Atom) -> Set[str]:
    """Variables of an atom, including those under floors"""
    if isinstance(atom, (Eq, Lt, Le, Cong)):
        return atom.form.variables()
    if isinstance(atom, IsInt):
        return term_vars(atom.term)
    if isinstance(atom, Div):
        return term_vars(atom.left) | term_vars(atom.right)
    raise TypeError(f"Not an atom: {atom!r}")


def free_vars(f: Formula) -> Set[str]:
    """Variables of f not bound by a quantifier"""
    if isinstance(f, Atom):
        return atom_vars(f)
    if isinstance(f, (TrueFormula, FalseFormula)):
        return set()
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        names: Set[str] = set()
        for a in f.args:
            names |= free_vars(a)
        return names
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"Not a formula: {f!r}")


def atoms_of(f: Formula) -> List[Atom]:
    """Atoms in left-to-right order, with repetitions"""
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Not):
        return atoms_of(f.arg)
    if isinstance(f, (And, Or)):
        return [a for arg in f.args for a in atoms_of(arg)]
    if isinstance(f, Implies):
        return atoms_of(f.left) + atoms_of(f.right)
    if isinstance(f, (Exists, Forall)):
        return atoms_of(f.body)
    return []


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild f with every atom replaced by fn(atom)"""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, Exists):
        return Exists(f.var, map_atoms(f.body, fn))
    if isinstance(f, Forall):
        return Forall(f.var, map_atoms(f.body, fn))
    return f


def substitute_atom(atom: Atom, name: str, replacement: AffineForm) -> Atom:
    """Replace a variable by an affine form inside one atom"""
    if isinstance(atom, Eq):
        return Eq(atom.form.substitute(name, replacement))
    if isinstance(atom, Lt):
        return Lt(atom.form.substitute(name, replacement))
    if isinstance(atom, Le):
        return Le(atom.form.substitute(name, replacement))
    if isinstance(atom, Cong):
        return make_cong(atom.form.substitute(name, replacement), atom.modulus, atom.residue)
    rep_term = form_to_term(replacement)
    if isinstance(atom, IsInt):
        return IsInt(substitute_term(atom.term, name, rep_term))
    if isinstance(atom, Div):
        return Div(substitute_term(atom.left, name, rep_term),
                   substitute_term(atom.right, name, rep_term))
    raise TypeError(f"Not an atom: {atom!r}")


def substitute(f: Formula, name: str, replacement: AffineForm) -> Formula:
    """Capture-avoiding only for fresh replacements; bound occurrences are left alone"""
    if isinstance(f, Atom):
        return substitute_atom(f, name, replacement)
    if isinstance(f, (TrueFormula, FalseFormula)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.arg, name, replacement))
    if isinstance(f, And):
        return And(tuple(substitute(a, name, replacement) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(substitute(a, name, replacement) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, name, replacement), substitute(f.right, name, replacement))
    if isinstance(f, (Exists, Forall)):
        if f.var == name:
            return f
        return type(f)(f.var, substitute(f.body, name, replacement))
    raise TypeError(f"Not a formula: {f!r}")


def rename_bound(f: Formula, used: Optional[Set[str]] = None) -> Formula:
    """Rename bound variables apart from each other and from the free variables"""
    if used is None:
        used = set(free_vars(f))

    def fresh(name: str) -> str:
        if name not in used:
            return name
        index = 1
        while f"{name}_{index}" in used:
            index += 1
        return f"{name}_{index}"

    def walk(g: Formula) -> Formula:
        if isinstance(g, (Exists, Forall)):
            new = fresh(g.var)
            used.add(new)
            body = g.body if new == g.var else substitute(g.body, g.var, AffineForm.var(new))
            return type(g)(new, walk(body))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, And):
            return And(tuple(walk(a) for a in g.args))
        if isinstance(g, Or):
            return Or(tuple(walk(a) for a in g.args))
        if isinstance(g, Implies):
            return Implies(walk(g.left), walk(g.right))
        return g

    return walk(f)


# ==================== Boolean structure ====================

def conjunction(parts: Iterable[Formula]) -> Formula:
    """Flattened And; true for no parts, false as soon as one part is false"""
    flat: List[Formula] = []
    for part in parts:
        if isinstance(part, FalseFormula):
            return FALSE
        if isinstance(part, TrueFormula):
            continue
        flat.extend(part.args if isinstance(part, And) else (part,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disjunction(parts: Iterable[Formula]) -> Formula:
    """Flattened Or; false for no parts, true as soon as one part is true"""
    flat: List[Formula] = []
    for part in parts:
        if isinstance(part, TrueFormula):
            return TRUE
        if isinstance(part, FalseFormula):
            continue
        flat.extend(part.args if isinstance(part, Or) else (part,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def negate_literal(f: Formula) -> Formula:
    """Negation of a literal, pushed into order atoms"""
    if isinstance(f, Lt):
        return Le(-f.form)
    if isinstance(f, Le):
        return Lt(-f.form)
    if isinstance(f, Eq):
        return Or((Lt(f.form), Lt(-f.form)))
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, TrueFormula):
        return FALSE
    if isinstance(f, FalseFormula):
        return TRUE
    return Not(f)


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form; implications removed, negations only on non-order atoms"""
    if isinstance(f, Atom) or isinstance(f, (TrueFormula, FalseFormula)):
        return negate_literal(f) if negate else f
    if isinstance(f, Not):
        return to_nnf(f.arg, not negate)
    if isinstance(f, And):
        parts = [to_nnf(a, negate) for a in f.args]
        return disjunction(parts) if negate else conjunction(parts)
    if isinstance(f, Or):
        parts = [to_nnf(a, negate) for a in f.args]
        return conjunction(parts) if negate else disjunction(parts)
    if isinstance(f, Implies):
        return to_nnf(Or((Not(f.left), f.right)), negate)
    if isinstance(f, Exists):
        return Forall(f.var, to_nnf(f.body, True)) if negate else Exists(f.var, to_nnf(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, to_nnf(f.body, True)) if negate else Forall(f.var, to_nnf(f.body))
    raise TypeError(f"Not a formula: {f!r}")


def _primitive(form: AffineForm, sign_free: bool) -> AffineForm:
    """Scale so the leading coefficient is ±1 (exactly 1 when sign_free)"""
    if form.is_constant():
        return form
    lead = form.terms[0][1]
    return form.scale(1 / lead if sign_free else 1 / abs(lead))


def _fold_atom(atom: Atom) -> Formula:
    if isinstance(atom, (Eq, Lt, Le)):
        if atom.form.is_constant():
            c = atom.form.constant
            truth = c == 0 if isinstance(atom, Eq) else (c < 0 if isinstance(atom, Lt) else c <= 0)
            return TRUE if truth else FALSE
        return type(atom)(_primitive(atom.form, isinstance(atom, Eq)))
    if isinstance(atom, Cong):
        if atom.modulus == 1 and atom.form.is_constant():
            return TRUE if atom.form.constant.denominator == 1 else FALSE
        if atom.form.is_constant():
            value = (atom.form.constant - atom.residue) / atom.modulus
            return TRUE if value.denominator == 1 else FALSE
        return atom
    if isinstance(atom, IsInt):
        if not term_vars(atom.term):
            return TRUE if term_value(atom.term, {}).denominator == 1 else FALSE
        return atom
    if isinstance(atom, Div):
        if not term_vars(atom.left) and not term_vars(atom.right):
            left, right = term_value(atom.left, {}), term_value(atom.right, {})
            if left.denominator == 1 and right.denominator == 1 and left >= 0 and right >= 0:
                if left == 0:
                    return TRUE if right == 0 else FALSE
                return TRUE if right.numerator % left.numerator == 0 else FALSE
        return atom
    return atom


def _complement(f: Formula) -> Optional[Formula]:
    if isinstance(f, Lt):
        return Le(_primitive(-f.form, False))
    if isinstance(f, Le):
        return Lt(_primitive(-f.form, False))
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, Atom):
        return Not(f)
    return None


def simplify(f: Formula) -> Formula:
    """Best-effort boolean simplification; idempotent"""
    if isinstance(f, Atom):
        return _fold_atom(f)
    if isinstance(f, (TrueFormula, FalseFormula)):
        return f
    if isinstance(f, Not):
        inner = simplify(f.arg)
        if isinstance(inner, TrueFormula):
            return FALSE
        if isinstance(inner, FalseFormula):
            return TRUE
        if isinstance(inner, Not):
            return inner.arg
        if isinstance(inner, (Lt, Le)):
            return simplify(negate_literal(inner))
        return Not(inner)
    if isinstance(f, (And, Or)):
        is_and = isinstance(f, And)
        combine = conjunction if is_and else disjunction
        flat = combine(simplify(a) for a in f.args)
        if not isinstance(flat, And if is_and else Or):
            return flat
        seen: List[Formula] = []
        for part in flat.args:
            if part in seen:
                continue
            comp = _complement(part)
            if comp is not None and comp in seen:
                return FALSE if is_and else TRUE
            seen.append(part)
        return combine(seen)
    if isinstance(f, Implies):
        return simplify(Or((Not(f.left), f.right)))
    if isinstance(f, (Exists, Forall)):
        body = simplify(f.body)
        if f.var not in free_vars(body):
            return body
        return type(f)(f.var, body)
    raise TypeError(f"Not a formula: {f!r}")


# ==================== Printing ====================

def print_term(term: Term) -> str:
    """Canonical text of a term"""
    if isinstance(term, Const):
        return RationalHelper.format(term.value)
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Floor):
        return f"floor({print_term(term.arg)})"
    if isinstance(term, Scale):
        inner = print_term(term.arg)
        if isinstance(term.arg, Sum):
            inner = f"({inner})"
        return f"{RationalHelper.format(term.coeff)} * {inner}"
    if isinstance(term, Sum):
        right = print_term(term.right)
        if isinstance(term.right, Sum):
            right = f"({right})"
        return f"{print_term(term.left)} + {right}"
    raise TypeError(f"Not a term: {term!r}")


_PRECEDENCE = {Implies: 1, Or: 2, And: 3}


def _operand(f: Formula, parent_level: int) -> str:
    text = print_formula(f)
    level = _PRECEDENCE.get(type(f), 4)
    if isinstance(f, (Exists, Forall)) or level <= parent_level:
        return f"({text})"
    return text


def print_formula(f: Formula) -> str:
    """Canonical text of a formula; parse_formula reads it back to an equal formula"""
    if isinstance(f, TrueFormula):
        return "true"
    if isinstance(f, FalseFormula):
        return "false"
    if isinstance(f, Eq):
        return f"{f.form.text()} = 0"
    if isinstance(f, Lt):
        return f"{f.form.text()} < 0"
    if isinstance(f, Le):
        return f"{f.form.text()} <= 0"
    if isinstance(f, IsInt):
        return f"Z({print_term(f.term)})"
    if isinstance(f, Div):
        return f"div({print_term(f.left)}, {print_term(f.right)})"
    if isinstance(f, Cong):
        return f"cong({f.form.text()}, {f.modulus}, {f.residue})"
    if isinstance(f, Not):
        inner = print_formula(f.arg)
        if not isinstance(f.arg, (Atom, Not, TrueFormula, FalseFormula)):
            inner = f"({inner})"
        elif isinstance(f.arg, (Eq, Lt, Le)):
            inner = f"({inner})"
        return f"~{inner}"
    if isinstance(f, And):
        return " & ".join(_operand(a, 3) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_operand(a, 2) for a in f.args)
    if isinstance(f, Implies):
        return f"{_operand(f.left, 1)} -> {_operand(f.right, 0)}"
    if isinstance(f, Exists):
        return f"E {f.var}. {print_formula(f.body)}"
    if isinstance(f, Forall):
        return f"A {f.var}. {print_formula(f.body)}"
    raise TypeError(f"Not a formula: {f!r}")


def atom_count(f: Formula) -> int:
    """Number of atom occurrences in f"""
    return len(atoms_of(f))
