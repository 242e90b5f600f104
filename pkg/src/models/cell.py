"""
Convex rational polyhedral cells
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union
from models.evaluate import evaluate
from models.formula import (
    AffineForm, Eq, FalseFormula, Formula, Le, Lt, Or, TrueFormula, conjunction,
    free_vars, simplify
)
from models.virtual_substitution import eliminate_real_var
from utils.helpers import (
    DimensionMismatchError, EmptyCellError, GeometryError, RationalHelper, TraceError
)

Point = Tuple[Fraction, ...]
Constraint = Union[Eq, Lt, Le]


def coord(i: int) -> str:
    """Name of coordinate i (0-based index, 1-based name)"""
    return f"x{i + 1}"


def assignment(point: Sequence[Fraction]) -> Dict[str, Fraction]:
    return {coord(i): Fraction(v) for i, v in enumerate(point)}


@dataclass(frozen=True)
class Cell:
    """Conjunction of linear constraints over x1..xn"""
    dim: int
    constraints: Tuple[Constraint, ...]
    source: Optional[int] = field(default=None, compare=False)

    def formula(self) -> Formula:
        """The cell as a conjunction of its constraints over x1..xn"""
        return conjunction(self.constraints)

    def contains(self, point: Sequence[Fraction]) -> bool:
        """Exact membership test"""
        if len(point) != self.dim:
            raise DimensionMismatchError(f"Point of dimension {len(point)} in a {self.dim}-cell")
        values = assignment(point)
        for c in self.constraints:
            v = c.form.value(values)
            if isinstance(c, Eq) and v != 0 or isinstance(c, Lt) and v >= 0 \
                    or isinstance(c, Le) and v > 0:
                return False
        return True

    def meet(self, other: 'Cell') -> 'Cell':
        """Intersection: the union of both constraint lists"""
        _same_dim(self, other)
        return Cell(self.dim, self.constraints + other.constraints, self.source)

    def with_source(self, source: Optional[int]) -> 'Cell':
        return Cell(self.dim, self.constraints, source)

    def fix(self, values: Dict[int, Fraction]) -> 'Cell':
        """Substitute fixed values for some coordinates (dimension unchanged)"""
        constraints = []
        for c in self.constraints:
            form = c.form
            for i, v in values.items():
                form = form.substitute(coord(i), AffineForm.const(v))
            constraints.append(type(c)(form))
        return Cell(self.dim, tuple(constraints), self.source)


def _same_dim(c1: Cell, c2: Cell) -> None:
    if c1.dim != c2.dim:
        raise DimensionMismatchError(f"Cells of dimension {c1.dim} and {c2.dim}")


# ==================== Builders ====================

def box_cell(dim: int, lower: Sequence[Fraction], upper: Sequence[Fraction],
             upper_open: bool = True) -> Cell:
    """∏ [lower_i, upper_i) (or closed when upper_open is False)"""
    constraints: List[Constraint] = []
    for i in range(dim):
        x = AffineForm.var(coord(i))
        constraints.append(Le(AffineForm.const(lower[i]) - x))
        bound = x - AffineForm.const(upper[i])
        constraints.append(Lt(bound) if upper_open else Le(bound))
    return Cell(dim, tuple(constraints))


def fiber_box(z: Sequence[int]) -> Cell:
    """The half-open unit box ∏ [z_i, z_i + 1)"""
    return box_cell(len(z), [Fraction(v) for v in z], [Fraction(v + 1) for v in z])


def point_cell(point: Sequence[Fraction]) -> Cell:
    """The cell holding exactly one point"""
    return Cell(len(point), tuple(Eq(AffineForm.var(coord(i)) - AffineForm.const(v))
                                  for i, v in enumerate(point)))


def segment_cell(a: Sequence[Fraction], b: Sequence[Fraction],
                 closed_start: bool = True, closed_end: bool = True) -> Cell:
    """The segment from a to b, each end open or closed, as linear constraints"""
    dim = len(a)
    a = [Fraction(v) for v in a]
    b = [Fraction(v) for v in b]
    direction = [bi - ai for ai, bi in zip(a, b)]
    pivot = next((i for i, d in enumerate(direction) if d != 0), None)
    if pivot is None:
        if not (closed_start and closed_end):
            raise GeometryError("Degenerate segment with an open end is empty")
        return point_cell(a)
    # x = a + t·direction with t = (x_pivot - a_pivot) / d_pivot
    t = (AffineForm.var(coord(pivot)) - AffineForm.const(a[pivot])).scale(1 / direction[pivot])
    constraints: List[Constraint] = []
    for i in range(dim):
        if i == pivot:
            continue
        constraints.append(Eq(AffineForm.var(coord(i)) - AffineForm.const(a[i])
                              - t.scale(direction[i])))
    constraints.append(Le(-t) if closed_start else Lt(-t))
    one = AffineForm.const(1)
    constraints.append(Le(t - one) if closed_end else Lt(t - one))
    return Cell(dim, tuple(constraints))


# ==================== Exact feasibility ====================

def _tighten(constraints: Sequence[Constraint]) -> Optional[List[Constraint]]:
    """Merge single-variable bounds into one lower and one upper bound per variable.

    Returns None when the bounds alone are contradictory.
    """
    lower: Dict[str, Tuple[Fraction, bool]] = {}
    upper: Dict[str, Tuple[Fraction, bool]] = {}
    fixed: Dict[str, Fraction] = {}
    rest: List[Constraint] = []
    for c in constraints:
        form = c.form
        if form.is_constant():
            folded = simplify(c)
            if isinstance(folded, FalseFormula):
                return None
            continue
        if len(form.terms) != 1:
            rest.append(c)
            continue
        (name, a), = form.terms
        value = -form.constant / a
        if isinstance(c, Eq):
            if name in fixed and fixed[name] != value:
                return None
            fixed[name] = value
            continue
        strict = isinstance(c, Lt)
        if a > 0:
            old = upper.get(name)
            if old is None or value < old[0] or (value == old[0] and strict):
                upper[name] = (value, strict)
        else:
            old = lower.get(name)
            if old is None or value > old[0] or (value == old[0] and strict):
                lower[name] = (value, strict)

    out: List[Constraint] = []
    for name in sorted(set(lower) | set(upper) | set(fixed)):
        lo, hi = lower.get(name), upper.get(name)
        if name in fixed:
            v = fixed[name]
            if lo and (v < lo[0] or (v == lo[0] and lo[1])):
                return None
            if hi and (v > hi[0] or (v == hi[0] and hi[1])):
                return None
            out.append(Eq(AffineForm.var(name) - AffineForm.const(v)))
            continue
        if lo and hi and (lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1]))):
            return None
        x = AffineForm.var(name)
        if lo:
            out.append((Lt if lo[1] else Le)(AffineForm.const(lo[0]) - x))
        if hi:
            out.append((Lt if hi[1] else Le)(x - AffineForm.const(hi[0])))
    return out + rest


def _satisfiable(f: Formula, names: List[str]) -> bool:
    f = simplify(f)
    if isinstance(f, TrueFormula):
        return True
    if isinstance(f, FalseFormula):
        return False
    if isinstance(f, Or):
        return any(_satisfiable(d, names) for d in f.args)
    remaining = [n for n in names if n in free_vars(f)]
    if not remaining:
        return evaluate(f, {})
    return _satisfiable(eliminate_real_var(f, remaining[0]), remaining[1:])


def cell_nonempty(c: Cell) -> bool:
    """Exact nonemptiness by eliminating every coordinate"""
    tightened = _tighten(c.constraints)
    if tightened is None:
        return False
    if all(len(t.form.terms) == 1 for t in tightened):
        return True
    return _satisfiable(conjunction(tightened), [coord(i) for i in range(c.dim)])


def cell_closure(c: Cell) -> Cell:
    """Relax strict constraints; equals the topological closure of a nonempty cell"""
    if not cell_nonempty(c):
        raise EmptyCellError("Closure of an empty cell is not its relaxation")
    return relax(c)


def relax(c: Cell) -> Cell:
    """Closure of a cell: every strict constraint made weak"""
    return Cell(c.dim, tuple(Le(x.form) if isinstance(x, Lt) else x for x in c.constraints),
                c.source)


# ==================== Projection and witness points ====================

def _fm_eliminate(constraints: List[Constraint], name: str) -> Optional[List[Constraint]]:
    """Fourier–Motzkin step preserving strictness; None when infeasible"""
    for c in constraints:
        if isinstance(c, Eq) and c.form.coeff(name) != 0:
            a = c.form.coeff(name)
            value = c.form.drop(name).scale(-1 / a)
            rest = [type(d)(d.form.substitute(name, value)) for d in constraints if d is not c]
            return _tighten(rest)
    lowers, uppers, rest = [], [], []
    for c in constraints:
        a = c.form.coeff(name)
        if a == 0:
            rest.append(c)
        elif a < 0:
            lowers.append((c.form.drop(name).scale(-1 / a), isinstance(c, Lt)))
        else:
            uppers.append((c.form.drop(name).scale(-1 / a), isinstance(c, Lt)))
    for lo, lo_strict in lowers:
        for hi, hi_strict in uppers:
            combined = lo - hi
            rest.append(Lt(combined) if lo_strict or hi_strict else Le(combined))
    return _tighten(rest)


def _interval(constraints: List[Constraint], name: str, values: Dict[str, Fraction]):
    """Bounds on name once every other variable in constraints is assigned"""
    lo: Optional[Tuple[Fraction, bool]] = None
    hi: Optional[Tuple[Fraction, bool]] = None
    exact: Optional[Fraction] = None
    for c in constraints:
        a = c.form.coeff(name)
        if a == 0:
            continue
        rest = c.form.drop(name).value(values)
        bound = -rest / a
        if isinstance(c, Eq):
            exact = bound
            continue
        strict = isinstance(c, Lt)
        if a > 0:
            if hi is None or bound < hi[0] or (bound == hi[0] and strict):
                hi = (bound, strict)
        else:
            if lo is None or bound > lo[0] or (bound == lo[0] and strict):
                lo = (bound, strict)
    return lo, hi, exact


def _choose(lo, hi, exact) -> Fraction:
    if exact is not None:
        return exact
    if lo is not None and hi is not None:
        return (lo[0] + hi[0]) / 2
    if lo is not None:
        return lo[0] + 1
    if hi is not None:
        return hi[0] - 1
    return Fraction(0)


def cell_point(c: Cell) -> Point:
    """An exact rational point of a nonempty cell"""
    system = _tighten(c.constraints)
    if system is None:
        raise EmptyCellError("Cell is empty")
    stages: List[Tuple[str, List[Constraint]]] = []
    for i in range(c.dim):
        name = coord(i)
        stages.append((name, system))
        system = _fm_eliminate(system, name)
        if system is None:
            raise EmptyCellError("Cell is empty")
    values: Dict[str, Fraction] = {}
    for name, stage in reversed(stages):
        values[name] = _choose(*_interval(stage, name, values))
    point = tuple(values[coord(i)] for i in range(c.dim))
    if not c.contains(point):
        raise GeometryError(f"Witness point {point} fails its own cell")
    return point


Bound = Optional[Tuple[Fraction, bool]]


def coordinate_range(c: Cell, i: int) -> Tuple[Bound, Bound]:
    """Exact projection of a nonempty cell onto coordinate i: (lower, upper) with strictness"""
    system = _tighten(c.constraints)
    if system is None:
        raise EmptyCellError("Cell is empty")
    for j in range(c.dim):
        if j != i:
            system = _fm_eliminate(system, coord(j))
            if system is None:
                raise EmptyCellError("Cell is empty")
    lo, hi, exact = _interval(system, coord(i), {})
    if exact is not None:
        return (exact, False), (exact, False)
    return lo, hi


def cell_bounds(c: Cell) -> Optional[List[Tuple[Optional[Fraction], Optional[Fraction]]]]:
    """Closed bounding box from the tightened single-variable bounds; None when empty.

    Multi-variable constraints are ignored, so the box may be larger than the cell.
    """
    system = _tighten(c.constraints)
    if system is None:
        return None
    box: List[Tuple[Optional[Fraction], Optional[Fraction]]] = [(None, None)] * c.dim
    index = {coord(i): i for i in range(c.dim)}
    for t in system:
        if len(t.form.terms) != 1:
            continue
        (name, a), = t.form.terms
        value = -t.form.constant / a
        lo, hi = box[index[name]]
        if isinstance(t, Eq):
            box[index[name]] = (value, value)
        elif a > 0:
            box[index[name]] = (lo, value)
        else:
            box[index[name]] = (value, hi)
    return box


def projected_bounds(c: Cell) -> Optional[List[Tuple[Optional[Fraction], Optional[Fraction]]]]:
    """Closed bounding box from the exact projection onto every coordinate; None when empty.

    Unlike cell_bounds this sees multi-variable constraints, so a sloped segment gets its
    true extent.
    """
    box: List[Tuple[Optional[Fraction], Optional[Fraction]]] = []
    for i in range(c.dim):
        try:
            lo, hi = coordinate_range(c, i)
        except EmptyCellError:
            return None
        box.append((None if lo is None else lo[0], None if hi is None else hi[0]))
    return box


def boxes_meet(b1, b2) -> bool:
    for (lo1, hi1), (lo2, hi2) in zip(b1, b2):
        if lo1 is not None and hi2 is not None and lo1 > hi2:
            return False
        if lo2 is not None and hi1 is not None and lo2 > hi1:
            return False
    return True


# ==================== Adjacency and segments ====================

def cells_adjacent(c1: Cell, c2: Cell) -> bool:
    """(c1 ∩ cl c2) ∪ (c2 ∩ cl c1) is nonempty"""
    _same_dim(c1, c2)
    b1, b2 = cell_bounds(c1), cell_bounds(c2)
    if b1 is None or b2 is None or not boxes_meet(b1, b2):
        return False
    r1, r2 = relax(c1), relax(c2)
    if not cell_nonempty(r1.meet(r2)):
        return False
    return cell_nonempty(r1.meet(c2)) or cell_nonempty(c1.meet(r2))


def segment_in_cell(a: Sequence[Fraction], b: Sequence[Fraction], c: Cell) -> bool:
    """The open segment (a, b) lies in c (just the point when a == b)"""
    if tuple(a) == tuple(b):
        return c.contains(a)
    mid = tuple((Fraction(x) + Fraction(y)) / 2 for x, y in zip(a, b))
    va, vb, vm = assignment(a), assignment(b), assignment(mid)
    for t in c.constraints:
        fa, fb, fm = t.form.value(va), t.form.value(vb), t.form.value(vm)
        if isinstance(t, Eq):
            if fa != 0 or fb != 0:
                return False
        elif fa > 0 or fb > 0:
            return False
        elif isinstance(t, Lt) and fm >= 0:
            return False
    return True


# ==================== Traces ====================

class Axis(Enum):
    """How a trace subspace treats a coordinate that is not fixed to a value"""
    FREE = "*"
    INTEGER = "Z"


SubspaceEntry = Union[Fraction, Axis]


def parse_subspace_entry(text: str) -> SubspaceEntry:
    """Read a rational, 'Z' for integer values or '*' for a free coordinate"""
    text = text.strip()
    for axis in Axis:
        if text == axis.value:
            return axis
    return RationalHelper.parse(text)


def cell_trace(c: Cell, subspace: Sequence[SubspaceEntry]) -> List[Point]:
    """Points of c on the subspace; raises TraceError when there are infinitely many"""
    if len(subspace) != c.dim:
        raise DimensionMismatchError(f"Subspace of dimension {len(subspace)} for a {c.dim}-cell")
    fixed = {i: Fraction(v) for i, v in enumerate(subspace) if not isinstance(v, Axis)}
    restricted = c.fix(fixed)
    if not cell_nonempty(restricted):
        return []
    integer_axes = [i for i, v in enumerate(subspace) if v is Axis.INTEGER]
    if integer_axes:
        i = integer_axes[0]
        lo, hi = coordinate_range(restricted, i)
        if lo is None or hi is None:
            raise TraceError(f"Coordinate {coord(i)} is unbounded on an integer axis")
        first = -RationalHelper.floor(-lo[0])
        last = RationalHelper.floor(hi[0])
        points: List[Point] = []
        for value in range(first, last + 1):
            narrowed = list(subspace)
            narrowed[i] = Fraction(value)
            points.extend(cell_trace(c, narrowed))
        return points
    point: List[Fraction] = []
    for i in range(c.dim):
        if i in fixed:
            point.append(fixed[i])
            continue
        lo, hi = coordinate_range(restricted, i)
        if lo is None or hi is None or lo[0] != hi[0]:
            raise TraceError(f"Cell meets the subspace in infinitely many points along {coord(i)}")
        point.append(lo[0])
    return [tuple(point)]
