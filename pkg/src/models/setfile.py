"""
Line-oriented set files and trace files
"""

from collections import defaultdict
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple
import pyparsing as pp
from models.cell import Cell, Constraint, Point, cell_nonempty, coord, fiber_box
from models.complex import LatticeComplex, make_disjoint
from models.formula import AffineForm, Eq, Le, Lt
from utils.helpers import RationalHelper, SetFileError
from utils.logger import get_logger

logger = get_logger(__name__)

_RELATIONS = {"<": Lt, "<=": Le, "=": Eq}
_SYMBOLS = {Lt: "<", Le: "<=", Eq: "="}


def _rational_action(s, loc, tokens) -> Fraction:
    try:
        return RationalHelper.parse(tokens[0])
    except ValueError as e:
        raise pp.ParseFatalException(s, loc, str(e)) from e


def _constraint_grammar():
    rational = pp.Regex(r"-?\d+(\s*/\s*\d+)?").set_parse_action(_rational_action)
    name = pp.Regex(r"x[1-9]\d*")
    monomial = pp.Group(pp.Optional(rational, default=Fraction(1)) + name)
    linear = monomial + pp.ZeroOrMore(pp.Suppress("+") + monomial)
    relation = pp.one_of("<= < =")
    constraint = pp.Group(pp.Group(linear) + relation + rational)
    return constraint + pp.ZeroOrMore(pp.Suppress(";") + constraint) + pp.StringEnd()


_CONSTRAINTS = _constraint_grammar()


# ==================== Writing ====================

def format_constraint(c: Constraint) -> str:
    """'a x1 + b x2 REL c' with only the nonzero coefficients"""
    terms = [(name, a) for name, a in c.form.terms]
    if not terms:
        terms = [(coord(0), Fraction(0))]
    linear = " + ".join(f"{RationalHelper.format(a)} {name}" for name, a in terms)
    return f"{linear} {_SYMBOLS[type(c)]} {RationalHelper.format(-c.form.constant)}"


def format_cell(c: Cell) -> str:
    """Constraint list of a cell in set-file syntax"""
    return " ; ".join(format_constraint(t) for t in c.constraints)


def setfile_lines(lc: LatticeComplex) -> List[str]:
    """Header and one cell line per cell"""
    header = f"dim {lc.dim} window " + " ".join(f"{lo} {hi}" for lo, hi in lc.window)
    lines = [header]
    for z in sorted(lc.fibers):
        index = " ".join(str(v) for v in z)
        for cell in lc.fibers[z]:
            lines.append(f"cell {index} : {format_cell(cell)}")
    return lines


def trace_lines(points: Iterable[Point]) -> List[str]:
    """One point per line in trace-file syntax"""
    return [RationalHelper.format_point(p) for p in sorted(points)]


# ==================== Reading ====================

def parse_constraints(text: str, dim: int, line: int = None) -> Tuple[Constraint, ...]:
    try:
        parsed = _CONSTRAINTS.parse_string(text)
    except pp.ParseBaseException as exc:
        raise SetFileError(f"Bad constraint list at column {exc.col}: {text.strip()}", line)
    constraints = []
    for linear, relation, constant in parsed:
        coeffs: Dict[str, Fraction] = defaultdict(Fraction)
        for coefficient, name in linear:
            if int(name[1:]) > dim:
                raise SetFileError(f"Coordinate {name} exceeds dimension {dim}", line)
            coeffs[name] += coefficient
        form = AffineForm.build(dict(coeffs), -constant)
        constraints.append(_RELATIONS[relation](form))
    return tuple(constraints)


def _parse_header(words: List[str], line: int) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    try:
        if words[0] != "dim" or words[2] != "window":
            raise ValueError
        dim = int(words[1])
        bounds = [int(w) for w in words[3:]]
    except (IndexError, ValueError):
        raise SetFileError("Header must read 'dim n window lo1 hi1 ...'", line)
    if dim < 1 or len(bounds) != 2 * dim:
        raise SetFileError(f"Header needs {2 * dim} window bounds, got {len(bounds)}", line)
    window = tuple((bounds[2 * i], bounds[2 * i + 1]) for i in range(dim))
    if any(lo > hi for lo, hi in window):
        raise SetFileError("Window bounds must satisfy lo <= hi", line)
    return dim, window


def read_setfile(text: str) -> LatticeComplex:
    """Parse a set file; 'piece' lines are decomposed over the window, 'cell' lines taken as given.

    Blank lines and lines starting with '#' are skipped. An empty file is the empty set.
    """
    dim, window = None, None
    fibers: Dict[Tuple[int, ...], List[Cell]] = defaultdict(list)
    pieces: List[Cell] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if dim is None:
            dim, window = _parse_header(stripped.split(), number)
            continue
        head, sep, body = stripped.partition(":")
        if not sep:
            raise SetFileError("Expected 'cell z1 ... zn : constraints' or 'piece : constraints'",
                               number)
        words = head.split()
        constraints = parse_constraints(body, dim, number)
        if words == ["piece"]:
            pieces.append(Cell(dim, constraints))
            continue
        if not words or words[0] != "cell" or len(words) != dim + 1:
            raise SetFileError(f"Cell line needs {dim} fiber indices", number)
        try:
            z = tuple(int(w) for w in words[1:])
        except ValueError:
            raise SetFileError(f"Fiber indices must be integers: {head.strip()}", number)
        if any(not lo <= zi <= hi for zi, (lo, hi) in zip(z, window)):
            raise SetFileError(f"Fiber {z} lies outside the window", number)
        fibers[z].append(Cell(dim, constraints).meet(fiber_box(z)))

    if dim is None:
        return LatticeComplex(0, ())
    lc = LatticeComplex.from_pieces(dim, window, pieces) if pieces else LatticeComplex(dim, window)
    for z, cells in fibers.items():
        live = [c for c in cells if cell_nonempty(c)]
        lc.fibers[z] = make_disjoint(lc.fibers.get(z, []) + live)
    lc.fibers = {z: cells for z, cells in sorted(lc.fibers.items()) if cells}
    logger.info(f"Read set file: dimension {dim}, {lc.cell_count()} cells")
    return lc


def read_trace(text: str) -> List[Point]:
    """Points of a trace file; blank and comment lines are skipped"""
    points = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            points.append(RationalHelper.parse_point(stripped))
        except ValueError as exc:
            raise SetFileError(str(exc), number)
    return sorted(points)


def same_trace(a: Sequence[Point], b: Sequence[Point]) -> bool:
    """Equality of traces up to order"""
    return sorted(a) == sorted(b)
