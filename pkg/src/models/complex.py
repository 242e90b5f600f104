"""
Lattice complexes: bounded windows of definable sets fibered over unit boxes
"""

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple
import networkx as nx
from models.cell import (
    Cell, Point, SubspaceEntry, assignment, cell_bounds, cell_nonempty, cell_point,
    cell_trace, cells_adjacent, coord, fiber_box, projected_bounds, relax, segment_in_cell
)
from models.evaluate import evaluate
from models.formula import (
    AffineForm, And, Atom, Eq, FalseFormula, Formula, Le, Lt, Or, TrueFormula,
    conjunction, free_vars, is_quantifier_free, simplify, substitute, to_nnf
)
from models.normalize import collapse_formula
from models.separation import case_split_floors
from config.settings import settings
from utils.helpers import (
    DimensionMismatchError, GeometryError, InvariantViolation, PathError, RationalHelper,
    WindowTooLargeError
)
from utils.logger import get_logger

logger = get_logger(__name__)

Index = Tuple[int, ...]
Vertex = Tuple[Index, int]
Window = Tuple[Tuple[int, int], ...]


def window_size(window: Window) -> int:
    """Number of unit fibers in a window"""
    size = 1
    for lo, hi in window:
        size *= max(0, hi - lo + 1)
    return size


def window_indices(window: Window) -> Iterator[Index]:
    """Every fiber index of a window, lexicographically"""
    return itertools.product(*(range(lo, hi + 1) for lo, hi in window))


def fiber_of(point: Sequence[Fraction]) -> Index:
    """Index of the unit fiber containing point"""
    return tuple(RationalHelper.floor(Fraction(v)) for v in point)


def _negations(c) -> List:
    if isinstance(c, Lt):
        return [Le(-c.form)]
    if isinstance(c, Le):
        return [Lt(-c.form)]
    return [Lt(c.form), Lt(-c.form)]


def cell_difference(p: Cell, e: Cell) -> List[Cell]:
    """p minus e as disjoint convex cells: p ∧ a1 ∧ ... ∧ a(i-1) ∧ ¬ai"""
    if not cell_nonempty(p.meet(e)):
        return [p]
    parts: List[Cell] = []
    prefix: Tuple = ()
    for a in e.constraints:
        for negated in _negations(a):
            candidate = Cell(p.dim, p.constraints + prefix + (negated,), p.source)
            if cell_nonempty(candidate):
                parts.append(candidate)
        prefix = prefix + (a,)
    return parts


def make_disjoint(cells: Iterable[Cell]) -> List[Cell]:
    """Refine cells so that later ones lose what earlier ones already cover"""
    disjoint: List[Cell] = []
    for cell in cells:
        parts = [cell]
        for existing in disjoint:
            parts = [piece for part in parts for piece in cell_difference(part, existing)]
            if not parts:
                break
        disjoint.extend(parts)
    return disjoint


@dataclass
class LatticeComplex:
    """Cells of a window of a set, grouped by the unit box they lie in"""
    dim: int
    window: Window
    fibers: Dict[Index, List[Cell]] = field(default_factory=dict)

    @classmethod
    def from_pieces(cls, dim: int, window: Window, pieces: Sequence[Cell]) -> 'LatticeComplex':
        """Fiber decomposition of explicit convex pieces, each cell tagged with its piece"""
        if len(window) != dim:
            raise DimensionMismatchError(f"Window of dimension {len(window)} for dimension {dim}")
        raw: Dict[Index, List[Cell]] = defaultdict(list)
        for index, piece in enumerate(pieces):
            if piece.dim != dim:
                raise DimensionMismatchError(f"Piece {index} has dimension {piece.dim}")
            bounds = projected_bounds(piece)
            if bounds is None:
                continue
            ranges = []
            for (lo, hi), (wlo, whi) in zip(bounds, window):
                first = wlo if lo is None else max(wlo, RationalHelper.floor(lo))
                last = whi if hi is None else min(whi, RationalHelper.floor(hi))
                ranges.append(range(first, last + 1))
            for z in itertools.product(*ranges):
                candidate = piece.meet(fiber_box(z)).with_source(index)
                if cell_nonempty(candidate):
                    raw[z].append(candidate)
        complex_ = cls(dim, tuple(window))
        for z in sorted(raw):
            complex_.fibers[z] = make_disjoint(raw[z])
        logger.info(f"Built complex from {len(pieces)} pieces: "
                    f"{complex_.cell_count()} cells in {len(complex_.fibers)} fibers")
        return complex_

    def vertices(self) -> List[Vertex]:
        return [(z, i) for z in sorted(self.fibers) for i in range(len(self.fibers[z]))]

    def cell(self, vertex: Vertex) -> Cell:
        z, i = vertex
        return self.fibers[z][i]

    def cell_count(self) -> int:
        """Number of cells over all fibers"""
        return sum(len(cells) for cells in self.fibers.values())

    def contains(self, point: Sequence[Fraction]) -> bool:
        """True when some cell holds point"""
        return locate(self, point) is not None


def locate(lc: LatticeComplex, point: Sequence[Fraction]) -> Optional[Vertex]:
    """The cell containing point, if any"""
    if len(point) != lc.dim:
        raise DimensionMismatchError(f"Point of dimension {len(point)} in a {lc.dim}-complex")
    z = fiber_of(point)
    for i, cell in enumerate(lc.fibers.get(z, [])):
        if cell.contains(point):
            return (z, i)
    return None


# ==================== Window decomposition ====================

def _dnf(f: Formula) -> List[List[Atom]]:
    if isinstance(f, TrueFormula):
        return [[]]
    if isinstance(f, FalseFormula):
        return []
    if isinstance(f, Or):
        return [conj for arg in f.args for conj in _dnf(arg)]
    if isinstance(f, And):
        result: List[List[Atom]] = [[]]
        for arg in f.args:
            result = [left + right for left in result for right in _dnf(arg)]
        return result
    return [[f]]


def decompose_window(f: Formula, window: Window,
                     variables: Optional[Sequence[str]] = None) -> LatticeComplex:
    """Disjoint convex cells of the set defined by f, fiber by fiber over the window"""
    if not is_quantifier_free(f):
        raise GeometryError("Window decomposition needs a quantifier-free formula")
    names = list(variables) if variables is not None else sorted(free_vars(f))
    if len(names) != len(window):
        raise DimensionMismatchError(
            f"{len(names)} coordinates {names} for a window of dimension {len(window)}")
    if window_size(window) > settings.MAX_FIBERS:
        raise WindowTooLargeError(
            f"Window has {window_size(window)} fibers, limit is {settings.MAX_FIBERS}")
    f = collapse_formula(f)

    dim = len(names)
    offsets = [f"{settings.FRESH_PREFIX}w{i + 1}" for i in range(dim)]
    box = []
    for w in offsets:
        u = AffineForm.var(w)
        box.extend([Le(-u), Lt(u - AffineForm.const(1))])

    lc = LatticeComplex(dim, tuple(window))
    for z in window_indices(window):
        local = f
        for name, w, zi in zip(names, offsets, z):
            local = substitute(local, name, AffineForm.var(w) + AffineForm.const(zi))
        local = simplify(to_nnf(conjunction([case_split_floors(local, offsets), *box])))
        cells = []
        for conj in _dnf(local):
            constraints = []
            for atom in conj:
                if not isinstance(atom, (Eq, Lt, Le)):
                    raise GeometryError(f"Atom {atom} survived floor case analysis")
                form = atom.form
                for i, w in enumerate(offsets):
                    form = form.substitute(w, AffineForm.var(coord(i)) - AffineForm.const(z[i]))
                constraints.append(type(atom)(form))
            cell = Cell(dim, tuple(constraints))
            if cell_nonempty(cell):
                cells.append(cell)
        if cells:
            lc.fibers[tuple(z)] = make_disjoint(cells)
    logger.info(f"Decomposed window {list(window)}: {lc.cell_count()} cells "
                f"in {len(lc.fibers)} fibers")
    return lc


# ==================== Adjacency and components ====================

@dataclass
class AdjacencyGraph:
    """Cells as vertices, adjacency as edges"""
    graph: nx.Graph

    @property
    def vertices(self) -> List[Vertex]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[Vertex, Vertex]]:
        return sorted(tuple(sorted(e)) for e in self.graph.edges)


def _touch_keys(cell: Cell) -> List[Index]:
    """Lattice points whose unit boxes meet the closed bounding box of the cell"""
    bounds = cell_bounds(cell)
    ranges = [range(RationalHelper.floor(lo), RationalHelper.floor(hi) + 1) for lo, hi in bounds]
    return list(itertools.product(*ranges))


def candidate_pairs(cells: Dict[Vertex, Cell]) -> Set[Tuple[Vertex, Vertex]]:
    """Pairs whose closed bounding boxes can meet (fibers at Chebyshev distance <= 1)"""
    buckets: Dict[Index, List[Vertex]] = defaultdict(list)
    for vertex, cell in cells.items():
        for key in _touch_keys(cell):
            buckets[key].append(vertex)
    pairs: Set[Tuple[Vertex, Vertex]] = set()
    for members in buckets.values():
        for a, b in itertools.combinations(sorted(members), 2):
            pairs.add((a, b))
    return pairs


def adjacency_graph(lc: LatticeComplex) -> AdjacencyGraph:
    """Cells joined when one meets the closure of the other"""
    cells = {v: lc.cell(v) for v in lc.vertices()}
    graph = nx.Graph()
    graph.add_nodes_from(cells)
    for a, b in sorted(candidate_pairs(cells)):
        if cells_adjacent(cells[a], cells[b]):
            graph.add_edge(a, b)
    return AdjacencyGraph(graph)


@dataclass
class ComponentLabeling:
    """Component id per cell; ids are ordered by their smallest cell"""
    labels: Dict[Vertex, int]
    count: int
    adjacency: AdjacencyGraph

    def members(self, component: int) -> List[Vertex]:
        """Cells of one component in vertex order"""
        return sorted(v for v, k in self.labels.items() if k == component)

    def component_of(self, vertex: Vertex) -> int:
        """Component number of a cell"""
        return self.labels[vertex]

    def sizes(self) -> List[int]:
        """Cell count of every component"""
        counts = [0] * self.count
        for k in self.labels.values():
            counts[k] += 1
        return counts


def components(lc: LatticeComplex) -> ComponentLabeling:
    """Connected components of the adjacency graph"""
    adjacency = adjacency_graph(lc)
    groups = sorted((sorted(c) for c in nx.connected_components(adjacency.graph)),
                    key=lambda c: c[0])
    labels = {v: k for k, group in enumerate(groups) for v in group}
    logger.info(f"Found {len(groups)} components among {lc.cell_count()} cells "
                f"and {adjacency.graph.number_of_edges()} adjacencies")
    return ComponentLabeling(labels, len(groups), adjacency)


def component_of_point(lc: LatticeComplex, point: Sequence[Fraction],
                       labeling: Optional[ComponentLabeling] = None) -> List[Vertex]:
    """Cells of the component containing point"""
    vertex = locate(lc, point)
    if vertex is None:
        raise GeometryError(f"Point {RationalHelper.format_point(point)} is not in the set")
    labeling = labeling or components(lc)
    return labeling.members(labeling.component_of(vertex))


def trace(lc: LatticeComplex, cells: Iterable[Vertex],
          subspace: Sequence[SubspaceEntry]) -> List[Point]:
    """Sorted exact points of the union of cells on the subspace"""
    points: Set[Point] = set()
    for vertex in cells:
        points.update(cell_trace(lc.cell(vertex), subspace))
    return sorted(points)


# ==================== Paths ====================

@dataclass
class Polyline:
    vertices: List[Point]

    def segments(self) -> List[Tuple[Point, Point]]:
        return list(zip(self.vertices, self.vertices[1:]))


def _route(ca: Cell, cb: Cell) -> List[Point]:
    """Points leading from inside ca to inside cb"""
    into_b = relax(ca).meet(cb)
    if cell_nonempty(into_b):
        return [cell_point(into_b)]
    from_a = ca.meet(relax(cb))
    if not cell_nonempty(from_a):
        raise PathError("Consecutive cells of a chain are not adjacent")
    return [cell_point(from_a), cell_point(cb)]


def witness_path(lc: LatticeComplex, x: Sequence[Fraction], y: Sequence[Fraction],
                 labeling: Optional[ComponentLabeling] = None) -> Polyline:
    """Piecewise-linear path from x to y inside the set"""
    x, y = tuple(Fraction(v) for v in x), tuple(Fraction(v) for v in y)
    vx, vy = locate(lc, x), locate(lc, y)
    if vx is None or vy is None:
        raise PathError("Path endpoints must lie in the set")
    if x == y:
        return Polyline([x])
    labeling = labeling or components(lc)
    if labeling.component_of(vx) != labeling.component_of(vy):
        raise PathError(f"{RationalHelper.format_point(x)} and "
                        f"{RationalHelper.format_point(y)} lie in different components")
    chain = nx.shortest_path(labeling.adjacency.graph, vx, vy)
    points: List[Point] = [x]
    for a, b in zip(chain, chain[1:]):
        points.extend(_route(lc.cell(a), lc.cell(b)))
    points.append(y)
    deduped = [points[0]]
    for p in points[1:]:
        if p != deduped[-1]:
            deduped.append(p)
    path = Polyline(deduped)
    candidates = [lc.cell(v) for v in chain]
    if not verify_polyline(lc, path, candidates):
        raise InvariantViolation("Constructed path leaves the set")
    return path


def verify_polyline(lc: LatticeComplex, path: Polyline,
                    candidates: Optional[List[Cell]] = None) -> bool:
    """Every vertex lies in the set and every open segment lies in one cell"""
    if any(locate(lc, p) is None for p in path.vertices):
        return False
    cells = candidates if candidates is not None else [lc.cell(v) for v in lc.vertices()]
    return all(any(segment_in_cell(a, b, c) for c in cells) for a, b in path.segments())


# ==================== Invariant checks ====================

def check_complex(lc: LatticeComplex) -> None:
    """Nonempty cells, each inside its fiber box, pairwise disjoint within a fiber"""
    for z, cells in lc.fibers.items():
        box = fiber_box(z)
        for i, cell in enumerate(cells):
            if not cell_nonempty(cell):
                raise InvariantViolation(f"Empty cell {i} in fiber {z}")
            if any(cell_nonempty(cell.meet(part)) for part in _outside(box)):
                raise InvariantViolation(f"Cell {i} leaves fiber {z}")
            for j in range(i):
                if cell_nonempty(cell.meet(cells[j])):
                    raise InvariantViolation(f"Cells {j} and {i} overlap in fiber {z}")


def _outside(box: Cell) -> List[Cell]:
    """Half-spaces whose union is the complement of a box"""
    return [Cell(box.dim, (n,)) for c in box.constraints for n in _negations(c)]


def _grid(z: Index, step: Fraction) -> Iterator[Point]:
    per_axis = [RationalHelper.grid(Fraction(zi), Fraction(zi + 1) - step, step) for zi in z]
    return itertools.product(*per_axis)


def verify_partition(lc: LatticeComplex, f: Formula, variables: Optional[Sequence[str]] = None,
                     step: Fraction = None) -> List[Point]:
    """Grid and witness points where the complex disagrees with f or cells overlap"""
    step = step or settings.SAMPLE_STEP
    names = list(variables) if variables is not None else sorted(free_vars(f))
    bad: List[Point] = []
    for z in window_indices(lc.window):
        cells = lc.fibers.get(z, [])
        samples = list(_grid(z, step)) + [cell_point(c) for c in cells]
        for p in samples:
            hits = sum(1 for c in cells if c.contains(p))
            expected = evaluate(f, dict(zip(names, p)))
            if hits > 1 or (hits == 1) != expected:
                bad.append(p)
    if bad:
        logger.warning(f"Partition check failed at {len(bad)} sample points")
    return bad
