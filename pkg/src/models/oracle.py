"""
Independent component oracle working on generating pieces instead of the lattice decomposition
"""

import itertools
from collections import defaultdict
from typing import Dict, List, Sequence, Set, Tuple
from networkx.utils import UnionFind
from models.cell import (
    Cell, Point, SubspaceEntry, boxes_meet, cell_nonempty, cell_point, cell_trace,
    projected_bounds, relax
)
from models.complex import ComponentLabeling, LatticeComplex, locate
from utils.helpers import GeometryError, InvariantViolation, RationalHelper
from utils.logger import get_logger

logger = get_logger(__name__)

Partition = List[List[int]]


def _pieces_touch(p: Cell, q: Cell) -> bool:
    """cl(p) ∩ cl(q) meets p ∪ q"""
    both = relax(p).meet(relax(q))
    if not cell_nonempty(both):
        return False
    return cell_nonempty(both.meet(p)) or cell_nonempty(both.meet(q))


def oracle_components(pieces: Sequence[Cell]) -> Partition:
    """Classes of pieces joined by the closure test, smallest index first"""
    live = [i for i, p in enumerate(pieces) if cell_nonempty(p)]
    bounds = {}
    buckets: Dict[Tuple[int, ...], List[int]] = defaultdict(list)
    for i in live:
        box = projected_bounds(pieces[i])
        if any(lo is None or hi is None for lo, hi in box):
            raise GeometryError(f"Piece {i} is unbounded")
        bounds[i] = box
        ranges = [range(RationalHelper.floor(lo), RationalHelper.floor(hi) + 1) for lo, hi in box]
        for key in itertools.product(*ranges):
            buckets[key].append(i)

    joined = UnionFind(live)
    tested: Set[Tuple[int, int]] = set()
    for members in buckets.values():
        for i, j in itertools.combinations(members, 2):
            if (i, j) in tested or joined[i] == joined[j]:
                continue
            tested.add((i, j))
            if boxes_meet(bounds[i], bounds[j]) and _pieces_touch(pieces[i], pieces[j]):
                joined.union(i, j)
    classes = sorted(sorted(c) for c in joined.to_sets())
    logger.info(f"Oracle joined {len(live)} pieces into {len(classes)} classes "
                f"after {len(tested)} tests")
    return classes


def oracle_trace(pieces: Sequence[Cell], classes: Partition, seed: Point,
                 subspace: Sequence[SubspaceEntry]) -> List[Point]:
    """Trace of the class containing the seed, read off the pieces directly"""
    owner = next((c for c in classes if any(pieces[i].contains(seed) for i in c)), None)
    if owner is None:
        raise GeometryError(f"Seed {RationalHelper.format_point(seed)} lies in no piece")
    points: Set[Point] = set()
    for i in owner:
        points.update(cell_trace(pieces[i], subspace))
    return sorted(points)


def complex_partition(lc: LatticeComplex, labeling: ComponentLabeling,
                      pieces: Sequence[Cell]) -> Partition:
    """Pieces grouped by the complex component their witness point falls in"""
    groups: Dict[int, List[int]] = defaultdict(list)
    for i, piece in enumerate(pieces):
        if not cell_nonempty(piece):
            continue
        vertex = locate(lc, cell_point(piece))
        if vertex is None:
            raise InvariantViolation(f"Piece {i} has a witness point outside the complex")
        groups[labeling.component_of(vertex)].append(i)
    return sorted(sorted(g) for g in groups.values())


def same_partition(a: Partition, b: Partition) -> bool:
    """Equality of partitions regardless of class or member order"""
    return {frozenset(c) for c in a} == {frozenset(c) for c in b}
