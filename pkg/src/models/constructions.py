"""
Explicit piecewise-linear constructions whose components recover multiples,
addition, divisibility and orbits of a shift map
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple
from models.cell import (
    Axis, Cell, Point, SubspaceEntry, box_cell, cell_nonempty, coord, segment_cell
)
from models.complex import LatticeComplex
from models.formula import AffineForm, Eq
from utils.helpers import GeometryError, RationalHelper
from utils.logger import get_logger

logger = get_logger(__name__)

TAGGINGS = ("diagonal", "parity")

_EVEN_EVEN = (0, 1, 0, 1)
_ODD_ODD = (0, 1, 0, 1)
_EVEN_ODD = (0, 1, 1, 0)
_ODD_EVEN = (1, 0, 0, 1)


@dataclass
class LadderSpec:
    """Finite increasing point set A with min 0 and a map f on A.

    f must be strictly increasing and strictly dominate the identity. It is partial: a
    point without an image gets no rung. Without an explicit map, f sends
    each point to the next one.
    """
    points: Tuple[Fraction, ...]
    mapping: Optional[Dict[Fraction, Fraction]] = None

    def __post_init__(self):
        self.points = tuple(Fraction(p) for p in self.points)
        if len(self.points) < 3:
            raise GeometryError("A ladder needs at least three points")
        if self.points[0] != 0:
            raise GeometryError(f"Ladder points must start at 0, got {self.points[0]}")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise GeometryError("Ladder points must be strictly increasing")
        if self.mapping is None:
            self.mapping = {a: b for a, b in zip(self.points, self.points[1:])}
        else:
            self.mapping = {Fraction(a): Fraction(b) for a, b in self.mapping.items()}
        self._check_mapping()

    def _check_mapping(self) -> None:
        members = set(self.points)
        for a, b in self.mapping.items():
            if a not in members or b not in members:
                raise GeometryError(f"Map pair {a}:{b} leaves the point set")
            if b <= a:
                raise GeometryError(f"Map must move every point up, but {a} goes to {b}")
        domain = sorted(self.mapping)
        for a, b in zip(domain, domain[1:]):
            if self.mapping[b] <= self.mapping[a]:
                raise GeometryError(f"Map is not strictly increasing at {a} and {b}")
        if Fraction(0) not in self.mapping:
            raise GeometryError("Map must be defined at 0")

    @classmethod
    def parse(cls, text: str, mapping: Optional[str] = None) -> 'LadderSpec':
        """'a0,a1,...' with an optional map 'a:b,c:d,...'"""
        points = tuple(RationalHelper.parse(part) for part in text.split(',') if part.strip())
        if mapping is None:
            return cls(points)
        pairs = {}
        for part in mapping.split(','):
            if not part.strip():
                continue
            source, sep, target = part.partition(':')
            if not sep:
                raise GeometryError(f"Map entry '{part.strip()}' is not of the form a:b")
            pairs[RationalHelper.parse(source)] = RationalHelper.parse(target)
        return cls(points, pairs)

    def orbit(self, limit: Fraction) -> List[Fraction]:
        """f(0), f(f(0)), ... up to limit"""
        result = []
        current = self.mapping.get(Fraction(0))
        while current is not None and current <= limit:
            result.append(current)
            current = self.mapping.get(current)
        return result


@dataclass
class Construction:
    """A built set: generating pieces, its lattice complex, and the expected trace"""
    name: str
    pieces: List[Cell]
    complex: LatticeComplex
    seed: Point
    subspace: Tuple[SubspaceEntry, ...]
    predicted: List[Point]


def _point(*values) -> Point:
    return tuple(Fraction(v) for v in values)


def _lift(cell: Cell, value: Fraction) -> Cell:
    """cell × {value} as a cell one dimension up"""
    last = AffineForm.var(coord(cell.dim)) - AffineForm.const(value)
    return Cell(cell.dim + 1, cell.constraints + (Eq(last),))


# ==================== Ladders ====================

def _ladder_pieces(heights: Sequence[Fraction],
                   successor: Dict[Fraction, Optional[Fraction]]) -> List[Cell]:
    """One loop per height on the boundary faces of the positive octant.

    The loop at height n runs around the box faces through (n,0,0), (n,n,0),
    (0,n,0), (0,n,n) and (0,0,n), then along the top edge to x = successor(n)
    and down a rung that stops just short of the x-axis. A height whose successor
    is None ends with the top edge at x = n and has no rung.
    """
    pieces: List[Cell] = []
    for n in heights:
        s = successor[n]
        pieces.extend([
            segment_cell(_point(n, 0, 0), _point(n, n, 0)),
            segment_cell(_point(n, n, 0), _point(0, n, 0)),
            segment_cell(_point(0, n, 0), _point(0, n, n)),
            segment_cell(_point(0, n, n), _point(0, 0, n)),
            segment_cell(_point(0, 0, n), _point(n if s is None else s, 0, n)),
        ])
        if s is not None:
            pieces.append(segment_cell(_point(s, 0, n), _point(s, 0, 0), closed_end=False))
    return pieces


def _x_axis() -> Tuple[SubspaceEntry, ...]:
    return (Axis.FREE, Fraction(0), Fraction(0))


def build_s0(N: int) -> Construction:
    """Octant boundary faces of the boxes (-n, n)^3 for 1 <= n <= N"""
    if N < 1:
        raise GeometryError(f"N must be positive, got {N}")
    heights = [Fraction(n) for n in range(1, N + 1)]
    pieces = _ladder_pieces(heights, {n: n for n in heights})
    lc = LatticeComplex.from_pieces(3, ((0, N),) * 3, pieces)
    return Construction("s0", pieces, lc, _point(1, 0, 0), _x_axis(), [_point(1, 0, 0)])


def build_sd(d: int, N: int) -> Construction:
    """The octant ladder with every top edge and rung shifted d units along x"""
    if d < 1:
        raise GeometryError(f"Shift must be positive, got {d}")
    if N < d:
        raise GeometryError(f"Window {N} cannot hold a single rung of shift {d}")
    heights = [Fraction(n) for n in range(1, N + 1)]
    pieces = _ladder_pieces(heights, {n: n + d for n in heights})
    lc = LatticeComplex.from_pieces(3, ((0, N + d), (0, N), (0, N)), pieces)
    predicted = [_point(k * d, 0, 0) for k in range(1, N // d + 1)]
    return Construction(f"s{d}", pieces, lc, _point(d, 0, 0), _x_axis(), predicted)


def build_ladder(spec: LadderSpec, N: Fraction = None) -> Construction:
    """Loops at the points of A, the rung of the loop at a landing on the loop at f(a).

    A loop whose image is undefined or beyond the window has no rung.
    The component of (f(0), 0, 0) meets the positive x-axis in the orbit of f on f(0).
    """
    N = Fraction(N) if N is not None else spec.points[-1]
    heights = [a for a in spec.points[1:] if a <= N]
    start = spec.mapping[Fraction(0)]
    if start > N:
        raise GeometryError(f"f(0) = {start} lies beyond the window {N}")
    successor = {}
    for a in heights:
        image = spec.mapping.get(a)
        successor[a] = image if image is not None and image <= N else None
    pieces = _ladder_pieces(heights, successor)
    top = int(N) if N.denominator == 1 else int(N) + 1
    lc = LatticeComplex.from_pieces(3, ((0, top),) * 3, pieces)
    predicted = [_point(a, 0, 0) for a in spec.orbit(N)]
    return Construction("ladder", pieces, lc, _point(start, 0, 0), _x_axis(), predicted)


def build_cprime(N: int, loops: int = None) -> Construction:
    """Copies of the shifted ladders stacked along a fourth axis and tied by a line at x = 1"""
    if N < 2:
        raise GeometryError(f"N must be at least 2, got {N}")
    loops = loops if loops is not None else N * N + 1
    heights = [Fraction(n) for n in range(1, loops + 1)]
    pieces: List[Cell] = []
    for d in range(1, N + 1):
        ladder = _ladder_pieces(heights, {n: n + d for n in heights})
        pieces.extend(_lift(piece, Fraction(d)) for piece in ladder)
    pieces.append(segment_cell(_point(1, 0, 0, 1), _point(1, 0, 0, N)))
    window = ((0, loops + N), (0, loops), (0, loops), (1, N))
    lc = LatticeComplex.from_pieces(4, window, pieces)
    subspace = (Axis.FREE, Fraction(0), Fraction(0), Axis.INTEGER)
    predicted = sorted(_point(d * n + 1, 0, 0, d)
                       for d in range(1, N + 1) for n in range(0, loops) if d * n + 1 <= loops)
    return Construction("cprime", pieces, lc, _point(1, 0, 0, 1), subspace, predicted)


# ==================== Addition ====================

def _tag(m: int, n: int, tagging: str) -> Tuple[int, ...]:
    if tagging not in TAGGINGS:
        raise GeometryError(f"Unknown tagging '{tagging}', expected one of {TAGGINGS}")
    if tagging == "diagonal":
        return _EVEN_EVEN if (m - n) % 2 == 0 else _EVEN_ODD
    return {
        (0, 0): _EVEN_EVEN, (1, 1): _ODD_ODD, (0, 1): _EVEN_ODD, (1, 0): _ODD_EVEN,
    }[(m % 2, n % 2)]


def _gamma_points(m: int, n: int, tagging: str) -> List[Point]:
    tag = _tag(m, n, tagging)
    return [_point(m, n, 0, 0, 0, 0), _point(m, n, *tag),
            _point(m + 1, n, *tag), _point(m + 1, n + 1, *tag)]


def build_gamma(m: int, n: int, tagging: str = "diagonal") -> List[Cell]:
    """The three chained segments from (m, n, 0, 0, 0, 0) to (m+1, n+1, tag)"""
    points = _gamma_points(m, n, tagging)
    return [segment_cell(a, b) for a, b in zip(points, points[1:])]


def build_x(N: int, tagging: str = "diagonal") -> Construction:
    """Copies of all Γ's indexed by a first coordinate, joined through diagonal seeds.

    Clipped to the closed box [0, N]^3 × [0, 1]^4.
    """
    if N < 1:
        raise GeometryError(f"N must be positive, got {N}")
    pieces: List[Cell] = []
    for d in range(N + 1):
        for m in range(N + 1):
            for n in range(N + 1):
                points = [(Fraction(d),) + p for p in _gamma_points(m, n, tagging)]
                pieces.extend(segment_cell(a, b) for a, b in zip(points, points[1:]))
        pieces.append(segment_cell(_point(d, 0, d, 0, 0, 0, 0), _point(d, 0, d, 1, 1, 1, 1)))
    pieces.append(segment_cell(_point(0, 0, 0, 1, 1, 1, 1), _point(N, 0, N, 1, 1, 1, 1)))

    box = box_cell(7, [0] * 7, [N, N, N, 1, 1, 1, 1], upper_open=False)
    clipped = []
    for piece in pieces:
        candidate = piece.meet(box)
        if cell_nonempty(candidate):
            clipped.append(candidate)
    lc = LatticeComplex.from_pieces(7, ((0, N),) * 3 + ((0, 1),) * 4, clipped)
    subspace = (Axis.FREE,) * 3 + (Fraction(0),) * 4
    predicted = sorted(_point(a, b, a + b, 0, 0, 0, 0)
                       for a in range(N + 1) for b in range(N + 1) if a + b <= N)
    logger.info(f"Built X with tagging '{tagging}': {len(clipped)} pieces")
    return Construction(f"x-{tagging}", clipped, lc, _point(0, 0, 0, 0, 0, 0, 0), subspace,
                        predicted)
