"""
Engine controller that coordinates between the models and the command line
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple
from models.cell import Axis, Point, SubspaceEntry, parse_subspace_entry
from models.complex import (
    ComponentLabeling, LatticeComplex, Polyline, component_of_point, components, decompose_window,
    trace, witness_path
)
from models.constructions import (
    Construction, LadderSpec, build_cprime, build_ladder, build_s0, build_sd, build_x
)
from models.formula import Formula, free_vars, print_formula
from models.parser import parse_formula
from models.qe import decide_sentence, qe
from models.setfile import read_setfile, read_trace, same_trace, trace_lines
from utils.helpers import EngineError, ExportHelper, RationalHelper
from utils.logger import attach_trace_file, detach_trace_file, get_logger
from config.settings import settings

logger = get_logger(__name__)

CONSTRUCTIONS = ("s0", "sd", "gamma-x", "cprime", "ladder")


class EngineController:
    """Loads inputs, runs the models and hands results to the renderers"""

    def __init__(self, trace_log: Optional[str] = None):
        self._trace_handler = attach_trace_file(trace_log) if trace_log else None
        logger.info("Engine controller initialized")

    def close(self) -> None:
        """Detach the step-trace file, if one was attached"""
        if self._trace_handler is not None:
            detach_trace_file(self._trace_handler)
            self._trace_handler = None

    # ==================== Formulas ====================

    def eliminate(self, text: str) -> Formula:
        """Quantifier-free equivalent of a formula"""
        try:
            formula = parse_formula(text)
            result = qe(formula)
            logger.info(f"qe: {print_formula(formula)} -> {print_formula(result)}")
            return result
        except EngineError as e:
            logger.error(f"Elimination error: {e}")
            raise

    def decide(self, text: str) -> bool:
        """Truth value of a sentence"""
        try:
            value = decide_sentence(parse_formula(text))
            logger.info(f"decide: {text.strip()} -> {value}")
            return value
        except EngineError as e:
            logger.error(f"Decision error: {e}")
            raise

    # ==================== Set files ====================

    def load_set(self, path: str, window: Optional[int] = None) -> LatticeComplex:
        """Read a set file; a formula file ('formula: ...' on its first line) is decomposed"""
        try:
            with open(path, encoding='utf-8') as handle:
                text = handle.read()
            head = text.lstrip()
            if head.startswith("formula:"):
                return self.decompose(head[len("formula:"):], window)
            return read_setfile(text)
        except OSError as e:
            logger.error(f"Cannot read set file {path}: {e}")
            raise
        except EngineError as e:
            logger.error(f"Set file error in {path}: {e}")
            raise

    def decompose(self, text: str, window: Optional[int] = None) -> LatticeComplex:
        """Lattice complex of a quantifier-free formula over [-w, w] in every coordinate"""
        formula = qe(parse_formula(text))
        names = sorted(free_vars(formula))
        bound = window if window is not None else settings.DEFAULT_WINDOW
        return decompose_window(formula, tuple((-bound, bound) for _ in names), names)

    def components(self, lc: LatticeComplex) -> ComponentLabeling:
        """Connected components of a lattice complex"""
        try:
            return components(lc)
        except EngineError as e:
            logger.error(f"Component error: {e}")
            raise

    def trace_of_point(self, lc: LatticeComplex, point: Point,
                       fixes: Sequence[str] = ()) -> List[Point]:
        """Trace of the component of point on the subspace given by 'i=v' fixes"""
        try:
            cells = component_of_point(lc, point)
            return trace(lc, cells, self.subspace(lc.dim, fixes))
        except EngineError as e:
            logger.error(f"Trace error: {e}")
            raise

    @staticmethod
    def subspace(dim: int, fixes: Sequence[str]) -> Tuple[SubspaceEntry, ...]:
        """Every coordinate free unless fixed by 'i=value', 'i=Z' or 'i=*' (1-based i)"""
        entries: List[SubspaceEntry] = [Axis.FREE] * dim
        for fix in fixes:
            index, sep, value = fix.partition("=")
            if not sep or not index.strip().isdigit() or not 1 <= int(index) <= dim:
                raise ValueError(f"Bad subspace entry '{fix}', expected i=value with 1 <= i <= {dim}")
            entries[int(index) - 1] = parse_subspace_entry(value)
        return tuple(entries)

    def path(self, lc: LatticeComplex, start: Point, end: Point) -> Polyline:
        """Verified polyline from start to end inside the set"""
        try:
            return witness_path(lc, start, end)
        except EngineError as e:
            logger.error(f"Path error: {e}")
            raise

    # ==================== Constructions ====================

    def build(self, name: str, N: int, d: int = 1, points: Optional[str] = None,
              tagging: str = "diagonal", mapping: Optional[str] = None) -> Construction:
        """Build a named construction"""
        builders = {
            "s0": lambda: build_s0(N),
            "sd": lambda: build_sd(d, N),
            "gamma-x": lambda: build_x(N, tagging),
            "cprime": lambda: build_cprime(N),
            "ladder": lambda: build_ladder(LadderSpec.parse(points or "", mapping),
                                           Fraction(N) if N else None),
        }
        if name not in builders:
            raise ValueError(f"Unknown construction '{name}', expected one of {CONSTRUCTIONS}")
        try:
            construction = builders[name]()
            logger.info(f"Built {construction.name}: {len(construction.pieces)} pieces, "
                        f"{construction.complex.cell_count()} cells")
            return construction
        except EngineError as e:
            logger.error(f"Build error for {name}: {e}")
            raise

    # ==================== Export ====================

    def export_trace(self, points: Sequence[Point], path: Optional[str] = None) -> str:
        """Write a trace file and return its path; without a path it goes to the export directory"""
        return ExportHelper.write_text(trace_lines(points), path, stem="trace")

    def matches_trace_file(self, points: Sequence[Point], path: str) -> bool:
        """Compare a computed trace with the points listed in a trace file"""
        try:
            with open(path, encoding='utf-8') as handle:
                expected = read_trace(handle.read())
        except (OSError, EngineError) as e:
            logger.error(f"Cannot read trace file {path}: {e}")
            raise
        if not same_trace(points, expected):
            logger.warning(f"Trace differs from {path}: {len(points)} computed, "
                           f"{len(expected)} expected")
            return False
        return True

    @staticmethod
    def parse_point(text: str) -> Point:
        """Parse a command-line point such as '1,0,1/2'"""
        return RationalHelper.parse_point(text)
