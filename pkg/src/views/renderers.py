"""
Text and machine renderings of engine results
"""

from typing import List, Sequence
from models.cell import Point
from models.complex import ComponentLabeling, LatticeComplex, Polyline
from models.constructions import Construction
from models.formula import Formula, print_formula
from models.setfile import setfile_lines, trace_lines
from controllers.verification import VerifyReport
from utils.helpers import RationalHelper

FORMATS = ("text", "machine")


def _vertex(vertex) -> str:
    z, i = vertex
    return f"({RationalHelper.format_point(z)}, {i})"


def render_formula(f: Formula, fmt: str = "text") -> List[str]:
    """Lines for a quantifier-free result"""
    return [print_formula(f)]


def render_decision(value: bool, fmt: str = "text") -> List[str]:
    """'true' or 'false'"""
    return ["true" if value else "false"]


def render_components(lc: LatticeComplex, labeling: ComponentLabeling,
                      fmt: str = "text") -> List[str]:
    if fmt == "machine":
        return [f"component {k}: " + " ".join(_vertex(v) for v in labeling.members(k))
                for k in range(labeling.count)]
    lines = [f"{labeling.count} components within window "
             f"{' x '.join(f'[{lo}, {hi}]' for lo, hi in lc.window)}"]
    for k, size in enumerate(labeling.sizes()):
        members = labeling.members(k)
        lines.append(f"  component {k}: {size} cells, first {_vertex(members[0])}")
    return lines


def render_trace(points: Sequence[Point], fmt: str = "text") -> List[str]:
    """A trace as a point count and one point per line"""
    if fmt == "machine":
        return trace_lines(points)
    if not points:
        return ["trace is empty"]
    return [f"{len(points)} trace points"] + [f"  {line}" for line in trace_lines(points)]


def render_path(path: Polyline, fmt: str = "text") -> List[str]:
    """Polyline vertices, one per line"""
    lines = [RationalHelper.format_point(p) for p in path.vertices]
    if fmt == "machine":
        return lines
    return [f"path with {len(path.segments())} segments"] + [f"  {line}" for line in lines]


def render_construction(construction: Construction, fmt: str = "text") -> List[str]:
    """Set file of a construction under a comment naming it"""
    lines = setfile_lines(construction.complex)
    if fmt == "machine":
        return lines
    summary = (f"# {construction.name}: {len(construction.pieces)} pieces, "
               f"{construction.complex.cell_count()} cells, seed "
               f"{RationalHelper.format_point(construction.seed)}")
    return [summary] + lines


def render_report(report: VerifyReport, fmt: str = "text") -> List[str]:
    """Verification summary with missing and extra points"""
    status = "match" if report.match else "MISMATCH"
    if fmt == "machine":
        return [f"verify {report.name} {status} expected={len(report.expected)} "
                f"computed={len(report.computed)} oracle={len(report.oracle)} "
                f"partitions={'agree' if report.partitions_agree else 'differ'}"]
    lines = [f"{report.name}: {status} ({len(report.computed)} of {len(report.expected)} "
             f"expected trace points, {report.runtime:.2f}s)"]
    lines.extend(f"  warning: {w}" for w in report.warnings)
    if not report.match:
        lines.append(f"  missing: {', '.join(map(RationalHelper.format_point, report.missing()))}")
        lines.append(f"  extra: {', '.join(map(RationalHelper.format_point, report.extra()))}")
        if report.oracle != report.expected:
            lines.append("  oracle trace differs from the prediction")
        if not report.partitions_agree:
            lines.append("  oracle classes differ from complex components")
    return lines
