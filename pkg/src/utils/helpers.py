"""
Helper functions, exceptions and utilities for the floorlattice engine
"""

import datetime
import math
import os
import re
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple
from config.settings import settings


class EngineError(Exception):
    """Base class for all engine errors"""
    pass


class FormulaSyntaxError(EngineError):
    """Formula text does not conform to the grammar"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownIdentifierError(FormulaSyntaxError):
    """A function-like identifier outside the language was used"""
    pass


class EvaluationError(EngineError):
    """Formula cannot be evaluated at the given assignment"""
    pass


class UndecidableFragmentError(EngineError):
    """Divisibility occurs under a quantifier"""
    pass


class NonAffineError(EngineError):
    """A variable occurs where the eliminator needs it affine and floor-free"""
    pass


class EliminationError(EngineError):
    """Internal failure of an elimination pass"""
    pass


class GeometryError(EngineError):
    """Base class for cell and complex errors"""
    pass


class DimensionMismatchError(GeometryError):
    pass


class EmptyCellError(GeometryError):
    pass


class WindowTooLargeError(GeometryError):
    pass


class TraceError(GeometryError):
    """A trace subspace meets a cell in infinitely many points"""
    pass


class PathError(GeometryError):
    pass


class SetFileError(EngineError):
    """Malformed set file"""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"{message} (line {line})" if line else message)
        self.line = line


class InvariantViolation(EngineError):
    """An internal invariant check failed"""
    pass


class RationalHelper:
    """Helper class for exact rational values"""

    _RATIONAL = re.compile(r'^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$')

    @staticmethod
    def parse(text: str) -> Fraction:
        """Parse 'p' or 'p/q' into a Fraction"""
        match = RationalHelper._RATIONAL.match(text)
        if not match:
            raise ValueError(f"Not a rational: {text!r}")
        denominator = int(match.group(2)) if match.group(2) else 1
        if denominator == 0:
            raise ValueError(f"Zero denominator: {text!r}")
        return Fraction(int(match.group(1)), denominator)

    @staticmethod
    def format(value: Fraction) -> str:
        """Format as 'p' or 'p/q'"""
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"

    @staticmethod
    def format_point(point: Sequence[Fraction]) -> str:
        """Format a point as a parenthesised tuple"""
        return "(" + ", ".join(RationalHelper.format(v) for v in point) + ")"

    @staticmethod
    def parse_point(text: str) -> Tuple[Fraction, ...]:
        """Parse '1,0,1/2' or '(1, 0, 1/2)'"""
        body = text.strip().strip('()')
        if not body:
            return ()
        return tuple(RationalHelper.parse(part) for part in body.split(','))

    @staticmethod
    def floor(value: Fraction) -> int:
        """Greatest integer not above value"""
        return math.floor(value)

    @staticmethod
    def lcm_all(values: Iterable[int]) -> int:
        """Least common multiple, 1 for no values"""
        result = 1
        for value in values:
            result = result * value // math.gcd(result, value)
        return result

    @staticmethod
    def grid(lo: Fraction, hi: Fraction, step: Fraction) -> List[Fraction]:
        """Rational grid lo, lo+step, ..., up to and including hi"""
        points = []
        current = Fraction(lo)
        while current <= hi:
            points.append(current)
            current += step
        return points


class ExportHelper:
    """Helper class for writing result files"""

    @staticmethod
    def write_text(lines: Iterable[str], path: Optional[str] = None,
                   stem: str = "output") -> str:
        """Write lines to path, or to a timestamped file in the export directory"""
        if path is None:
            timestamp = datetime.datetime.now().strftime(settings.EXPORT_DATE_FORMAT)
            path = os.path.join(settings.get_export_directory(), f"{stem}_{timestamp}.txt")
        with open(path, 'w', encoding='utf-8') as handle:
            for line in lines:
                handle.write(line + "\n")
        return path
