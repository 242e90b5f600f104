"""
Verification harness: build a construction, read its trace three ways and compare
"""

import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence
from models.cell import Point
from models.complex import component_of_point, components, trace
from models.constructions import (
    Construction, LadderSpec, build_cprime, build_ladder, build_sd, build_x
)
from models.oracle import complex_partition, oracle_components, oracle_trace, same_partition
from utils.helpers import EngineError
from utils.logger import get_logger
from config.settings import settings

logger = get_logger(__name__)

TARGETS = ("multiples", "addition", "divisibility", "ladder", "all")

# Acceptance-sized runs for 'verify all'
ALL_MULTIPLES = [(d, 8) for d in range(1, 6)]
ALL_ADDITION_MAX = 6
ALL_DIVISIBILITY_MAX = 6
ALL_LADDERS = ["0,1,4,9,16,25", "0,1,2,4,8,16,32"]


@dataclass
class VerifyReport:
    """Outcome of one verification target"""
    name: str
    window: tuple
    expected: List[Point]
    computed: List[Point]
    oracle: List[Point]
    partitions_agree: bool
    runtime: float
    warnings: List[str] = field(default_factory=list)

    @property
    def match(self) -> bool:
        """True when the three traces agree and so do the partitions"""
        return self.computed == self.expected and self.oracle == self.expected \
            and self.partitions_agree

    def missing(self) -> List[Point]:
        """Predicted points the complex trace lacks"""
        return sorted(set(self.expected) - set(self.computed))

    def extra(self) -> List[Point]:
        """Complex trace points that were not predicted"""
        return sorted(set(self.computed) - set(self.expected))


def verify_construction(construction: Construction, warnings: Sequence[str] = ()) -> VerifyReport:
    """Component trace, oracle trace and predicted trace of one construction"""
    started = time.perf_counter()
    lc = construction.complex
    labeling = components(lc)
    computed = trace(lc, component_of_point(lc, construction.seed, labeling),
                     construction.subspace)

    classes = oracle_components(construction.pieces)
    from_oracle = oracle_trace(construction.pieces, classes, construction.seed,
                               construction.subspace)
    agree = same_partition(classes, complex_partition(lc, labeling, construction.pieces))

    report = VerifyReport(construction.name, lc.window, sorted(construction.predicted),
                          computed, from_oracle, agree, time.perf_counter() - started,
                          list(warnings))
    if report.match:
        logger.info(f"Verified {report.name}: {len(computed)} trace points in "
                    f"{report.runtime:.2f}s")
    else:
        logger.warning(f"Verification of {report.name} failed: missing {report.missing()}, "
                       f"extra {report.extra()}, partitions agree {agree}")
    return report


def _stability(name: str, needed: int, window: Optional[int]) -> tuple:
    """The window to build with, and a warning when a requested one is too small"""
    if window is None or window >= needed:
        return (window or needed), []
    message = (f"{name}: window {window} is below the stable bound {needed} "
               f"({settings.STABLE_WINDOWS[name]})")
    logger.warning(message)
    return window, [message]


def verify_multiples(d: int, max_multiple: int, window: Optional[int] = None) -> VerifyReport:
    """Multiples of d up to max_multiple * d on the shifted ladder"""
    N, warnings = _stability("multiples", max_multiple * d, window)
    return verify_construction(build_sd(d, N), warnings)


def verify_addition(max_summand: int, window: Optional[int] = None,
                    tagging: str = "diagonal") -> VerifyReport:
    N, warnings = _stability("addition", 2 * max_summand, window)
    return verify_construction(build_x(N, tagging), warnings)


def verify_divisibility(max_divisor: int, window: Optional[int] = None) -> VerifyReport:
    """Residues 1 modulo every divisor up to max_divisor on the stacked ladders"""
    loops, warnings = _stability("divisibility", max_divisor * max_divisor + 1, window)
    return verify_construction(build_cprime(max_divisor, loops), warnings)


def verify_ladder(points: str, window: Optional[int] = None,
                  mapping: Optional[str] = None) -> VerifyReport:
    spec = LadderSpec.parse(points, mapping)
    return verify_construction(build_ladder(spec, window))


def verify_all() -> List[VerifyReport]:
    """The acceptance-sized runs, in order"""
    reports = [verify_multiples(d, m) for d, m in ALL_MULTIPLES]
    reports.append(verify_addition(ALL_ADDITION_MAX))
    reports.append(verify_divisibility(ALL_DIVISIBILITY_MAX))
    reports.extend(verify_ladder(points) for points in ALL_LADDERS)
    return reports


def run_target(target: str, max_value: int = 4, d: int = 1, points: Optional[str] = None,
               window: Optional[int] = None, mapping: Optional[str] = None) -> List[VerifyReport]:
    """Dispatch a CLI verification target"""
    try:
        if target == "multiples":
            return [verify_multiples(d, max_value, window)]
        if target == "addition":
            return [verify_addition(max_value, window)]
        if target == "divisibility":
            return [verify_divisibility(max_value, window)]
        if target == "ladder":
            return [verify_ladder(points or ALL_LADDERS[0], window, mapping)]
        if target == "all":
            return verify_all()
    except EngineError as e:
        logger.error(f"Verification error for {target}: {e}")
        raise
    raise ValueError(f"Unknown verification target '{target}', expected one of {TARGETS}")
