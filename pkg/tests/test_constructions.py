"""
Tests for the ladder and addition constructions, the piece oracle and the verification harness
"""

import random
from fractions import Fraction as F
import pytest
from models.cell import Cell, box_cell, cell_point, segment_cell
from models.complex import (
    LatticeComplex, check_complex, component_of_point, components, trace, verify_polyline,
    witness_path
)
from models.formula import AffineForm, Le
from models.constructions import (
    LadderSpec, build_cprime, build_gamma, build_ladder, build_s0, build_sd, build_x
)
from models.oracle import complex_partition, oracle_components, oracle_trace, same_partition
from controllers.verification import (
    run_target, verify_addition, verify_construction, verify_divisibility, verify_ladder,
    verify_multiples
)
from utils.helpers import GeometryError, PathError


def point(*values):
    return tuple(F(v) for v in values)


def computed_trace(construction):
    lc = construction.complex
    return trace(lc, component_of_point(lc, construction.seed), construction.subspace)


class TestLadderSpec:

    def test_parse_and_orbit(self):
        spec = LadderSpec.parse("0, 1, 4, 9, 16")
        assert spec.mapping[F(4)] == F(9)
        assert spec.orbit(F(10)) == [F(1), F(4), F(9)]

    def test_rational_points(self):
        assert LadderSpec.parse("0,1/2,3/2").points == (F(0), F(1, 2), F(3, 2))

    @pytest.mark.parametrize("text", ["0,1", "1,2,3", "0,2,2", "0,3,1"])
    def test_invalid_point_sets(self, text):
        with pytest.raises(GeometryError):
            LadderSpec.parse(text)

    def test_explicit_map_skips_points(self):
        spec = LadderSpec.parse("0,1,2,3,5,8,13", "0:1, 1:3, 2:5, 3:8, 5:13")
        assert spec.orbit(F(13)) == [F(1), F(3), F(8)]
        assert F(8) not in spec.mapping

    @pytest.mark.parametrize("mapping", [
        "0:1, 1:1",
        "0:2, 1:2",
        "0:1, 1:7",
        "1:2, 2:3",
        "0-1",
    ])
    def test_invalid_maps(self, mapping):
        with pytest.raises(GeometryError):
            LadderSpec.parse("0,1,2,3", mapping)


class TestLadders:

    def test_unshifted_ladder_traces_one_point(self):
        s0 = build_s0(3)
        check_complex(s0.complex)
        assert computed_trace(s0) == [point(1, 0, 0)]

    def test_multiples_of_two(self):
        s2 = build_sd(2, 8)
        traced = computed_trace(s2)
        assert traced == [point(k, 0, 0) for k in (2, 4, 6, 8)]
        assert point(3, 0, 0) not in traced
        assert traced == s2.predicted

    def test_shift_needs_room(self):
        with pytest.raises(GeometryError):
            build_sd(3, 2)
        with pytest.raises(GeometryError):
            build_sd(0, 4)

    def test_squares(self):
        ladder = build_ladder(LadderSpec.parse("0,1,4,9"), F(9))
        assert computed_trace(ladder) == [point(a, 0, 0) for a in (1, 4, 9)]

    def test_ladder_window_cuts_the_orbit(self):
        ladder = build_ladder(LadderSpec.parse("0,1,2,4,8"), F(4))
        assert computed_trace(ladder) == [point(a, 0, 0) for a in (1, 2, 4)]
        assert ladder.predicted == [point(a, 0, 0) for a in (1, 2, 4)]

    def test_map_that_skips_points(self):
        spec = LadderSpec.parse("0,1,2,3,4,5,6", "0:2, 1:3, 2:4, 3:5, 4:6")
        ladder = build_ladder(spec, F(6))
        check_complex(ladder.complex)
        assert computed_trace(ladder) == [point(a, 0, 0) for a in (2, 4, 6)]
        assert ladder.predicted == computed_trace(ladder)

    def test_loops_without_image_stay_apart(self):
        spec = LadderSpec.parse("0,1,2,3,4,5,6", "0:2, 1:3, 2:4, 3:5, 4:6")
        ladder = build_ladder(spec, F(6))
        lc = ladder.complex
        odd = trace(lc, component_of_point(lc, point(1, 0, 0)), ladder.subspace)
        assert odd == [point(a, 0, 0) for a in (1, 3, 5)]

    def test_first_step_beyond_window(self):
        with pytest.raises(GeometryError):
            build_ladder(LadderSpec.parse("0,1,5", "0:5"), F(4))

    def test_divisibility(self):
        cprime = build_cprime(2)
        assert computed_trace(cprime) == cprime.predicted
        assert point(3, 0, 0, 2) in cprime.predicted
        assert point(2, 0, 0, 2) not in cprime.predicted


class TestAddition:

    def test_gamma_chain(self):
        segments = build_gamma(0, 0)
        assert len(segments) == 3
        assert segments[0].contains(point(0, 0, 0, 0, 0, 0))
        assert segments[2].contains(point(1, 1, 0, 1, 0, 1))

    def test_gamma_tags_alternate(self):
        even = build_gamma(1, 1)
        odd = build_gamma(1, 2)
        assert even[1].contains(point(F(3, 2), 1, 0, 1, 0, 1))
        assert odd[1].contains(point(F(3, 2), 2, 0, 1, 1, 0))
        assert not odd[1].contains(point(F(3, 2), 2, 0, 1, 0, 1))

    def test_unknown_tagging(self):
        with pytest.raises(GeometryError):
            build_gamma(0, 0, "spiral")

    def test_diagonal_tagging_adds(self):
        x = build_x(2)
        assert computed_trace(x) == x.predicted
        assert point(1, 1, 2, 0, 0, 0, 0) in x.predicted

    def test_parity_tagging_breaks_odd_diagonals(self):
        x = build_x(2, "parity")
        traced = computed_trace(x)
        assert point(1, 1, 2, 0, 0, 0, 0) not in traced
        assert point(2, 0, 2, 0, 0, 0, 0) in traced


class TestOracle:

    def test_disjoint_segments(self):
        a = segment_cell(point(0, 0), point(1, 0))
        b = segment_cell(point(0, 1), point(1, 1))
        assert oracle_components([a, b]) == [[0], [1]]

    def test_chain_of_segments(self):
        pieces = [segment_cell(point(0, 0), point(1, 0)),
                  segment_cell(point(2, 1), point(1, 1)),
                  segment_cell(point(1, 0), point(1, 1))]
        assert oracle_components(pieces) == [[0, 1, 2]]

    def test_open_end_without_closure_point(self):
        a = segment_cell(point(0, 0), point(1, 0), closed_end=False)
        b = segment_cell(point(1, 0), point(2, 0), closed_start=False)
        assert oracle_components([a, b]) == [[0], [1]]

    def test_sloped_segments(self):
        pieces = [segment_cell(point(0, 0), point(2, 3)),
                  segment_cell(point(2, 3), point(4, 3)),
                  segment_cell(point(3, 0), point(4, 1))]
        assert oracle_components(pieces) == [[0, 1], [2]]

    def test_sloped_segments_agree_with_complex(self):
        pieces = [segment_cell(point(0, 0), point(3, 2)),
                  segment_cell(point(3, 2), point(1, 3)),
                  segment_cell(point(0, 3), point(1, 2), closed_end=False),
                  segment_cell(point(1, 2), point(2, 2), closed_start=False)]
        lc = LatticeComplex.from_pieces(2, ((0, 3), (0, 3)), pieces)
        classes = oracle_components(pieces)
        assert classes == [[0, 1], [2], [3]]
        assert same_partition(classes, complex_partition(lc, components(lc), pieces))

    def test_unbounded_piece(self):
        ray = Cell(1, (Le(-AffineForm.var("x1")),))
        with pytest.raises(GeometryError):
            oracle_components([ray])

    def test_partition_agrees_with_complex(self):
        s2 = build_sd(2, 4)
        labeling = components(s2.complex)
        classes = oracle_components(s2.pieces)
        assert same_partition(classes, complex_partition(s2.complex, labeling, s2.pieces))
        assert oracle_trace(s2.pieces, classes, s2.seed, s2.subspace) == [point(2, 0, 0),
                                                                         point(4, 0, 0)]

    def test_same_partition_ignores_order(self):
        assert same_partition([[0, 2], [1]], [[1], [2, 0]])
        assert not same_partition([[0, 1], [2]], [[0], [1, 2]])


def random_planar_pieces(rng: random.Random):
    coords = [F(k, 2) for k in range(9)]
    count = rng.randint(2, 6)
    pieces = []
    while len(pieces) < count:
        a = (rng.choice(coords), rng.choice(coords))
        b = (rng.choice(coords), rng.choice(coords))
        if a == b:
            continue
        if rng.random() < 0.3:
            lower = [min(a[0], b[0]), min(a[1], b[1])]
            upper = [max(a[0], b[0]), max(a[1], b[1])]
            pieces.append(box_cell(2, lower, upper, upper_open=rng.random() < 0.5))
        else:
            pieces.append(segment_cell(a, b, closed_start=rng.random() < 0.8,
                                       closed_end=rng.random() < 0.8))
    return pieces


class TestRandomPlanarSets:

    def test_components_match_oracle_and_admit_paths(self):
        rng = random.Random(4242)
        for _ in range(50):
            pieces = random_planar_pieces(rng)
            lc = LatticeComplex.from_pieces(2, ((0, 4), (0, 4)), pieces)
            labeling = components(lc)
            classes = oracle_components(pieces)
            assert same_partition(classes, complex_partition(lc, labeling, pieces)), pieces
            for members in classes:
                start = cell_point(pieces[members[0]])
                end = cell_point(pieces[members[-1]])
                path = witness_path(lc, start, end, labeling)
                assert verify_polyline(lc, path)
            if len(classes) > 1:
                with pytest.raises(PathError):
                    witness_path(lc, cell_point(pieces[classes[0][0]]),
                                 cell_point(pieces[classes[1][0]]), labeling)


class TestVerification:

    def test_report_for_a_matching_construction(self):
        report = verify_construction(build_sd(3, 6))
        assert report.match
        assert report.missing() == [] and report.extra() == []

    def test_multiples(self):
        report = verify_multiples(2, 3)
        assert report.match
        assert report.expected == [point(k, 0, 0) for k in (2, 4, 6)]

    def test_small_window_warns(self):
        report = verify_multiples(2, 3, window=4)
        assert report.warnings

    def test_parity_tagging_mismatch(self):
        report = verify_addition(1, tagging="parity")
        assert not report.match
        assert point(1, 1, 2, 0, 0, 0, 0) in report.missing()

    def test_ladder_target(self):
        assert verify_ladder("0,1,3,6").match

    def test_ladder_with_explicit_map(self):
        report = verify_ladder("0,1,2,3,5,8", mapping="0:1, 1:3, 2:5, 3:8")
        assert report.match
        assert report.expected == [point(a, 0, 0) for a in (1, 3, 8)]

    def test_unknown_target(self):
        with pytest.raises(ValueError):
            run_target("fibonacci")


@pytest.mark.slow
class TestAcceptanceSizes:

    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_multiples(self, d):
        assert verify_multiples(d, 8).match

    def test_addition(self):
        assert verify_addition(6).match

    def test_divisibility(self):
        assert verify_divisibility(6).match

    @pytest.mark.parametrize("points", ["0,1,4,9,16,25", "0,1,2,4,8,16,32"])
    def test_ladders(self, points):
        assert verify_ladder(points).match
