"""
Tests for the extremal and center-preserving constructions.
"""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ultracenter.center import center_bound, center_bruteforce, center_report
from ultracenter.constructions import (
    AddPointSpec,
    BinaryWordSpec,
    ExtremalSpec,
    add_point,
    binary_word_space,
    double,
    extremal_space,
    generate,
    parse_construction_spec,
    random_space,
    realize_center_set,
)
from ultracenter.core import UltrametricSpace, distance_set, validate_space
from ultracenter.errors import DomainError, ResourceError, StructuralError
from ultracenter.formats import SpaceDocument
from ultracenter.tree import SimilarityMode, find_similarity

SINGLE = UltrametricSpace.from_rows(["p"], [["0"]])
PAIR = UltrametricSpace.from_rows(["p", "q"], [["0", "1"], ["1", "0"]])
NOT_ULTRAMETRIC = UltrametricSpace.from_rows(
    ["p", "q", "r"], [["0", "2", "1"], ["2", "0", "1"], ["1", "1", "0"]]
)


def assert_ultrametric(space: UltrametricSpace) -> None:
    assert validate_space(space.points, space.matrix).valid


class TestBinaryWords:
    def test_one_bit(self):
        space = binary_word_space(1)
        assert space.points == ("0", "1")
        assert space.distance("0", "1") == Fraction(1, 2)
        assert center_bruteforce(space) == (0, Fraction(1, 2))

    def test_two_bits(self):
        space = binary_word_space(2)
        assert space.distance("00", "01") == Fraction(1, 4)
        assert space.distance("00", "10") == Fraction(1, 2)
        assert space.distance("00", "11") == Fraction(1, 2)
        assert center_bruteforce(space) == (0, Fraction(1, 4), Fraction(1, 2))

    @pytest.mark.parametrize("n", range(1, 11))
    def test_attains_the_bound(self, n):
        space = binary_word_space(n)
        assert len(space) == 2**n
        center = center_bruteforce(space)
        assert len(center) == n + 1 == center_bound(len(space))
        assert center == (0,) + tuple(Fraction(1, 2**i) for i in range(n, 0, -1))

    def test_budget(self):
        with pytest.raises(ResourceError):
            binary_word_space(5, max_points=16)

    def test_zero_length(self):
        with pytest.raises(DomainError):
            binary_word_space(0)


class TestDouble:
    def test_pair(self):
        doubled = double(PAIR, 2)
        assert len(doubled) == 4
        assert center_bruteforce(doubled) == (0, 1, 2)
        assert_ultrametric(doubled)

    def test_singleton(self):
        doubled = double(SINGLE, "5")
        assert doubled.points == ("p·0", "p·1")
        assert center_bruteforce(doubled) == (0, 5)

    def test_base_must_be_ultrametric(self):
        with pytest.raises(DomainError, match="Not an ultrametric space"):
            double(NOT_ULTRAMETRIC, 5)

    def test_t_star_must_exceed_diameter(self):
        with pytest.raises(DomainError):
            double(PAIR, 1)
        with pytest.raises(DomainError):
            double(PAIR, "1/2")

    def test_iterated_from_singleton(self):
        space = SINGLE
        for level in range(1, 7):
            before = len(center_bruteforce(space))
            space = double(space, level)
            assert len(space) == 2**level
            assert len(center_bruteforce(space)) == before + 1 == level + 1

    @settings(max_examples=30, deadline=None)
    @given(rng=st.randoms(use_true_random=False))
    def test_adds_t_star(self, rng):
        base = random_space(rng, max_points=16)
        t_star = max(distance_set(base)) + 1
        doubled = double(base, t_star)
        assert center_bruteforce(doubled) == center_bruteforce(base) + (t_star,)
        assert_ultrametric(doubled)


class TestAddPoint:
    def test_x4(self, x4):
        grown = add_point(x4)
        assert len(grown) == 5
        assert grown.points[:4] == x4.points
        assert center_bruteforce(grown) == (0, 3)
        assert_ultrametric(grown)

    def test_pair_becomes_equilateral(self):
        pair = UltrametricSpace.from_rows(["p", "q"], [["0", "4"], ["4", "0"]])
        grown = add_point(pair)
        assert grown.points == ("p", "q", "p*")
        assert distance_set(grown) == (0, 4)
        assert center_bruteforce(grown) == (0, 4)

    def test_needs_two_points(self):
        with pytest.raises(DomainError):
            add_point(SINGLE)

    def test_base_must_be_ultrametric(self):
        with pytest.raises(DomainError, match="not ultrametric"):
            add_point(NOT_ULTRAMETRIC)

    def test_fresh_names(self):
        space = UltrametricSpace.from_rows(["p", "p*"], [["0", "1"], ["1", "0"]])
        assert add_point(space).points[-1] == "p**"

    @pytest.mark.parametrize("seed", range(100))
    def test_preserves_center(self, seed):
        rng = random.Random(seed)
        space = random_space(rng, max_points=24)
        center = center_bruteforce(space)
        for _ in range(5):
            grown = add_point(space)
            assert len(grown) == len(space) + 1
            assert center_bruteforce(grown) == center
            space = grown


class TestRealizeCenterSet:
    def test_singleton_set(self):
        space = realize_center_set(["0"])
        assert len(space) == 1

    def test_y4_configuration(self, y4):
        space = realize_center_set([0, 2, 3])
        assert distance_set(space) == center_bruteforce(space) == (0, 2, 3)
        assert find_similarity(space, y4, SimilarityMode.ISOMETRY) is not None

    def test_eight_points(self):
        space = realize_center_set(["0", "1", "2", "5"])
        assert len(space) == 8
        assert distance_set(space) == center_bruteforce(space) == (0, 1, 2, 5)

    def test_sixteen_points(self):
        space = realize_center_set([0, 1, 2, 5, 9])
        assert len(space) == 16
        assert center_bruteforce(space) == (0, 1, 2, 5, 9)

    def test_needs_zero(self):
        with pytest.raises(DomainError):
            realize_center_set([1, 2])

    def test_budget(self):
        with pytest.raises(ResourceError):
            realize_center_set(range(8), max_points=64)

    @pytest.mark.parametrize("seed", range(50))
    def test_random_sets(self, seed):
        rng = random.Random(seed)
        size = rng.randint(0, 4)
        values = {Fraction(0)} | {
            Fraction(rng.randint(1, 50), rng.randint(1, 6)) for _ in range(size)
        }
        space = realize_center_set(values)
        target = tuple(sorted(values))
        assert distance_set(space) == target
        assert center_bruteforce(space) == target


class TestExtremal:
    @pytest.mark.parametrize("n", range(1, 20))
    def test_attains_bound(self, n):
        space = extremal_space(n)
        assert len(space) == n
        assert len(center_bruteforce(space)) == center_bound(n)
        assert center_report(space).attains_bound


class TestSpecs:
    def test_binary_word_spec(self):
        spec = parse_construction_spec('{"kind":"binary_word","n":3}')
        assert isinstance(spec, BinaryWordSpec)
        assert len(generate(spec)) == 8

    def test_double_spec(self, x4):
        spec = parse_construction_spec(
            {
                "kind": "double",
                "base": SpaceDocument.from_space(x4).model_dump(),
                "t_star": "4",
            }
        )
        space = generate(spec)
        assert center_bruteforce(space) == (0, 3, 4)

    def test_add_point_spec(self, x4):
        spec = parse_construction_spec(
            {
                "kind": "add_point",
                "base": SpaceDocument.from_space(x4).model_dump(),
                "times": 3,
            }
        )
        assert isinstance(spec, AddPointSpec)
        space = generate(spec)
        assert len(space) == 7
        assert center_bruteforce(space) == (0, 3)

    def test_realize_set_spec(self):
        spec = parse_construction_spec(
            {"kind": "realize_set", "values": ["0", "1/2", 3]}
        )
        assert distance_set(generate(spec)) == (0, Fraction(1, 2), 3)

    def test_extremal_spec(self):
        spec = parse_construction_spec({"kind": "extremal", "n": 6})
        assert isinstance(spec, ExtremalSpec)
        assert len(center_bruteforce(generate(spec))) == 3

    def test_budget_applies(self):
        spec = parse_construction_spec({"kind": "binary_word", "n": 12})
        with pytest.raises(ResourceError):
            generate(spec, max_points=1024)

    @pytest.mark.parametrize(
        "bad",
        [
            '{"kind":"binary_word"}',
            '{"kind":"binary_word","n":0}',
            '{"kind":"binary_word","n":2,"extra":1}',
            '{"kind":"spiral","n":2}',
            '{"kind":"realize_set","values":[0.5]}',
            "not json",
        ],
    )
    def test_malformed_specs(self, bad):
        with pytest.raises(StructuralError):
            parse_construction_spec(bad)


@settings(max_examples=40, deadline=None)
@given(rng=st.randoms(use_true_random=False))
def test_constructed_spaces_are_ultrametric(rng):
    base = random_space(rng, max_points=12)
    assert_ultrametric(add_point(base))
    assert_ultrametric(double(base, max(distance_set(base)) * 2))
