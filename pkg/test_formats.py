"""
Tests for space, partition and tree documents.
"""
import json

import pytest

from ultracenter.constructions import binary_word_space
from ultracenter.errors import DomainError, StructuralError
from ultracenter.formats import (
    load_space,
    partition_to_dot,
    partition_to_json,
    space_from_csv,
    space_from_json,
    space_to_csv,
    space_to_json,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)
from ultracenter.partition import diametrical_partition
from ultracenter.tree import build_representing_tree, canonical_form, realize_space


def test_space_json(x4):
    text = space_to_json(x4)
    assert json.loads(text) == {
        "points": ["a", "b", "c", "d"],
        "matrix": [
            ["0", "3", "1", "3"],
            ["3", "0", "3", "2"],
            ["1", "3", "0", "3"],
            ["3", "2", "3", "0"],
        ],
    }
    assert space_from_json(text) == x4


def test_decimal_strings_and_integers():
    space = space_from_json(
        '{"points": ["p", "q"], "matrix": [[0, "0.25"], ["1/4", 0]]}'
    )
    assert space.distance("p", "q") == space.distance("q", "p")


@pytest.mark.parametrize(
    "text",
    [
        '{"points": ["p", "q"], "matrix": [[0, 0.5], [0.5, 0]]}',
        '{"points": ["p", "q"], "matrix": [["0", "1"]]}',
        '{"points": ["p", "q"], "matrix": [["0", "1"], ["1", "0"]], "extra": true}',
        '{"points": ["p", "q"], "matrix": [["0", "1"], ["1", "0"]',
        '{"points": ["p", "q"], "matrix": [["0", "-1"], ["-1", "0"]]}',
    ],
)
def test_malformed_json(text):
    with pytest.raises(StructuralError):
        space_from_json(text)


def test_csv(x4):
    text = space_to_csv(x4)
    assert text.splitlines()[0] == "a,b,c,d"
    assert space_from_csv(text) == x4
    assert load_space(text) == x4
    assert load_space(space_to_json(x4)) == x4


def test_csv_errors():
    with pytest.raises(StructuralError):
        space_from_csv("")
    with pytest.raises(StructuralError):
        space_from_csv("p,q\n0,1\n")
    with pytest.raises(StructuralError):
        load_space("p,q\n0,1\n1,0\n", "yaml")


def test_partition_json(x4):
    data = json.loads(partition_to_json(diametrical_partition(x4)))
    assert data == {"separation": "3", "parts": [["a", "c"], ["b", "d"]]}


def test_partition_dot(x4):
    dot = partition_to_dot(diametrical_partition(x4), max_points=8)
    assert dot.startswith("graph diametrical {")
    assert dot.count(" -- ") == 4
    with pytest.raises(DomainError):
        partition_to_dot(diametrical_partition(binary_word_space(4)), max_points=8)


def test_tree_json(x4):
    tree = build_representing_tree(x4)
    data = json.loads(tree_to_json(tree))
    assert data["label"] == "3"
    assert data["points"] == ["a", "b", "c", "d"]
    assert [child["label"] for child in data["children"]] == ["1", "2"]
    assert data["children"][0]["children"][0] == {"label": "0", "point": "a"}

    restored = tree_from_json(tree_to_json(tree))
    assert canonical_form(restored) == canonical_form(tree)
    assert space_to_json(realize_space(restored)) == space_to_json(x4)


def test_tree_json_without_points():
    text = (
        '{"label": "2", "children": [{"label": "0"}, '
        '{"label": "1", "children": [{"label": "0"}, {"label": "0"}]}]}'
    )
    space = realize_space(tree_from_json(text))
    assert space.points == ("x1", "x2", "x3")


def test_tree_json_rejects_points_on_internal_nodes():
    text = '{"label": "1", "point": "r", "children": [{"label": "0"}, {"label": "0"}]}'
    with pytest.raises(StructuralError):
        tree_from_json(text)


def test_tree_dot(x4):
    dot = tree_to_dot(build_representing_tree(x4))
    assert 'label="3"' in dot
    assert 'label="a", shape=plaintext' in dot
    assert dot.count(" -> ") == 6
