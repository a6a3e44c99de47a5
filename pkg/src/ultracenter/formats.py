"""
File formats for spaces, partitions and trees: JSON, CSV and DOT.

All distances are written as exact strings.
"""
import csv
import io
import json
import logging
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError

from .core import UltrametricSpace, format_distance, parse_distance
from .errors import DomainError, StructuralError
from .partition import Partition
from .tree import LabeledRootedTree

logger = logging.getLogger(__name__)

DistanceText = Union[StrictStr, StrictInt]


class SpaceDocument(BaseModel):
    """{"points": [...], "matrix": [[...], ...]} with exact distance strings."""

    model_config = ConfigDict(extra="forbid")

    points: List[StrictStr]
    matrix: List[List[DistanceText]]

    def to_space(self) -> UltrametricSpace:
        return UltrametricSpace.from_rows(self.points, self.matrix)

    @classmethod
    def from_space(cls, space: UltrametricSpace) -> "SpaceDocument":
        return cls(
            points=list(space.points),
            matrix=[[format_distance(d) for d in row] for row in space.matrix],
        )


class PartitionDocument(BaseModel):
    separation: StrictStr
    parts: List[List[StrictStr]]

    @classmethod
    def from_partition(cls, partition: Partition) -> "PartitionDocument":
        return cls(
            separation=format_distance(partition.separation),
            parts=[list(part) for part in partition.parts],
        )


class TreeDocument(BaseModel):
    """Nested tree: internal {"label", "children"}, leaf {"label": "0", "point"}."""

    model_config = ConfigDict(extra="forbid")

    label: DistanceText
    children: List["TreeDocument"] = Field(default_factory=list)
    point: Optional[StrictStr] = None
    points: Optional[List[StrictStr]] = None


TreeDocument.model_rebuild()


def _validated(model: Any, data: Any) -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise StructuralError(f"Malformed {model.__name__}: {e}") from e


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise StructuralError(f"Invalid JSON: {e}") from e


def space_from_json(text: str) -> UltrametricSpace:
    """Parse space JSON; floats are refused by the document schema."""
    return _validated(SpaceDocument, _loads(text)).to_space()


def space_to_json(space: UltrametricSpace) -> str:
    return SpaceDocument.from_space(space).model_dump_json(indent=2)


def space_from_csv(text: str) -> UltrametricSpace:
    """Header row of point names, then one row of distances per point."""
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise StructuralError("Empty CSV")
    header = [name.strip() for name in rows[0]]
    body = [[cell.strip() for cell in row] for row in rows[1:]]
    return UltrametricSpace.from_rows(header, body)


def space_to_csv(space: UltrametricSpace) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(space.points)
    for row in space.matrix:
        writer.writerow([format_distance(d) for d in row])
    return buffer.getvalue()


def load_space(text: str, fmt: Optional[str] = None) -> UltrametricSpace:
    """Parse a space from JSON or CSV, sniffing the format when not given."""
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        return space_from_json(text)
    if fmt == "csv":
        return space_from_csv(text)
    raise StructuralError(f"Unknown space format {fmt!r}")


def partition_to_json(partition: Partition) -> str:
    return PartitionDocument.from_partition(partition).model_dump_json(indent=2)


def tree_to_document(tree: LabeledRootedTree) -> Dict[str, Any]:
    """Nested dict form; the root also records the original point order."""
    built: Dict[int, Dict[str, Any]] = {}
    for v in reversed(tree.preorder()):
        node: Dict[str, Any] = {"label": format_distance(tree.labels[v])}
        if tree.children[v]:
            node["children"] = [built.pop(c) for c in tree.children[v]]
        elif tree.points[v] is not None:
            node["point"] = tree.points[v]
        built[v] = node
    root = built[tree.root]
    if tree.point_order is not None:
        root["points"] = list(tree.point_order)
    return root


def tree_to_json(tree: LabeledRootedTree) -> str:
    return json.dumps(tree_to_document(tree), indent=2)


def tree_from_json(text: str) -> LabeledRootedTree:
    document = _validated(TreeDocument, _loads(text))
    labels: List[Any] = []
    children: List[List[int]] = []
    points: List[Optional[str]] = []
    stack = [(document, -1)]
    while stack:
        node, parent = stack.pop()
        v = len(labels)
        labels.append(parse_distance(node.label))
        children.append([])
        points.append(node.point)
        if parent >= 0:
            children[parent].append(v)
        if node.children and node.point is not None:
            raise StructuralError(f"Internal node {v} carries point {node.point!r}")
        stack.extend((child, v) for child in reversed(node.children))
    return LabeledRootedTree(
        labels=tuple(labels),
        children=tuple(tuple(k) for k in children),
        points=tuple(points),
        point_order=tuple(document.points) if document.points is not None else None,
    )


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tree_to_dot(tree: LabeledRootedTree) -> str:
    """Internal nodes show their labels, leaves their point names."""
    lines = ["digraph representing_tree {"]
    for v in tree.preorder():
        if tree.children[v]:
            text = format_distance(tree.labels[v])
            lines.append(f"  n{v} [label={_dot_id(text)}];")
        else:
            text = tree.points[v] or f"leaf {v}"
            lines.append(f"  n{v} [label={_dot_id(text)}, shape=plaintext];")
    for v in tree.preorder():
        for c in tree.children[v]:
            lines.append(f"  n{v} -> n{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def partition_to_dot(partition: Partition, max_points: int) -> str:
    """
    Edge list of the diametrical graph, one edge per cross-part pair.

    Raises:
        DomainError: for spaces above max_points, whose graphs are too large
    """
    n = sum(len(part) for part in partition.parts)
    if n > max_points:
        raise DomainError(
            f"DOT export is limited to {max_points} points, space has {n}"
        )
    weight = _dot_id(format_distance(partition.separation))
    lines = ["graph diametrical {"]
    for k, part in enumerate(partition.parts):
        lines.append(f"  subgraph cluster_{k} {{")
        lines.extend(f"    {_dot_id(p)};" for p in part)
        lines.append("  }")
    for a in range(len(partition.parts)):
        for b in range(a + 1, len(partition.parts)):
            for p in partition.parts[a]:
                for q in partition.parts[b]:
                    lines.append(f"  {_dot_id(p)} -- {_dot_id(q)} [label={weight}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
