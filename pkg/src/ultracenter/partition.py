"""
Diametrical partition of a finite ultrametric space.

The diametrical graph joins two points exactly when their distance equals
the diameter. For ultrametric spaces it is complete multipartite, so the
list of its parts is stored instead of its edges.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .core import UltrametricSpace, diameter_of_indices, format_distance
from .errors import DomainError

logger = logging.getLogger(__name__)


class DisjointSet:
    """Union-find over 0..n-1 with union by height."""

    def __init__(self, size: int):
        self.parents: List[int] = list(range(size))
        self.heights: List[int] = [1] * size

    def root(self, v: int) -> int:
        while self.parents[v] != v:
            # path halving
            self.parents[v] = self.parents[self.parents[v]]
            v = self.parents[v]
        return v

    def join(self, v1: int, v2: int) -> None:
        r1 = self.root(v1)
        r2 = self.root(v2)
        if r1 == r2:
            return
        h1 = self.heights[r1]
        h2 = self.heights[r2]
        if h1 <= h2:
            self.parents[r1] = r2
            self.heights[r2] = max(h2, h1 + 1)
        else:
            self.parents[r2] = r1
            self.heights[r1] = max(h1, h2 + 1)

    def groups(self) -> List[List[int]]:
        """Classes ordered by their smallest member, members ascending."""
        by_root: Dict[int, List[int]] = {}
        for v in range(len(self.parents)):
            by_root.setdefault(self.root(v), []).append(v)
        return sorted(by_root.values(), key=lambda members: members[0])


@dataclass(frozen=True)
class Partition:
    """Parts of the diametrical graph, ordered by smallest point index."""

    parts: Tuple[Tuple[str, ...], ...]
    separation: Fraction

    def __len__(self) -> int:
        return len(self.parts)


def partition_indices(
    space: UltrametricSpace, indices: Sequence[int]
) -> Tuple[Fraction, List[List[int]]]:
    """
    Split a subset of at least two points into its diametrical parts.

    Points are grouped by the relation d(u, v) < diam. Applied recursively
    down to singletons, the checks made here cover every ultrametric
    axiom: diagonal entries are zero, every compared pair is symmetric,
    the diameter of a subset with two or more points is positive, and the
    relation is transitive (no group holds a pair at full diameter).

    Returns:
        The subset diameter and the parts as lists of original indices

    Raises:
        DomainError: if one of those checks fails, i.e. the input is not
            an ultrametric space
    """
    m = space.matrix
    points = space.points
    size = len(indices)
    sep = diameter_of_indices(space, indices)
    if sep <= 0:
        raise DomainError(
            f"Points {points[indices[0]]!r} and {points[indices[1]]!r} "
            "are at distance 0; input is not ultrametric"
        )

    components = DisjointSet(size)
    for a in range(size):
        i = indices[a]
        row = m[i]
        if row[i] != 0:
            raise DomainError(
                f"d({points[i]!r}, {points[i]!r}) is not 0; input is not ultrametric"
            )
        for b in range(a + 1, size):
            j = indices[b]
            if row[j] != m[j][i]:
                raise DomainError(
                    f"d({points[i]!r}, {points[j]!r}) is not symmetric; "
                    "input is not ultrametric"
                )
            if row[j] < sep:
                components.join(a, b)

    parts: List[List[int]] = []
    for group in components.groups():
        part = [indices[a] for a in group]
        for x in range(len(part)):
            for y in range(x + 1, len(part)):
                if m[part[x]][part[y]] >= sep:
                    raise DomainError(
                        f"Relation d < {format_distance(sep)} is not transitive on "
                        f"{points[part[x]]!r}, {points[part[y]]!r}; "
                        "input is not ultrametric"
                    )
        parts.append(part)
    return sep, parts


def diametrical_partition(space: UltrametricSpace) -> Partition:
    """
    Compute the parts of the diametrical graph of a space with |X| >= 2.

    Raises:
        DomainError: if the space has fewer than two points, or its top
            level fails the checks of partition_indices
    """
    if len(space) < 2:
        raise DomainError("The diametrical graph needs at least two points")
    sep, parts = partition_indices(space, list(range(len(space))))
    logger.debug(
        f"Diametrical partition: {len(parts)} parts "
        f"at separation {format_distance(sep)}"
    )
    return Partition(
        parts=tuple(tuple(space.points[i] for i in part) for part in parts),
        separation=sep,
    )


def is_complete_multipartite_certificate(
    space: UltrametricSpace, partition: Union[Partition, Iterable[Iterable[str]]]
) -> bool:
    """
    Independently check that the given parts realize the diametrical graph.

    True iff every cross-part distance equals diam X and every within-part
    distance is strictly smaller.

    Raises:
        DomainError: if the parts do not cover the point set exactly once
    """
    parts = partition.parts if isinstance(partition, Partition) else partition
    groups = [tuple(part) for part in parts]
    owner: Dict[str, int] = {}
    for label, part in enumerate(groups):
        for point in part:
            space.index(point)
            if point in owner:
                raise DomainError(f"Point {point!r} appears in more than one part")
            owner[point] = label
    if len(owner) != len(space):
        missing = [p for p in space.points if p not in owner]
        raise DomainError(f"Parts do not cover the space; missing {missing}")

    diam = diameter_of_indices(space, range(len(space)))
    points = space.points
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = space.matrix[i][j]
            if owner[points[i]] == owner[points[j]]:
                if d >= diam:
                    return False
            elif d != diam:
                return False
    return True
