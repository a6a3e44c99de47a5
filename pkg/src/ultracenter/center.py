"""
Center of distances: three independent algorithms and the bound report.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from .core import (
    ZERO,
    DistanceSet,
    UltrametricSpace,
    as_distance_set,
    diameter,
    distance_set,
    format_distance,
    format_distance_set,
)
from .errors import InvariantBreach
from .partition import diametrical_partition, partition_indices
from .tree import (
    LabeledRootedTree,
    build_representing_tree,
    leaf_paths,
    require_valid_tree,
)

logger = logging.getLogger(__name__)


def center_bound(n: int) -> int:
    """1 + floor(log2 n), the largest possible center size for n points."""
    return n.bit_length()


def center_bruteforce(space: UltrametricSpace) -> DistanceSet:
    """Intersect the per-point distance sets D_p(X) over all points p."""
    common = set(space.matrix[0])
    for row in space.matrix[1:]:
        common.intersection_update(row)
        if len(common) == 1:
            # only 0 is left
            break
    return as_distance_set(common)


def center_recursive(space: UltrametricSpace) -> DistanceSet:
    """
    Center by recursion over diametrical parts.

    C(X) = {diam X} joined with the intersection of C(X_i) over the parts
    X_i; a one-point part contributes {0}. Sibling parts with the same
    canonical encoding are isometric and are intersected once.

    Raises:
        DomainError: if the space is not ultrametric
    """
    if len(space) == 1:
        return (ZERO,)

    # unroll the recursion: parents get smaller frame ids than their parts
    seps: List[Fraction] = []
    kids: List[List[int]] = []
    stack: List[Tuple[int, List[int]]] = [(0, list(range(len(space))))]
    seps.append(ZERO)
    kids.append([])
    while stack:
        frame, indices = stack.pop()
        if len(indices) == 1:
            continue
        sep, parts = partition_indices(space, indices)
        seps[frame] = sep
        for part in parts:
            child = len(seps)
            seps.append(ZERO)
            kids.append([])
            kids[frame].append(child)
            stack.append((child, part))

    results: List[Tuple[FrozenSet[Fraction], str]] = [(frozenset(), "")] * len(seps)
    for frame in reversed(range(len(seps))):
        if not kids[frame]:
            results[frame] = (frozenset((ZERO,)), "0")
            continue
        distinct: Dict[str, FrozenSet[Fraction]] = {}
        for child in kids[frame]:
            child_center, child_code = results[child]
            distinct.setdefault(child_code, child_center)
        common = frozenset.intersection(*distinct.values())
        token = format_distance(seps[frame])
        code = token + "(" + ",".join(sorted(results[c][1] for c in kids[frame])) + ")"
        results[frame] = (common | {seps[frame]}, code)
    return as_distance_set(results[0][0])


def center_from_tree(tree: LabeledRootedTree) -> DistanceSet:
    """
    Center from a valid tree: intersect the label sets along every
    leaf-to-root path.
    """
    require_valid_tree(tree)
    if len(tree) == 1:
        return (ZERO,)
    return path_center(tree)


def path_center(tree: LabeledRootedTree) -> DistanceSet:
    """Leaf-path intersection without validating the tree first."""
    paths = iter(leaf_paths(tree).values())
    common = set(next(paths))
    for path in paths:
        common.intersection_update(path)
    return as_distance_set(common)


def center_by_algorithm(space: UltrametricSpace) -> Dict[str, DistanceSet]:
    """C(X) from each algorithm, keyed by algorithm name in a fixed order."""
    brute = center_bruteforce(space)
    if len(space) >= 2:
        from_tree = center_from_tree(build_representing_tree(space))
    else:
        from_tree = brute
    return {
        "bruteforce": brute,
        "recursive": center_recursive(space),
        "tree": from_tree,
    }


def require_agreement(results: Mapping[str, DistanceSet]) -> DistanceSet:
    """
    Return the common answer of several center computations.

    Raises:
        InvariantBreach: if any two of them disagree
    """
    answers = list(results.values())
    if any(found != answers[0] for found in answers[1:]):
        shown = " ".join(
            f"{name}={format_distance_set(found)}" for name, found in results.items()
        )
        raise InvariantBreach(f"Center algorithms disagree: {shown}")
    return answers[0]


def agreeing_center(space: UltrametricSpace) -> DistanceSet:
    """Run all three algorithms and return their common answer."""
    return require_agreement(center_by_algorithm(space))


@dataclass(frozen=True)
class CenterReport:
    """C(X), D(X), each D_p(X), and the size bounds they must satisfy."""

    center: DistanceSet
    distance_set: DistanceSet
    per_point: Dict[str, DistanceSet]
    n: int
    bound: int
    lower_floor: DistanceSet
    min_part_bound: Optional[int] = None

    @property
    def attains_bound(self) -> bool:
        return len(self.center) == self.bound


def center_report(space: UltrametricSpace) -> CenterReport:
    """
    Compute the center together with every bound diagnostic.

    Raises:
        InvariantBreach: naming the bound that failed; never caused by valid input
    """
    n = len(space)
    logger.info(f"Computing center report for {n} points")
    center = center_bruteforce(space)
    report = CenterReport(
        center=center,
        distance_set=distance_set(space),
        per_point={p: distance_set(space, p) for p in space.points},
        n=n,
        bound=center_bound(n),
        lower_floor=as_distance_set((ZERO, diameter(space))),
        min_part_bound=_min_part_bound(space) if n >= 2 else None,
    )
    _check_report(report)
    return report


def _min_part_bound(space: UltrametricSpace) -> int:
    partition = diametrical_partition(space)
    smallest = min(partition.parts, key=len)
    part_space = space.subspace([space.index(p) for p in smallest])
    return 1 + len(center_bruteforce(part_space))


def _check_report(report: CenterReport) -> None:
    center = set(report.center)
    size = len(report.center)
    if not center <= set(report.distance_set):
        raise InvariantBreach("center is not contained in the distance set")
    if report.n >= 2 and not set(report.lower_floor) <= center:
        raise InvariantBreach(
            f"lower floor {format_distance_set(report.lower_floor)} is not contained "
            f"in the center {format_distance_set(report.center)}"
        )
    if size > report.bound:
        raise InvariantBreach(
            f"|C| = {size} exceeds 1 + floor(log2 {report.n}) = {report.bound}"
        )
    if report.n < 2 ** (size - 1):
        raise InvariantBreach(f"n = {report.n} is below 2^(|C|-1) = {2 ** (size - 1)}")
    if report.min_part_bound is not None and size > report.min_part_bound:
        raise InvariantBreach(
            f"|C| = {size} exceeds 1 + |C| of a smallest diametrical part "
            f"= {report.min_part_bound}"
        )
    if len(report.distance_set) > report.n:
        raise InvariantBreach(
            f"|D| = {len(report.distance_set)} exceeds |X| = {report.n}"
        )
