"""
Labeled rooted trees and representing trees of finite ultrametric spaces.

Trees are index based: node v has a label, a tuple of child ids and, for
leaves, an optional point name. All traversals are iterative.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    ZERO,
    DistanceSet,
    RawDistance,
    UltrametricSpace,
    ValidationReport,
    Violation,
    as_distance_set,
    format_distance,
    parse_distance,
    require_ultrametric,
)
from .errors import DomainError, InvariantBreach, StructuralError
from .partition import partition_indices

logger = logging.getLogger(__name__)

# Clauses of the realizability condition checked by validate_tree
OUT_DEGREE_ONE = "out_degree_one"
LEAF_IFF_ZERO = "leaf_iff_zero_label"
STRICT_DECREASE = "strict_decrease"


class SimilarityMode(str, Enum):
    """How tree labels are compared."""

    ISOMETRY = "isometry"
    WEAK_SIMILARITY = "weak_similarity"


@dataclass(frozen=True)
class LabeledRootedTree:
    """
    A rooted tree with a distance label on every vertex.

    Construction checks that the children lists describe a tree rooted at
    `root`; it does not check the labels (see validate_tree).
    """

    labels: Tuple[Fraction, ...]
    children: Tuple[Tuple[int, ...], ...]
    points: Tuple[Optional[str], ...] = ()
    root: int = 0
    point_order: Optional[Tuple[str, ...]] = None
    parents: Tuple[int, ...] = field(init=False, default=(), compare=False, repr=False)
    depths: Tuple[int, ...] = field(init=False, default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0:
            raise StructuralError("A tree needs at least one vertex")
        labels = tuple(parse_distance(label) for label in self.labels)
        children = tuple(tuple(kids) for kids in self.children)
        points = tuple(self.points) if self.points else (None,) * n
        if len(children) != n or len(points) != n:
            raise StructuralError(
                f"Tree arrays disagree: {n} labels, {len(children)} child lists, "
                f"{len(points)} point slots"
            )
        if not 0 <= self.root < n:
            raise StructuralError(f"Root {self.root} is not a vertex")

        parents = [-2] * n
        parents[self.root] = -1
        for v, kids in enumerate(children):
            for c in kids:
                if not 0 <= c < n:
                    raise StructuralError(f"Vertex {v} lists unknown child {c}")
                if c == self.root:
                    raise StructuralError(f"Root {c} listed as a child of {v}: cycle")
                if parents[c] != -2:
                    raise StructuralError(f"Vertex {c} has more than one parent")
                parents[c] = v

        depths = [-1] * n
        depths[self.root] = 0
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for c in children[v]:
                depths[c] = depths[v] + 1
                queue.append(c)
        unreachable = [v for v in range(n) if depths[v] < 0]
        if unreachable:
            raise StructuralError(
                f"Vertices {unreachable} are not reachable from the root"
            )

        names = [p for p in points if p is not None]
        if len(set(names)) != len(names):
            raise StructuralError("Leaf point names must be distinct")
        for v, name in enumerate(points):
            if name is not None and children[v]:
                raise StructuralError(f"Internal vertex {v} carries point {name!r}")
        point_order = tuple(self.point_order) if self.point_order is not None else None

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "point_order", point_order)
        object.__setattr__(self, "parents", tuple(parents))
        object.__setattr__(self, "depths", tuple(depths))

    @classmethod
    def from_parents(
        cls,
        labels: Sequence[RawDistance],
        parents: Sequence[Optional[int]],
        points: Optional[Sequence[Optional[str]]] = None,
    ) -> "LabeledRootedTree":
        """Build a tree from a parent array; exactly one entry must be None."""
        roots = [v for v, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise StructuralError(f"Expected exactly one root, found {len(roots)}")
        kids: List[List[int]] = [[] for _ in parents]
        for v, p in enumerate(parents):
            if p is not None:
                if not 0 <= p < len(parents):
                    raise StructuralError(f"Vertex {v} has unknown parent {p}")
                kids[p].append(v)
        return cls(
            labels=tuple(parse_distance(label) for label in labels),
            children=tuple(tuple(k) for k in kids),
            points=tuple(points) if points is not None else (),
            root=roots[0],
        )

    def __len__(self) -> int:
        return len(self.labels)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def preorder(self) -> List[int]:
        """Vertices in depth-first preorder, children in stored order."""
        order: List[int] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return order

    def leaves(self) -> List[int]:
        return [v for v in self.preorder() if not self.children[v]]

    def members(self, v: int) -> Tuple[str, ...]:
        """Point names of the leaves below v (unnamed leaves are skipped)."""
        found: List[str] = []
        stack = [v]
        while stack:
            u = stack.pop()
            if not self.children[u]:
                name = self.points[u]
                if name is not None:
                    found.append(name)
            stack.extend(reversed(self.children[u]))
        return tuple(found)

    def relabeled(self, labels: Sequence[Fraction]) -> "LabeledRootedTree":
        """Same shape and points with new labels."""
        return LabeledRootedTree(
            labels=tuple(labels),
            children=self.children,
            points=self.points,
            root=self.root,
            point_order=self.point_order,
        )


@dataclass(frozen=True)
class RepresentingTree(LabeledRootedTree):
    """
    Tree produced by build_representing_tree.

    Every leaf carries its point; `members_by_node[v]` is the point subset v
    stands for.
    """

    members_by_node: Tuple[Tuple[str, ...], ...] = field(
        init=False, default=(), compare=False, repr=False
    )

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(
            self, "members_by_node", tuple(self.members(v) for v in range(len(self)))
        )


@dataclass(frozen=True)
class SimilarityWitness:
    """
    A verified isometry or weak similarity from X onto Y.

    `scale_map` lists pairs (d-value in X, matching value in Y); read as a
    function from the second coordinate to the first it is the strictly
    increasing rescaling f with d(x, y) = f(rho(phi(x), phi(y))).
    """

    point_bijection: Dict[str, str]
    scale_map: Tuple[Tuple[Fraction, Fraction], ...]
    mode: SimilarityMode


def validate_tree(candidate: LabeledRootedTree) -> ValidationReport:
    """
    Check the realizability condition on a labeled rooted tree.

    The three clauses: no vertex has exactly one child; a vertex is a leaf
    iff its label is 0; every child label is strictly below its parent's.

    Raises:
        DomainError: if the tree has fewer than three vertices
    """
    if len(candidate) < 3:
        raise DomainError(
            f"Tree validation needs at least three vertices, got {len(candidate)}"
        )

    violations: List[Violation] = []
    for v in candidate.preorder():
        kids = candidate.children[v]
        label = candidate.labels[v]
        if len(kids) == 1:
            violations.append(
                Violation(OUT_DEGREE_ONE, (v,), f"vertex {v} has exactly one child")
            )
        if not kids and label != 0:
            violations.append(
                Violation(
                    LEAF_IFF_ZERO, (v,), f"leaf {v} has label {format_distance(label)}"
                )
            )
        if kids and label == 0:
            violations.append(
                Violation(LEAF_IFF_ZERO, (v,), f"internal vertex {v} has label 0")
            )
        for c in kids:
            if candidate.labels[c] >= label:
                violations.append(
                    Violation(
                        STRICT_DECREASE,
                        (c, v),
                        f"child {c} label {format_distance(candidate.labels[c])} "
                        f"is not below parent {v} label {format_distance(label)}",
                    )
                )
    return ValidationReport(tuple(violations))


def require_valid_tree(tree: LabeledRootedTree) -> None:
    if len(tree) == 1:
        if tree.labels[tree.root] != 0:
            raise DomainError("A single-vertex tree must carry label 0")
        return
    report = validate_tree(tree)
    if not report.valid:
        rules = ", ".join(report.rules())
        raise DomainError(f"Invalid labeled tree: {rules}", report=report)


def build_representing_tree(space: UltrametricSpace) -> RepresentingTree:
    """
    Build the representing tree by recursive diametrical partitioning.

    Children are the diametrical parts in order of their smallest point
    index; parts of diameter 0 become leaves.

    Raises:
        DomainError: if the space has fewer than two points, or is not
            ultrametric
    """
    if len(space) < 2:
        raise DomainError(
            "Representing trees are defined for spaces with at least two points"
        )
    logger.info(f"Building representing tree for {len(space)} points")

    labels: List[Fraction] = [ZERO]
    children: List[List[int]] = [[]]
    points: List[Optional[str]] = [None]
    stack: List[Tuple[int, List[int]]] = [(0, list(range(len(space))))]
    while stack:
        node, indices = stack.pop()
        if len(indices) == 1:
            points[node] = space.points[indices[0]]
            continue
        sep, parts = partition_indices(space, indices)
        labels[node] = sep
        for part in parts:
            child = len(labels)
            labels.append(ZERO)
            children.append([])
            points.append(None)
            children[node].append(child)
            stack.append((child, part))

    return RepresentingTree(
        labels=tuple(labels),
        children=tuple(tuple(k) for k in children),
        points=tuple(points),
        root=0,
        point_order=space.points,
    )


def label_tokens(labels: Sequence[Fraction], mode: SimilarityMode) -> List[str]:
    """Per-vertex label tokens: exact values, or ranks within the label set."""
    if mode == SimilarityMode.WEAK_SIMILARITY:
        rank = {value: i for i, value in enumerate(sorted(set(labels)))}
        return [str(rank[value]) for value in labels]
    return [format_distance(value) for value in labels]


def encode_subtrees(
    tokens: Sequence[str], children: Sequence[Sequence[int]], order: Sequence[int]
) -> List[str]:
    """
    Canonical code of every subtree.

    `order` must list parents before children; codes are filled in reverse
    so children are done first. A leaf's code is its token; an internal
    vertex's code is its token followed by its children's codes, sorted,
    in parentheses.
    """
    codes = [""] * len(tokens)
    for v in reversed(order):
        kids = children[v]
        if kids:
            codes[v] = tokens[v] + "(" + ",".join(sorted(codes[c] for c in kids)) + ")"
        else:
            codes[v] = tokens[v]
    return codes


def subtree_codes(tree: LabeledRootedTree, mode: SimilarityMode) -> List[str]:
    tokens = label_tokens(tree.labels, mode)
    return encode_subtrees(tokens, tree.children, tree.preorder())


def canonical_form(
    tree: LabeledRootedTree, mode: SimilarityMode = SimilarityMode.ISOMETRY
) -> str:
    """
    Encoding that is equal for two trees iff they are isomorphic.

    Child order and point names do not affect the encoding. In weak
    similarity mode labels are replaced by their rank first.

    Raises:
        DomainError: if the tree fails validate_tree
    """
    require_valid_tree(tree)
    return subtree_codes(tree, SimilarityMode(mode))[tree.root]


def leaf_paths(tree: LabeledRootedTree) -> Dict[int, DistanceSet]:
    """Label set along the path from each leaf to the root, leaf label included."""
    found: Dict[int, DistanceSet] = {}
    stack: List[Tuple[int, Tuple[Fraction, ...]]] = [(tree.root, ())]
    while stack:
        v, above = stack.pop()
        path = above + (tree.labels[v],)
        if not tree.children[v]:
            found[v] = as_distance_set(path)
        for c in tree.children[v]:
            stack.append((c, path))
    return found


def tree_levels(tree: LabeledRootedTree) -> List[List[int]]:
    """Vertices grouped by depth, root level first."""
    levels: List[List[int]] = [[] for _ in range(max(tree.depths) + 1)]
    for v in tree.preorder():
        levels[tree.depths[v]].append(v)
    return levels


def _canonical_preorder(tree: LabeledRootedTree) -> List[int]:
    """Preorder visiting children sorted by their isometry code."""
    codes = subtree_codes(tree, SimilarityMode.ISOMETRY)
    order: List[int] = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(sorted(tree.children[v], key=lambda c: codes[c], reverse=True))
    return order


def realize_space(
    tree: LabeledRootedTree, leaf_names: Optional[Sequence[str]] = None
) -> UltrametricSpace:
    """
    Realize a valid labeled tree as an ultrametric space, one point per leaf.

    The distance of two leaves is the largest label on the path joining
    them, which is the label of their deepest common ancestor.

    Args:
        tree: Tree passing validate_tree (a lone zero-labeled vertex gives a
            one-point space)
        leaf_names: Names for the leaves in stored preorder; by default the
            tree's own leaf points, or x1, x2, ... in canonical child order

    Raises:
        DomainError: if the tree is invalid, carrying the validation report
    """
    require_valid_tree(tree)

    if leaf_names is not None:
        leaves = tree.leaves()
        if len(leaf_names) != len(leaves):
            raise DomainError(
                f"{len(leaf_names)} leaf names given for {len(leaves)} leaves"
            )
        names = dict(zip(leaves, leaf_names))
    elif all(tree.points[v] is not None for v in tree.leaves()):
        leaves = tree.leaves()
        names = {v: str(tree.points[v]) for v in leaves}
    else:
        leaves = [v for v in _canonical_preorder(tree) if not tree.children[v]]
        names = {v: f"x{i + 1}" for i, v in enumerate(leaves)}

    order = [names[v] for v in leaves]
    if tree.point_order is not None and sorted(tree.point_order) == sorted(order):
        order = list(tree.point_order)
    if len(set(order)) != len(order):
        raise DomainError("Leaf names must be distinct")
    position = {name: i for i, name in enumerate(order)}

    n = len(order)
    matrix = [[ZERO] * n for _ in range(n)]
    # leaf positions below each vertex, filled bottom-up
    below: Dict[int, List[int]] = {}
    for v in reversed(tree.preorder()):
        kids = tree.children[v]
        if not kids:
            below[v] = [position[names[v]]]
            continue
        label = tree.labels[v]
        groups = [below.pop(c) for c in kids]
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                for i in groups[a]:
                    for j in groups[b]:
                        matrix[i][j] = label
                        matrix[j][i] = label
        below[v] = [i for group in groups for i in group]

    return UltrametricSpace(tuple(order), tuple(tuple(row) for row in matrix))


def _single_point_witness(
    space_x: UltrametricSpace, space_y: UltrametricSpace, mode: SimilarityMode
) -> SimilarityWitness:
    return SimilarityWitness(
        point_bijection={space_x.points[0]: space_y.points[0]},
        scale_map=((ZERO, ZERO),),
        mode=mode,
    )


def verify_witness(
    space_x: UltrametricSpace, space_y: UltrametricSpace, witness: SimilarityWitness
) -> bool:
    """Check a witness against both distance matrices."""
    phi = witness.point_bijection
    if sorted(phi) != sorted(space_x.points):
        return False
    if sorted(phi.values()) != sorted(space_y.points):
        return False
    pairs = list(witness.scale_map)
    firsts = [a for a, _ in pairs]
    seconds = [b for _, b in pairs]
    if any(x >= y for x, y in zip(firsts, firsts[1:])):
        return False
    if any(x >= y for x, y in zip(seconds, seconds[1:])):
        return False
    f = {b: a for a, b in pairs}
    if witness.mode == SimilarityMode.ISOMETRY and any(a != b for a, b in pairs):
        return False
    for p in space_x.points:
        for q in space_x.points:
            rho = space_y.distance(phi[p], phi[q])
            if rho not in f or f[rho] != space_x.distance(p, q):
                return False
    return True


def find_similarity(
    space_x: UltrametricSpace,
    space_y: UltrametricSpace,
    mode: SimilarityMode = SimilarityMode.ISOMETRY,
) -> Optional[SimilarityWitness]:
    """
    Find an isometry or weak similarity from X onto Y.

    Representing trees are matched top-down by their canonical subtree
    codes; the leaf matching gives the point bijection and the label
    matching gives the rescaling.

    Returns:
        A witness verified against both matrices, or None when the spaces
        are not similar in the requested mode

    Raises:
        DomainError: if either space is not ultrametric
    """
    mode = SimilarityMode(mode)
    if len(space_x) != len(space_y):
        return None
    if len(space_x) == 1:
        require_ultrametric(space_x)
        require_ultrametric(space_y)
        return _single_point_witness(space_x, space_y, mode)

    tree_x = build_representing_tree(space_x)
    tree_y = build_representing_tree(space_y)
    codes_x = subtree_codes(tree_x, mode)
    codes_y = subtree_codes(tree_y, mode)
    if codes_x[tree_x.root] != codes_y[tree_y.root]:
        return None

    phi: Dict[str, str] = {}
    scale: Dict[Fraction, Fraction] = {}
    stack = [(tree_x.root, tree_y.root)]
    while stack:
        vx, vy = stack.pop()
        lx, ly = tree_x.labels[vx], tree_y.labels[vy]
        if scale.setdefault(lx, ly) != ly:
            raise InvariantBreach(f"Label {format_distance(lx)} matched to two values")
        if not tree_x.children[vx]:
            phi[str(tree_x.points[vx])] = str(tree_y.points[vy])
            continue
        kids_x = sorted(tree_x.children[vx], key=lambda c: codes_x[c])
        kids_y = sorted(tree_y.children[vy], key=lambda c: codes_y[c])
        stack.extend(zip(kids_x, kids_y))

    witness = SimilarityWitness(
        point_bijection=phi, scale_map=tuple(sorted(scale.items())), mode=mode
    )
    if not verify_witness(space_x, space_y, witness):
        raise InvariantBreach(
            "Canonical forms matched but the reconstructed witness does not verify"
        )
    return witness
