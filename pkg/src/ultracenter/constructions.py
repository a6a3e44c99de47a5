"""
Constructors for extremal and center-preserving ultrametric spaces.
"""
import logging
import random
from fractions import Fraction
from typing import Annotated, Any, Dict, Iterable, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictInt,
    StrictStr,
    TypeAdapter,
    ValidationError,
)

from .center import center_bruteforce
from .core import (
    ZERO,
    RawDistance,
    UltrametricSpace,
    as_distance_set,
    diameter,
    distance_set,
    format_distance,
    format_distance_set,
    parse_distance,
    require_ultrametric,
)
from .errors import DomainError, InvariantBreach, ResourceError, StructuralError
from .formats import SpaceDocument
from .tree import (
    LabeledRootedTree,
    SimilarityMode,
    build_representing_tree,
    realize_space,
    subtree_codes,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_POINTS = 2**16
COPY_SUFFIXES = ("·0", "·1")


def _check_budget(points: int, max_points: int) -> None:
    if points > max_points:
        raise ResourceError(
            f"Construction needs {points} points, budget is {max_points}"
        )


def binary_word_space(n: int, max_points: int = DEFAULT_MAX_POINTS) -> UltrametricSpace:
    """
    All n-bit words, at distance 2^-m where m is the first (1-based)
    position where two words differ.

    The center is {0, 1/2^n, ..., 1/2}, so |C| = n + 1 = 1 + log2 |X|.
    """
    if n < 1:
        raise DomainError(f"Word length must be at least 1, got {n}")
    size = 2**n
    _check_budget(size, max_points)
    logger.info(f"Building binary word space on {size} points")

    # first differing position of words i and j is n - bitlen(i ^ j) + 1
    scale = [Fraction(1, 2 ** (n - k + 1)) for k in range(n + 1)]
    matrix = tuple(
        tuple(scale[(i ^ j).bit_length()] if i != j else ZERO for j in range(size))
        for i in range(size)
    )
    points = tuple(format(i, f"0{n}b") for i in range(size))
    return UltrametricSpace(points, matrix)


def double(base: UltrametricSpace, t_star: RawDistance) -> UltrametricSpace:
    """
    Two disjoint copies of base at mutual distance t_star.

    C(result) = C(base) with t_star added.

    Raises:
        DomainError: if base is not ultrametric, or unless t_star > diam(base)
    """
    require_ultrametric(base)
    t = parse_distance(t_star)
    diam = diameter(base)
    if t <= diam:
        raise DomainError(
            f"t* = {format_distance(t)} must exceed "
            f"the base diameter {format_distance(diam)}"
        )
    n = len(base)
    points = tuple(p + suffix for suffix in COPY_SUFFIXES for p in base.points)
    rows: List[Tuple[Fraction, ...]] = []
    for copy in range(2):
        for i in range(n):
            own = base.matrix[i]
            cross = (t,) * n
            rows.append(own + cross if copy == 0 else cross + own)
    return UltrametricSpace(points, tuple(rows))


def _fresh_name(taken: Iterable[str], stem: str) -> str:
    used = set(taken)
    name = stem + "*"
    while name in used:
        name += "*"
    return name


def add_point(base: UltrametricSpace) -> UltrametricSpace:
    """
    Add one point without changing the center.

    A new zero-labeled leaf is attached to the deepest internal node of the
    representing tree that already has a leaf child (ties: smallest subtree
    encoding, then node id). The new point sits at that node's label from
    its sibling leaf and copies the sibling's other distances.

    Raises:
        DomainError: if base has fewer than two points or is not ultrametric
    """
    if len(base) < 2:
        raise DomainError("add_point needs a space with at least two points")
    tree = build_representing_tree(base)
    codes = subtree_codes(tree, SimilarityMode.ISOMETRY)
    candidates = [
        v
        for v in range(len(tree))
        if any(not tree.children[c] for c in tree.children[v])
    ]
    anchor = min(candidates, key=lambda v: (-tree.depths[v], codes[v], v))
    sibling = min(
        (c for c in tree.children[anchor] if not tree.children[c]),
        key=lambda c: base.index(str(tree.points[c])),
    )
    new_name = _fresh_name(base.points, str(tree.points[sibling]))
    logger.debug(
        f"Attaching {new_name!r} under node {anchor} next to {tree.points[sibling]!r}"
    )

    new_leaf = len(tree)
    children = list(tree.children)
    children[anchor] = children[anchor] + (new_leaf,)
    extended = LabeledRootedTree(
        labels=tree.labels + (ZERO,),
        children=tuple(children) + ((),),
        points=tree.points + (new_name,),
        root=tree.root,
        point_order=base.points + (new_name,),
    )
    return realize_space(extended)


def realize_center_set(
    values: Iterable[RawDistance], max_points: int = DEFAULT_MAX_POINTS
) -> UltrametricSpace:
    """
    A space whose distance set and center both equal the given set.

    Uses the perfect binary tree of depth m = |A| - 1, every internal node
    at depth i labeled with the (m - i)-th smallest value. Leaves are named
    by their root-to-leaf bit paths.

    Raises:
        DomainError: if 0 is not in the set
        InvariantBreach: if the built space does not realize the set
    """
    target = as_distance_set(parse_distance(v) for v in values)
    if not target or target[0] != 0:
        raise DomainError(f"The set {format_distance_set(target)} must contain 0")
    m = len(target) - 1
    _check_budget(2**m, max_points)
    if m == 0:
        return UltrametricSpace(("x1",), ((ZERO,),))

    # heap layout: node v has children 2v+1 and 2v+2; depth d starts at 2^d - 1
    total = 2 ** (m + 1) - 1
    labels: List[Fraction] = []
    children: List[Tuple[int, ...]] = []
    points: List[Optional[str]] = []
    for v in range(total):
        depth = (v + 1).bit_length() - 1
        labels.append(target[m - depth])
        if depth < m:
            children.append((2 * v + 1, 2 * v + 2))
            points.append(None)
        else:
            children.append(())
            points.append(format(v - (2**m - 1), f"0{m}b"))
    space = realize_space(
        LabeledRootedTree(
            labels=tuple(labels), children=tuple(children), points=tuple(points)
        )
    )

    if distance_set(space) != target or center_bruteforce(space) != target:
        raise InvariantBreach(
            f"Construction failed to realize {format_distance_set(target)}"
        )
    return space


def extremal_space(n: int, max_points: int = DEFAULT_MAX_POINTS) -> UltrametricSpace:
    """
    An n-point space with |C| = 1 + floor(log2 n).

    The binary word space on 2^floor(log2 n) points, grown to n points by
    center-preserving point additions.
    """
    if n < 1:
        raise DomainError(f"Space size must be at least 1, got {n}")
    _check_budget(n, max_points)
    level = n.bit_length() - 1
    if level:
        space = binary_word_space(level, max_points)
    else:
        space = UltrametricSpace(("x1",), ((ZERO,),))
    for _ in range(n - 2**level):
        space = add_point(space)
    return space


def random_space(rng: random.Random, max_points: int = 64) -> UltrametricSpace:
    """
    Realize a random valid labeled tree with 2..max_points leaves.

    Labels come from a small pool of rationals so that equal labels recur
    across branches; point names are shuffled against the leaf order.
    """
    if max_points < 2:
        raise DomainError("random_space needs max_points >= 2")
    n = rng.randint(2, max_points)
    pool = sorted(
        {
            Fraction(rng.randint(1, 40), rng.choice((1, 2, 4)))
            for _ in range(rng.randint(1, 8))
        }
    )

    labels: List[Fraction] = [pool[-1]]
    children: List[List[int]] = [[]]
    stack = [(0, n)]
    while stack:
        node, count = stack.pop()
        lower = [value for value in pool if value < labels[node]]
        if not lower or count == 2:
            sizes = [1] * count
        else:
            k = rng.randint(2, min(count, 4))
            cuts = sorted(rng.sample(range(1, count), k - 1))
            sizes = [b - a for a, b in zip([0] + cuts, cuts + [count])]
        for size in sizes:
            child = len(labels)
            labels.append(rng.choice(lower) if size > 1 else ZERO)
            children.append([])
            children[node].append(child)
            if size > 1:
                stack.append((child, size))

    tree = LabeledRootedTree(
        labels=tuple(labels), children=tuple(tuple(k) for k in children)
    )
    names = [f"p{i}" for i in range(1, n + 1)]
    rng.shuffle(names)
    space = realize_space(tree, leaf_names=names)
    order = list(range(n))
    rng.shuffle(order)
    return space.subspace(order)


class BinaryWordSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["binary_word"]
    n: StrictInt = Field(ge=1)


class DoubleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["double"]
    base: SpaceDocument
    t_star: Union[StrictStr, StrictInt]


class AddPointSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["add_point"]
    base: SpaceDocument
    times: StrictInt = Field(1, ge=1)


class RealizeSetSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["realize_set"]
    values: List[Union[StrictStr, StrictInt]]


class ExtremalSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["extremal"]
    n: StrictInt = Field(ge=1)


AnyConstructionSpec = Union[
    BinaryWordSpec, DoubleSpec, AddPointSpec, RealizeSetSpec, ExtremalSpec
]
ConstructionSpec = Annotated[AnyConstructionSpec, Field(discriminator="kind")]
_spec_adapter: TypeAdapter[Any] = TypeAdapter(ConstructionSpec)


def parse_construction_spec(
    data: Union[str, bytes, Dict[str, Any]]
) -> AnyConstructionSpec:
    """Validate a construction spec given as JSON text or a dict."""
    try:
        if isinstance(data, (str, bytes)):
            return _spec_adapter.validate_json(data)
        return _spec_adapter.validate_python(data)
    except ValidationError as e:
        raise StructuralError(f"Malformed construction spec: {e}") from e


def generate(
    spec: AnyConstructionSpec, max_points: int = DEFAULT_MAX_POINTS
) -> UltrametricSpace:
    """Dispatch a parsed construction spec to its constructor."""
    logger.info(f"Generating {spec.kind} construction")
    if isinstance(spec, BinaryWordSpec):
        return binary_word_space(spec.n, max_points)
    if isinstance(spec, DoubleSpec):
        base = spec.base.to_space()
        _check_budget(2 * len(base), max_points)
        return double(base, spec.t_star)
    if isinstance(spec, AddPointSpec):
        space = require_ultrametric(spec.base.to_space())
        _check_budget(len(space) + spec.times, max_points)
        for _ in range(spec.times):
            space = add_point(space)
        return space
    if isinstance(spec, RealizeSetSpec):
        return realize_center_set(spec.values, max_points)
    return extremal_space(spec.n, max_points)
