"""
Exhaustive enumeration of small ultrametric spaces up to weak similarity,
the maximal-center table, and search harnesses for the open conjectures
about extremal spaces.

A weak-similarity class of n-point spaces is a series-reduced rooted tree
shape with n leaves together with a labeling of its internal vertices by
ranks 1..L that strictly decreases toward the leaves and uses every rank.
"""
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .center import (
    CenterReport,
    center_bound,
    center_bruteforce,
    center_report,
    path_center,
)
from .constructions import DEFAULT_MAX_POINTS, realize_center_set
from .core import ZERO, RawDistance, UltrametricSpace, distance_set, format_distance_set
from .errors import DomainError, InvariantBreach, ResourceError
from .tree import (
    LabeledRootedTree,
    SimilarityMode,
    build_representing_tree,
    canonical_form,
    encode_subtrees,
    find_similarity,
    realize_space,
    subtree_codes,
)

logger = logging.getLogger(__name__)

DEFAULT_CAP = 9

# () is a leaf; an internal vertex is the sorted tuple of its child shapes
Shape = Tuple[Any, ...]
# (key, labels, children, center size) as produced by a worker
_RawClass = Tuple[str, Tuple[int, ...], Tuple[Tuple[int, ...], ...], int]


def _partitions(n: int, largest: int) -> Iterator[Tuple[int, ...]]:
    """Partitions of n into nonincreasing parts no larger than `largest`."""
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def tree_shapes(n: int) -> Tuple[Shape, ...]:
    """
    All unordered rooted trees with n leaves and no vertex of out-degree 1.

    Shapes are canonical nested tuples, returned in sorted order.
    """
    if n < 1:
        raise DomainError(f"Shape size must be positive, got {n}")
    if n == 1:
        return ((),)
    found = set()
    for sizes in _partitions(n, n - 1):
        counts: Dict[int, int] = defaultdict(int)
        for size in sizes:
            counts[size] += 1
        groups = [
            list(combinations_with_replacement(tree_shapes(size), count))
            for size, count in sorted(counts.items())
        ]
        for choice in product(*groups):
            found.add(tuple(sorted(shape for group in choice for shape in group)))
    return tuple(sorted(found))


def shape_arrays(shape: Shape) -> Tuple[Tuple[Tuple[int, ...], ...], List[int]]:
    """Index-based children lists (root 0) and the preorder of a shape."""
    children: List[List[int]] = [[]]
    order: List[int] = []
    stack: List[Tuple[int, Shape]] = [(0, shape)]
    while stack:
        v, sub = stack.pop()
        order.append(v)
        for _ in sub:
            c = len(children)
            children.append([])
            children[v].append(c)
        stack.extend(reversed(list(zip(children[v], sub))))
    return tuple(tuple(k) for k in children), order


def rank_labelings(
    children: Sequence[Sequence[int]], order: Sequence[int]
) -> Iterator[Tuple[int, ...]]:
    """
    Every labeling of the internal vertices onto ranks 1..L, for every L,
    strictly decreasing from parent to child. Leaves get 0.
    """
    internal = [v for v in order if children[v]]
    parent = {c: v for v in internal for c in children[v]}
    labels = [0] * len(children)
    if not internal:
        yield tuple(labels)
        return

    for top in range(1, len(internal) + 1):
        labels[internal[0]] = top
        used: Dict[int, int] = defaultdict(int)
        used[top] = 1

        def assign(position: int) -> Iterator[Tuple[int, ...]]:
            missing = top - len(used)
            remaining = len(internal) - position
            if missing > remaining:
                return
            if position == len(internal):
                yield tuple(labels)
                return
            v = internal[position]
            for rank in range(1, labels[parent[v]]):
                labels[v] = rank
                used[rank] += 1
                yield from assign(position + 1)
                used[rank] -= 1
                if not used[rank]:
                    del used[rank]

        yield from assign(1)


def _center_size(labels: Sequence[int], children: Sequence[Sequence[int]]) -> int:
    common: Optional[set] = None
    stack: List[Tuple[int, frozenset]] = [(0, frozenset((labels[0],)))]
    while stack:
        v, path = stack.pop()
        if not children[v]:
            common = set(path) if common is None else common & path
            continue
        for c in children[v]:
            stack.append((c, path | {labels[c]}))
    return len(common or ())


def _classes_for_shape(shape: Shape) -> List[_RawClass]:
    children, order = shape_arrays(shape)
    seen: Dict[str, _RawClass] = {}
    for labels in rank_labelings(children, order):
        key = encode_subtrees([str(label) for label in labels], children, order)[0]
        if key not in seen:
            seen[key] = (key, labels, children, _center_size(labels, children))
    return list(seen.values())


@dataclass(frozen=True)
class EnumerationClass:
    """One weak-similarity class; `key` is its weak-similarity canonical form."""

    key: str
    canonical_tree: LabeledRootedTree
    n: int
    center_size: int

    def realize(self) -> UltrametricSpace:
        """The integer-rank realization of the class."""
        return realize_space(self.canonical_tree)


def _check_cap(n: int, cap: int) -> None:
    if n < 1:
        raise DomainError(f"Enumeration size must be positive, got {n}")
    if n > cap:
        raise ResourceError(f"Enumeration of {n}-point spaces exceeds the cap of {cap}")


def enumerate_classes(
    n: int, cap: int = DEFAULT_CAP, workers: int = 1
) -> Iterator[EnumerationClass]:
    """
    Yield one representative per weak-similarity class of n-point spaces.

    Shapes are split across `workers` processes; results are merged and
    sorted by key, so the output does not depend on the worker count.

    Raises:
        ResourceError: if n exceeds the cap
    """
    _check_cap(n, cap)
    if n == 1:
        yield EnumerationClass(
            key="0",
            canonical_tree=LabeledRootedTree(labels=(ZERO,), children=((),)),
            n=1,
            center_size=1,
        )
        return

    shapes = tree_shapes(n)
    logger.info(
        f"Enumerating {len(shapes)} tree shapes with {n} leaves "
        f"on {workers} worker(s)"
    )
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(shapes) // (4 * workers))
            batches = list(pool.map(_classes_for_shape, shapes, chunksize=chunk))
    else:
        batches = [_classes_for_shape(shape) for shape in shapes]

    raw = sorted(
        (item for batch in batches for item in batch), key=lambda item: item[0]
    )
    logger.info(f"Found {len(raw)} classes of {n}-point spaces")
    for key, labels, children, size in raw:
        yield EnumerationClass(
            key=key,
            canonical_tree=LabeledRootedTree(
                labels=tuple(Fraction(label) for label in labels), children=children
            ),
            n=n,
            center_size=size,
        )


def verify_class(cls: EnumerationClass) -> bool:
    """Realize the class and check its key and center size by brute force."""
    space = cls.realize()
    if len(space) != cls.n or len(center_bruteforce(space)) != cls.center_size:
        return False
    if cls.n == 1:
        return cls.key == "0"
    tree = build_representing_tree(space)
    return canonical_form(tree, SimilarityMode.WEAK_SIMILARITY) == cls.key


@dataclass(frozen=True)
class BoundRow:
    n: int
    max_center_size: int
    formula_value: int
    class_count: int


@dataclass(frozen=True)
class BoundTable:
    """Largest center size over all n-point spaces, next to 1 + floor(log2 n)."""

    rows: Tuple[BoundRow, ...]

    def max_sizes(self) -> List[int]:
        return [row.max_center_size for row in self.rows]


def max_center_table(
    n_max: int, cap: int = DEFAULT_CAP, workers: int = 1
) -> BoundTable:
    """
    Exhaustively compute max |C| for every n from 1 to n_max.

    Raises:
        ResourceError: if n_max exceeds the cap
        InvariantBreach: if a row misses the formula or the column decreases
    """
    _check_cap(n_max, cap)
    rows: List[BoundRow] = []
    for n in range(1, n_max + 1):
        count = 0
        best = 0
        for cls in enumerate_classes(n, cap, workers):
            count += 1
            best = max(best, cls.center_size)
        row = BoundRow(
            n=n, max_center_size=best, formula_value=center_bound(n), class_count=count
        )
        if row.max_center_size != row.formula_value:
            raise InvariantBreach(
                f"M({n}) = {row.max_center_size} "
                f"but 1 + floor(log2 {n}) = {row.formula_value}"
            )
        if rows and row.max_center_size < rows[-1].max_center_size:
            raise InvariantBreach(f"M({n}) = {row.max_center_size} is below M({n - 1})")
        rows.append(row)
        logger.info(f"M({n}) = {best} over {count} classes")
    return BoundTable(tuple(rows))


class Verdict(str, Enum):
    NO_COUNTEREXAMPLE = "no-counterexample"
    COUNTEREXAMPLE = "counterexample"
    WITNESS_VERIFIED = "witness-verified"


@dataclass(frozen=True)
class Counterexample:
    """Two spaces refuting a conjecture, with everything needed to recheck them."""

    first: UltrametricSpace
    second: UltrametricSpace
    first_report: CenterReport
    second_report: CenterReport
    reason: str


@dataclass(frozen=True)
class ConjectureReport:
    conjecture: int
    scope: Dict[str, Any]
    verdict: Verdict
    exhaustive: bool
    pairs_checked: int = 0
    counterexample: Optional[Counterexample] = None
    witness: Optional[UltrametricSpace] = None
    notes: Tuple[str, ...] = field(default=())


def _extremal_size(level: int, cap: int) -> int:
    if level < 1:
        raise DomainError(f"Level must be at least 1, got {level}")
    n = 2**level
    _check_cap(n, cap)
    return n


def check_conjecture_1(
    level: int, cap: int = DEFAULT_CAP, workers: int = 1
) -> ConjectureReport:
    """
    Among 2^level-point spaces where X attains |C| = level + 1, test
    |C(Y)| = |C(X)| if and only if X and Y are weakly similar.

    Every ordered pair (X extremal, Y any class) is tested; the first
    failing pair, if any, is re-verified by brute force and returned.
    """
    n = _extremal_size(level, cap)
    logger.info(f"Checking the weak-similarity conjecture on {n}-point spaces")
    classes = list(enumerate_classes(n, cap, workers))
    extremal = [cls for cls in classes if cls.center_size == level + 1]
    scope = {"level": level, "n": n, "classes": len(classes), "extremal": len(extremal)}

    pairs = 0
    for x in extremal:
        for y in classes:
            pairs += 1
            same_size = x.center_size == y.center_size
            similar = x.key == y.key
            if same_size != similar:
                return ConjectureReport(
                    conjecture=1,
                    scope=scope,
                    verdict=Verdict.COUNTEREXAMPLE,
                    exhaustive=False,
                    pairs_checked=pairs,
                    counterexample=_reverified_pair(
                        x.realize(),
                        y.realize(),
                        same_size,
                        similar,
                        SimilarityMode.WEAK_SIMILARITY,
                    ),
                )
    return ConjectureReport(
        conjecture=1,
        scope=scope,
        verdict=Verdict.NO_COUNTEREXAMPLE,
        exhaustive=True,
        pairs_checked=pairs,
    )


def _reverified_pair(
    first: UltrametricSpace,
    second: UltrametricSpace,
    same_center: bool,
    similar: bool,
    mode: SimilarityMode,
) -> Counterexample:
    """Recompute both sides of the biconditional from scratch before reporting."""
    first_report = center_report(first)
    second_report = center_report(second)
    if mode == SimilarityMode.WEAK_SIMILARITY:
        recomputed_same = len(first_report.center) == len(second_report.center)
    else:
        recomputed_same = first_report.center == second_report.center
    recomputed_similar = find_similarity(first, second, mode) is not None
    if (recomputed_same, recomputed_similar) != (same_center, similar):
        raise InvariantBreach("Counterexample did not survive re-verification")
    weak = mode == SimilarityMode.WEAK_SIMILARITY
    relation = "weakly similar" if weak else "isometric"
    reason = (
        f"centers {format_distance_set(first_report.center)} "
        f"and {format_distance_set(second_report.center)}; "
        f"{'' if similar else 'not '}{relation}"
    )
    return Counterexample(first, second, first_report, second_report, reason)


def valued_realizations(
    cls: EnumerationClass, alphabet: int
) -> Iterator[LabeledRootedTree]:
    """Relabel a class tree by every increasing map of ranks into 1..alphabet."""
    top = int(max(cls.canonical_tree.labels))
    for values in combinations(range(1, alphabet + 1), top):
        lookup = (ZERO,) + tuple(Fraction(v) for v in values)
        yield cls.canonical_tree.relabeled(
            [lookup[int(label)] for label in cls.canonical_tree.labels]
        )


def check_conjecture_2(
    level: int, alphabet: int, cap: int = DEFAULT_CAP, workers: int = 1
) -> ConjectureReport:
    """
    Among concrete 2^level-point spaces attaining |C| = level + 1 with
    distances drawn from 1..alphabet, test C(X) = C(Y) if and only if X
    and Y are isometric.

    The verdict is exhaustive only within the alphabet.
    """
    if alphabet < 1:
        raise DomainError(f"Alphabet size must be positive, got {alphabet}")
    n = _extremal_size(level, cap)
    logger.info(
        f"Checking the isometry conjecture on {n}-point spaces "
        f"over alphabet {alphabet}"
    )
    extremal = [
        cls
        for cls in enumerate_classes(n, cap, workers)
        if cls.center_size == level + 1
    ]

    valued: List[Tuple[LabeledRootedTree, Tuple[Fraction, ...], str]] = []
    for cls in extremal:
        for tree in valued_realizations(cls, alphabet):
            code = subtree_codes(tree, SimilarityMode.ISOMETRY)[tree.root]
            valued.append((tree, path_center(tree), code))

    scope = {"level": level, "n": n, "alphabet": alphabet, "spaces": len(valued)}
    pairs = 0
    for i in range(len(valued)):
        for j in range(i + 1, len(valued)):
            pairs += 1
            tree_x, center_x, code_x = valued[i]
            tree_y, center_y, code_y = valued[j]
            same_center = center_x == center_y
            isometric = code_x == code_y
            if same_center != isometric:
                return ConjectureReport(
                    conjecture=2,
                    scope=scope,
                    verdict=Verdict.COUNTEREXAMPLE,
                    exhaustive=False,
                    pairs_checked=pairs,
                    counterexample=_reverified_pair(
                        realize_space(tree_x),
                        realize_space(tree_y),
                        same_center,
                        isometric,
                        SimilarityMode.ISOMETRY,
                    ),
                )
    return ConjectureReport(
        conjecture=2,
        scope=scope,
        verdict=Verdict.NO_COUNTEREXAMPLE,
        exhaustive=True,
        pairs_checked=pairs,
        notes=("exhaustive within the label alphabet only",),
    )


def check_conjecture_3(
    values: Iterable[RawDistance], max_points: int = DEFAULT_MAX_POINTS
) -> ConjectureReport:
    """
    Build a space with D(X) = C(X) = A and confirm both sets by brute force.

    Raises:
        DomainError: if 0 is not in A
    """
    space = realize_center_set(values, max_points)
    target = distance_set(space)
    if center_bruteforce(space) != target:
        raise InvariantBreach(
            f"Witness for {format_distance_set(target)} has a different center"
        )
    return ConjectureReport(
        conjecture=3,
        scope={"values": [str(v) for v in target]},
        verdict=Verdict.WITNESS_VERIFIED,
        exhaustive=False,
        witness=space,
    )
