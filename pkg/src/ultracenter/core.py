"""
Exact distances, finite spaces, and the basic metric operations on them.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import DomainError, StructuralError

logger = logging.getLogger(__name__)

DistanceValue = Fraction
DistanceSet = Tuple[Fraction, ...]
RawDistance = Union[str, int, Fraction]

ZERO = Fraction(0)

# Axiom families reported by validate_space
ZERO_DIAGONAL = "zero_diagonal"
SYMMETRY = "symmetry"
POSITIVITY = "positivity"
STRONG_TRIANGLE = "strong_triangle"


def to_fraction(value: RawDistance) -> Fraction:
    """Parse an exact rational of any sign; binary floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise StructuralError(
            f"Floating-point distance {value!r} rejected; "
            "use an exact string such as '0.25' or '1/4'"
        )
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as e:
            raise StructuralError(f"Cannot parse distance {value!r}: {e}") from e
    raise StructuralError(
        f"Unsupported distance value {value!r} of type {type(value).__name__}"
    )


def parse_distance(value: RawDistance) -> Fraction:
    """
    Parse a distance exactly.

    Accepts integers, Fractions, and strings in decimal ("0.25") or
    ratio ("1/4") form. Negative values are not distances.
    """
    result = to_fraction(value)
    if result < 0:
        raise StructuralError(f"Distance {value!r} is negative")
    return result


def format_distance(value: Fraction) -> str:
    """Render a distance as its exact canonical string ("3", "1/4")."""
    return str(value)


def as_distance_set(values: Iterable[Fraction]) -> DistanceSet:
    """Deduplicate and sort distances ascending."""
    return tuple(sorted(set(values)))


def format_distance_set(values: Iterable[Fraction]) -> str:
    """Render a distance set as "{0, 1/4, 1/2}"."""
    return "{" + ", ".join(format_distance(v) for v in values) + "}"


@dataclass(frozen=True)
class Violation:
    """A single failed rule, located by indices into the checked object."""

    rule: str
    location: Tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validating a space or a labeled tree."""

    violations: Tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def rules(self) -> List[str]:
        """Distinct rule names that failed, in first-seen order."""
        seen: List[str] = []
        for violation in self.violations:
            if violation.rule not in seen:
                seen.append(violation.rule)
        return seen


@dataclass(frozen=True)
class UltrametricSpace:
    """
    A finite point set with a full matrix of exact distances.

    Construction checks structure only (names, shape, entry parsing).
    Use validate_space to check the ultrametric axioms.
    """

    points: Tuple[str, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        points = tuple(self.points)
        if not points:
            raise StructuralError("A space needs at least one point")
        for name in points:
            if not isinstance(name, str) or not name:
                raise StructuralError(
                    f"Point identifiers must be nonempty strings, got {name!r}"
                )
        if len(set(points)) != len(points):
            raise StructuralError("Point identifiers must be distinct")

        n = len(points)
        if len(self.matrix) != n:
            raise StructuralError(f"Matrix has {len(self.matrix)} rows for {n} points")
        rows = []
        for i, row in enumerate(self.matrix):
            if len(row) != n:
                raise StructuralError(f"Row {i} has {len(row)} entries, expected {n}")
            rows.append(tuple(parse_distance(entry) for entry in row))

        object.__setattr__(self, "points", points)
        object.__setattr__(self, "matrix", tuple(rows))
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(points)})

    @classmethod
    def from_rows(
        cls, points: Sequence[str], rows: Sequence[Sequence[RawDistance]]
    ) -> "UltrametricSpace":
        """Build a space from raw rows; entries are parsed exactly."""
        return cls(tuple(points), tuple(tuple(row) for row in rows))

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point: str) -> int:
        """Position of a point in the declared order."""
        try:
            return self._index[point]
        except KeyError:
            raise DomainError(f"Point {point!r} is not in the space") from None

    def distance(self, p: str, q: str) -> Fraction:
        return self.matrix[self.index(p)][self.index(q)]

    def subspace(self, indices: Sequence[int]) -> "UltrametricSpace":
        """Restrict the space to the given point indices, keeping their order."""
        return UltrametricSpace(
            tuple(self.points[i] for i in indices),
            tuple(tuple(self.matrix[i][j] for j in indices) for i in indices),
        )

    def renamed(self, mapping: Dict[str, str]) -> "UltrametricSpace":
        """Rename points; names missing from the mapping are kept."""
        return UltrametricSpace(
            tuple(mapping.get(name, name) for name in self.points), self.matrix
        )

    def scaled(self, factor: RawDistance) -> "UltrametricSpace":
        """Multiply every distance by a positive rational factor."""
        ratio = to_fraction(factor)
        if ratio <= 0:
            raise DomainError(
                f"Scale factor must be positive, got {format_distance(ratio)}"
            )
        return UltrametricSpace(
            self.points, tuple(tuple(d * ratio for d in row) for row in self.matrix)
        )


def validate_space(
    points: Sequence[str], matrix: Sequence[Sequence[RawDistance]]
) -> ValidationReport:
    """
    Check the ultrametric axioms and list every violation.

    Args:
        points: Point identifiers in declared order
        matrix: n x n distances (strings, ints or Fractions)

    Returns:
        Report whose violations name the axiom and the offending indices

    Raises:
        StructuralError: if the matrix is not square or an entry does not parse
    """
    space = UltrametricSpace.from_rows(points, matrix)
    m = space.matrix
    n = len(space)
    violations: List[Violation] = []

    for i in range(n):
        if m[i][i] != 0:
            violations.append(
                Violation(
                    ZERO_DIAGONAL, (i,), f"d({i},{i}) = {format_distance(m[i][i])}"
                )
            )

    for i in range(n):
        for j in range(i + 1, n):
            if m[i][j] != m[j][i]:
                violations.append(
                    Violation(
                        SYMMETRY,
                        (i, j),
                        f"d({i},{j}) = {format_distance(m[i][j])} "
                        f"but d({j},{i}) = {format_distance(m[j][i])}",
                    )
                )

    for i in range(n):
        for j in range(n):
            if i == j or m[i][j] > 0:
                continue
            # asymmetric pairs are reported from both sides
            if i < j or m[i][j] != m[j][i]:
                violations.append(Violation(POSITIVITY, (i, j), f"d({i},{j}) = 0"))

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if k == i or k == j:
                    continue
                bound = max(m[i][k], m[k][j])
                if m[i][j] > bound:
                    violations.append(
                        Violation(
                            STRONG_TRIANGLE,
                            (i, j, k),
                            f"d({i},{j}) = {format_distance(m[i][j])} > "
                            f"max(d({i},{k}), d({k},{j})) = {format_distance(bound)}",
                        )
                    )

    report = ValidationReport(tuple(violations))
    if not report.valid:
        rules = ", ".join(report.rules())
        logger.info(f"Space of {n} points failed validation: {rules}")
    return report


def require_ultrametric(space: UltrametricSpace) -> UltrametricSpace:
    """Return the space unchanged, or raise DomainError carrying the report."""
    report = validate_space(space.points, space.matrix)
    if not report.valid:
        raise DomainError(
            f"Not an ultrametric space: {', '.join(report.rules())}", report=report
        )
    return space


def _indices_of(space: UltrametricSpace, subset: Iterable[str]) -> List[int]:
    indices = sorted({space.index(point) for point in subset})
    if not indices:
        raise DomainError("Subset must be nonempty")
    return indices


def diameter_of_indices(space: UltrametricSpace, indices: Sequence[int]) -> Fraction:
    """Largest distance among the given point indices."""
    m = space.matrix
    best = ZERO
    for a, i in enumerate(indices):
        row = m[i]
        for j in indices[a + 1 :]:
            if row[j] > best:
                best = row[j]
    return best


def diameter(
    space: UltrametricSpace, subset: Optional[Iterable[str]] = None
) -> Fraction:
    """
    Diameter of a nonempty subset (the whole space when omitted).

    Singletons have diameter 0.
    """
    if subset is None:
        return diameter_of_indices(space, range(len(space)))
    return diameter_of_indices(space, _indices_of(space, subset))


def distance_set(
    space: UltrametricSpace, focus: Optional[str] = None
) -> DistanceSet:
    """
    D(X) without a focus, D_p(X) for focus p.

    Both are sorted, deduplicated and contain 0.
    """
    if focus is not None:
        return as_distance_set(space.matrix[space.index(focus)])
    return as_distance_set(d for row in space.matrix for d in row)


def open_ball(
    space: UltrametricSpace, center: str, radius: RawDistance
) -> Tuple[str, ...]:
    """Points strictly closer than radius to center, in declared order."""
    r = to_fraction(radius)
    if r <= 0:
        raise DomainError(f"Ball radius must be positive, got {format_distance(r)}")
    row = space.matrix[space.index(center)]
    return tuple(name for name, d in zip(space.points, row) if d < r)
