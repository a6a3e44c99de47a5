"""
Text and JSON renderers for validation results, center reports, the
maximal-center table, conjecture reports and enumeration streams.
"""
import json
from typing import Any, Dict, Iterable, Iterator, List, Sequence

from .center import CenterReport
from .core import (
    UltrametricSpace,
    ValidationReport,
    format_distance,
    format_distance_set,
)
from .explore import BoundTable, ConjectureReport, Counterexample, EnumerationClass
from .formats import SpaceDocument, tree_to_document


def _strings(values: Iterable[Any]) -> List[str]:
    return [format_distance(v) for v in values]


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def validation_to_dict(report: ValidationReport) -> Dict[str, Any]:
    return {
        "valid": report.valid,
        "violations": [
            {"rule": v.rule, "location": list(v.location), "detail": v.detail}
            for v in report.violations
        ],
    }


def validation_to_text(report: ValidationReport) -> str:
    if report.valid:
        return "valid ultrametric space\n"
    lines = [f"{len(report.violations)} violation(s):"]
    lines.extend(f"  {v.rule} at {v.location}: {v.detail}" for v in report.violations)
    return "\n".join(lines) + "\n"


def center_report_to_dict(report: CenterReport) -> Dict[str, Any]:
    return {
        "n": report.n,
        "center": _strings(report.center),
        "distance_set": _strings(report.distance_set),
        "per_point": {p: _strings(values) for p, values in report.per_point.items()},
        "bound": report.bound,
        "attains_bound": report.attains_bound,
        "lower_floor": _strings(report.lower_floor),
        "min_part_bound": report.min_part_bound,
    }


def center_report_to_text(report: CenterReport) -> str:
    width = max((len(p) for p in report.per_point), default=1)
    lines = [
        f"C = {format_distance_set(report.center)}",
        f"D = {format_distance_set(report.distance_set)}",
        f"|X| = {report.n}, |C| = {len(report.center)}, "
        f"bound 1 + floor(log2 n) = {report.bound}"
        + (" (attained)" if report.attains_bound else ""),
    ]
    if report.min_part_bound is not None:
        lines.append(
            f"1 + |C| of a smallest diametrical part = {report.min_part_bound}"
        )
    lines.append("per-point distance sets:")
    lines.extend(
        f"  {p.ljust(width)}  {format_distance_set(values)}"
        for p, values in report.per_point.items()
    )
    return "\n".join(lines) + "\n"


def bound_table_to_dict(table: BoundTable) -> Dict[str, Any]:
    return {
        "rows": [
            {
                "n": row.n,
                "max_center_size": row.max_center_size,
                "formula_value": row.formula_value,
                "class_count": row.class_count,
            }
            for row in table.rows
        ]
    }


def bound_table_to_text(table: BoundTable) -> str:
    """Aligned columns, one row per n."""
    header = ("n", "max |C|", "1+floor(log2 n)", "classes")
    body = [
        (str(r.n), str(r.max_center_size), str(r.formula_value), str(r.class_count))
        for r in table.rows
    ]
    widths = [max(len(row[k]) for row in [header, *body]) for k in range(len(header))]
    lines = [
        "  ".join(cell.rjust(w) for cell, w in zip(row, widths))
        for row in [header, *body]
    ]
    return "\n".join(lines) + "\n"


def _space_dict(space: UltrametricSpace) -> Dict[str, Any]:
    return SpaceDocument.from_space(space).model_dump()


def _counterexample_dict(found: Counterexample) -> Dict[str, Any]:
    return {
        "reason": found.reason,
        "first": {
            "space": _space_dict(found.first),
            "report": center_report_to_dict(found.first_report),
        },
        "second": {
            "space": _space_dict(found.second),
            "report": center_report_to_dict(found.second_report),
        },
    }


def conjecture_to_dict(report: ConjectureReport) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "conjecture": report.conjecture,
        "scope": report.scope,
        "verdict": report.verdict.value,
        "exhaustive": report.exhaustive,
        "pairs_checked": report.pairs_checked,
    }
    if report.counterexample is not None:
        data["counterexample"] = _counterexample_dict(report.counterexample)
    if report.witness is not None:
        data["witness"] = _space_dict(report.witness)
    if report.notes:
        data["notes"] = list(report.notes)
    return data


def conjecture_to_text(report: ConjectureReport) -> str:
    scope = ", ".join(f"{k}={v}" for k, v in report.scope.items())
    lines = [f"conjecture {report.conjecture} ({scope}): {report.verdict.value}"]
    if report.pairs_checked:
        lines.append(f"pairs checked: {report.pairs_checked}")
    lines.append(f"exhaustive: {'yes' if report.exhaustive else 'no'}")
    lines.extend(f"note: {note}" for note in report.notes)
    if report.counterexample is not None:
        found = report.counterexample
        lines.append(f"counterexample: {found.reason}")
        lines.append(f"  X = {_dumps(_space_dict(found.first))}")
        lines.append(f"  Y = {_dumps(_space_dict(found.second))}")
    if report.witness is not None:
        lines.append(f"witness on {len(report.witness)} points:")
        lines.append(_dumps(_space_dict(report.witness)))
    return "\n".join(lines) + "\n"


def enumeration_lines(classes: Iterable[EnumerationClass]) -> Iterator[str]:
    """One compact JSON object per class."""
    for cls in classes:
        yield json.dumps(
            {
                "n": cls.n,
                "key": cls.key,
                "center_size": cls.center_size,
                "tree": tree_to_document(cls.canonical_tree),
            },
            separators=(",", ":"),
        )


def enumeration_text(classes: Iterable[EnumerationClass]) -> Iterator[str]:
    for cls in classes:
        yield f"|C| = {cls.center_size}  {cls.key}"


def algorithms_to_text(results: Sequence[Any]) -> str:
    """Lines of (algorithm name, center) pairs."""
    width = max(len(name) for name, _ in results)
    return "".join(
        f"  {name.ljust(width)}  {format_distance_set(center)}\n"
        for name, center in results
    )


def dumps(data: Any) -> str:
    return _dumps(data) + "\n"
