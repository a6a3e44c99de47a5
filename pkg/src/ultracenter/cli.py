"""
Command-line front end: every subcommand reads one input, delegates to the
library and writes JSON, CSV, DOT or text.

Exit codes: 0 ok, 1 domain error, 2 malformed input or config, 3 internal
invariant breach.
"""
import argparse
import logging
import random
import sys
import traceback
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, TextIO

from pydantic import ValidationError

from . import __version__
from .center import (
    agreeing_center,
    center_bruteforce,
    center_by_algorithm,
    center_report,
    require_agreement,
)
from .config import EnumerationSettings, Settings, load_settings
from .constructions import add_point, generate, parse_construction_spec, random_space
from .core import (
    UltrametricSpace,
    format_distance,
    require_ultrametric,
    validate_space,
)
from .errors import ConfigError, InvariantBreach, StructuralError, UltracenterError
from .explore import (
    check_conjecture_1,
    check_conjecture_2,
    check_conjecture_3,
    enumerate_classes,
    max_center_table,
)
from .formats import (
    load_space,
    partition_to_dot,
    partition_to_json,
    space_to_csv,
    space_to_json,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
)
from .partition import diametrical_partition, is_complete_multipartite_certificate
from .reports import (
    algorithms_to_text,
    bound_table_to_dict,
    bound_table_to_text,
    center_report_to_dict,
    center_report_to_text,
    conjecture_to_dict,
    conjecture_to_text,
    dumps,
    enumeration_lines,
    enumeration_text,
    validation_to_dict,
    validation_to_text,
)
from .tree import build_representing_tree, canonical_form, realize_space, tree_levels

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _read_input(args: argparse.Namespace) -> str:
    """Read the single input source: positional file, --input, or stdin."""
    positional = getattr(args, "source", None)
    flagged = getattr(args, "input", None)
    if positional is not None and flagged is not None:
        raise StructuralError(
            "Give the input either as an argument or with --input, not both"
        )
    source = positional if positional is not None else flagged
    if source is None or source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text()
    except (OSError, UnicodeDecodeError) as e:
        raise StructuralError(f"Cannot read {source}: {e}") from e


def _write(args: argparse.Namespace, text: str) -> None:
    _write_lines(args, [text])


def _write_lines(args: argparse.Namespace, chunks: Iterable[str]) -> None:
    target = getattr(args, "output", None)
    if target is None or target == "-":
        for chunk in chunks:
            sys.stdout.write(chunk)
        sys.stdout.flush()
        return
    try:
        with open(target, "w") as handle:
            for chunk in chunks:
                handle.write(chunk)
    except OSError as e:
        raise StructuralError(f"Cannot write {target}: {e}") from e


def _load_ultrametric(args: argparse.Namespace) -> UltrametricSpace:
    space = load_space(_read_input(args), getattr(args, "input_format", None))
    return require_ultrametric(space)


def _space_output(space: UltrametricSpace, fmt: str) -> str:
    return space_to_csv(space) if fmt == "csv" else space_to_json(space) + "\n"


def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    space = load_space(_read_input(args), args.input_format)
    report = validate_space(space.points, space.matrix)
    if args.format == "json":
        _write(args, dumps(validation_to_dict(report)))
    else:
        _write(args, validation_to_text(report))
    return 0 if report.valid else 1


def cmd_center(args: argparse.Namespace, settings: Settings) -> int:
    space = _load_ultrametric(args)
    results = center_by_algorithm(space)
    require_agreement(results)
    report = center_report(space)
    if args.format == "json":
        data = center_report_to_dict(report)
        data["algorithms"] = {
            name: [format_distance(v) for v in found] for name, found in results.items()
        }
        _write(args, dumps(data))
    else:
        text = center_report_to_text(report)
        text += "algorithms:\n" + algorithms_to_text(list(results.items()))
        text += "all three center algorithms agree\n"
        _write(args, text)
    return 0


def _tree_text(space: UltrametricSpace) -> str:
    tree = build_representing_tree(space)
    lines = [f"canonical form: {canonical_form(tree)}"]
    for depth, level in enumerate(tree_levels(tree)):
        cells = [
            format_distance(tree.labels[v]) if tree.children[v] else str(tree.points[v])
            for v in level
        ]
        lines.append(f"depth {depth}: {' '.join(cells)}")
    return "\n".join(lines) + "\n"


def cmd_tree(args: argparse.Namespace, settings: Settings) -> int:
    space = _load_ultrametric(args)
    fmt = "dot" if args.dot else args.format
    if fmt == "text":
        _write(args, _tree_text(space))
        return 0
    tree = build_representing_tree(space)
    _write(args, tree_to_dot(tree) if fmt == "dot" else tree_to_json(tree) + "\n")
    return 0


def cmd_partition(args: argparse.Namespace, settings: Settings) -> int:
    space = _load_ultrametric(args)
    partition = diametrical_partition(space)
    if not is_complete_multipartite_certificate(space, partition):
        raise InvariantBreach("Diametrical partition failed its own certificate")
    if args.format == "dot":
        _write(args, partition_to_dot(partition, settings.export.dot_max_points))
    elif args.format == "text":
        lines = [
            f"separation {format_distance(partition.separation)}, "
            f"{len(partition.parts)} parts"
        ]
        lines.extend(f"  {{{', '.join(part)}}}" for part in partition.parts)
        _write(args, "\n".join(lines) + "\n")
    else:
        _write(args, partition_to_json(partition) + "\n")
    return 0


def cmd_realize(args: argparse.Namespace, settings: Settings) -> int:
    tree = tree_from_json(_read_input(args))
    _write(args, _space_output(realize_space(tree), args.format))
    return 0


def cmd_generate(args: argparse.Namespace, settings: Settings) -> int:
    if args.spec is not None and args.input is not None:
        raise StructuralError(
            "Give the construction spec either as an argument or with --input, not both"
        )
    text = args.spec if args.spec is not None else _read_input(args)
    spec = parse_construction_spec(text)
    space = generate(spec, settings.constructions.max_points)
    _write(args, _space_output(space, args.format))
    return 0


def cmd_bound_check(args: argparse.Namespace, settings: Settings) -> int:
    table = max_center_table(
        args.n_max, settings.enumeration.cap, settings.enumeration.workers
    )
    if args.format == "json":
        _write(args, dumps(bound_table_to_dict(table)))
    else:
        _write(args, bound_table_to_text(table))
    return 0


def cmd_enumerate(args: argparse.Namespace, settings: Settings) -> int:
    classes = enumerate_classes(
        args.n, settings.enumeration.cap, settings.enumeration.workers
    )
    if args.format == "text":
        lines = enumeration_text(classes)
    else:
        lines = enumeration_lines(classes)
    _write_lines(args, (line + "\n" for line in lines))
    return 0


def cmd_conjecture(args: argparse.Namespace, settings: Settings) -> int:
    cap = settings.enumeration.cap
    workers = settings.enumeration.workers
    if args.id == 1:
        report = check_conjecture_1(args.level, cap, workers)
    elif args.id == 2:
        report = check_conjecture_2(args.level, args.alphabet, cap, workers)
    else:
        if not args.values:
            raise StructuralError("Conjecture 3 needs --values, e.g. --values 0,2,3")
        values = [v.strip() for v in args.values.split(",") if v.strip()]
        report = check_conjecture_3(values, settings.constructions.max_points)
    if args.format == "json":
        _write(args, dumps(conjecture_to_dict(report)))
    else:
        _write(args, conjecture_to_text(report))
    return 0


def run_selfcheck(seed: int, count: int, max_points: int) -> int:
    """
    Randomized property run over realized random trees.

    Every space is checked for agreement of the three center algorithms,
    the center report bounds, the partition certificate, and center
    preservation under add_point.

    Returns:
        Number of spaces checked

    Raises:
        InvariantBreach: on the first failed property
    """
    rng = random.Random(seed)
    for k in range(count):
        space = random_space(rng, max_points)
        center = agreeing_center(space)
        center_report(space)
        partition = diametrical_partition(space)
        if not is_complete_multipartite_certificate(space, partition):
            raise InvariantBreach(
                f"Space {k} (seed {seed}) failed the partition certificate"
            )
        grown = add_point(space)
        if len(grown) != len(space) + 1 or center_bruteforce(grown) != center:
            raise InvariantBreach(
                f"Space {k} (seed {seed}) lost its center under add_point"
            )
        logger.debug(f"selfcheck space {k}: {len(space)} points, |C| = {len(center)}")
    return count


def cmd_selfcheck(args: argparse.Namespace, settings: Settings) -> int:
    checked = run_selfcheck(args.seed, args.count, args.max_points)
    _write(args, f"selfcheck seed {args.seed}: {checked} spaces, all properties hold\n")
    return 0


def _add_io(
    parser: argparse.ArgumentParser,
    formats: List[str],
    default: str,
    source: bool = True,
) -> None:
    if source:
        parser.add_argument("source", nargs="?", help="Input file ('-' for stdin)")
        parser.add_argument("--input", "-i", help="Input file ('-' for stdin)")
    parser.add_argument("--output", "-o", help="Output file (default stdout)")
    parser.add_argument(
        "--format", "-f", choices=formats, default=default, help="Output format"
    )


def _add_space_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--input-format",
        choices=["json", "csv"],
        help="Space file format (sniffed when omitted)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ultracenter",
        description="Centers of distances of finite ultrametric spaces",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument("--config", type=Path, help="Config file (default: searched)")
    parser.add_argument(
        "--verbose", "-v", action="store_true", help="Debug logging on stderr"
    )
    parser.add_argument("--cap", type=int, help="Largest n for enumeration")
    parser.add_argument("--workers", type=int, help="Enumeration worker processes")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    validate_parser = subparsers.add_parser(
        "validate", help="Check the ultrametric axioms"
    )
    _add_io(validate_parser, ["text", "json"], "text")
    _add_space_input(validate_parser)
    validate_parser.set_defaults(handler=cmd_validate)

    center_parser = subparsers.add_parser(
        "center", help="Center of distances with all diagnostics"
    )
    _add_io(center_parser, ["text", "json"], "text")
    _add_space_input(center_parser)
    center_parser.set_defaults(handler=cmd_center)

    tree_parser = subparsers.add_parser("tree", help="Representing tree")
    _add_io(tree_parser, ["json", "dot", "text"], "json")
    _add_space_input(tree_parser)
    tree_parser.add_argument("--dot", action="store_true", help="Same as --format dot")
    tree_parser.set_defaults(handler=cmd_tree)

    partition_parser = subparsers.add_parser("partition", help="Diametrical partition")
    _add_io(partition_parser, ["json", "dot", "text"], "json")
    _add_space_input(partition_parser)
    partition_parser.set_defaults(handler=cmd_partition)

    realize_parser = subparsers.add_parser(
        "realize", help="Space realized by a labeled tree JSON"
    )
    _add_io(realize_parser, ["json", "csv"], "json")
    realize_parser.set_defaults(handler=cmd_realize)

    generate_parser = subparsers.add_parser(
        "generate", help="Build a space from a construction spec"
    )
    generate_parser.add_argument("spec", nargs="?", help="Construction spec JSON text")
    generate_parser.add_argument(
        "--input",
        "-i",
        help="Read the construction spec from a file ('-' for stdin)",
    )
    _add_io(generate_parser, ["json", "csv"], "json", source=False)
    generate_parser.set_defaults(handler=cmd_generate)

    bound_parser = subparsers.add_parser("bound-check", help="Exhaustive max |C| table")
    bound_parser.add_argument("n_max", type=int)
    _add_io(bound_parser, ["text", "json"], "text", source=False)
    bound_parser.set_defaults(handler=cmd_bound_check)

    enumerate_parser = subparsers.add_parser(
        "enumerate", help="Weak-similarity classes as JSON lines"
    )
    enumerate_parser.add_argument("n", type=int)
    _add_io(enumerate_parser, ["json", "text"], "json", source=False)
    enumerate_parser.set_defaults(handler=cmd_enumerate)

    conjecture_parser = subparsers.add_parser(
        "conjecture", help="Search for conjecture counterexamples"
    )
    conjecture_parser.add_argument("id", type=int, choices=[1, 2, 3])
    conjecture_parser.add_argument("--l", "--level", dest="level", type=int, default=2)
    conjecture_parser.add_argument("--alphabet", type=int, default=4)
    conjecture_parser.add_argument(
        "--values", help="Comma-separated set A for conjecture 3"
    )
    _add_io(conjecture_parser, ["text", "json"], "text", source=False)
    conjecture_parser.set_defaults(handler=cmd_conjecture)

    selfcheck_parser = subparsers.add_parser(
        "selfcheck", help="Randomized property run"
    )
    selfcheck_parser.add_argument("--seed", type=int, default=0)
    selfcheck_parser.add_argument("--count", type=int, default=100)
    selfcheck_parser.add_argument("--max-points", type=int, default=64)
    _add_io(selfcheck_parser, ["text"], "text", source=False)
    selfcheck_parser.set_defaults(handler=cmd_selfcheck)

    return parser


def _resolve_settings(args: argparse.Namespace) -> Settings:
    settings = load_settings(args.config)
    overrides: Dict[str, int] = {}
    if args.cap is not None:
        overrides["cap"] = args.cap
    if args.workers is not None:
        overrides["workers"] = args.workers
    if not overrides:
        return settings
    try:
        merged = {**settings.enumeration.model_dump(), **overrides}
        enumeration = EnumerationSettings.model_validate(merged)
    except ValidationError as e:
        raise ConfigError(f"Invalid command-line override: {e}") from e
    return settings.model_copy(update={"enumeration": enumeration})


def _report_error(error: UltracenterError, stream: TextIO) -> None:
    print(f"Error: {error}", file=stream)
    report = getattr(error, "report", None)
    if report is not None and hasattr(report, "violations"):
        for violation in report.violations:
            print(
                f"  {violation.rule} at {violation.location}: {violation.detail}",
                file=stream,
            )
    if isinstance(error, InvariantBreach):
        print(
            "Internal invariant breach; please report this with the dump below.",
            file=stream,
        )
        traceback.print_exception(type(error), error, error.__traceback__, file=stream)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return 2

    try:
        settings = _resolve_settings(args)
    except UltracenterError as e:
        _report_error(e, sys.stderr)
        return e.exit_code

    if args.verbose:
        level = logging.DEBUG
    else:
        level = getattr(logging, settings.logging.level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)

    handler: Callable[[argparse.Namespace, Settings], int] = args.handler
    try:
        return handler(args, settings)
    except UltracenterError as e:
        _report_error(e, sys.stderr)
        return e.exit_code
